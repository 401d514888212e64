"""The ten release acceptance criteria, pinned tolerances included.

These run the frozen physics scenarios (shared through the session-scoped
`lab` fixture) and assert the numbers the package is advertised to hit.
"""
import numpy as np

from pilotwave import acceptance


def _report(result):
    return f"{result.name}: measured={result.measured}, tol={result.tolerance}"


def test_criterion_1_splitter_calibration(lab):
    r = acceptance.criterion_1(lab)
    assert abs(r.measured["T2"] - 0.5) <= 0.005, _report(r)
    assert abs(r.measured["argT_over_pi"] - 0.267) <= 0.005, _report(r)
    assert r.measured["R_minus_iT_rel"] <= 1e-3, _report(r)
    assert r.passed, _report(r)


def test_criterion_2_pde_vs_analytic(lab):
    r = acceptance.criterion_2(lab)
    for key in ("balanced", "asymmetric"):
        assert r.measured[key]["rel_err_T"] <= 0.02, _report(r)
        assert r.measured[key]["rel_err_R"] <= 0.02, _report(r)
    assert abs(r.measured["asymmetric"]["R2_analytic"] - 0.3) <= 1e-9, _report(r)
    assert r.measured["build_seconds"] <= 120.0, _report(r)
    assert r.passed, _report(r)


def test_criterion_3_ordering_and_split(lab):
    r = acceptance.criterion_3(lab)
    assert r.measured["ordering_preserved"], _report(r)
    assert r.measured["split_offset_over_L"] <= 0.02, _report(r)
    assert r.measured["n_undecided"] == 0, _report(r)
    assert r.measured["seconds"] <= 180.0, _report(r)
    assert r.passed, _report(r)


def test_criterion_4_equivariance(lab):
    r = acceptance.criterion_4(lab)
    assert r.measured["n"] == 2000, _report(r)
    assert r.measured["l1"] <= 3.0 * np.sqrt(r.measured["bins"] / 2000.0), _report(r)
    assert r.passed, _report(r)


def test_criterion_5_interval_map_conjugacy(lab):
    r = acceptance.criterion_5(lab)
    assert r.measured["decohered"]["max_residual"] <= 0.02, _report(r)
    assert r.measured["coherent"]["max_residual"] <= 0.02, _report(r)
    assert r.passed, _report(r)


def test_criterion_6_lyapunov_and_contraction(lab):
    r = acceptance.criterion_6(lab)
    assert r.measured["exponent_error"] <= 1e-12, _report(r)
    assert abs(r.measured["contraction"] - 0.5) <= 1e-10, _report(r)
    assert r.passed, _report(r)


def test_criterion_7_pf_spectrum(lab):
    r = acceptance.criterion_7(lab)
    for m, err in r.measured["max_norm_errors"].items():
        assert err <= 1e-8, f"mode {m}: {_report(r)}"
    assert r.passed, _report(r)


def test_criterion_8_relaxation_attractor(lab):
    r = acceptance.criterion_8(lab)
    for name in ("tilt", "tilt_cubic", "tilt_cosine"):
        assert r.measured[name]["worst_ratio"] <= 0.55, _report(r)
        assert r.measured[name]["sup_at_20"] < 1e-5, _report(r)
    assert r.measured["spike"]["sup_at_20"] > 1e-2, _report(r)
    assert r.passed, _report(r)


def test_criterion_9_h_theorem(lab):
    r = acceptance.criterion_9(lab)
    for name in ("tilt", "tilt_cubic", "tilt_cosine"):
        assert r.measured[name]["min_increment"] >= -1e-10, _report(r)
        assert -1e-9 <= r.measured[name]["terminal_S"] <= 0.0, _report(r)
    assert r.measured["ode_chain_ok"], _report(r)
    assert r.passed, _report(r)


def test_criterion_10_figure_reproduction(lab):
    r = acceptance.criterion_10(lab)
    lam_half = r.measured["expected_spacing"]
    assert abs(r.measured["fringe_spacing"] - lam_half) <= 0.05 * lam_half, _report(r)
    lo, hi = r.measured["branch_fits"]["low"], r.measured["branch_fits"]["high"]
    assert abs(lo[0] - 2.0) < 1e-12 and abs(lo[1]) < 1e-12, _report(r)
    assert abs(hi[0] - 2.0) < 1e-12 and abs(hi[1] + 1.0) < 1e-12, _report(r)
    assert r.measured["first_divergence_step"] <= 25, _report(r)
    assert r.measured["sup_after_3_steps"] < 0.01, _report(r)
    assert r.passed, _report(r)
