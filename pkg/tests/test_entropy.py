import numpy as np
import pytest

from pilotwave.entropy import (entropy_trace_pf, h_theorem_rate,
                               relaxation_ode_evolve, valentini_entropy)
from pilotwave.errors import NonPositiveDensity, NotNormalized
from pilotwave.frobenius import UnitDensity

# -integral (1 + a cos 2 pi y) ln(1 + a cos 2 pi y) dy, adaptive quadrature
S_COSINE = {0.5: -0.06463813202048743, 0.3: -0.02276105622458746}


def _cosine(a, K=12):
    return UnitDensity.from_callable(lambda y: 1.0 + a * np.cos(2 * np.pi * y), K)


def test_equilibrium_entropy_is_zero():
    assert valentini_entropy(UnitDensity.uniform(12)) == 0.0


@pytest.mark.parametrize("a", [0.5, 0.3])
def test_entropy_against_quadrature_oracle(a):
    assert abs(valentini_entropy(_cosine(a)) - S_COSINE[a]) < 1e-10


def test_entropy_is_nonpositive():
    for a in (0.1, 0.4, 0.9):
        assert valentini_entropy(_cosine(a)) < 0.0


def test_entropy_requires_normalization():
    bad = UnitDensity.uniform(8)
    object.__setattr__(bad, "values", 1.5 * bad.values)
    with pytest.raises(NotNormalized):
        valentini_entropy(bad)


def test_trace_monotone_and_terminal():
    f0 = UnitDensity.from_callable(lambda y: 1.0 + 0.6 * (y - 0.5), K=10,
                                   normalize=False)
    trace = entropy_trace_pf(f0, 15)
    assert np.all(np.diff(trace.S) >= -1e-10)
    assert -1e-9 <= trace.S[-1] <= 0.0
    assert np.all(trace.dS_bound >= 0.0)


def test_ode_evolution_is_exponential_and_composes():
    f0 = _cosine(0.5)
    tau = 1.7
    one = relaxation_ode_evolve(f0, tau, 2.3)
    two = relaxation_ode_evolve(relaxation_ode_evolve(f0, tau, 1.0), tau, 1.3)
    assert np.max(np.abs(one.values - two.values)) < 1e-14
    dev = np.max(np.abs(one.values - 1.0))
    assert abs(dev - 0.5 * np.exp(-2.3 / tau)) < 1e-12


def test_h_theorem_rate_matches_entropy_derivative():
    f0 = _cosine(0.4)
    tau = 1.0
    for t in (0.0, 0.7, 2.0):
        ft = relaxation_ode_evolve(f0, tau, t)
        r = h_theorem_rate(ft, tau)
        assert r["dS_dt"] >= r["lower_bound"] >= 0.0
        dt = 1e-5
        dS = (valentini_entropy(relaxation_ode_evolve(f0, tau, t + dt))
              - valentini_entropy(ft)) / dt
        assert abs(dS - r["dS_dt"]) < 1e-3 * max(abs(r["dS_dt"]), 1e-9)


def test_h_theorem_rate_rejects_zeros_without_clip():
    f = UnitDensity.spike(0.5, K=8)
    with pytest.raises(NonPositiveDensity):
        h_theorem_rate(f, 1.0)
    clipped = h_theorem_rate(f, 1.0, clip_zero=True)
    assert clipped["dS_dt"] >= clipped["lower_bound"] >= 0.0
