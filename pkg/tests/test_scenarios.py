import json

import numpy as np
import pytest

from pilotwave.errors import ConfigError
from pilotwave.scenarios import KINDS, ScenarioConfig, build_density, run_scenario

MINI_SCATTER = {
    "kind": "scatter", "name": "mini",
    "packet": {"L": 16.0, "k_x": -4.0, "x_center": 18.0, "edge_ramp": 2.0},
    "barrier": {"V0": -42.0, "epsilon": 0.125},
    "grid": {"x_min": -80.0, "x_max": 80.0, "n_points": 3201},
    "time": {"t_final": 6.0, "snapshot_every": 16},
}

MAP_ORBIT = {
    "kind": "map_orbit", "name": "orbit",
    "orbit": {"y0": 0.22, "y0_twin": 0.220001, "n": 40},
}


def test_kinds_are_stable():
    assert KINDS == ("scatter", "trajectories", "coherent", "map_orbit",
                     "pf_relax", "entropy_trace")


@pytest.mark.parametrize("mutate,path", [
    (lambda d: d.pop("packet"), "packet.L"),
    (lambda d: d["packet"].pop("L"), "packet.L"),
    (lambda d: d["packet"].__setitem__("L", "wide"), "packet.L"),
    (lambda d: d["packet"].__setitem__("L", True), "packet.L"),
    (lambda d: d["barrier"].__setitem__("epsilon", -0.1), "barrier.epsilon"),
    (lambda d: d.__setitem__("typo", 1), "typo"),
    (lambda d: d["grid"].__setitem__("n_points", 4.5), "grid.n_points"),
    (lambda d: d.__setitem__("seed", "abc"), "seed"),
    (lambda d: d.__setitem__("kind", "unknown"), "kind"),
])
def test_config_validation_reports_dotted_path(mutate, path):
    raw = json.loads(json.dumps(MINI_SCATTER))
    mutate(raw)
    with pytest.raises(ConfigError) as err:
        ScenarioConfig.from_dict(raw)
    assert str(err.value).startswith(path)


def test_config_defaults_filled():
    cfg = ScenarioConfig.from_dict(json.loads(json.dumps(MINI_SCATTER)))
    assert cfg.params["time"]["dt_safety"] == 1.0
    assert cfg.params["barrier"]["x_center"] == 0.0
    assert cfg.seed == 0


def test_from_file_rejects_bad_yaml(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("kind: [unterminated")
    with pytest.raises(ConfigError):
        ScenarioConfig.from_file(path)


def test_density_forms():
    for form in ("uniform", "cosine", "two_mode", "exp_cosine", "spike"):
        f = build_density({"form": form, "amplitude": 0.5, "amplitude2": 0.2,
                           "y0": 0.5, "K": 8})
        assert abs(f.integral() - 1.0) < 1e-8


def test_map_orbit_run_is_deterministic(tmp_path):
    cfg = ScenarioConfig.from_dict(json.loads(json.dumps(MAP_ORBIT)))
    run_scenario(cfg, tmp_path / "a")
    run_scenario(cfg, tmp_path / "b")
    for name in ("orbit.csv", "divergence.csv"):
        assert (tmp_path / "a" / "orbit" / name).read_bytes() == \
               (tmp_path / "b" / "orbit" / name).read_bytes()
    report = json.load(open(tmp_path / "a" / "orbit" / "report.json"))
    assert report["first_divergence_step"] <= 25


def test_scatter_run_outputs_and_manifest(tmp_path):
    cfg = ScenarioConfig.from_dict(json.loads(json.dumps(MINI_SCATTER)))
    manifest = run_scenario(cfg, tmp_path)
    out = tmp_path / "mini"
    names = {f["name"] for f in manifest.files}
    assert {"field.csv", "report.json"} <= names
    # manifest hashes match the files on disk
    import hashlib
    for entry in manifest.files:
        digest = hashlib.sha256((out / entry["name"]).read_bytes()).hexdigest()
        assert digest == entry["sha256"]
    report = json.load(open(out / "report.json"))
    assert abs(report["analytic_T2"] - 0.5018) < 0.001
    assert abs(report["numeric_transmitted"] - report["analytic_T2"]) < 0.05


def test_pf_relax_run(tmp_path):
    cfg = ScenarioConfig.from_dict({
        "kind": "pf_relax", "name": "relax",
        "relax": {"K": 10, "steps": 8},
        "density": {"form": "two_mode", "amplitude": 0.5, "amplitude2": 0.2},
    })
    run_scenario(cfg, tmp_path)
    rows = np.genfromtxt(tmp_path / "relax" / "relax.csv", delimiter=",",
                         names=True)
    assert len(rows) == 9
    assert rows["sup"][3] < rows["sup"][0]


def test_entropy_trace_run(tmp_path):
    cfg = ScenarioConfig.from_dict({
        "kind": "entropy_trace", "name": "ent",
        "relax": {"K": 10, "steps": 8},
        "density": {"form": "cosine", "amplitude": 0.4},
    })
    run_scenario(cfg, tmp_path)
    rows = np.genfromtxt(tmp_path / "ent" / "entropy.csv", delimiter=",",
                         names=True)
    assert np.all(np.diff(rows["S"]) >= -1e-10)
