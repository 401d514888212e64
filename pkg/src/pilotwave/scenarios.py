"""Declarative scenario configs and the runner behind the CLI.

A scenario is a strict YAML tree (unknown keys rejected) describing one of
six run kinds: scatter, trajectories, coherent, map_orbit, pf_relax,
entropy_trace.  Each run writes deterministic CSV tables, standalone SVG
figures, and a JSON manifest (written last) listing every emitted file with
its content hash.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import svgplot
from .entropy import entropy_trace_pf, h_theorem_rate, relaxation_ode_evolve, valentini_entropy
from .errors import ConfigError
from .frobenius import UnitDensity, pf_apply, relaxation_distance
from .maps import SegmentSpec, coherent_step, iterate_map, lyapunov_estimate, x_to_y
from .trajectories import FateGeometry, FieldSampler, ensemble_fates, transport
from .wavefield import (BarrierSpec, WavePacketSpec, evolve_schrodinger, fringe_spacing,
                        fringe_visibility, init_packet, scattering_amplitudes, side_norms)

KINDS = ("scatter", "trajectories", "coherent", "map_orbit", "pf_relax", "entropy_trace")

_REQ = object()


def _leaf(typ, default=_REQ, check=None):
    return ("leaf", typ, default, check)


_PACKET = {
    "L": _leaf(float, check=lambda v: v > 0),
    "k_x": _leaf(float),
    "x_center": _leaf(float),
    "edge_ramp": _leaf(float, default=None),
}
_BARRIER = {
    "V0": _leaf(float),
    "epsilon": _leaf(float, check=lambda v: v > 0),
    "x_center": _leaf(float, default=0.0),
}
_GRID = {
    "x_min": _leaf(float),
    "x_max": _leaf(float),
    "n_points": _leaf(int, check=lambda v: v > 16),
}
_TIME = {
    "t_final": _leaf(float, check=lambda v: v > 0),
    "snapshot_every": _leaf(int, default=32, check=lambda v: v >= 1),
    "dt_safety": _leaf(float, default=1.0, check=lambda v: v > 0),
}
_DENSITY = {
    "form": _leaf(str, check=lambda v: v in ("uniform", "cosine", "two_mode",
                                             "exp_cosine", "spike")),
    "amplitude": _leaf(float, default=0.5),
    "amplitude2": _leaf(float, default=0.2),
    "y0": _leaf(float, default=0.5, check=lambda v: 0.0 < v < 1.0),
}

SCHEMAS = {
    "scatter": {
        "packet": _PACKET,
        "barrier": _BARRIER,
        "grid": _GRID,
        "time": _TIME,
    },
    "trajectories": {
        "packet": _PACKET,
        "barrier": _BARRIER,
        "grid": _GRID,
        "time": _TIME,
        "ensemble": {
            "n_trajectories": _leaf(int, default=200, check=lambda v: v >= 2),
            "inset_fraction": _leaf(float, default=0.02),
            "substeps": _leaf(int, default=8, check=lambda v: v >= 1),
            "n_paths": _leaf(int, default=20, check=lambda v: v >= 0),
        },
    },
    "coherent": {
        "packet": _PACKET,   # x_center is the magnitude; packets sit at +/- x_center
        "barrier": _BARRIER,
        "grid": _GRID,
        "time": _TIME,
        "ensemble": {
            "n_trajectories": _leaf(int, default=200, check=lambda v: v >= 2),
            "inset_fraction": _leaf(float, default=0.02),
            "substeps": _leaf(int, default=16, check=lambda v: v >= 1),
        },
    },
    "map_orbit": {
        "orbit": {
            "y0": _leaf(float, check=lambda v: 0.0 <= v < 1.0),
            "y0_twin": _leaf(float, default=None),
            "n": _leaf(int, check=lambda v: v >= 1),
            "map": _leaf(str, default="bernoulli",
                         check=lambda v: v in ("bernoulli", "coherent")),
        },
    },
    "pf_relax": {
        "relax": {
            "K": _leaf(int, default=12, check=lambda v: 2 <= v <= 24),
            "steps": _leaf(int, default=20, check=lambda v: v >= 1),
        },
        "density": _DENSITY,
    },
    "entropy_trace": {
        "relax": {
            "K": _leaf(int, default=12, check=lambda v: 2 <= v <= 24),
            "steps": _leaf(int, default=20, check=lambda v: v >= 1),
            "tau": _leaf(float, default=1.0 / np.log(2.0), check=lambda v: v > 0),
        },
        "density": _DENSITY,
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    name: str
    seed: int
    params: dict

    @classmethod
    def from_dict(cls, raw: dict, source: str = "<dict>") -> "ScenarioConfig":
        if not isinstance(raw, dict):
            raise ConfigError(source, "scenario must be a mapping")
        tree = dict(raw)
        kind = tree.pop("kind", None)
        if kind not in KINDS:
            raise ConfigError("kind", f"must be one of {KINDS}, got {kind!r}")
        name = tree.pop("name", None)
        if not isinstance(name, str) or not name:
            raise ConfigError("name", "required non-empty string")
        seed = tree.pop("seed", 0)
        if not isinstance(seed, int):
            raise ConfigError("seed", "must be an integer")
        params = _validate(tree, SCHEMAS[kind], "")
        return cls(kind, name, seed, params)

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        path = Path(path)
        try:
            raw = yaml.safe_load(path.read_text())
        except yaml.YAMLError as exc:
            raise ConfigError(str(path), f"not valid YAML: {exc}") from exc
        return cls.from_dict(raw, source=str(path))


def _validate(tree: dict, schema: dict, prefix: str) -> dict:
    if not isinstance(tree, dict):
        raise ConfigError(prefix or "<root>", "expected a mapping")
    out = {}
    for key in tree:
        if key not in schema:
            raise ConfigError(f"{prefix}{key}", "unknown key")
    for key, spec in schema.items():
        path = f"{prefix}{key}"
        if isinstance(spec, dict):
            out[key] = _validate(tree.get(key, {}), spec, path + ".")
            continue
        _, typ, default, check = spec
        if key not in tree:
            if default is _REQ:
                raise ConfigError(path, "required key missing")
            out[key] = default
            continue
        val = tree[key]
        if val is None and default is not _REQ:
            out[key] = default
            continue
        if isinstance(val, bool) and typ is not bool:
            raise ConfigError(path, f"expected {typ.__name__}, got bool")
        if typ is float and isinstance(val, int):
            val = float(val)
        if not isinstance(val, typ) or isinstance(val, bool):
            raise ConfigError(path, f"expected {typ.__name__}, got {type(val).__name__}")
        if check is not None and not check(val):
            raise ConfigError(path, f"value {val!r} fails validation")
        out[key] = val
    return out


@dataclass(frozen=True)
class RunManifest:
    config: dict
    version: str
    wall_time_s: float
    files: tuple


# --- output helpers ---

def _fmtval(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmtval(v) for v in row) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class _Emitter:
    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.names: list[str] = []

    def path(self, name: str) -> Path:
        self.names.append(name)
        return self.out_dir / name

    def json(self, name: str, payload: dict) -> None:
        with open(self.path(name), "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True, default=float)
            fh.write("\n")


# --- physics builders shared with the acceptance suite ---

def build_scatter(params: dict, superpose: bool = False):
    """Evolve the configured packet(s); returns (psi_final, series, barrier)."""
    p, b, g, tm = params["packet"], params["barrier"], params["grid"], params["time"]
    ramp = p["edge_ramp"]
    kwargs = {} if ramp is None else {"edge_ramp": ramp}
    spec = WavePacketSpec(L=p["L"], k_x=p["k_x"], x_center=p["x_center"], **kwargs)
    psi = init_packet(spec, g["x_min"], g["x_max"], g["n_points"])
    if superpose:
        mirror = WavePacketSpec(L=p["L"], k_x=-p["k_x"], x_center=-p["x_center"], **kwargs)
        psi_m = init_packet(mirror, g["x_min"], g["x_max"], g["n_points"])
        psi = dataclasses.replace(psi, values=(psi.values + 1j * psi_m.values) / np.sqrt(2.0))
    barrier = BarrierSpec(V0=b["V0"], epsilon=b["epsilon"], x_center=b["x_center"])
    dt = psi.dx ** 2 / 2.0 * tm["dt_safety"]
    n_steps = int(np.ceil(tm["t_final"] / dt))
    final, series = evolve_schrodinger(psi, barrier.on_grid(psi.x), dt, n_steps,
                                       snapshot_every=tm["snapshot_every"])
    return final, series, barrier


def build_density(params: dict) -> UnitDensity:
    form = params["form"]
    a, a2, y0 = params["amplitude"], params["amplitude2"], params["y0"]
    K = params.get("K", 12)
    if form == "uniform":
        return UnitDensity.uniform(K)
    if form == "cosine":
        return UnitDensity.from_callable(lambda y: 1.0 + a * np.cos(2 * np.pi * y), K)
    if form == "two_mode":
        return UnitDensity.from_callable(
            lambda y: 1.0 + a * np.cos(2 * np.pi * y) + a2 * np.sin(4 * np.pi * y), K)
    if form == "exp_cosine":
        return UnitDensity.from_callable(lambda y: np.exp(a * np.cos(2 * np.pi * y)), K)
    return UnitDensity.spike(y0, K)


def _series_table(series, max_x=201, max_t=101):
    sx = max(1, series.values.shape[1] // max_x)
    st = max(1, series.values.shape[0] // max_t)
    x = series.x[::sx]
    rows = []
    for i in range(0, series.values.shape[0], st):
        v = series.values[i, ::sx]
        t = series.times[i]
        for xx, vv in zip(x, v):
            rows.append((t, xx, vv.real, vv.imag, abs(vv) ** 2))
    return rows


# --- per-kind runners ---

def _run_scatter(cfg: ScenarioConfig, em: _Emitter) -> dict:
    final, series, barrier = build_scatter(cfg.params)
    write_csv(em.path("field.csv"), ["t", "x", "re_psi", "im_psi", "abs2"],
              _series_table(series))
    amps = scattering_amplitudes(cfg.params["packet"]["k_x"], barrier)
    going_right = cfg.params["packet"]["k_x"] > 0
    right, left = side_norms(final, barrier.x_center)
    transmitted = right if going_right else left
    reflected = left if going_right else right
    # fringes live on the incident side while the packet overlaps the barrier
    t_mid = cfg.params["packet"]["x_center"] / abs(cfg.params["packet"]["k_x"])
    psi_mid = series.psi_at(min(t_mid, series.t_end))
    lam = 2 * np.pi / abs(cfg.params["packet"]["k_x"])
    sign = -1.0 if going_right else 1.0
    window = (barrier.x_center + sign * 2 * lam,
              barrier.x_center + sign * (cfg.params["packet"]["L"] / 2.0))
    window = (min(window), max(window))
    report = {
        "analytic_T2": abs(amps.T) ** 2,
        "analytic_R2": abs(amps.R) ** 2,
        "numeric_transmitted": transmitted,
        "numeric_reflected": reflected,
        "fringe_spacing": fringe_spacing(psi_mid, *window),
        "fringe_visibility": fringe_visibility(psi_mid, *window),
        "expected_fringe_spacing": lam / 2.0,
    }
    em.json("report.json", report)
    t = series.times
    w = np.abs(series.values) ** 2
    svgplot.heatmap(em.path("density.svg"), series.x, t, w,
                    xlabel="x", ylabel="t", title="|psi(x,t)|^2")
    svgplot.line_plot(em.path("fringes.svg"),
                      [(psi_mid.x, np.abs(psi_mid.values) ** 2, "|psi|^2 at crossing")],
                      xlabel="x", ylabel="density", title="standing-wave fringes")
    return report


def _uniform_ensemble(params: dict, n: int) -> np.ndarray:
    p = params["packet"]
    inset = params["ensemble"]["inset_fraction"] * p["L"]
    lo = p["x_center"] - p["L"] / 2.0 + inset
    hi = p["x_center"] + p["L"] / 2.0 - inset
    return np.linspace(lo, hi, n)


def _run_trajectories(cfg: ScenarioConfig, em: _Emitter) -> dict:
    final, series, barrier = build_scatter(cfg.params)
    ens = cfg.params["ensemble"]
    x0s = _uniform_ensemble(cfg.params, ens["n_trajectories"])
    incident = 1.0 if cfg.params["packet"]["x_center"] > barrier.x_center else -1.0
    geometry = FateGeometry(barrier_center=barrier.x_center, incident_side=incident)
    fates = ensemble_fates(x0s, series, geometry,
                           substeps_per_interval=ens["substeps"],
                           overlap_half_width=cfg.params["packet"]["L"] / 4.0)
    write_csv(em.path("fates.csv"), ["traj_id", "x0", "fate"],
              [(i, x0, f) for i, (x0, f) in
               enumerate(zip(fates.initial_positions, fates.fates))])
    n_paths = min(ens["n_paths"], ens["n_trajectories"])
    rows = []
    if n_paths:
        subset = x0s[np.linspace(0, len(x0s) - 1, n_paths).astype(int)]
        sampler = FieldSampler(series)
        times, hist, _ = transport(sampler, subset, series.t_start, series.t_end,
                                   ens["substeps"], record=True)
        for j in range(n_paths):
            rows.extend((j, t, hist[i, j]) for i, t in enumerate(times))
        svgplot.line_plot(em.path("paths.svg"),
                          [(hist[:, j], times, "") for j in range(n_paths)],
                          xlabel="x", ylabel="t", title="pilot-wave trajectories")
    write_csv(em.path("paths.csv"), ["traj_id", "t", "x"], rows)
    report = {
        "reflected_fraction": fates.reflected_fraction,
        "split_point": fates.split_point,
        "n_undecided": int(np.sum(fates.fates == "undecided")),
    }
    em.json("report.json", report)
    return report


def _run_coherent(cfg: ScenarioConfig, em: _Emitter) -> dict:
    final, series, barrier = build_scatter(cfg.params, superpose=True)
    p = cfg.params["packet"]
    ens = cfg.params["ensemble"]
    xc, L = abs(p["x_center"]), p["L"]
    half = ens["n_trajectories"] // 2
    inset = ens["inset_fraction"] * L
    x0s = np.concatenate([
        np.linspace(-xc - L / 2 + inset, -xc + L / 2 - inset, half),
        np.linspace(xc - L / 2 + inset, xc + L / 2 - inset, half),
    ])
    sampler = FieldSampler(series)
    finals, _ = transport(sampler, x0s, series.t_start, series.t_end, ens["substeps"])
    w = np.abs(final.values) ** 2
    cdf = np.concatenate(([0.0], np.cumsum((w[1:] + w[:-1]) / 2.0 * final.dx)))
    c_final = float(np.interp(cdf[-1] / 2.0, cdf, final.x))
    seg_plus = SegmentSpec("initial", "plus", xc, L)
    seg_minus = SegmentSpec("initial", "minus", xc, L)
    seg_out = SegmentSpec("final", "plus", abs(c_final), L)
    rows = []
    for x0, xf in zip(x0s, finals):
        try:
            y_in = x_to_y(x0, seg_plus if x0 > 0 else seg_minus)
            y_out = x_to_y(xf, seg_out)
        except Exception:
            continue
        rows.append((y_in, coherent_step(y_in), y_out))
    write_csv(em.path("conjugacy.csv"), ["y_in", "y_pred", "y_out"], rows)
    arr = np.array(rows)
    gate_plus, gate_minus = side_norms(final, barrier.x_center)
    report = {
        "output_center": c_final,
        "gate_plus_norm": gate_plus,
        "gate_minus_norm": gate_minus,
        "max_conjugacy_error": float(np.max(np.abs(arr[:, 2] - arr[:, 1]))) if len(arr) else None,
    }
    em.json("report.json", report)
    svgplot.line_plot(em.path("map.svg"),
                      [(arr[:, 0], arr[:, 2], "measured"),
                       (arr[:, 0], arr[:, 1], "y/2 + 1/2")],
                      xlabel="y in", ylabel="y out", title="coherent-gate interval map")
    return report


def _run_map_orbit(cfg: ScenarioConfig, em: _Emitter) -> dict:
    o = cfg.params["orbit"]
    orbit = iterate_map(o["y0"], o["n"], o["map"])
    write_csv(em.path("orbit.csv"), ["n", "y", "branch_bit"],
              [(k, y, b) for k, (y, b) in enumerate(zip(orbit.ys, orbit.branch_bits))])
    report: dict = {"y0": o["y0"], "n": o["n"], "map": o["map"]}
    if o["y0_twin"] is not None:
        twin = iterate_map(o["y0_twin"], o["n"], o["map"])
        sep = np.abs(twin.ys - orbit.ys)
        sep = np.minimum(sep, 1.0 - sep)
        write_csv(em.path("divergence.csv"), ["n", "separation"],
                  list(enumerate(sep)))
        diverged = np.nonzero(sep > 0.1)[0]
        report["first_divergence_step"] = int(diverged[0]) if len(diverged) else None
        delta0 = abs(o["y0_twin"] - o["y0"])
        n_lin = min(o["n"], max(1, int(np.log2(0.09 / delta0))))
        try:
            report["lyapunov"] = lyapunov_estimate(o["y0"], delta0, n_lin, o["map"],
                                                   step_delay=1.0)
        except Exception as exc:  # saturation is informative, not fatal
            report["lyapunov"] = {"error": str(exc)}
        svgplot.line_plot(em.path("divergence.svg"),
                          [(np.arange(len(sep)), np.maximum(sep, 1e-18), "separation")],
                          xlabel="step", ylabel="|dy|", title="orbit divergence",
                          logy=True)
    svgplot.line_plot(em.path("orbit.svg"),
                      [(np.arange(len(orbit.ys)), orbit.ys, "y_n")],
                      xlabel="step", ylabel="y", title=f"{o['map']} orbit")
    em.json("report.json", report)
    return report


def _run_pf_relax(cfg: ScenarioConfig, em: _Emitter) -> dict:
    K, steps = cfg.params["relax"]["K"], cfg.params["relax"]["steps"]
    f = build_density({**cfg.params["density"], "K": K})
    write_csv(em.path("density_initial.csv"), ["y", "f"], zip(f.y, f.values))
    rows = []
    snapshots = [(0, f)]
    for n in range(steps + 1):
        d = relaxation_distance(f)
        rows.append((n, d["sup"], d["l1"]))
        if n < steps:
            f = pf_apply(f)
            if n + 1 in (1, 2, 3, steps):
                snapshots.append((n + 1, f))
    write_csv(em.path("relax.csv"), ["n", "sup", "l1"], rows)
    write_csv(em.path("density_final.csv"), ["y", "f"], zip(f.y, f.values))
    arr = np.array(rows)
    svgplot.line_plot(em.path("decay.svg"),
                      [(arr[:, 0], arr[:, 1], "sup|f-1|"), (arr[:, 0], arr[:, 2], "L1")],
                      xlabel="step", ylabel="distance", title="relaxation to f = 1",
                      logy=True)
    svgplot.line_plot(em.path("densities.svg"),
                      [(d.y, d.values, f"n = {n}") for n, d in snapshots],
                      xlabel="y", ylabel="f", title="Perron-Frobenius iterates")
    report = {"final_sup": rows[-1][1], "final_l1": rows[-1][2],
              "worst_step_ratio": float(np.max(arr[1:, 1] / np.maximum(arr[:-1, 1], 1e-300)))
              if steps else None}
    em.json("report.json", report)
    return report


def _run_entropy_trace(cfg: ScenarioConfig, em: _Emitter) -> dict:
    r = cfg.params["relax"]
    f0 = build_density({**cfg.params["density"], "K": r["K"]})
    trace = entropy_trace_pf(f0, r["steps"], tau=r["tau"])
    write_csv(em.path("entropy.csv"), ["n", "S", "dS_bound"],
              zip(trace.steps, trace.S, trace.dS_bound))
    ts = np.linspace(0.0, r["steps"] * r["tau"], 4 * r["steps"] + 1)
    ode_rows = []
    for t in ts:
        ft = relaxation_ode_evolve(f0, r["tau"], t)
        ode_rows.append((t, relaxation_distance(ft)["sup"], valentini_entropy(ft)))
    write_csv(em.path("ode.csv"), ["t", "sup_dist", "S"], ode_rows)
    svgplot.line_plot(em.path("entropy.svg"),
                      [(trace.steps, trace.S, "S (PF trace)"),
                       (np.array(ode_rows)[:, 0] / r["tau"], np.array(ode_rows)[:, 2],
                        "S (ODE, t/tau)")],
                      xlabel="step", ylabel="S", title="H-theorem entropy growth")
    rate = h_theorem_rate(f0, r["tau"])
    report = {"S_initial": float(trace.S[0]), "S_final": float(trace.S[-1]),
              "dS_dt_initial": rate["dS_dt"], "lower_bound_initial": rate["lower_bound"]}
    em.json("report.json", report)
    return report


_RUNNERS = {
    "scatter": _run_scatter,
    "trajectories": _run_trajectories,
    "coherent": _run_coherent,
    "map_orbit": _run_map_orbit,
    "pf_relax": _run_pf_relax,
    "entropy_trace": _run_entropy_trace,
}


def run_scenario(config: ScenarioConfig, out_dir, seed: int | None = None) -> RunManifest:
    from . import __version__
    if seed is not None:
        config = dataclasses.replace(config, seed=seed)
    out = Path(out_dir) / config.name
    out.mkdir(parents=True, exist_ok=True)
    em = _Emitter(out)
    start = time.perf_counter()
    _RUNNERS[config.kind](config, em)
    wall = time.perf_counter() - start
    files = tuple({"name": n, "sha256": _sha256(out / n)} for n in em.names)
    manifest = RunManifest(
        config={"kind": config.kind, "name": config.name, "seed": config.seed,
                **config.params},
        version=__version__, wall_time_s=wall, files=files)
    with open(out / "manifest.json", "w") as fh:
        json.dump(dataclasses.asdict(manifest), fh, indent=2, sort_keys=True,
                  default=float)
        fh.write("\n")
    return manifest
