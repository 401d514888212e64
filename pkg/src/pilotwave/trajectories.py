"""De Broglie-Bohm trajectories in a sampled wavefield.

Velocities come from v = (hbar/m) Im[psi'/psi] with cubic interpolation in x
and linear interpolation in t between PDE snapshots.  Integration is
classical RK4 with adaptive halving near wavefunction nodes; trajectories of
one field never cross, which doubles as the integrator accuracy check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import NodeSingularity, OrderViolation, StepUnderflow
from .wavefield import BranchState, GridWavefunction, SnapshotSeries

NODE_FLOOR = 1e-10
FATE_OVERLAP_TOL = 1e-4


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    fate: str  # "reflected" | "transmitted" | "undecided"

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("positions must be finite")


@dataclass(frozen=True)
class EnsembleFates:
    initial_positions: np.ndarray
    final_positions: np.ndarray
    fates: np.ndarray          # array of fate strings
    split_point: float | None  # boundary estimate in the initial coordinates

    @property
    def reflected_fraction(self) -> float:
        return float(np.mean(self.fates == "reflected"))


def bohm_velocity(psi: GridWavefunction, x, node_floor: float = NODE_FLOOR):
    """Guidance velocity (hbar/m) Im[psi'(x)/psi(x)] via cubic interpolation."""
    spline = CubicSpline(psi.x, psi.values)
    x = np.asarray(x, dtype=float)
    val = spline(x)
    floor = node_floor * float(np.max(np.abs(psi.values) ** 2))
    if np.any(np.abs(val) ** 2 < floor):
        raise NodeSingularity("|psi(x)|^2 below the node floor")
    v = psi.hbar / psi.mass * np.imag(spline(x, 1) / val)
    return float(v) if v.ndim == 0 else v


def conditional_velocity(branch: BranchState, x, node_floor: float = NODE_FLOOR):
    """Velocity of the pointer-selected branch (or of the coherent sum)."""
    return bohm_velocity(branch.effective_field(), x, node_floor)


class FieldSampler:
    """Velocity field of a snapshot series with per-snapshot cached splines."""

    def __init__(self, series: SnapshotSeries, node_floor: float = NODE_FLOOR):
        self.series = series
        self.node_floor = node_floor
        self._splines: dict[int, CubicSpline] = {}
        self._max2 = np.max(np.abs(series.values) ** 2, axis=1)
        grid = series.x
        self._x_lo = grid[2]
        self._x_hi = grid[-3]

    def _spline(self, i: int) -> CubicSpline:
        sp = self._splines.get(i)
        if sp is None:
            sp = CubicSpline(self.series.x, self.series.values[i])
            self._splines[i] = sp
        return sp

    def velocity_masked(self, x: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(velocity, node_mask); velocity is zeroed where the mask is set."""
        i, w = self.series._bracket(t)
        xq = np.clip(x, self._x_lo, self._x_hi)
        sa = self._spline(i)
        psi = sa(xq)
        dpsi = sa(xq, 1)
        floor2 = self._max2[i]
        if w > 0.0:
            sb = self._spline(i + 1)
            psi = (1 - w) * psi + w * sb(xq)
            dpsi = (1 - w) * dpsi + w * sb(xq, 1)
            floor2 = (1 - w) * floor2 + w * self._max2[i + 1]
        dens = np.abs(psi) ** 2
        bad = dens < self.node_floor * floor2
        v = np.zeros_like(xq)
        ok = ~bad
        v[ok] = self.series.hbar / self.series.mass * np.imag(dpsi[ok] / psi[ok])
        return v, bad

    def velocity(self, x, t: float):
        v, bad = self.velocity_masked(np.atleast_1d(np.asarray(x, dtype=float)), t)
        if np.any(bad):
            raise NodeSingularity(f"node floor reached at t={t}")
        return v


def _rk4_refine(sampler: FieldSampler, xs: np.ndarray, t0: float, t1: float,
                dt_min: float, trapped: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """One RK4 step over [t0, t1]; points touching a node recurse on half steps
    until dt_min, then freeze and are marked trapped."""
    h = t1 - t0
    v1, b1 = sampler.velocity_masked(xs, t0)
    v2, b2 = sampler.velocity_masked(xs + 0.5 * h * v1, t0 + 0.5 * h)
    v3, b3 = sampler.velocity_masked(xs + 0.5 * h * v2, t0 + 0.5 * h)
    v4, b4 = sampler.velocity_masked(xs + h * v3, t1)
    out = xs + h / 6.0 * (v1 + 2 * v2 + 2 * v3 + v4)
    bad = b1 | b2 | b3 | b4
    if np.any(bad):
        if h / 2 < dt_min:
            trapped[idx[bad]] = True
            out[bad] = xs[bad]
        else:
            tm = 0.5 * (t0 + t1)
            mid = _rk4_refine(sampler, xs[bad], t0, tm, dt_min, trapped, idx[bad])
            out[bad] = _rk4_refine(sampler, mid, tm, t1, dt_min, trapped, idx[bad])
    return out


def transport(sampler: FieldSampler, x0s, t0: float, t1: float,
              substeps_per_interval: int = 2, dt_min: float = 1e-4,
              record: bool = False):
    """Integrate an ensemble through the field from t0 to t1.

    Steps follow the snapshot grid, subdivided `substeps_per_interval` times.
    Returns (positions, trapped_mask) or, with record=True,
    (times, position_history, trapped_mask).
    """
    times = sampler.series.times
    sel = (times > t0) & (times < t1)
    knots = np.concatenate(([t0], times[sel], [t1]))
    xs = np.atleast_1d(np.asarray(x0s, dtype=float)).copy()
    idx = np.arange(len(xs))
    trapped = np.zeros(len(xs), dtype=bool)
    hist_t = [t0]
    hist_x = [xs.copy()]
    for a, b in zip(knots[:-1], knots[1:]):
        sub = np.linspace(a, b, substeps_per_interval + 1)
        for sa, sb in zip(sub[:-1], sub[1:]):
            xs = _rk4_refine(sampler, xs, sa, sb, dt_min, trapped, idx)
        if record:
            hist_t.append(b)
            hist_x.append(xs.copy())
    if record:
        return np.array(hist_t), np.array(hist_x), trapped
    return xs, trapped


@dataclass(frozen=True)
class FateGeometry:
    """What is needed to label a final position: where the barrier sits and
    which side the packet came from."""

    barrier_center: float = 0.0
    incident_side: int = +1    # +1: packet starts at x > barrier center
    margin: float = 1.0

    def classify(self, x_final: float) -> str:
        rel = (x_final - self.barrier_center) * self.incident_side
        if rel > self.margin:
            return "reflected"
        if rel < -self.margin:
            return "transmitted"
        return "undecided"


def central_overlap(psi: GridWavefunction, geometry: FateGeometry,
                    half_width: float) -> float:
    """Norm remaining within half_width of the barrier (packet overlap proxy)."""
    w = np.abs(psi.values) ** 2
    sel = np.abs(psi.x - geometry.barrier_center) <= half_width
    return float(np.trapezoid(np.where(sel, w, 0.0), dx=psi.dx))


def integrate_trajectory(x0: float, series: SnapshotSeries,
                         geometry: FateGeometry | None = None,
                         t_span: tuple[float, float] | None = None,
                         substeps_per_interval: int = 2,
                         dt_min: float = 1e-4,
                         node_floor: float = NODE_FLOOR,
                         overlap_half_width: float | None = None) -> Trajectory:
    """Single guided path; fate is classified only once the final field has
    negligible norm left near the barrier (else 'undecided')."""
    sampler = FieldSampler(series, node_floor)
    t0, t1 = t_span if t_span is not None else (series.t_start, series.t_end)
    times, hist, trapped = transport(sampler, [x0], t0, t1,
                                     substeps_per_interval, dt_min, record=True)
    if trapped[0]:
        raise StepUnderflow(f"trajectory from x0={x0} trapped at a node")
    positions = hist[:, 0]
    fate = "undecided"
    if geometry is not None:
        half = overlap_half_width if overlap_half_width is not None else (
            abs(positions[-1] - geometry.barrier_center) / 2.0)
        if central_overlap(series.psi_at(t1), geometry, half) < FATE_OVERLAP_TOL:
            fate = geometry.classify(float(positions[-1]))
    return Trajectory(times, positions, fate)


def ensemble_fates(x0s, series: SnapshotSeries, geometry: FateGeometry,
                   t_span: tuple[float, float] | None = None,
                   substeps_per_interval: int = 2, dt_min: float = 1e-4,
                   node_floor: float = NODE_FLOOR,
                   overlap_half_width: float | None = None) -> EnsembleFates:
    """Transport a sorted ensemble and label the branch fates.

    Raises OrderViolation if the final positions are not sorted: crossings
    are impossible for exact dynamics, so any crossing is integrator failure.
    """
    x0s = np.asarray(x0s, dtype=float)
    if np.any(np.diff(x0s) < 0):
        raise ValueError("x0 list must be sorted ascending")
    sampler = FieldSampler(series, node_floor)
    t0, t1 = t_span if t_span is not None else (series.t_start, series.t_end)
    finals, trapped = transport(sampler, x0s, t0, t1, substeps_per_interval, dt_min)
    if np.any(np.diff(finals) < 0):
        k = int(np.argmin(np.diff(finals)))
        raise OrderViolation(f"final positions out of order near index {k}")

    half = overlap_half_width
    if half is None:
        half = float(np.median(np.abs(finals - geometry.barrier_center))) / 2.0
    separated = central_overlap(series.psi_at(t1), geometry, half) < FATE_OVERLAP_TOL
    fates = np.array([
        "undecided" if (trapped[i] or not separated) else geometry.classify(finals[i])
        for i in range(len(finals))
    ])
    split = _split_point(x0s, fates)
    return EnsembleFates(x0s, finals, fates, split)


def _split_point(x0s: np.ndarray, fates: np.ndarray) -> float | None:
    """Boundary between the contiguous transmitted and reflected blocks."""
    t_idx = np.flatnonzero(fates == "transmitted")
    r_idx = np.flatnonzero(fates == "reflected")
    if len(t_idx) == 0 or len(r_idx) == 0:
        return None
    if t_idx.max() < r_idx.min():
        return float(0.5 * (x0s[t_idx.max()] + x0s[r_idx.min()]))
    if r_idx.max() < t_idx.min():
        return float(0.5 * (x0s[r_idx.max()] + x0s[t_idx.min()]))
    return None  # interleaved fates: no clean boundary


def sample_born(psi: GridWavefunction, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n positions from |psi|^2 by inverse transform on the grid CDF."""
    w = np.abs(psi.values) ** 2
    cdf = np.concatenate(([0.0], np.cumsum((w[1:] + w[:-1]) / 2.0 * psi.dx)))
    cdf /= cdf[-1]
    u = rng.random(n)
    return np.sort(np.interp(u, cdf, psi.x))


def stratified_born(psi: GridWavefunction, n: int) -> np.ndarray:
    """Deterministic samples at the CDF midquantiles (variance reduction)."""
    w = np.abs(psi.values) ** 2
    cdf = np.concatenate(([0.0], np.cumsum((w[1:] + w[:-1]) / 2.0 * psi.dx)))
    cdf /= cdf[-1]
    u = (np.arange(n) + 0.5) / n
    return np.interp(u, cdf, psi.x)


def equivariance_check(series: SnapshotSeries, t0: float, t1: float,
                       n_samples: int = 2000, bins: int = 16,
                       rng: np.random.Generator | None = None,
                       samples: np.ndarray | None = None,
                       substeps_per_interval: int = 2,
                       dt_min: float = 1e-4) -> dict:
    """Transport Born samples from t0 to t1 and compare the histogram with
    |psi(t1)|^2; the L1 distance should sit inside the multinomial noise band
    3 sqrt(bins / n)."""
    psi0 = series.psi_at(t0)
    if samples is None:
        if rng is None:
            rng = np.random.default_rng(0)
        samples = sample_born(psi0, n_samples, rng)
    else:
        samples = np.asarray(samples, dtype=float)
        n_samples = len(samples)
    sampler = FieldSampler(series)
    finals, _ = transport(sampler, samples, t0, t1, substeps_per_interval, dt_min)

    psi1 = series.psi_at(t1)
    w = np.abs(psi1.values) ** 2
    cdf = np.concatenate(([0.0], np.cumsum((w[1:] + w[:-1]) / 2.0 * psi1.dx)))
    cdf /= cdf[-1]
    x = psi1.x
    edges = np.linspace(x[0], x[-1], bins + 1)
    expected = np.diff(np.interp(edges, x, cdf))
    counts, _ = np.histogram(finals, bins=edges)
    empirical = counts / n_samples
    l1 = float(np.sum(np.abs(empirical - expected)))
    return {
        "l1": l1,
        "bound": 3.0 * np.sqrt(bins / n_samples),
        "bins": bins,
        "n": n_samples,
        "passed": l1 <= 3.0 * np.sqrt(bins / n_samples),
    }
