"""One-dimensional wavefields: analytic barrier scattering and a unitary
time-dependent Schrödinger propagator.

Natural units hbar = m = 1 by default; every formula keeps both symbols so
SI-scale runs work unchanged.  The barrier is a rectangular well/barrier of
width epsilon; its transmission/reflection amplitudes come from the closed
Fabry-Perot forms, and the PDE side uses a Crank-Nicolson tridiagonal step
(unconditionally norm-preserving) on a hard-walled grid with a monitored
exclusion margin.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import (
    BoundaryContamination,
    DegenerateWavenumber,
    EvanescentRegime,
    GridTooCoarse,
    NonUnitaryAmplitudes,
    WindowTooSmall,
)

MIN_PERIODS = 10       # require lambda <= L / MIN_PERIODS
POINTS_PER_WAVELENGTH = 20
BOUNDARY_MARGIN_CELLS = 5
BOUNDARY_NORM_TOL = 1e-6


@dataclass(frozen=True)
class WavePacketSpec:
    """Rectangular wave train with optional cosine-smoothed edges.

    k_x is signed; a packet incident from x > 0 has k_x = -|k_x|.  C defaults to 1/sqrt(L); edge_ramp defaults to one
    wavelength (0 gives the ideal sharp rectangle).
    """

    L: float
    k_x: float
    x_center: float = 0.0
    C: float | None = None
    edge_ramp: float | None = None
    min_periods: int = MIN_PERIODS

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.k_x == 0:
            raise DegenerateWavenumber("k_x must be nonzero")
        if self.wavelength > self.L / self.min_periods:
            raise ValueError(
                f"need lambda <= L/{self.min_periods}: "
                f"lambda={self.wavelength}, L={self.L}"
            )
        if not 0 <= self.ramp < self.L / 4:
            raise ValueError("edge_ramp must satisfy 0 <= ramp < L/4")

    @property
    def wavelength(self) -> float:
        return 2 * np.pi / abs(self.k_x)

    @property
    def ramp(self) -> float:
        return self.wavelength if self.edge_ramp is None else self.edge_ramp

    @property
    def amplitude(self) -> float:
        return 1.0 / np.sqrt(self.L) if self.C is None else self.C

    def envelope(self, u):
        """Profile relative to the packet center: 1 inside, cosine ramp edges."""
        u = np.abs(np.asarray(u, dtype=float))
        flat = self.L / 2 - self.ramp
        out = np.zeros_like(u)
        out[u <= flat] = 1.0
        edge = (u > flat) & (u <= self.L / 2)
        if self.ramp > 0:
            out[edge] = 0.5 * (1 + np.cos(np.pi * (u[edge] - flat) / self.ramp))
        return out


@dataclass(frozen=True)
class BarrierSpec:
    """Rectangular potential V = V0 on |x - x_center| < epsilon/2."""

    V0: float
    epsilon: float
    x_center: float = 0.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    def on_grid(self, x: np.ndarray) -> np.ndarray:
        """Cell-averaged potential: each node gets V0 times the overlap
        fraction of its grid cell with the barrier, so the barrier area is
        exact and the width is not quantized to the grid."""
        x = np.asarray(x, dtype=float)
        if len(x) > 1:
            dx = x[1] - x[0]
            lo = self.x_center - self.epsilon / 2
            hi = self.x_center + self.epsilon / 2
            overlap = np.minimum(x + dx / 2, hi) - np.maximum(x - dx / 2, lo)
            return self.V0 * np.clip(overlap, 0.0, None) / dx
        return np.where(np.abs(x - self.x_center) < self.epsilon / 2, self.V0, 0.0)


@dataclass(frozen=True)
class ScatteringAmplitudes:
    T: complex
    R: complex
    A: complex
    B: complex
    k_x: float
    q_x: float

    @property
    def matrix(self) -> np.ndarray:
        """Two-mode splitter matrix [[R, T], [T, R]] acting on (a+, a-)."""
        return np.array([[self.R, self.T], [self.T, self.R]])


HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def interior_wavenumber(k_x: float, barrier: BarrierSpec, mass: float = 1.0,
                        hbar: float = 1.0) -> float:
    """Signed interior wavenumber q_x with q^2 - k^2 = -2 m V0 / hbar^2."""
    if k_x == 0:
        raise DegenerateWavenumber("k_x = 0")
    q2 = k_x**2 - 2 * mass * barrier.V0 / hbar**2
    if q2 <= 0:
        raise EvanescentRegime(f"q_x^2 = {q2} <= 0 (tunneling regime not handled)")
    return np.sign(k_x) * np.sqrt(q2)


def scattering_amplitudes(k_x: float, barrier: BarrierSpec, mass: float = 1.0,
                          hbar: float = 1.0) -> ScatteringAmplitudes:
    """Closed-form Fabry-Perot amplitudes for the rectangular barrier/well."""
    if k_x < 0:
        # right incidence: mirror x -> -x reduces it to left incidence at +|k|
        # with the barrier reflected; T, R, A, B carry over unchanged
        mirrored = replace(barrier, x_center=-barrier.x_center)
        m = scattering_amplitudes(-k_x, mirrored, mass, hbar)
        return ScatteringAmplitudes(m.T, m.R, m.A, m.B, k_x, -m.q_x)
    q = interior_wavenumber(k_x, barrier, mass, hbar)
    k = k_x
    eps = barrier.epsilon
    T = (4 * q * k / (q + k) ** 2) / (
        np.exp(-1j * (q - k) * eps)
        - (q - k) ** 2 / (q + k) ** 2 * np.exp(1j * (k + q) * eps)
    )
    R = 1j * T * (q**2 - k**2) / (2 * q * k) * np.sin(q * eps)
    A = T * (q + k) / (2 * q) * np.exp(1j * (k - q) * eps / 2)
    B = T * (q - k) / (2 * q) * np.exp(1j * (k + q) * eps / 2)
    if barrier.x_center != 0.0:
        # translating the barrier multiplies the reflection by exp(2 i k xc)
        xc = barrier.x_center
        R = R * np.exp(2j * k * xc)
        A = A * np.exp(1j * (k - q) * xc)
        B = B * np.exp(1j * (k + q) * xc)
    return ScatteringAmplitudes(complex(T), complex(R), complex(A), complex(B), k, q)


def balanced_splitter_ratio(k_x: float, epsilon: float, lo: float = 2.3,
                            hi: float = 2.7) -> float:
    """q/k ratio giving an exactly balanced |T|^2 = 1/2 splitter (R = iT there)."""
    from scipy.optimize import brentq

    def imbalance(r):
        barrier = BarrierSpec(V0=(k_x**2 - (r * k_x) ** 2) / 2.0, epsilon=epsilon)
        return abs(scattering_amplitudes(k_x, barrier).T) ** 2 - 0.5

    return brentq(imbalance, lo, hi, xtol=1e-13)


def asymptotic_out_state(a_plus: complex, a_minus: complex,
                         amps: ScatteringAmplitudes | None = None,
                         idealized: bool = False) -> tuple[complex, complex]:
    """Apply the two-mode splitter to asymptotic gate amplitudes.

    Physical mode uses [[R, T], [T, R]] from `amps`; idealized mode uses the
    Hadamard-like matrix (1/sqrt2) [[1, 1], [1, -1]].
    """
    vec = np.array([a_plus, a_minus], dtype=complex)
    norm_in = np.linalg.norm(vec)
    if abs(norm_in**2 - 1.0) > 1e-10:
        raise ValueError(f"input amplitudes not normalized: |a|^2 = {norm_in**2}")
    if idealized or amps is None:
        mat = HADAMARD.astype(complex)
    else:
        mat = amps.matrix
    if np.max(np.abs(mat.conj().T @ mat - np.eye(2))) > 1e-8:
        raise NonUnitaryAmplitudes("splitter matrix fails unitarity beyond 1e-8")
    out = mat @ vec
    return complex(out[0]), complex(out[1])


@dataclass(frozen=True)
class GridWavefunction:
    """Complex field on a uniform grid at one time (immutable snapshot)."""

    x0: float
    dx: float
    values: np.ndarray
    t: float = 0.0
    mass: float = 1.0
    hbar: float = 1.0

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(len(self.values))

    def norm(self) -> float:
        return float(np.trapezoid(np.abs(self.values) ** 2, dx=self.dx))

    def normalized(self) -> "GridWavefunction":
        return replace(self, values=self.values / np.sqrt(self.norm()))

    def probability_current(self) -> np.ndarray:
        """j = (hbar/m) Im[psi* dpsi/dx] on the grid."""
        dpsi = np.gradient(self.values, self.dx)
        return self.hbar / self.mass * np.imag(np.conj(self.values) * dpsi)

    def centroid(self) -> float:
        w = np.abs(self.values) ** 2
        return float(np.trapezoid(self.x * w, dx=self.dx) / np.trapezoid(w, dx=self.dx))

    def mirrored(self) -> "GridWavefunction":
        """The field under x -> -x (valid dynamics for symmetric potentials)."""
        x_end = self.x0 + self.dx * (len(self.values) - 1)
        return replace(self, x0=-x_end, values=self.values[::-1].copy())


@dataclass(frozen=True)
class BranchState:
    """Two decohered (or still coherent) branches with a pointer label."""

    psi_up: GridWavefunction
    psi_down: GridWavefunction
    pointer_bit: str = "coherent"  # "up" | "down" | "coherent"

    def __post_init__(self):
        if self.pointer_bit not in ("up", "down", "coherent"):
            raise ValueError("pointer_bit must be 'up', 'down' or 'coherent'")

    def effective_field(self) -> GridWavefunction:
        if self.pointer_bit == "up":
            return self.psi_up
        if self.pointer_bit == "down":
            return self.psi_down
        summed = self.psi_up.values + self.psi_down.values
        return replace(self.psi_up, values=summed)


def init_packet(spec: WavePacketSpec, x_min: float, x_max: float, n_points: int,
                t: float = 0.0, mass: float = 1.0, hbar: float = 1.0,
                points_per_wavelength: int = POINTS_PER_WAVELENGTH) -> GridWavefunction:
    """Sample the packet on a uniform grid and normalize to unit norm."""
    dx = (x_max - x_min) / (n_points - 1)
    if dx > spec.wavelength / points_per_wavelength:
        raise GridTooCoarse(
            f"dx={dx} exceeds lambda/{points_per_wavelength}="
            f"{spec.wavelength / points_per_wavelength}"
        )
    lo = spec.x_center - spec.L / 2
    hi = spec.x_center + spec.L / 2
    if lo - x_min < spec.L or x_max - hi < spec.L:
        raise WindowTooSmall("need margin >= L on each side of the packet support")
    x = x_min + dx * np.arange(n_points)
    psi = spec.amplitude * spec.envelope(x - spec.x_center) * np.exp(1j * spec.k_x * x)
    wf = GridWavefunction(x_min, dx, psi.astype(complex), t, mass, hbar)
    return wf.normalized()


@dataclass
class SnapshotSeries:
    """Time-ordered stack of wavefunction snapshots on a fixed grid."""

    x0: float
    dx: float
    times: np.ndarray          # strictly increasing
    values: np.ndarray         # shape (n_times, n_x)
    mass: float = 1.0
    hbar: float = 1.0

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.values.shape[1])

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def snapshot(self, i: int) -> GridWavefunction:
        return GridWavefunction(self.x0, self.dx, self.values[i], float(self.times[i]),
                                self.mass, self.hbar)

    def psi_at(self, t: float) -> GridWavefunction:
        """Linear-in-time interpolation between bracketing snapshots."""
        i, w = self._bracket(t)
        vals = (1 - w) * self.values[i] + w * self.values[i + 1] if w > 0 else self.values[i]
        return GridWavefunction(self.x0, self.dx, vals, t, self.mass, self.hbar)

    def _bracket(self, t: float) -> tuple[int, float]:
        times = self.times
        if t <= times[0]:
            return 0, 0.0
        if t >= times[-1]:
            return len(times) - 2, 1.0
        i = int(np.searchsorted(times, t, side="right") - 1)
        i = min(i, len(times) - 2)
        w = (t - times[i]) / (times[i + 1] - times[i])
        return i, float(w)

    def mirrored(self) -> "SnapshotSeries":
        x_end = self.x0 + self.dx * (self.values.shape[1] - 1)
        return SnapshotSeries(-x_end, self.dx, self.times.copy(),
                              self.values[:, ::-1].copy(), self.mass, self.hbar)


def evolve_schrodinger(psi: GridWavefunction, V: np.ndarray, dt: float, n_steps: int,
                       snapshot_every: int | None = None, dt_safety: float = 1.0,
                       check_boundary: bool = True):
    """Propagate with the Crank-Nicolson scheme (tridiagonal, norm-preserving).

    Returns the final GridWavefunction, or (final, SnapshotSeries) when
    snapshot_every is given.  Raises BoundaryContamination if more than
    BOUNDARY_NORM_TOL of the norm reaches within BOUNDARY_MARGIN_CELLS of an
    edge (hard walls reflect; such a run is invalid).
    """
    n = len(psi.values)
    dx, hbar, m = psi.dx, psi.hbar, psi.mass
    if dt > dt_safety * dx * dx * m / (2 * hbar):
        raise ValueError(
            f"dt={dt} exceeds accuracy bound dx^2 m/(2 hbar) = {dx * dx * m / (2 * hbar)}"
        )
    if n_steps == 0:
        out = replace(psi)
        if snapshot_every is None:
            return out
        series = SnapshotSeries(psi.x0, dx, np.array([psi.t]),
                                psi.values[None, :].copy(), m, hbar)
        return out, series

    kin = hbar**2 / (2 * m * dx * dx)
    main = 2 * kin + np.asarray(V, dtype=float)
    off = -kin * np.ones(n - 1)
    H = sp.diags([off, main, off], offsets=[-1, 0, 1], format="csc")
    alpha = 1j * dt / (2 * hbar)
    A = (sp.identity(n, format="csc") + alpha * H).tocsc()
    B = (sp.identity(n, format="csc") - alpha * H).tocsc()
    solver = splu(A)

    margin = BOUNDARY_MARGIN_CELLS
    vals = psi.values.copy()
    snaps = [vals.copy()] if snapshot_every else None
    times = [psi.t] if snapshot_every else None
    t = psi.t
    for step in range(1, n_steps + 1):
        vals = solver.solve(B @ vals)
        t = psi.t + step * dt
        if check_boundary:
            edge = (np.sum(np.abs(vals[:margin]) ** 2)
                    + np.sum(np.abs(vals[-margin:]) ** 2)) * dx
            if edge > BOUNDARY_NORM_TOL:
                raise BoundaryContamination(
                    f"{edge} of the norm within {margin} cells of the edge at t={t}"
                )
        if snapshot_every and (step % snapshot_every == 0 or step == n_steps):
            snaps.append(vals.copy())
            times.append(t)
    final = GridWavefunction(psi.x0, dx, vals, t, m, hbar)
    if snapshot_every is None:
        return final
    series = SnapshotSeries(psi.x0, dx, np.array(times), np.array(snaps), m, hbar)
    return final, series


def wiener_field(series: SnapshotSeries) -> dict:
    """Long-format Re[psi(x,t)] table for fringe plots: arrays t, x, re_psi."""
    nt, nx = series.values.shape
    return {
        "t": np.repeat(series.times, nx),
        "x": np.tile(series.x, nt),
        "re_psi": np.real(series.values).ravel(),
    }


def fringe_spacing(psi: GridWavefunction, x_min: float, x_max: float) -> float:
    """Dominant spatial period of |psi|^2 in [x_min, x_max] (FFT peak,
    parabolic interpolation)."""
    x = psi.x
    sel = (x >= x_min) & (x <= x_max)
    if np.count_nonzero(sel) < 16:
        raise ValueError("window too short for fringe detection")
    sig = np.abs(psi.values[sel]) ** 2
    sig = sig - np.mean(sig)
    sig = sig * np.hanning(len(sig))
    nfft = 8 * len(sig)
    spec = np.abs(np.fft.rfft(sig, nfft))
    freqs = np.fft.rfftfreq(nfft, d=psi.dx)
    k = int(np.argmax(spec[1:]) + 1)
    if 1 <= k < len(spec) - 1:
        a, b, c = spec[k - 1], spec[k], spec[k + 1]
        denom = a - 2 * b + c
        shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
    else:
        shift = 0.0
    f_peak = freqs[k] + shift * (freqs[1] - freqs[0])
    return 1.0 / f_peak


def fringe_visibility(psi: GridWavefunction, x_min: float, x_max: float) -> float:
    """(max - min)/(max + min) of |psi|^2 over the window."""
    x = psi.x
    sel = (x >= x_min) & (x <= x_max)
    sig = np.abs(psi.values[sel]) ** 2
    hi, lo = float(np.max(sig)), float(np.min(sig))
    return (hi - lo) / (hi + lo)


def side_norms(psi: GridWavefunction, x_split: float = 0.0) -> tuple[float, float]:
    """(norm on x > x_split, norm on x < x_split)."""
    w = np.abs(psi.values) ** 2
    right = np.where(psi.x > x_split, w, 0.0)
    left = np.where(psi.x < x_split, w, 0.0)
    return (float(np.trapezoid(right, dx=psi.dx)), float(np.trapezoid(left, dx=psi.dx)))
