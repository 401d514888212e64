"""Perron-Frobenius evolution of densities on [0,1] for the doubling map.

Densities live on a uniform grid of 2^K + 1 nodes, chosen so both preimages
y/2 and (y+1)/2 of every node fall on nodes or exact midpoints; the grid form
is interpreted as a piecewise-linear density, for which the transfer operator
below is exact. A truncated Bernoulli-polynomial expansion provides the
spectral (eigenmode) picture with decay rates 2^-m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import BadGridSize, NotNormalized, OrderTooHigh, RoughDensity

M_MAX = 8
NORM_TOL = 1e-8
NEG_TOL = 1e-8


def _check_grid_size(n: int) -> int:
    """Return K for n = 2^K + 1 nodes, or raise."""
    k = (n - 1).bit_length() - 1
    if n < 3 or (1 << k) + 1 != n:
        raise BadGridSize(f"grid must have 2^K + 1 nodes, got {n}")
    return k


@dataclass(frozen=True)
class UnitDensity:
    """Nonnegative density on [0,1], sampled on a uniform 2^K + 1 node grid."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        _check_grid_size(len(vals))
        if np.any(vals < -NEG_TOL):
            raise ValueError(f"density has negative values below -{NEG_TOL}")
        if abs(self.integral() - 1.0) > NORM_TOL:
            raise NotNormalized(f"integral is {self.integral()}, expected 1")

    @property
    def K(self) -> int:
        return _check_grid_size(len(self.values))

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, len(self.values))

    @property
    def has_negative_overshoot(self) -> bool:
        """Small reconstruction undershoot below zero (tolerated, flagged)."""
        return bool(np.any(self.values < 0.0))

    def integral(self) -> float:
        return float(np.trapezoid(self.values, dx=1.0 / (len(self.values) - 1)))

    @classmethod
    def uniform(cls, K: int = 12) -> "UnitDensity":
        return cls(np.ones((1 << K) + 1))

    @classmethod
    def from_callable(cls, f: Callable, K: int = 12, normalize: bool = True) -> "UnitDensity":
        y = np.linspace(0.0, 1.0, (1 << K) + 1)
        vals = np.asarray(f(y), dtype=float)
        if normalize:
            vals = vals / np.trapezoid(vals, y)
        return cls(vals)

    @classmethod
    def from_values(cls, values, normalize: bool = True) -> "UnitDensity":
        vals = np.asarray(values, dtype=float)
        if normalize:
            vals = vals / np.trapezoid(vals, dx=1.0 / (len(vals) - 1))
        return cls(vals)

    @classmethod
    def spike(cls, y0: float, K: int = 12) -> "UnitDensity":
        """Near-singular triangle of width 2 dy centered on the node nearest y0."""
        n = (1 << K) + 1
        dy = 1.0 / (n - 1)
        i = int(round(y0 * (n - 1)))
        i = min(max(i, 1), n - 2)
        vals = np.zeros(n)
        vals[i] = 1.0 / dy
        vals[i - 1] = vals[i + 1] = 0.0  # triangle: mass = dy * height
        return cls(vals)


def pf_apply(f: UnitDensity) -> UnitDensity:
    """One Perron-Frobenius step: (Uf)(y) = [f(y/2) + f((y+1)/2)] / 2.

    Exact for the piecewise-linear density the grid represents; preserves
    normalization and nonnegativity by construction.
    """
    vals = f.values
    n = len(vals)
    idx = np.arange(n, dtype=float)
    lower = np.interp(idx / 2.0, idx, vals)           # f(y/2)
    upper = np.interp((idx + (n - 1)) / 2.0, idx, vals)  # f((y+1)/2)
    return UnitDensity(0.5 * (lower + upper))


@lru_cache(maxsize=None)
def _bernoulli_coeffs(m: int) -> tuple:
    """Monomial coefficients of B_m (descending powers), exact rationals."""
    # Bernoulli numbers via the standard recurrence
    B = [Fraction(1)]
    for j in range(1, m + 1):
        s = Fraction(0)
        for k in range(j):
            s += Fraction(math.comb(j + 1, k)) * B[k]
        B.append(-s / (j + 1))
    coeffs = [Fraction(math.comb(m, k)) * B[k] for k in range(m + 1)]
    return tuple(float(c) for c in coeffs)


def bernoulli_poly(m: int, y, m_max: int = M_MAX):
    """Bernoulli polynomial B_m(y); B_0 = 1, B_1 = y - 1/2, B_2 = y^2 - y + 1/6."""
    if not 0 <= m <= m_max:
        raise OrderTooHigh(f"order {m} outside [0, {m_max}]")
    y = np.asarray(y, dtype=float)
    out = np.polyval(_bernoulli_coeffs(m), y)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpectralDecomposition:
    """Coefficients of f = sum A_m B_m(y), m = 0..M."""

    coefficients: np.ndarray
    M: int
    residual_sup: float = field(default=float("nan"))

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) != self.M + 1:
            raise ValueError("need M + 1 coefficients")
        if abs(coeffs[0] - 1.0) > NORM_TOL:
            raise NotNormalized(f"A_0 = {coeffs[0]}, expected 1")

    def reconstruct(self, K: int = 12) -> UnitDensity:
        y = np.linspace(0.0, 1.0, (1 << K) + 1)
        vals = np.zeros_like(y)
        for m, a in enumerate(self.coefficients):
            if a != 0.0:
                vals += a * bernoulli_poly(m, y)
        return UnitDensity(np.clip(vals, 0.0, None) if np.all(vals > -NEG_TOL) else vals)


def _fornberg_weights(deriv: int, stencil: np.ndarray, x0: float) -> np.ndarray:
    """Finite-difference weights for d^deriv/dx^deriv at x0 on arbitrary nodes."""
    n = len(stencil)
    w = np.zeros((deriv + 1, n))
    w[0, 0] = 1.0
    c1 = 1.0
    c4 = stencil[0] - x0
    for i in range(1, n):
        c2 = 1.0
        c5 = c4
        c4 = stencil[i] - x0
        for j in range(i):
            c3 = stencil[i] - stencil[j]
            c2 *= c3
            for k in range(min(i, deriv), 0, -1):
                w[k, i] = c1 * (k * w[k - 1, i - 1] - c5 * w[k, i - 1]) / c2
            w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for k in range(min(i, deriv), 0, -1):
                w[k, j] = ((stencil[i] - x0) * w[k, j] - k * w[k - 1, j]) / c3
            w[0, j] = (stencil[i] - x0) * w[0, j] / c3
        c1 = c2
    return w[deriv]


def _endpoint_derivative(vals: np.ndarray, dy: float, order: int, at_one: bool) -> float:
    """One-sided derivative of given order at y=0 or y=1, stencil order order+2."""
    npts = order + (order + 2)  # accuracy order ~ npts - order
    npts = min(npts, len(vals))
    if at_one:
        stencil = np.arange(-npts + 1, 1, dtype=float) * dy
        data = vals[-npts:]
    else:
        stencil = np.arange(npts, dtype=float) * dy
        data = vals[:npts]
    w = _fornberg_weights(order, stencil, 0.0)
    return float(np.dot(w, data))


def spectral_coefficients(f0: UnitDensity, M: int = 4) -> SpectralDecomposition:
    """Project a smooth grid density onto Bernoulli modes.

    A_0 is the integral; A_m (m >= 1) uses the endpoint closed form
    A_m = (1/m!) d^{m-1}/dy^{m-1} [f(1) - f(0)], with one-sided stencils
    validated against the half-resolution grid (RoughDensity if they
    disagree by more than 10%).
    """
    if M > 6:
        raise OrderTooHigh("endpoint stencils support M <= 6 for grid data")
    vals = f0.values
    dy = 1.0 / (len(vals) - 1)
    coarse = vals[::2]
    scale = float(np.max(np.abs(vals - 1.0))) + 1e-12
    coeffs = [f0.integral()]
    for m in range(1, M + 1):
        d_fine = _endpoint_derivative(vals, dy, m - 1, True) - _endpoint_derivative(
            vals, dy, m - 1, False
        )
        d_coarse = _endpoint_derivative(coarse, 2 * dy, m - 1, True) - _endpoint_derivative(
            coarse, 2 * dy, m - 1, False
        )
        a_fine = d_fine / math.factorial(m)
        a_coarse = d_coarse / math.factorial(m)
        ref = max(abs(a_fine), abs(a_coarse))
        if ref > 0.01 * scale and abs(a_fine - a_coarse) > 0.1 * ref:
            raise RoughDensity(
                f"A_{m} stencil disagreement: {a_fine} (K) vs {a_coarse} (K-1)"
            )
        coeffs.append(a_fine)
    coeffs = np.array(coeffs)
    recon = np.zeros_like(vals)
    y = f0.y
    for m, a in enumerate(coeffs):
        recon += a * bernoulli_poly(m, y)
    residual = float(np.max(np.abs(recon - vals)))
    return SpectralDecomposition(coeffs, M, residual)


def spectral_evolve(dec: SpectralDecomposition, n: int) -> SpectralDecomposition:
    """n Perron-Frobenius steps in the eigenbasis: A_m -> A_m 2^(-n m)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    m = np.arange(dec.M + 1)
    return SpectralDecomposition(dec.coefficients * np.exp2(-float(n) * m), dec.M)


def relaxation_distance(f: UnitDensity) -> dict:
    """Distance of f from quantum equilibrium f = 1: sup and L1 norms."""
    dev = f.values - 1.0
    dy = 1.0 / (len(f.values) - 1)
    return {
        "sup": float(np.max(np.abs(dev))),
        "l1": float(np.trapezoid(np.abs(dev), dx=dy)),
    }
