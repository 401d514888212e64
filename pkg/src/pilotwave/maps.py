"""Interval-map reduction of the iterated interferometer.

The two-gate geometry is collapsed onto the unit interval: positions inside
the initial/final wave-packet supports are rescaled to y in [0,1], where the
decohered dynamics becomes the doubling (Bernoulli) map and the coherent
symmetric superposition becomes a contracting half-interval map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    OutOfSupport,
    PrecisionExhausted,
    SaturatedSeparation,
    WrongHalfInterval,
)

EPOCHS = ("initial", "final")
GATES = ("plus", "minus")


@dataclass(frozen=True)
class SegmentSpec:
    """One of the four wave-packet supports (initial/final x plus/minus gate).

    center_magnitude is |x_in| or |x_f|; the signed center is +c for the plus
    gate and -c for the minus gate.
    """

    epoch: str
    gate: str
    center_magnitude: float
    L: float

    def __post_init__(self):
        if self.epoch not in EPOCHS:
            raise ValueError(f"epoch must be one of {EPOCHS}")
        if self.gate not in GATES:
            raise ValueError(f"gate must be one of {GATES}")
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.center_magnitude <= self.L / 2:
            raise ValueError("gates overlap: need center_magnitude > L/2")

    @property
    def center(self) -> float:
        return self.center_magnitude if self.gate == "plus" else -self.center_magnitude


def x_to_y(x, seg: SegmentSpec):
    """Map a position in a segment support to the unit interval.

    Plus-gate segments land in [1/2, 1], minus-gate segments in [0, 1/2].
    """
    x = np.asarray(x, dtype=float)
    c = seg.center
    tol = 1e-9 * seg.L
    if np.any(x < c - seg.L / 2 - tol) or np.any(x > c + seg.L / 2 + tol):
        raise OutOfSupport(
            f"x outside [{c - seg.L / 2}, {c + seg.L / 2}] for {seg.epoch}/{seg.gate}"
        )
    if seg.gate == "plus":
        y = (x - seg.center_magnitude) / (2 * seg.L) + 0.75
    else:
        y = (x + seg.center_magnitude) / (2 * seg.L) + 0.25
    return float(y) if y.ndim == 0 else y


def y_to_x(y, seg: SegmentSpec):
    """Inverse of :func:`x_to_y`; y must lie in the gate's half-interval."""
    y = np.asarray(y, dtype=float)
    lo, hi = (0.5, 1.0) if seg.gate == "plus" else (0.0, 0.5)
    if np.any(y < lo - 1e-12) or np.any(y > hi + 1e-12):
        raise WrongHalfInterval(f"y outside [{lo}, {hi}] for gate {seg.gate}")
    if seg.gate == "plus":
        x = (y - 0.75) * 2 * seg.L + seg.center_magnitude
    else:
        x = (y - 0.25) * 2 * seg.L - seg.center_magnitude
    return float(x) if x.ndim == 0 else x


def bernoulli_step(y: float) -> float:
    """Doubling map y -> 2y mod 1, with the tie 1/2 -> 0 (and 1 -> 0)."""
    if not 0.0 <= y <= 1.0:
        raise ValueError("y must lie in [0, 1]")
    if y < 0.5:
        return 2.0 * y
    if y > 0.5:
        # exact in IEEE arithmetic: 2y in [1, 2] so the subtraction is exact
        return 2.0 * y - 1.0 if y < 1.0 else 0.0
    return 0.0


def coherent_step(y: float) -> float:
    """Contracting map of the symmetric coherent superposition: y -> y/2 + 1/2."""
    if not 0.0 <= y <= 1.0:
        raise ValueError("y must lie in [0, 1]")
    return y / 2.0 + 0.5


class BinaryWord:
    """Exact dyadic point of [0,1): y = sum b_k 2^-k over a finite bit word.

    The doubling map acts as an exact left shift on the word, which avoids
    the float collapse to 0 after ~53 iterations.
    """

    __slots__ = ("bits",)

    def __init__(self, bits: Sequence[int]):
        bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0 or 1")
        self.bits = bits

    @classmethod
    def from_float(cls, y: float, length: int = 256, rng=None) -> "BinaryWord":
        """Exact binary expansion of a float in [0,1), padded to `length` bits.

        Floats are dyadic rationals, so the leading <=52 bits are exact; the
        remainder is zero. With `rng` given, bits beyond the float's precision
        are filled by fair coin flips instead.
        """
        if not 0.0 <= y < 1.0:
            raise ValueError("y must lie in [0, 1)")
        frac = Fraction(y)
        bits = []
        for _ in range(length):
            frac *= 2
            bit = int(frac >= 1)
            if bit:
                frac -= 1
            bits.append(bit)
        if rng is not None:
            exact = _float_bit_count(y)
            for k in range(exact, length):
                bits[k] = int(rng.integers(0, 2))
        return cls(bits)

    def value(self) -> float:
        v = 0.0
        for k, b in enumerate(self.bits[:60], start=1):
            if b:
                v += 2.0 ** -k
        return v

    def shift(self) -> "BinaryWord":
        """One Bernoulli step: drop the leading bit (exact doubling mod 1)."""
        return BinaryWord(self.bits[1:])

    def __len__(self) -> int:
        return len(self.bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, BinaryWord) and self.bits == other.bits

    def __repr__(self) -> str:
        shown = "".join(str(b) for b in self.bits[:24])
        more = "..." if len(self.bits) > 24 else ""
        return f"BinaryWord(0.{shown}{more}, {len(self.bits)} bits)"


def _float_bit_count(y: float) -> int:
    """Number of binary digits needed to represent the float y exactly."""
    frac = Fraction(y)
    n = 0
    while frac != 0 and n < 1100:
        frac *= 2
        if frac >= 1:
            frac -= 1
        n += 1
    return n


@dataclass(frozen=True)
class MapOrbit:
    y0: float
    ys: np.ndarray          # length n+1, values in [0,1]
    branch_bits: np.ndarray  # branch_bits[k] = 1 iff ys[k] > 1/2

    def __len__(self) -> int:
        return len(self.ys)


def iterate_map(y0, n: int, kind: str = "bernoulli") -> MapOrbit:
    """Iterate the chosen interval map for n steps.

    y0 may be a float or a BinaryWord; words keep the doubling exact for
    orbits longer than float precision allows.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if kind not in ("bernoulli", "coherent"):
        raise ValueError("kind must be 'bernoulli' or 'coherent'")
    if isinstance(y0, BinaryWord):
        if kind != "bernoulli":
            raise ValueError("binary words only support the bernoulli map")
        if len(y0) <= n:
            raise PrecisionExhausted(f"word of {len(y0)} bits cannot run {n} steps")
        word = y0
        ys = [word.value()]
        for _ in range(n):
            word = word.shift()
            ys.append(word.value())
        ys = np.array(ys)
        return MapOrbit(ys[0], ys, (ys > 0.5).astype(int))
    step = bernoulli_step if kind == "bernoulli" else coherent_step
    ys = np.empty(n + 1)
    ys[0] = float(y0)
    for k in range(n):
        ys[k + 1] = step(ys[k])
    return MapOrbit(float(y0), ys, (ys > 0.5).astype(int))


def lyapunov_estimate(
    y0: float,
    delta0: float,
    n: int,
    kind: str = "bernoulli",
    step_delay: float | None = None,
) -> dict:
    """Two-orbit separation estimate of the Lyapunov exponent.

    Requires 2^n * delta0 < 0.1 so the separation stays in the linear window;
    raises SaturatedSeparation otherwise (also if the measured separation
    leaves the window, e.g. when the orbits straddle the branch point).
    """
    if delta0 <= 0:
        raise ValueError("delta0 must be positive")
    if kind == "bernoulli" and 2.0 ** n * delta0 >= 0.1:
        raise SaturatedSeparation(f"2^{n} * {delta0} >= 0.1")
    a = iterate_map(y0, n, kind).ys
    b = iterate_map(y0 + delta0, n, kind).ys
    sep = np.abs(b - a)
    sep = np.minimum(sep, 1.0 - sep)  # circle distance
    if np.any(sep[1:] >= 0.1) or sep[-1] == 0.0:
        raise SaturatedSeparation("measured separation left the linear window")
    exponent = math.log(sep[-1] / sep[0]) / n
    out = {"exponent": exponent, "separation": float(sep[-1]), "n": n}
    if step_delay is not None:
        out["tau"] = step_delay / abs(exponent)
    return out


def branch_history(y0, n: int) -> list[int]:
    """First n binary digits of y0 = the gate sequence under the shift.

    Accepts a float (digits beyond its 52-bit precision raise
    PrecisionExhausted), a BinaryWord, or an explicit bit sequence.
    """
    if isinstance(y0, BinaryWord):
        if len(y0) < n:
            raise PrecisionExhausted(f"word has {len(y0)} bits, need {n}")
        return list(y0.bits[:n])
    if isinstance(y0, (list, tuple)):
        return list(BinaryWord(y0).bits[:n])
    y0 = float(y0)
    if not 0.0 <= y0 < 1.0:
        raise ValueError("y0 must lie in [0, 1)")
    if n > 52:
        raise PrecisionExhausted("float input supplies at most 52 reliable bits")
    return list(BinaryWord.from_float(y0, length=max(n, 1)).bits[:n])
