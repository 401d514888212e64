import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pilotwave.errors import BadGridSize, NotNormalized, OrderTooHigh
from pilotwave.frobenius import (SpectralDecomposition, UnitDensity,
                                 bernoulli_poly, pf_apply, relaxation_distance,
                                 spectral_coefficients, spectral_evolve)


def test_bernoulli_polynomial_values():
    # classical endpoint/midpoint values
    assert bernoulli_poly(1, 0.0) == -0.5
    assert bernoulli_poly(1, 1.0) == 0.5
    assert abs(bernoulli_poly(2, 0.0) - 1.0 / 6.0) < 1e-15
    assert abs(bernoulli_poly(3, 0.5)) < 1e-15
    assert abs(bernoulli_poly(4, 0.0) + 1.0 / 30.0) < 1e-15
    # each B_m integrates to zero over [0, 1]
    y = np.linspace(0.0, 1.0, 10001)
    for m in range(1, 7):
        assert abs(np.trapezoid(bernoulli_poly(m, y), y)) < 1e-8


def test_bernoulli_order_guard():
    with pytest.raises(OrderTooHigh):
        bernoulli_poly(9, 0.3)


def test_grid_size_guard():
    with pytest.raises(BadGridSize):
        UnitDensity(np.ones(100))


def test_not_normalized_guard():
    with pytest.raises(NotNormalized):
        UnitDensity(2.0 * np.ones(2**8 + 1))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.05, 3.0), min_size=4, max_size=8))
def test_pf_preserves_norm_and_positivity(knots):
    # random positive piecewise-linear density
    y = np.linspace(0.0, 1.0, 2**10 + 1)
    vals = np.interp(y, np.linspace(0.0, 1.0, len(knots)), knots)
    f = UnitDensity.from_values(vals, normalize=True)
    g = pf_apply(f)
    assert abs(g.integral() - 1.0) < 1e-12
    assert np.min(g.values) >= 0.0
    # sup distance from equilibrium never grows
    assert relaxation_distance(g)["sup"] <= relaxation_distance(f)["sup"] + 1e-12


def test_pf_kills_fundamental_cosine():
    # (Uf)(y) = [f(y/2) + f((y+1)/2)]/2 cancels cos(2 pi y) in a single step
    f = UnitDensity.from_callable(lambda y: 1.0 + 0.5 * np.cos(2 * np.pi * y), K=12)
    out = pf_apply(f)
    assert np.max(np.abs(out.values - 1.0)) < 1e-7


def test_pf_halves_cosine_frequency():
    f = UnitDensity.from_callable(lambda y: 1.0 + 0.4 * np.cos(4 * np.pi * y), K=12)
    out = pf_apply(f)
    target = 1.0 + 0.4 * np.cos(2 * np.pi * f.y)
    assert np.max(np.abs(out.values - target)) < 1e-6


def test_linear_mode_is_exact_eigenfunction():
    # B_1 is piecewise linear, so the interpolating transfer operator is exact
    f = UnitDensity.from_callable(lambda y: 1.0 + 0.8 * (y - 0.5), K=12,
                                  normalize=False)
    out = pf_apply(f)
    target = 1.0 + 0.4 * (f.y - 0.5)
    assert np.max(np.abs(out.values - target)) < 1e-15


def test_spike_mass_and_spreading():
    f = UnitDensity.spike(1.0 / 3.0, K=12)
    assert abs(f.integral() - 1.0) < 1e-12
    sup0 = relaxation_distance(f)["sup"]
    sup1 = relaxation_distance(pf_apply(f))["sup"]
    # the off-node interpolation shifts the peak by half a cell
    assert abs(sup1 / sup0 - 0.5) < 1e-3


def test_spectral_roundtrip_and_evolution():
    f = UnitDensity.from_callable(
        lambda y: 1.0 + 0.6 * bernoulli_poly(1, y) + 0.8 * bernoulli_poly(3, y),
        K=12, normalize=False)
    dec = spectral_coefficients(f, M=4)
    assert abs(dec.coefficients[1] - 0.6) < 1e-6
    assert abs(dec.coefficients[3] - 0.8) < 1e-6
    assert dec.residual_sup < 1e-6
    # eigenbasis evolution agrees with the grid operator
    stepped = spectral_evolve(dec, 3).reconstruct(K=12)
    g = f
    for _ in range(3):
        g = pf_apply(g)
    assert np.max(np.abs(stepped.values - g.values)) < 1e-6


def test_spectral_decomposition_normalization_guard():
    with pytest.raises(NotNormalized):
        SpectralDecomposition(np.array([0.9, 0.1]), 1)
