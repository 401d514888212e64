import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pilotwave.errors import (OutOfSupport, PrecisionExhausted,
                              SaturatedSeparation)
from pilotwave.maps import (BinaryWord, SegmentSpec, bernoulli_step,
                            branch_history, coherent_step, iterate_map,
                            lyapunov_estimate, x_to_y, y_to_x)


@settings(max_examples=200)
@given(y=st.floats(0.0, 1.0, exclude_max=True))
def test_bernoulli_is_doubling_mod_one(y):
    assert bernoulli_step(y) == math.fmod(2.0 * y, 1.0)


@settings(max_examples=200)
@given(y=st.floats(0.0, 1.0))
def test_coherent_is_upper_half_contraction(y):
    out = coherent_step(y)
    assert 0.5 <= out <= 1.0
    assert out == y / 2.0 + 0.5


def test_coherent_fixed_point():
    y = 0.37
    for _ in range(200):
        y = coherent_step(y)
    assert abs(y - 1.0) < 1e-15


def test_branch_bits_are_binary_digits():
    # 0.10101 in binary
    y0 = 1 / 2 + 1 / 8 + 1 / 32
    assert branch_history(y0, 4) == [1, 0, 1, 0]
    orbit = iterate_map(y0, 4)
    assert list(orbit.branch_bits[:4]) == [1, 0, 1, 0]


def test_binary_word_matches_float_iteration():
    y0 = 0.721519
    word = BinaryWord.from_float(y0, length=80)
    a = iterate_map(y0, 20).ys
    b = iterate_map(word, 20).ys
    assert np.max(np.abs(a - b)) < 1e-12


def test_binary_word_precision_exhausted():
    word = BinaryWord.from_float(0.3, length=10)
    with pytest.raises(PrecisionExhausted):
        iterate_map(word, 10)


@settings(max_examples=100)
@given(y=st.floats(0.0, 1.0),
       epoch=st.sampled_from(["initial", "final"]),
       gate=st.sampled_from(["plus", "minus"]))
def test_chart_roundtrip(y, epoch, gate):
    seg = SegmentSpec(epoch, gate, 48.0, 32.0)
    half = (0.5, 1.0) if gate == "plus" else (0.0, 0.5)
    y = half[0] + y * (half[1] - half[0])
    assert abs(x_to_y(y_to_x(y, seg), seg) - y) < 1e-12


def test_chart_out_of_support():
    seg = SegmentSpec("initial", "plus", 48.0, 32.0)
    with pytest.raises(OutOfSupport):
        x_to_y(0.0, seg)


def test_lyapunov_is_ln2_exact():
    out = lyapunov_estimate(0.3, 1e-13, 30)
    assert abs(out["exponent"] - math.log(2.0)) < 1e-12


def test_lyapunov_saturation_guard():
    with pytest.raises(SaturatedSeparation):
        lyapunov_estimate(0.3, 1e-3, 10)  # 2^10 * 1e-3 > 0.1


def test_sensitive_dependence_divergence_step():
    a = iterate_map(0.22, 40).ys
    b = iterate_map(0.22 + 1e-6, 40).ys
    sep = np.minimum(np.abs(a - b), 1.0 - np.abs(a - b))
    first = int(np.nonzero(sep > 0.1)[0][0])
    # delta 2^n >= 0.1 requires n >= 17; chaos cannot beat the doubling rate
    assert 17 <= first <= 25
