import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from walkforge.lattice import (
    FormatError,
    InfeasibleTargetError,
    IntegrityError,
    ProbabilitySequence,
    SupportError,
    WaveField,
    from_storage_index,
    probability_from_wavefield,
    prefix_sums,
    suffix_sums,
    to_storage_index,
)


def test_storage_index_examples():
    assert to_storage_index(-2, 2) == 0
    assert to_storage_index(0, 2) == 1
    assert to_storage_index(2, 2) == 2


def test_storage_index_rejects_parity():
    with pytest.raises(SupportError, match="parity"):
        to_storage_index(1, 2)


def test_storage_index_rejects_cone():
    with pytest.raises(SupportError, match="light cone"):
        to_storage_index(5, 2)
    with pytest.raises(SupportError, match="negative time"):
        to_storage_index(0, -1)


@given(st.integers(0, 300), st.data())
def test_storage_index_round_trip(t, data):
    n = data.draw(st.integers(-t, t).map(lambda m: m - (m + t) % 2))
    if abs(n) > t:
        n += 2
    k = to_storage_index(n, t)
    assert 0 <= k <= t
    assert from_storage_index(k, t) == n


@given(st.lists(st.floats(0, 1e3, allow_nan=False), min_size=1, max_size=200))
def test_prefix_suffix_sums_match_fsum(values):
    arr = np.array(values)
    pre = prefix_sums(arr)
    suf = suffix_sums(arr)
    assert suf[-1] == 0.0
    for k in (0, len(arr) // 2, len(arr) - 1):
        assert pre[k] == pytest.approx(math.fsum(arr[: k + 1]), abs=1e-9, rel=1e-12)
        assert suf[k] == pytest.approx(math.fsum(arr[k:]), abs=1e-9, rel=1e-12)


def test_probability_sequence_rejects_bad_slice_length():
    with pytest.raises(FormatError, match="slice t=1"):
        ProbabilitySequence([[1.0], [1.0]])


def test_probability_sequence_rejects_bad_normalisation():
    with pytest.raises(FormatError, match="sums to"):
        ProbabilitySequence([[1.0], [0.3, 0.3]])


def test_probability_sequence_clamps_cancellation_noise():
    rho = ProbabilitySequence([[1.0], [1.0 + 5e-13, -5e-13]])
    assert rho.value(1, 1) == 0.0


def test_probability_sequence_rejects_real_negatives():
    with pytest.raises(InfeasibleTargetError, match=r"n=1, t=1"):
        ProbabilitySequence([[1.0], [1.001, -1e-3]])


def test_probability_sequence_immutable():
    rho = ProbabilitySequence([[1.0]])
    with pytest.raises(ValueError):
        rho.slices[0][0] = 0.5


def test_wavefield_requires_edge_zeros():
    with pytest.raises(IntegrityError, match="cone edge"):
        WaveField([[1.0], [0.0, 0.7]], [[0.0], [0.0, math.sqrt(1 - 0.49)]])


def test_probability_from_wavefield_initial_condition():
    w = WaveField([[1.0]], [[0.0]])
    rho = probability_from_wavefield(w)
    assert rho.value(0, 0) == 1.0


def test_probability_from_wavefield_uniform_slice():
    # Uniform-target components at t = 2: psi+- = sqrt((t +- n) / (2t(t+1)))
    t = 2
    plus = [np.array([1.0]), np.array([0.0, math.sqrt(0.5)]),
            np.array([0.0, math.sqrt(2 / 12), math.sqrt(4 / 12)])]
    minus = [np.array([0.0]), np.array([math.sqrt(0.5), 0.0]),
             np.array([math.sqrt(4 / 12), math.sqrt(2 / 12), 0.0])]
    rho = probability_from_wavefield(WaveField(plus, minus))
    assert rho.value(0, 2) == pytest.approx(1 / 3, abs=1e-15)
    assert rho.value(2, 2) == pytest.approx(1 / 3, abs=1e-15)


def test_probability_from_wavefield_rejects_denormalised():
    plus = [np.array([1.0]), np.array([0.0, 0.8])]
    minus = [np.array([0.0]), np.array([0.6, 0.0])]
    w = WaveField(plus, minus)
    # Corrupt via direct construction is blocked, so check the guard through
    # a nearly-normalised field instead: 1e-10 drift passes, 1e-8 cannot be
    # built at all.
    assert probability_from_wavefield(w).value(1, 1) == pytest.approx(0.64)
    with pytest.raises(IntegrityError):
        WaveField([np.array([1.0]), np.array([0.0, 0.8])],
                  [np.array([0.0]), np.array([0.7, 0.0])])
