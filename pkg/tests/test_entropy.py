import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphlift._accel import python_impl
from graphlift.entropy import (
    CorruptStreamError,
    ac_decode,
    ac_encode,
    bilevel_decode,
    bilevel_encode,
    curve_order,
    delete_zeros,
    hilbert_scan,
    hilbert_unscan,
    reinsert_zeros,
    scan_order,
)
from graphlift.entropy.bilevel import _encode_bilevel
from graphlift.entropy.rangecoder import _encode_prev_context

HILBERT_8 = [
    [0, 3, 4, 5, 58, 59, 60, 63],
    [1, 2, 7, 6, 57, 56, 61, 62],
    [14, 13, 8, 9, 54, 55, 50, 49],
    [15, 12, 11, 10, 53, 52, 51, 48],
    [16, 17, 30, 31, 32, 33, 46, 47],
    [19, 18, 29, 28, 35, 34, 45, 44],
    [20, 23, 24, 27, 36, 39, 40, 43],
    [21, 22, 25, 26, 37, 38, 41, 42],
]

dims = st.integers(1, 40)


# -- Hilbert scan ---------------------------------------------------------

def test_hilbert_golden_8x8():
    visit = np.empty(64, dtype=int)
    visit[scan_order(8, 8)] = np.arange(64)
    assert visit.reshape(8, 8).tolist() == HILBERT_8


def test_curve_order():
    assert curve_order(512, 512) == 512
    assert curve_order(144, 192) == 256
    assert curve_order(1, 1) == 1
    assert curve_order(5, 3) == 8


def test_hilbert_steps_are_adjacent_on_full_grid():
    order = scan_order(16, 16)
    y, x = np.divmod(order, 16)
    assert np.all(np.abs(np.diff(x)) + np.abs(np.diff(y)) == 1)


@given(dims, dims)
def test_hilbert_bijection(w, h):
    order = scan_order(w, h)
    assert np.array_equal(np.sort(order), np.arange(w * h))
    m = np.arange(w * h).reshape(h, w) * 7 % 101
    np.testing.assert_array_equal(hilbert_unscan(hilbert_scan(m), w, h), m)


def test_hilbert_144x192():
    rng = np.random.default_rng(0)
    m = rng.integers(0, 50, (192, 144))
    np.testing.assert_array_equal(hilbert_unscan(hilbert_scan(m), 144, 192), m)


def test_unscan_length_check():
    with pytest.raises(ValueError):
        hilbert_unscan(np.zeros(5), 2, 2)


@given(dims, dims, st.integers(0, 2**32 - 1))
def test_zero_deletion_roundtrip(w, h, seed):
    rng = np.random.default_rng(seed)
    b = rng.integers(0, 2, (h, w))
    s = rng.integers(0, 2, (h, w))
    m = rng.integers(1, 50, (h, w)) * b * s
    sym = hilbert_scan(m)
    stream = delete_zeros(sym, b, s)
    assert stream.size == int((b * s).sum())
    np.testing.assert_array_equal(reinsert_zeros(stream, b, s), sym)


def test_zero_deletion_extremes():
    ones = np.ones((3, 5))
    assert delete_zeros(np.arange(15), ones, ones).size == 15
    assert delete_zeros(np.arange(15), np.zeros((3, 5)), ones).size == 0
    with pytest.raises(ValueError):
        reinsert_zeros(np.arange(3), ones, ones)


# -- adaptive range coder -------------------------------------------------

def test_ac_empty():
    blob = ac_encode(np.zeros(0, int), 49)
    assert blob == b"\0\0\0\0"
    assert ac_decode(blob, 49).size == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 300), st.integers(0, 3000), st.integers(0, 2**32 - 1))
def test_ac_roundtrip(alphabet, n, seed):
    rng = np.random.default_rng(seed)
    # skewed source so the adaptive models and rescaling get exercised
    sym = np.minimum(rng.geometric(0.3, n) - 1, alphabet - 1)
    np.testing.assert_array_equal(ac_decode(ac_encode(sym, alphabet), alphabet), sym)


def test_ac_long_stream_rescales():
    rng = np.random.default_rng(1)
    sym = rng.integers(0, 3, 60_000)
    np.testing.assert_array_equal(ac_decode(ac_encode(sym, 3), 3), sym)


def test_ac_constant_stream_is_tiny():
    blob = ac_encode(np.full(10_000, 24), 49)
    assert len(blob) * 8 < 0.01 * 10_000 * math.log2(49)


def test_ac_uniform_near_entropy():
    rng = np.random.default_rng(2)
    sym = rng.integers(0, 49, 20_000)
    bound = sym.size * math.log2(49) / 8
    size = len(ac_encode(sym, 49)) - 4
    assert bound * 0.99 <= size <= bound * 1.03


def test_ac_rejects_bad_input():
    with pytest.raises(ValueError):
        ac_encode([3], 3)
    with pytest.raises(ValueError):
        ac_encode([-1], 3)
    with pytest.raises(ValueError):
        ac_encode([0], 0)


def test_ac_corrupt_streams():
    rng = np.random.default_rng(3)
    blob = ac_encode(rng.integers(0, 49, 500), 49)
    with pytest.raises(CorruptStreamError):
        ac_decode(blob[:3], 49)
    with pytest.raises(CorruptStreamError):
        ac_decode(blob[:-5], 49)
    with pytest.raises(CorruptStreamError):
        ac_decode(blob + b"\0\0", 49)
    with pytest.raises(CorruptStreamError):
        ac_decode(b"\xff\xff\xff\xff\x00", 49)


def test_ac_kernel_matches_python():
    rng = np.random.default_rng(4)
    sym = rng.integers(0, 9, 400)
    fast = _encode_prev_context(sym, 9)
    slow = python_impl(_encode_prev_context)(sym, 9)
    np.testing.assert_array_equal(fast, slow)


# -- bi-level coder -------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(dims, dims, st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_bilevel_roundtrip(w, h, p, seed):
    rng = np.random.default_rng(seed)
    m = (rng.random((h, w)) < p).astype(np.uint8)
    np.testing.assert_array_equal(bilevel_decode(bilevel_encode(m), w, h), m)


def test_bilevel_144x192():
    rng = np.random.default_rng(5)
    m = (rng.random((192, 144)) < 0.3).astype(np.uint8)
    np.testing.assert_array_equal(bilevel_decode(bilevel_encode(m), 144, 192), m)


def test_bilevel_structured_masks_are_cheap():
    assert len(bilevel_encode(np.zeros((256, 256)))) < 32
    m = np.zeros((256, 256), np.uint8)
    m[60:170, 40:200] = 1
    assert 8 * len(bilevel_encode(m)) / m.size < 0.1


def test_bilevel_errors():
    m = np.ones((10, 12), np.uint8)
    blob = bilevel_encode(m)
    with pytest.raises(CorruptStreamError):
        bilevel_decode(blob, 12, 11)
    with pytest.raises(CorruptStreamError):
        bilevel_decode(blob[:2], 12, 10)
    with pytest.raises(CorruptStreamError):
        bilevel_decode(blob + b"\x01", 12, 10)
    with pytest.raises(ValueError):
        bilevel_encode(np.ones(5))


def test_bilevel_kernel_matches_python():
    rng = np.random.default_rng(6)
    m = (rng.random((20, 30)) < 0.4).astype(np.int64)
    np.testing.assert_array_equal(_encode_bilevel(m), python_impl(_encode_bilevel)(m))
