import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphlift._accel import python_impl
from graphlift.motion_map import decode_index, embed_index, fill_identity
from graphlift.sampling import (
    METHODS,
    _nearest_site,
    _sibson_kernel,
    build_sampling_mask,
    density,
    interpolate,
    patch_order,
    round_half_toward_zero,
    sampling_patch,
    subsample,
)


def test_patch_order_is_a_permutation():
    assert sorted(patch_order()) == [(x, y) for x in range(4) for y in range(4)]
    assert patch_order()[:4] == [(0, 0), (2, 2), (2, 0), (0, 2)]


@pytest.mark.parametrize("k", range(1, 17))
def test_density_and_nesting(k):
    m = build_sampling_mask(k, 64, 48)
    assert m.mean() == pytest.approx(density(k)) == pytest.approx(k / 16)
    if k < 16:
        assert np.all(m <= build_sampling_mask(k + 1, 64, 48))
    tiles = m.reshape(12, 4, 16, 4).sum(axis=(1, 3))
    assert np.all(tiles == k)


def test_named_densities():
    assert np.all(build_sampling_mask(16, 10, 7) == 1)
    assert sampling_patch(1).sum() == 1 and sampling_patch(1)[0, 0] == 1
    p4 = sampling_patch(4)
    for qy in (0, 2):
        for qx in (0, 2):
            assert p4[qy:qy + 2, qx:qx + 2].sum() == 1
            assert p4[qy, qx] == 1  # same position inside every quadrant
    with pytest.raises(ValueError):
        sampling_patch(0)
    with pytest.raises(ValueError):
        sampling_patch(17)


def test_subsample_support():
    rng = np.random.default_rng(0)
    m = rng.integers(0, 50, (9, 13)) * rng.integers(0, 2, (9, 13))
    s = build_sampling_mask(5, 13, 9)
    sub = subsample(m, s)
    np.testing.assert_array_equal(sub != 0, (m != 0) & (s != 0))
    np.testing.assert_array_equal(subsample(m, np.ones_like(m)), m)


def test_round_half_toward_zero():
    v = np.array([-2.5, -1.5, -0.5, -0.4, 0.5, 1.5, 1.6, 2.5])
    assert round_half_toward_zero(v).tolist() == [-2, -1, 0, 0, 0, 1, 2, 2]


@pytest.mark.parametrize("method", METHODS)
def test_full_sampling_needs_no_interpolation(method):
    rng = np.random.default_rng(1)
    m = rng.integers(1, 50, (8, 8))
    b = rng.integers(0, 2, (8, 8))
    mb = np.where(b == 1, m, 0)
    out = interpolate(mb, b, np.ones((8, 8)), 3, method)
    np.testing.assert_array_equal(out, fill_identity(mb, 3))


@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("k", [1, 3, 7, 12])
def test_constant_field_reproduced(method, k):
    h, w = 20, 24
    b = np.zeros((h, w), np.uint8)
    b[3:17, 2:20] = 1
    sym = embed_index(-1, 2, 3)
    s = build_sampling_mask(k, w, h)
    out = interpolate(np.where((b == 1) & (s == 1), sym, 0), b, s, 3, method)
    assert np.all(out[b == 1] == sym)
    assert np.all(out[b == 0] == 25)


def test_single_sample_nearest_propagates():
    b = np.ones((6, 6), np.uint8)
    s = np.zeros((6, 6), np.uint8)
    s[2, 3] = 1
    m = np.zeros((6, 6), int)
    m[2, 3] = embed_index(1, 0, 3)
    out = interpolate(m, b, s, 3, "nearest")
    # (+1, 0) is clamped to the frame in the last column only
    assert np.all(out[:, :5] == embed_index(1, 0, 3))
    assert np.all(out[:, 5] == 25)


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 20), st.integers(4, 20), st.integers(1, 16), st.sampled_from(METHODS),
       st.integers(0, 2**32 - 1))
def test_output_is_valid_in_frame(h, w, k, method, seed):
    rng = np.random.default_rng(seed)
    b = rng.integers(0, 2, (h, w)).astype(np.uint8)
    yy, xx = np.mgrid[0:h, 0:w]
    dx = np.clip(xx + rng.integers(-3, 4, (h, w)), 0, w - 1) - xx
    dy = np.clip(yy + rng.integers(-3, 4, (h, w)), 0, h - 1) - yy
    m = embed_index(dx, dy, 3)
    s = build_sampling_mask(k, w, h)
    out = interpolate(np.where((b == 1) & (s == 1), m, 0), b, s, 3, method)
    known = (b == 1) & (s == 1)
    np.testing.assert_array_equal(out[known], m[known])
    assert np.all(out[b == 0] == 25)
    ox, oy = decode_index(out, 3)
    assert np.all((xx + ox >= 0) & (xx + ox < w) & (yy + oy >= 0) & (yy + oy < h))


def test_linear_between_two_rows():
    # dx = -2 along row 0 and +2 along row 4; the midway row interpolates to 0
    b = np.ones((5, 8), np.uint8)
    s = np.zeros((5, 8), np.uint8)
    s[0, :] = s[4, :] = 1
    m = np.zeros((5, 8), int)
    m[0, 2:] = embed_index(-2, 0, 3)
    m[0, :2] = embed_index(-np.arange(2), 0, 3)
    m[4, :] = embed_index(np.minimum(2, 7 - np.arange(8)), 0, 3)
    m[4, 2:6] = embed_index(2, 0, 3)
    out = interpolate(m, b, s, 3, "linear")
    dx, _ = decode_index(out, 3)
    assert dx[2, 3] == 0 and dx[2, 4] == 0
    assert dx[1, 3] == -1 and dx[3, 3] == 1


def test_natural_kernel_agrees_with_python():
    rng = np.random.default_rng(4)
    known = rng.random((12, 15)) < 0.2
    known[0, 0] = True
    domain = np.ones((12, 15), bool)
    d2, iy, ix = _nearest_site(known)
    vx = rng.integers(-3, 4, (12, 15)).astype(np.float64)
    vy = rng.integers(-3, 4, (12, 15)).astype(np.float64)
    qy, qx = (a.astype(np.int64) for a in np.nonzero(~known))
    outs = []
    for fn in (_sibson_kernel, python_impl(_sibson_kernel)):
        ox = np.empty(qy.size)
        oy = np.empty(qy.size)
        fn(domain, d2, iy, ix, qy, qx, vx, vy, ox, oy)
        outs.append((ox, oy))
    np.testing.assert_array_equal(outs[0][0], outs[1][0])
    np.testing.assert_array_equal(outs[0][1], outs[1][1])


def test_interpolate_errors():
    z = np.zeros((4, 4), int)
    with pytest.raises(ValueError, match="unknown interpolation"):
        interpolate(z, z, z, 3, "cubic")
    with pytest.raises(ValueError, match="nonzero"):
        interpolate(z, np.ones((4, 4)), np.ones((4, 4)), 3)
    assert np.all(interpolate(z, z, np.ones((4, 4)), 3) == 25)
