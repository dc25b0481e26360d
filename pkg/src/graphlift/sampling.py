"""Sparse sampling masks for motion maps and decoder-side reconstruction.

The 4x4 patch for density index ``k`` switches on ``k`` of its 16 pixels.
Pixels are acquired one at a time: each position of the top-left 2x2
block (in the order ``(0,0), (1,1), (1,0), (0,1)`` as ``(x, y)``) is
copied in turn to the quadrants top-left, bottom-right, top-right,
bottom-left.  So ``k = 4`` has one pixel per quadrant, ``k = 16`` is
full, and patch ``k`` is contained in patch ``k + 1``.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage
from scipy.interpolate import LinearNDInterpolator
from scipy.spatial import QhullError

from ._accel import kernel
from .motion_map import decode_index, embed_index, identity_symbol

N_DENSITIES = 16
METHODS = ("nearest", "linear", "natural")

_INNER_ORDER = ((0, 0), (1, 1), (1, 0), (0, 1))
_QUADRANT_ORDER = ((0, 0), (2, 2), (2, 0), (0, 2))


def patch_order() -> list[tuple[int, int]]:
    """``(x, y)`` positions in the 4x4 patch in acquisition order."""
    return [(px + qx, py + qy) for px, py in _INNER_ORDER for qx, qy in _QUADRANT_ORDER]


def sampling_patch(k: int) -> np.ndarray:
    if not 1 <= k <= N_DENSITIES:
        raise ValueError(f"density index {k} outside 1..{N_DENSITIES}")
    patch = np.zeros((4, 4), dtype=np.uint8)
    for x, y in patch_order()[:k]:
        patch[y, x] = 1
    return patch


def build_sampling_mask(k: int, width: int, height: int) -> np.ndarray:
    """Tile the density-``k`` patch over a ``height x width`` frame."""
    patch = sampling_patch(k)
    reps = (-(-height // 4), -(-width // 4))
    return np.tile(patch, reps)[:height, :width].copy()


def density(k: int) -> float:
    return k / N_DENSITIES


def subsample(motion_map, sampling_mask) -> np.ndarray:
    m = np.asarray(motion_map)
    s = np.asarray(sampling_mask)
    if m.shape != s.shape:
        raise ValueError("map and sampling mask shapes differ")
    return np.where(s != 0, m, 0).astype(m.dtype)


def round_half_toward_zero(v: np.ndarray) -> np.ndarray:
    return np.sign(v) * np.ceil(np.abs(v) - 0.5)


def _nearest_site(known: np.ndarray):
    """Squared distance to, and coordinates of, the nearest known pixel."""
    dist, (iy, ix) = ndimage.distance_transform_edt(~known, return_indices=True)
    # squared distances are integers; recompute them exactly
    yy, xx = np.indices(known.shape)
    d2 = (iy - yy) ** 2 + (ix - xx) ** 2
    return d2.astype(np.int64), iy.astype(np.int64), ix.astype(np.int64)


def _interp_nearest(known, values, queries):
    _, iy, ix = _nearest_site(known)
    qy, qx = queries
    return [v[iy[qy, qx], ix[qy, qx]].astype(np.float64) for v in values]


def _interp_linear(known, values, queries):
    ky, kx = np.nonzero(known)
    qy, qx = queries
    nearest = _interp_nearest(known, values, queries)
    if ky.size < 3:
        return nearest
    pts = np.column_stack([kx, ky]).astype(np.float64)
    try:
        interp = LinearNDInterpolator(pts, np.column_stack([v[ky, kx] for v in values]).astype(np.float64))
    except QhullError:  # all known samples collinear
        return nearest
    res = interp(np.column_stack([qx, qy]).astype(np.float64))
    out = []
    for c, fallback in enumerate(nearest):
        col = res[:, c]
        outside = np.isnan(col)
        col[outside] = fallback[outside]
        out.append(col)
    return out


@kernel
def _sibson_kernel(domain, d2, site_y, site_x, qy, qx, vx, vy, out_x, out_y):
    # Discrete Sibson interpolation: inserting query q steals every domain
    # pixel p (8-connected to q through stolen pixels) with |p - q|^2 < d2[p];
    # each stolen pixel votes for the site that owned it.
    h, w = domain.shape
    stamp = np.zeros((h, w), dtype=np.int64)
    stack_y = np.empty(h * w, dtype=np.int64)
    stack_x = np.empty(h * w, dtype=np.int64)
    for n in range(qy.shape[0]):
        y0 = qy[n]
        x0 = qx[n]
        tag = n + 1
        top = 0
        stack_y[0] = y0
        stack_x[0] = x0
        stamp[y0, x0] = tag
        top = 1
        wsum = 0.0
        sx = 0.0
        sy = 0.0
        while top > 0:
            top -= 1
            py = stack_y[top]
            px = stack_x[top]
            oy = site_y[py, px]
            ox = site_x[py, px]
            wsum += 1.0
            sx += vx[oy, ox]
            sy += vy[oy, ox]
            for ny in range(py - 1, py + 2):
                if ny < 0 or ny >= h:
                    continue
                for nx in range(px - 1, px + 2):
                    if nx < 0 or nx >= w:
                        continue
                    if stamp[ny, nx] == tag or not domain[ny, nx]:
                        continue
                    ddy = ny - y0
                    ddx = nx - x0
                    if ddy * ddy + ddx * ddx < d2[ny, nx]:
                        stamp[ny, nx] = tag
                        stack_y[top] = ny
                        stack_x[top] = nx
                        top += 1
        out_x[n] = sx / wsum
        out_y[n] = sy / wsum


def _interp_natural(known, values, queries, domain):
    d2, iy, ix = _nearest_site(known)
    qy, qx = queries
    out_x = np.empty(qy.size, dtype=np.float64)
    out_y = np.empty(qy.size, dtype=np.float64)
    vx, vy = (np.ascontiguousarray(v, dtype=np.float64) for v in values)
    _sibson_kernel(np.ascontiguousarray(domain, dtype=np.bool_), d2, iy, ix,
                   qy.astype(np.int64), qx.astype(np.int64), vx, vy, out_x, out_y)
    return [out_x, out_y]


def interpolate(sub_map, binary_mask, sampling_mask, r_max: int, method: str = "nearest") -> np.ndarray:
    """Reconstruct the decoder-side motion map from its transmitted samples.

    Known samples sit where ``B = 1`` and ``S = 1``; positions with
    ``B = 1, S = 0`` are interpolated on the ``dx`` and ``dy`` planes,
    rounded (halves toward zero), clamped to the ``r_max`` box and the
    frame, and re-embedded.  ``B = 0`` becomes the identity symbol, as
    does everything when no sample is known.
    """
    if method not in METHODS:
        raise ValueError(f"unknown interpolation method {method!r}; expected one of {METHODS}")
    m = np.asarray(sub_map, dtype=np.int64)
    b = np.asarray(binary_mask) != 0
    s = np.asarray(sampling_mask) != 0
    if not (m.shape == b.shape == s.shape):
        raise ValueError("map and masks must share one shape")
    ident = identity_symbol(r_max)
    out = np.full(m.shape, ident, dtype=np.int32)
    known = b & s
    if not known.any():
        return out
    if np.any(m[known] == 0):
        raise ValueError("transmitted positions must carry nonzero symbols")
    out[known] = m[known]
    missing = b & ~s
    if not missing.any():
        return out

    dx = np.zeros(m.shape, dtype=np.int64)
    dy = np.zeros(m.shape, dtype=np.int64)
    dx[known], dy[known] = decode_index(m[known], r_max)
    queries = np.nonzero(missing)
    if method == "nearest":
        est = _interp_nearest(known, (dx, dy), queries)
    elif method == "linear":
        est = _interp_linear(known, (dx, dy), queries)
    else:
        est = _interp_natural(known, (dx, dy), queries, b)

    qy, qx = queries
    h, w = m.shape
    ex = np.clip(round_half_toward_zero(est[0]), -r_max, r_max).astype(np.int64)
    ey = np.clip(round_half_toward_zero(est[1]), -r_max, r_max).astype(np.int64)
    ex = np.clip(ex, -qx, w - 1 - qx)
    ey = np.clip(ey, -qy, h - 1 - qy)
    out[qy, qx] = embed_index(ex, ey, r_max)
    return out
