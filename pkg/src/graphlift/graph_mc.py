"""Reduced single-edge prediction graphs between an odd and an even frame.

Each pixel ``i`` of the even frame keeps exactly one edge, to the pixel
``j(i) = i + (dx, dy)`` of the odd frame.  Offsets are stored as two int
planes; ``dx`` runs along x (columns) and ``dy`` along y (rows).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._accel import NUMBA_ENABLED, kernel


@dataclass(frozen=True)
class ReducedAdjacency:
    dx: np.ndarray
    dy: np.ndarray

    def __post_init__(self):
        if self.dx.shape != self.dy.shape or self.dx.ndim != 2:
            raise ValueError("dx and dy must be 2-D planes of equal shape")

    @property
    def shape(self) -> tuple[int, int]:
        return self.dx.shape

    @classmethod
    def identity(cls, height: int, width: int) -> "ReducedAdjacency":
        z = np.zeros((height, width), dtype=np.int16)
        return cls(z, z.copy())

    @classmethod
    def from_offsets(cls, dx, dy) -> "ReducedAdjacency":
        adj = cls(np.asarray(dx, dtype=np.int16), np.asarray(dy, dtype=np.int16))
        adj.validate()
        return adj

    def end_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """``(end_y, end_x)`` of every start pixel."""
        h, w = self.shape
        yy, xx = np.mgrid[0:h, 0:w]
        return yy + self.dy, xx + self.dx

    def end_index(self) -> np.ndarray:
        """Flat (row-major) odd-frame index ``j(i)`` per start pixel."""
        ey, ex = self.end_coords()
        return ey.astype(np.int64) * self.shape[1] + ex

    def validate(self, r_max: int | None = None) -> None:
        ey, ex = self.end_coords()
        h, w = self.shape
        if ey.min(initial=0) < 0 or ex.min(initial=0) < 0 or ey.max(initial=0) >= h or ex.max(initial=0) >= w:
            raise ValueError("adjacency has end nodes outside the frame")
        if r_max is not None and max(np.abs(self.dx).max(initial=0), np.abs(self.dy).max(initial=0)) > r_max:
            raise ValueError(f"adjacency offset exceeds r_max={r_max}")

    def __eq__(self, other):
        if not isinstance(other, ReducedAdjacency):
            return NotImplemented
        return np.array_equal(self.dx, other.dx) and np.array_equal(self.dy, other.dy)

    __hash__ = None


@lru_cache(maxsize=None)
def candidate_offsets(r_max: int) -> np.ndarray:
    """All offsets of the ``r_max`` box in search-preference order.

    Rows are ``(dx, dy, chebyshev)`` sorted by Chebyshev distance, then by
    embedded index (column-major over the box).  A strict ``<`` scan in
    this order implements the tie-breaking rule.
    """
    side = 2 * r_max + 1
    rows = []
    for dx in range(-r_max, r_max + 1):
        for dy in range(-r_max, r_max + 1):
            symbol = (dx + r_max) * side + (dy + r_max) + 1
            rows.append((max(abs(dx), abs(dy)), symbol, dx, dy))
    rows.sort()
    out = np.array([(dx, dy, c) for c, _, dx, dy in rows], dtype=np.int64)
    out.setflags(write=False)
    return out


def similarity(a, b):
    """Edge weight between two connected nodes: ``1 / (1 + |a - b|)``."""
    return 1.0 / (1.0 + np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)))


@kernel
def _search_kernel(f_odd, f_even, radius, offsets, out_dx, out_dy):
    h, w = f_even.shape
    n_off = offsets.shape[0]
    for y in range(h):
        for x in range(w):
            r = radius[y, x]
            v = f_even[y, x]
            best = -1
            for k in range(n_off):
                c = offsets[k, 2]
                if c > r:
                    break
                ex = x + offsets[k, 0]
                ey = y + offsets[k, 1]
                if ex < 0 or ey < 0 or ex >= w or ey >= h:
                    continue
                d = abs(v - f_odd[ey, ex])
                if best < 0 or d < best:
                    best = d
                    out_dx[y, x] = offsets[k, 0]
                    out_dy[y, x] = offsets[k, 1]
                    if d == 0:
                        break


def _search_numpy(f_odd, f_even, radius, offsets, out_dx, out_dy):
    h, w = f_even.shape
    yy, xx = np.mgrid[0:h, 0:w]
    best = np.full((h, w), np.iinfo(np.int64).max, dtype=np.int64)
    for dx, dy, c in offsets:
        ex, ey = xx + dx, yy + dy
        ok = (radius >= c) & (ex >= 0) & (ey >= 0) & (ex < w) & (ey < h)
        d = np.full((h, w), np.iinfo(np.int64).max, dtype=np.int64)
        d[ok] = np.abs(f_even[ok] - f_odd[ey[ok], ex[ok]])
        better = d < best
        best[better] = d[better]
        out_dx[better] = dx
        out_dy[better] = dy


def estimate_motion(f_odd, f_even, radius_map, *, use_numba: bool | None = None) -> ReducedAdjacency:
    """Reduced prediction graph: per even pixel, the most similar odd pixel.

    The search covers the clipped ``(2r+1)^2`` box with ``r = radius_map[y, x]``.
    Maximising ``1 / (1 + |diff|)`` is minimising ``|diff|``; ties go to the
    smallest Chebyshev offset, then the smallest embedded index.
    """
    f_odd = np.asarray(f_odd, dtype=np.int64)
    f_even = np.asarray(f_even, dtype=np.int64)
    if f_odd.shape != f_even.shape:
        raise ValueError(f"frame shapes differ: {f_odd.shape} vs {f_even.shape}")
    radius = np.broadcast_to(np.asarray(radius_map, dtype=np.int64), f_even.shape)
    r_max = int(radius.max(initial=1))
    if radius.min(initial=1) < 0:
        raise ValueError("negative radius")
    offsets = candidate_offsets(max(r_max, 0))
    dx = np.zeros(f_even.shape, dtype=np.int16)
    dy = np.zeros(f_even.shape, dtype=np.int16)
    if NUMBA_ENABLED if use_numba is None else use_numba:
        _search_kernel(f_odd, f_even, np.ascontiguousarray(radius), offsets, dx, dy)
    else:
        _search_numpy(f_odd, f_even, radius, offsets, dx, dy)
    return ReducedAdjacency(dx, dy)


def count_candidates(width: int, height: int, r: int) -> int:
    """Number of edges of the fully connected radius-``r`` graph (clipped)."""
    if r < 0:
        raise ValueError("r must be >= 0")

    def per_axis(n):
        i = np.arange(n)
        return int((np.minimum(i + r, n - 1) - np.maximum(i - r, 0) + 1).sum())

    return per_axis(width) * per_axis(height)


def warp(frame_odd, adjacency: ReducedAdjacency) -> np.ndarray:
    """Motion-compensated prediction ``out(i) = frame_odd(j(i))``."""
    frame_odd = np.asarray(frame_odd)
    if frame_odd.shape != adjacency.shape:
        raise ValueError(f"frame {frame_odd.shape} does not match adjacency {adjacency.shape}")
    ey, ex = adjacency.end_coords()
    return frame_odd[ey, ex]


def column_counts(adjacency: ReducedAdjacency) -> np.ndarray:
    """``d_j``: how many start nodes point at each odd pixel ``j``."""
    h, w = adjacency.shape
    return np.bincount(adjacency.end_index().ravel(), minlength=h * w).reshape(h, w)
