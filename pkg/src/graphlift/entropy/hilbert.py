"""Peano-Hilbert scanning of arbitrary rectangles.

The curve is built on the enclosing ``2^n x 2^n`` grid with
``2^n = 2^ceil(log2(max(X, Y)))`` and positions outside the frame are
skipped.  Convention: the classic iterative ``d -> (x, y)`` construction,
so the first step goes along +y.  The 8x8 order (entry = visit index at
row y, column x)::

     0  3  4  5 58 59 60 63
     1  2  7  6 57 56 61 62
    14 13  8  9 54 55 50 49
    15 12 11 10 53 52 51 48
    16 17 30 31 32 33 46 47
    19 18 29 28 35 34 45 44
    20 23 24 27 36 39 40 43
    21 22 25 26 37 38 41 42
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def curve_order(width: int, height: int) -> int:
    """Side length of the enclosing Hilbert grid."""
    side = 1
    while side < max(width, height):
        side *= 2
    return side


def hilbert_d2xy(side: int, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised curve index -> ``(x, y)`` on a ``side x side`` grid."""
    t = np.array(d, dtype=np.int64, copy=True)
    x = np.zeros_like(t)
    y = np.zeros_like(t)
    s = 1
    while s < side:
        rx = 1 & (t // 2)
        ry = 1 & (t ^ rx)
        flip = ry == 0
        swap_flip = flip & (rx == 1)
        x = np.where(swap_flip, s - 1 - x, x)
        y = np.where(swap_flip, s - 1 - y, y)
        x, y = np.where(flip, y, x), np.where(flip, x, y)
        x = x + s * rx
        y = y + s * ry
        t //= 4
        s *= 2
    return x, y


@lru_cache(maxsize=64)
def scan_order(width: int, height: int) -> np.ndarray:
    """Row-major flat indices of the in-frame pixels in curve order."""
    if width < 1 or height < 1:
        raise ValueError("width and height must be >= 1")
    side = curve_order(width, height)
    x, y = hilbert_d2xy(side, np.arange(side * side))
    keep = (x < width) & (y < height)
    order = (y[keep] * width + x[keep]).astype(np.int64)
    order.setflags(write=False)
    return order


def hilbert_scan(frame) -> np.ndarray:
    a = np.asarray(frame)
    h, w = a.shape
    return a.ravel()[scan_order(w, h)]


def hilbert_unscan(symbols, width: int, height: int) -> np.ndarray:
    s = np.asarray(symbols)
    order = scan_order(width, height)
    if s.size != order.size:
        raise ValueError(f"expected {order.size} symbols, got {s.size}")
    out = np.empty(width * height, dtype=s.dtype)
    out[order] = s
    return out.reshape(height, width)


def delete_zeros(symbols, binary_mask, sampling_mask) -> np.ndarray:
    """Keep the scanned symbols at positions with ``B = 1`` and ``S = 1``."""
    s = np.asarray(symbols)
    keep = hilbert_scan((np.asarray(binary_mask) != 0) & (np.asarray(sampling_mask) != 0))
    if s.shape != keep.shape:
        raise ValueError("symbol count does not match the masks")
    return s[keep]


def reinsert_zeros(stream, binary_mask, sampling_mask) -> np.ndarray:
    stream = np.asarray(stream)
    keep = hilbert_scan((np.asarray(binary_mask) != 0) & (np.asarray(sampling_mask) != 0))
    if stream.size != int(keep.sum()):
        raise ValueError(f"stream holds {stream.size} symbols, masks select {int(keep.sum())}")
    out = np.zeros(keep.shape, dtype=stream.dtype if stream.size else np.int32)
    out[keep] = stream
    return out
