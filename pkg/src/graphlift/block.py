"""Block-matching MCTF baseline.

Full-search SAD block matching over the same ``r_max`` box as the graph
search.  A block vector ``(vx, vy)`` predicts every pixel ``i`` of the
block from ``f_odd(i + v)``, clamped to the frame (edge replication).
The induced per-pixel mapping is an ordinary reduced adjacency, so the
lifting and the optimal update are shared with the graph path.
"""

from __future__ import annotations

import numpy as np

from ._accel import NUMBA_ENABLED, kernel
from .entropy.rangecoder import ac_decode, ac_encode
from .graph_mc import ReducedAdjacency
from .lifting import SubbandPair, mctf_forward, mctf_inverse
from .motion_map import alphabet_size, decode_index, embed_index

BLOCK_SIZES = (2, 4, 8)


def block_grid(height: int, width: int, block_size: int) -> tuple[int, int]:
    return -(-height // block_size), -(-width // block_size)


def _row_major_offsets(r: int) -> np.ndarray:
    # preference order: Chebyshev magnitude, then row-major (dy outer, dx inner)
    rows = [(max(abs(dx), abs(dy)), dy, dx) for dy in range(-r, r + 1) for dx in range(-r, r + 1)]
    rows.sort()
    return np.array([(dx, dy) for _, dy, dx in rows], dtype=np.int64)


@kernel
def _block_search_kernel(odd_pad, even, bs, r, offsets, out):
    h, w = even.shape
    nby = out.shape[0]
    nbx = out.shape[1]
    for by in range(nby):
        for bx in range(nbx):
            y0 = by * bs
            x0 = bx * bs
            y1 = min(y0 + bs, h)
            x1 = min(x0 + bs, w)
            best = -1
            for k in range(offsets.shape[0]):
                dx = offsets[k, 0]
                dy = offsets[k, 1]
                sad = 0
                for y in range(y0, y1):
                    for x in range(x0, x1):
                        sad += abs(even[y, x] - odd_pad[y + dy + r, x + dx + r])
                if best < 0 or sad < best:
                    best = sad
                    out[by, bx, 0] = dx
                    out[by, bx, 1] = dy


def _block_search_numpy(odd_pad, even, bs, r, offsets, out):
    h, w = even.shape
    nby, nbx = out.shape[:2]
    best = np.full((nby, nbx), np.iinfo(np.int64).max, dtype=np.int64)
    # per-pixel block ids, to sum absolute differences per block
    by = np.arange(h) // bs
    bx = np.arange(w) // bs
    ids = (by[:, None] * nbx + bx[None, :]).ravel()
    for dx, dy in offsets:
        shifted = odd_pad[r + dy:r + dy + h, r + dx:r + dx + w]
        sad = np.bincount(ids, weights=np.abs(even - shifted).ravel(), minlength=nby * nbx)
        sad = np.rint(sad).astype(np.int64).reshape(nby, nbx)
        better = sad < best
        best[better] = sad[better]
        out[better, 0] = dx
        out[better, 1] = dy


def block_search(f_odd, f_even, block_size: int, search_range: int, *, use_numba: bool | None = None) -> np.ndarray:
    """Per-block ``(vx, vy)`` minimising SAD; shape ``(n_by, n_bx, 2)``.

    Ties go to the smaller Chebyshev magnitude, then row-major offset order.
    """
    f_odd = np.asarray(f_odd, dtype=np.int64)
    f_even = np.asarray(f_even, dtype=np.int64)
    if f_odd.shape != f_even.shape:
        raise ValueError(f"frame shapes differ: {f_odd.shape} vs {f_even.shape}")
    if block_size < 1:
        raise ValueError("block_size must be >= 1")
    if search_range < 0:
        raise ValueError("search_range must be >= 0")
    h, w = f_even.shape
    r = search_range
    odd_pad = np.pad(f_odd, r, mode="edge")
    out = np.zeros(block_grid(h, w, block_size) + (2,), dtype=np.int64)
    offsets = _row_major_offsets(r)
    if NUMBA_ENABLED if use_numba is None else use_numba:
        _block_search_kernel(odd_pad, f_even, block_size, r, offsets, out)
    else:
        _block_search_numpy(odd_pad, f_even, block_size, r, offsets, out)
    return out


def block_adjacency(mvf: np.ndarray, height: int, width: int, block_size: int) -> ReducedAdjacency:
    """Per-pixel mapping induced by block vectors, clamped into the frame."""
    mvf = np.asarray(mvf)
    if mvf.shape != block_grid(height, width, block_size) + (2,):
        raise ValueError("motion vector field does not match the frame and block size")
    yy, xx = np.mgrid[0:height, 0:width]
    vx = mvf[yy // block_size, xx // block_size, 0]
    vy = mvf[yy // block_size, xx // block_size, 1]
    ex = np.clip(xx + vx, 0, width - 1)
    ey = np.clip(yy + vy, 0, height - 1)
    return ReducedAdjacency.from_offsets(ex - xx, ey - yy)


def block_mctf_forward(f_odd, f_even, mvf, block_size: int) -> SubbandPair:
    h, w = np.shape(f_odd)
    return mctf_forward(f_odd, f_even, block_adjacency(mvf, h, w, block_size))


def block_mctf_inverse(pair: SubbandPair, mvf, block_size: int):
    h, w = np.shape(pair.lp)
    return mctf_inverse(pair, block_adjacency(mvf, h, w, block_size))


def mv_encode(mvf, search_range: int) -> bytes:
    """Vectors as embedded offset symbols, block raster order, range coded."""
    mvf = np.asarray(mvf)
    sym = embed_index(mvf[..., 0], mvf[..., 1], search_range)
    return ac_encode(np.ravel(sym) - 1, alphabet_size(search_range))


def mv_decode(blob: bytes, n_by: int, n_bx: int, search_range: int) -> np.ndarray:
    sym = ac_decode(blob, alphabet_size(search_range))
    if sym.size != n_by * n_bx:
        raise ValueError(f"expected {n_by * n_bx} vectors, got {sym.size}")
    dx, dy = decode_index(sym + 1, search_range)
    return np.stack([dx, dy], axis=-1).reshape(n_by, n_bx, 2)
