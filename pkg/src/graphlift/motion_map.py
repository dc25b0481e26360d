"""Motion maps: per-pixel end-node indices, radius smoothing and masking.

Symbols number the ``(2 r_max + 1)^2`` offset box column by column,
starting at 1 in the top-left corner; 0 marks a position that is not
transmitted.  Smaller radii embed into the ``r_max`` numbering, so the
``r = 1`` box around the centre of an ``r_max = 3`` map is
``{17, 18, 19, 24, 25, 26, 31, 32, 33}``.
"""

from __future__ import annotations

import math

import numpy as np

from .graph_mc import ReducedAdjacency

# Normalised-difference breakpoints for radius 2 and radius 3.
RADIUS_BREAKPOINTS = (0.12, 0.29)


def alphabet_size(r_max: int) -> int:
    return (2 * r_max + 1) ** 2


def identity_symbol(r_max: int) -> int:
    return embed_index(0, 0, r_max)


def embed_index(dx, dy, r_max: int):
    """Symbol of offset ``(dx, dy)``; works elementwise on arrays."""
    dx = np.asarray(dx)
    dy = np.asarray(dy)
    if np.any(np.abs(dx) > r_max) or np.any(np.abs(dy) > r_max):
        raise ValueError(f"offset outside the r_max={r_max} box")
    sym = (dx.astype(np.int64) + r_max) * (2 * r_max + 1) + (dy + r_max) + 1
    return int(sym) if sym.ndim == 0 else sym


def decode_index(symbol, r_max: int):
    """Inverse of :func:`embed_index`: ``(dx, dy)`` of nonzero symbols."""
    s = np.asarray(symbol, dtype=np.int64)
    if np.any(s < 1) or np.any(s > alphabet_size(r_max)):
        raise ValueError(f"symbol outside 1..{alphabet_size(r_max)}")
    side = 2 * r_max + 1
    dx = (s - 1) // side - r_max
    dy = (s - 1) % side - r_max
    if s.ndim == 0:
        return int(dx), int(dy)
    return dx, dy


def adjacency_to_map(adjacency: ReducedAdjacency, r_max: int) -> np.ndarray:
    return embed_index(adjacency.dx, adjacency.dy, r_max).astype(np.int32)


def map_to_adjacency(motion_map, r_max: int) -> ReducedAdjacency:
    """Convert a motion map back to offsets; symbol 0 means identity."""
    m = np.asarray(motion_map, dtype=np.int64)
    filled = np.where(m == 0, identity_symbol(r_max), m)
    dx, dy = decode_index(filled, r_max)
    return ReducedAdjacency.from_offsets(dx, dy)


def normalized_difference(f_odd, f_even) -> np.ndarray:
    """``|f_odd - f_even|`` scaled by its maximum into ``[0, 1]``."""
    diff = np.abs(np.asarray(f_odd, dtype=np.int64) - np.asarray(f_even, dtype=np.int64))
    peak = diff.max(initial=0)
    if peak == 0:
        return np.zeros(diff.shape)
    return diff / peak


def radius_assignment(f_odd, f_even, r_max: int = 3, breakpoints=RADIUS_BREAKPOINTS) -> np.ndarray:
    """Per-pixel search radius from the normalised frame difference.

    ``[0, 0.12) -> 1``, ``[0.12, 0.29) -> 2``, ``[0.29, 1] -> 3``; for
    ``r_max < 3`` the upper intervals merge into ``r_max``.
    """
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    n = normalized_difference(f_odd, f_even)
    r = 1 + np.searchsorted(np.asarray(breakpoints), n, side="right")
    return np.minimum(r, r_max).astype(np.int64)


def mse_target(psnr_target: float, a_max: float) -> float:
    return a_max**2 / 10 ** (psnr_target / 10)


def compute_threshold(f_odd, f_even, psnr_target: float, a_max: float) -> float:
    """``tau = MSE_target / MSE(f_odd, f_even)``; ``inf`` for identical frames."""
    if psnr_target <= 0:
        raise ValueError("psnr_target must be positive")
    diff = np.asarray(f_odd, dtype=np.float64) - np.asarray(f_even, dtype=np.float64)
    mse = float(np.mean(diff**2)) if diff.size else 0.0
    if mse == 0.0:
        return math.inf
    return mse_target(psnr_target, a_max) / mse


def build_binary_mask(f_odd, f_even, tau: float) -> np.ndarray:
    """1 where the normalised difference reaches ``tau``; empty for ``tau >= 1``."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    n = normalized_difference(f_odd, f_even)
    if tau >= 1:
        return np.zeros(n.shape, dtype=np.uint8)
    return (n >= tau).astype(np.uint8)


def apply_mask(motion_map, mask) -> np.ndarray:
    m = np.asarray(motion_map)
    b = np.asarray(mask)
    if m.shape != b.shape:
        raise ValueError("map and mask shapes differ")
    return np.where(b != 0, m, 0).astype(m.dtype)


def fill_identity(motion_map, r_max: int) -> np.ndarray:
    m = np.asarray(motion_map)
    return np.where(m == 0, identity_symbol(r_max), m).astype(m.dtype)
