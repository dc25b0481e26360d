"""Integer Haar lifting along time, plain and motion compensated.

With a reduced adjacency (one unit edge per even pixel) the prediction
matrix ``P`` has a single 1 per row, so ``P^T P = diag(d)`` with ``d_j``
the column counts.  The optimal update ``(I + P^T P)^-1 P^T`` then
becomes a per-cluster average::

    U(HP)(j) = sum_{i : j(i) = j} HP(i) / (1 + d_j)

which is floored once per LP sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph_mc import ReducedAdjacency, column_counts, warp


@dataclass
class SubbandPair:
    lp: np.ndarray
    hp: np.ndarray


def _as_frames(a, b):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError(f"frame shapes differ: {a.shape} vs {b.shape}")
    return a, b


def haar_forward(f_odd, f_even) -> SubbandPair:
    f_odd, f_even = _as_frames(f_odd, f_even)
    hp = f_even - f_odd
    return SubbandPair(lp=f_odd + (hp >> 1), hp=hp)


def haar_inverse(pair: SubbandPair) -> tuple[np.ndarray, np.ndarray]:
    lp, hp = _as_frames(pair.lp, pair.hp)
    f_odd = lp - (hp >> 1)
    return f_odd, hp + f_odd


def _cluster_sums(hp: np.ndarray, adjacency: ReducedAdjacency) -> tuple[np.ndarray, np.ndarray]:
    h, w = adjacency.shape
    j = adjacency.end_index().ravel()
    sums = np.zeros(h * w, dtype=np.int64)
    np.add.at(sums, j, hp.ravel())
    return sums.reshape(h, w), column_counts(adjacency)


def update_term(hp, adjacency: ReducedAdjacency) -> np.ndarray:
    """Integer update ``floor(sum HP / (1 + d_j))`` per odd pixel."""
    hp = np.asarray(hp, dtype=np.int64)
    sums, d = _cluster_sums(hp, adjacency)
    return sums // (1 + d)  # floor division rounds toward -inf


def update_prefloor(hp, adjacency: ReducedAdjacency) -> np.ndarray:
    """The update before flooring, as float64."""
    hp = np.asarray(hp, dtype=np.int64)
    sums, d = _cluster_sums(hp, adjacency)
    return sums / (1.0 + d)


def _check(adjacency: ReducedAdjacency, shape):
    if adjacency.shape != shape:
        raise ValueError(f"adjacency {adjacency.shape} does not match frames {shape}")


def mctf_forward(f_odd, f_even, adjacency: ReducedAdjacency) -> SubbandPair:
    f_odd, f_even = _as_frames(f_odd, f_even)
    _check(adjacency, f_odd.shape)
    hp = f_even - warp(f_odd, adjacency)
    return SubbandPair(lp=f_odd + update_term(hp, adjacency), hp=hp)


def mctf_inverse(pair: SubbandPair, adjacency: ReducedAdjacency) -> tuple[np.ndarray, np.ndarray]:
    lp, hp = _as_frames(pair.lp, pair.hp)
    _check(adjacency, lp.shape)
    f_odd = lp - update_term(hp, adjacency)
    return f_odd, hp + warp(f_odd, adjacency)
