"""PSNR measures and byte accounting for coded volumes.

PSNR_LP_t rates an LP frame both as a stand-in for the odd frame and,
after warping along the decoder's adjacency, for the even frame::

    PSNR_LP_t = 10 log10(A_max^2 / ((MSE(LP, f_odd) + MSE(MC(LP), f_even)) / 2))

with ``MC(LP)(i) = LP(j(i))``.  Over a whole volume the per-pair mean
squared errors are averaged before taking the logarithm.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .codec import TAG_HP, TAG_LP, TAG_MASK, TAG_MOTION, TAG_UNPAIRED, chunk_header_size, header_size, read_container
from .graph_mc import ReducedAdjacency, warp


def mse(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shapes differ: {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2)) if a.size else 0.0


def psnr_from_mse(value: float, a_max: float) -> float:
    if value == 0:
        return math.inf
    return 10 * math.log10(a_max**2 / value)


def psnr(a, b, a_max: float) -> float:
    return psnr_from_mse(mse(a, b), a_max)


def lpt_mse(lp, f_odd, f_even, adjacency: ReducedAdjacency) -> float:
    """Combined squared error of an LP frame against both source frames."""
    return 0.5 * (mse(lp, f_odd) + mse(warp(lp, adjacency), f_even))


def psnr_lpt(lp, f_odd, f_even, adjacency: ReducedAdjacency, a_max: float) -> float:
    return psnr_from_mse(lpt_mse(lp, f_odd, f_even, adjacency), a_max)


def volume_psnr_lpt(pairs, a_max: float) -> float:
    """PSNR_LP_t over many pairs (objects with lp, f_odd, f_even, adjacency)."""
    errors = [lpt_mse(p.lp, p.f_odd, p.f_even, p.adjacency) for p in pairs]
    if not errors:
        return math.inf
    return psnr_from_mse(float(np.mean(errors)), a_max)


@dataclass
class RateReport:
    """Payload bytes per stream.

    ``motion`` (m_tx) is ``mask + symbols``; ``total`` is the sum of all
    chunk payloads; ``overhead`` is the container header plus chunk framing,
    so ``total + overhead == container_size``.
    """

    lp: int = 0
    hp: int = 0
    mask: int = 0
    symbols: int = 0
    overhead: int = 0
    container_size: int = 0

    @property
    def motion(self) -> int:
        return self.mask + self.symbols

    @property
    def total(self) -> int:
        return self.lp + self.hp + self.motion

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(motion=self.motion, total=self.total)
        return d


def rate_report(data: bytes) -> RateReport:
    container = read_container(data)
    report = RateReport(container_size=container.size)
    field_for = {TAG_LP: "lp", TAG_UNPAIRED: "lp", TAG_HP: "hp", TAG_MASK: "mask", TAG_MOTION: "symbols"}
    for c in container.chunks:
        name = field_for[c.tag]
        setattr(report, name, getattr(report, name) + c.length)
    report.overhead = header_size() + len(container.chunks) * chunk_header_size()
    return report
