"""Rate/quality sweep over coder configurations on one volume.

Each row encodes the volume, decodes it back to confirm losslessness and
reports PSNR_LP_t with the byte split LP / HP / m_tx / total.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from .block import BLOCK_SIZES
from .codec import CodecConfig, decode_volume, encode_volume
from .metrics import rate_report, volume_psnr_lpt
from .sampling import METHODS, N_DENSITIES
from .volume_io import Volume

COLUMNS = ("mc", "k", "method", "block_size", "r_max", "psnr_lpt", "lp", "hp", "m_tx", "total", "container", "lossless")


@dataclass
class BenchRow:
    mc: str
    k: int
    method: str
    block_size: int
    r_max: int
    psnr_lpt: float
    lp: int
    hp: int
    m_tx: int
    total: int
    container: int
    lossless: bool

    @property
    def label(self) -> str:
        if self.mc == "graph":
            return f"graph k={self.k} {self.method}"
        if self.mc == "block":
            return f"block {self.block_size}x{self.block_size}"
        return "no MC (Haar)"


def run_config(volume: Volume, config: CodecConfig) -> BenchRow:
    pairs = []
    data = encode_volume(volume, config, collect=pairs)
    lossless = bool(np.array_equal(decode_volume(data).samples, volume.samples))
    report = rate_report(data)
    a_max = (1 << volume.bit_depth) - 1
    return BenchRow(
        config.mc, config.k, config.method, config.block_size, config.r_max,
        volume_psnr_lpt(pairs, a_max), report.lp, report.hp, report.motion,
        report.total, report.container_size, lossless,
    )


def sweep_configs(base: CodecConfig | None = None, ks=None, methods=None, block_sizes=None,
                  include_none: bool = True) -> list[CodecConfig]:
    """Graph rows for every (k, method), then block rows, then the no-MC row."""
    base = base or CodecConfig()
    ks = range(1, N_DENSITIES + 1) if ks is None else ks
    methods = METHODS if methods is None else methods
    block_sizes = BLOCK_SIZES if block_sizes is None else block_sizes
    configs = [replace(base, mc="graph", k=k, method=m) for m in methods for k in ks]
    configs += [replace(base, mc="block", block_size=b) for b in block_sizes]
    if include_none:
        configs.append(replace(base, mc="none"))
    return configs


def run_bench(volume: Volume, configs) -> list[BenchRow]:
    return [run_config(volume, c) for c in configs]


def _fmt_db(v: float) -> str:
    return "inf" if math.isinf(v) else f"{v:.2f}"


def format_table(rows) -> str:
    """Plain-text table: one row per configuration, bytes per stream."""
    head = f"{'configuration':<26}{'PSNR_LP_t':>10}{'LP':>10}{'HP':>10}{'m_tx':>9}{'total':>10}{'lossless':>10}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(
            f"{r.label:<26}{_fmt_db(r.psnr_lpt):>10}{r.lp:>10}{r.hp:>10}{r.m_tx:>9}{r.total:>10}"
            f"{'yes' if r.lossless else 'NO':>10}"
        )
    return "\n".join(lines)


def format_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow([getattr(r, c) if c != "psnr_lpt" else _fmt_db(r.psnr_lpt) for c in COLUMNS])
    return buf.getvalue()
