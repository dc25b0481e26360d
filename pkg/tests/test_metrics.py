import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphlift.bench import format_csv, format_table, run_bench, sweep_configs
from graphlift.codec import CodecConfig, encode_volume
from graphlift.graph_mc import ReducedAdjacency
from graphlift.metrics import psnr, psnr_from_mse, psnr_lpt, rate_report, volume_psnr_lpt
from graphlift.volume_io import Volume, translating_phantom


def test_psnr_values():
    a = np.zeros((4, 4))
    assert psnr(a, a, 4095) == math.inf
    assert psnr(a, np.full((4, 4), 4095), 4095) == pytest.approx(0.0)
    assert psnr_from_mse(167.69, 4095) == pytest.approx(50.0, abs=1e-3)
    with pytest.raises(ValueError):
        psnr(a, np.zeros((4, 5)), 4095)


@given(st.lists(st.integers(0, 4095), min_size=4, max_size=4), st.lists(st.integers(0, 4095), min_size=4, max_size=4))
def test_psnr_symmetric(a, b):
    assert psnr(a, b, 4095) == psnr(b, a, 4095)


def test_psnr_decreasing_in_mse():
    vals = [psnr_from_mse(m, 4095) for m in (0.5, 1, 10, 100, 1e4)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_psnr_lpt():
    f = np.arange(16).reshape(4, 4)
    ident = ReducedAdjacency.identity(4, 4)
    assert psnr_lpt(f, f, f, ident, 4095) == math.inf
    # MC(LP) equals f_even although LP != f_even
    yy, xx = np.mgrid[0:4, 0:4]
    flip = ReducedAdjacency.from_offsets(3 - 2 * xx, np.zeros((4, 4), int))
    assert psnr_lpt(f, f, f[:, ::-1], flip, 4095) == math.inf
    # both errors equal m -> plain PSNR at m
    lp = f + 3
    assert psnr_lpt(lp, f, f, ident, 4095) == pytest.approx(psnr_from_mse(9, 4095))


def test_rate_report_accounting():
    v = Volume.from_sequence(translating_phantom(32, 32, 5, velocity=(2, 1), noise_sigma=2))
    pairs = []
    data = encode_volume(v, CodecConfig(k=6), collect=pairs)
    r = rate_report(data)
    assert r.total + r.overhead == r.container_size == len(data)
    assert r.total == r.lp + r.hp + r.mask + r.symbols
    assert r.motion == sum(p.chunk_sizes["B"] + p.chunk_sizes["M"] for p in pairs)
    assert r.hp == sum(p.chunk_sizes["H"] for p in pairs)
    assert r.as_dict()["motion"] == r.motion


def test_rate_report_no_motion():
    v = Volume.from_sequence(translating_phantom(16, 16, 2))
    r = rate_report(encode_volume(v, CodecConfig(mc="none")))
    assert r.mask == 0 and r.symbols == 0 and r.motion == 0


def test_m_tx_grows_with_density():
    v = Volume.from_sequence(translating_phantom(48, 48, 4, velocity=(2, 1), noise_sigma=3))
    m = [rate_report(encode_volume(v, CodecConfig(k=k))).motion for k in (2, 6, 10, 16)]
    assert m == sorted(m) and len(set(m)) == 4


def test_volume_psnr_lpt_empty():
    assert volume_psnr_lpt([], 4095) == math.inf


def test_bench_harness():
    v = Volume.from_sequence(translating_phantom(24, 24, 4, velocity=(2, 1), noise_sigma=2))
    rows = run_bench(v, sweep_configs(ks=[4, 16], methods=["nearest", "natural"]))
    assert [r.label for r in rows] == [
        "graph k=4 nearest", "graph k=16 nearest", "graph k=4 natural", "graph k=16 natural",
        "block 2x2", "block 4x4", "block 8x8", "no MC (Haar)",
    ]
    assert all(r.lossless for r in rows)
    table = format_table(rows)
    assert "PSNR_LP_t" in table and len(table.splitlines()) == 2 + len(rows)
    csv_text = format_csv(rows)
    assert csv_text.splitlines()[0].startswith("mc,k,method")
    assert len(csv_text.splitlines()) == 1 + len(rows)
