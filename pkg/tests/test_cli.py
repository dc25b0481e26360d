import numpy as np
import pytest

from graphlift.cli import default_psnr_target, main
from graphlift.volume_io import load_volume


@pytest.fixture
def phantom(tmp_path):
    path = tmp_path / "ph.vol"
    assert main(["gen-phantom", str(path), "--width", "24", "--height", "20", "--frames", "5"]) == 0
    return path


def test_encode_decode_roundtrip(phantom, tmp_path, capsys):
    out = tmp_path / "ph.gwl"
    assert main(["encode", str(phantom), str(out), "--k", "8", "--method", "natural"]) == 0
    assert out.stat().st_size > 0
    rec = tmp_path / "rec.vol"
    assert main(["decode", str(out), "-o", str(rec)]) == 0
    np.testing.assert_array_equal(load_volume(rec).samples, load_volume(phantom).samples)
    assert main(["decode", str(out), "--bl-only", "-o", str(tmp_path / "bl.vol")]) == 0
    assert load_volume(tmp_path / "bl.vol").samples.shape[0] == 3
    capsys.readouterr()
    assert main(["info", str(out)]) == 0
    info = capsys.readouterr().out
    assert "k=8" in info and "method=natural" in info
    assert main(["metrics", str(out), "--original", str(phantom)]) == 0
    assert "PSNR_LP_t" in capsys.readouterr().out


def test_decode_default_output_name(phantom, tmp_path):
    out = tmp_path / "a.gwl"
    main(["encode", str(phantom), str(out), "--mc", "block", "--block-size", "8"])
    assert main(["decode", str(out)]) == 0
    assert (tmp_path / "a.gwl.vol").exists()


def test_bench(phantom, tmp_path, capsys):
    csv_path = tmp_path / "b.csv"
    assert main(["bench", str(phantom), "--ks", "4", "16", "--methods", "nearest", "linear",
                 "--csv", str(csv_path)]) == 0
    table = capsys.readouterr().out
    assert "graph k=4 linear" in table and "block 4x4" in table and "no MC" in table
    assert len(csv_path.read_text().splitlines()) == 1 + 4 + 3 + 1


@pytest.mark.parametrize("argv", [
    [],
    ["encode"],
    ["encode", "a", "b", "--k", "17"],
    ["encode", "a", "b", "--method", "cubic"],
    ["encode", "a", "b", "--psnr-target", "-3"],
    ["frobnicate"],
])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code != 0


def test_runtime_errors(tmp_path, capsys):
    assert main(["encode", str(tmp_path / "missing.vol"), str(tmp_path / "x")]) != 0
    assert "error" in capsys.readouterr().err
    bad = tmp_path / "bad.gwl"
    bad.write_bytes(b"not a container, just forty bytes of text")
    assert main(["decode", str(bad)]) != 0
    assert "magic" in capsys.readouterr().err


def test_default_psnr_target():
    assert default_psnr_target(12) == 50.0
    assert default_psnr_target(16) > default_psnr_target(12) > default_psnr_target(8)
