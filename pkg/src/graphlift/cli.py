"""Command-line front end: ``graphlift <command> ...``.

Commands
    encode       volume -> container
    decode       container -> volume (``--bl-only`` for the LP base layer)
    info         print a container's header and per-stream byte split
    metrics      byte split plus PSNR_LP_t of a container
    bench        rate/PSNR_LP_t sweep over densities, methods and mc modes
    gen-phantom  write a synthetic translating phantom

Volumes are raw little-endian uint16 files with a ``<file>.hdr`` sidecar.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import bench
from .block import BLOCK_SIZES
from .codec import DEFAULT_PSNR_TARGET, MC_MODES, CodecConfig, decode_volume, encode_volume, read_container
from .entropy.rangecoder import CorruptStreamError
from .metrics import rate_report, volume_psnr_lpt
from .sampling import METHODS, N_DENSITIES
from .volume_io import Volume, VolumeFormatError, load_volume, save_volume, translating_phantom


def _psnr_arg(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be a positive number of dB (or 'inf')")
    return value


def _add_codec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=16, choices=range(1, N_DENSITIES + 1), metavar="K",
                   help="sampling density index 1..16 (k/16 of the masked map is sent; default 16)")
    p.add_argument("--method", choices=METHODS, default="nearest", help="motion map interpolation (default nearest)")
    p.add_argument("--mc", choices=MC_MODES, default="graph", help="motion compensation (default graph)")
    p.add_argument("--r-max", type=int, default=3, choices=(1, 2, 3), help="search radius cap (default 3)")
    p.add_argument("--psnr-target", type=_psnr_arg, default=None,
                   help=f"mask threshold target in dB, 'inf' sends every symbol "
                        f"(default {DEFAULT_PSNR_TARGET:g} dB at 12 bit, scaled by 20log10(2) dB per bit)")
    p.add_argument("--block-size", type=int, choices=BLOCK_SIZES, default=4, help="block size for --mc block")
    p.add_argument("--no-smooth", action="store_true", help="search the full r_max box at every pixel")


def default_psnr_target(bit_depth: int) -> float:
    """50 dB at 12 bit; other depths keep the same absolute MSE target."""
    return DEFAULT_PSNR_TARGET + 20 * math.log10(((1 << bit_depth) - 1) / 4095)


def _config(args, bit_depth: int) -> CodecConfig:
    target = args.psnr_target if args.psnr_target is not None else default_psnr_target(bit_depth)
    return CodecConfig(r_max=args.r_max, psnr_target=target, k=args.k, method=args.method,
                       mc=args.mc, block_size=args.block_size, smooth=not args.no_smooth)


def _read(path) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def cmd_encode(args) -> int:
    volume = load_volume(args.input)
    data = encode_volume(volume, _config(args, volume.bit_depth))
    with open(args.output, "wb") as fh:
        fh.write(data)
    n = volume.samples.size
    print(f"{args.output}: {len(data)} bytes, {8 * len(data) / n:.3f} bits/sample")
    return 0


def cmd_decode(args) -> int:
    mode = "bl_only" if args.bl_only else "full"
    volume = decode_volume(_read(args.input), mode)
    out = args.output or args.input + (".bl.vol" if args.bl_only else ".vol")
    save_volume(volume, out)
    t, z, y, x = volume.samples.shape
    print(f"{out}: {x}x{y}x{z}x{t} ({mode})")
    return 0


def _print_report(report) -> None:
    for name in ("lp", "hp", "mask", "symbols", "motion", "total", "overhead", "container_size"):
        print(f"  {name:<15}{getattr(report, name):>10}")


def cmd_info(args) -> int:
    data = _read(args.input)
    h = read_container(data).header
    print(f"{args.input}: {h.width}x{h.height}x{h.slices}x{h.frames} @ {h.bit_depth} bit")
    print(f"  mc={h.mc} r_max={h.r_max} k={h.k} method={h.method} block_size={h.block_size}")
    _print_report(rate_report(data))
    return 0


def cmd_metrics(args) -> int:
    data = _read(args.input)
    pairs = []
    volume = decode_volume(data, collect=pairs)
    if args.original is not None and not np.array_equal(load_volume(args.original).samples, volume.samples):
        print("decoded volume differs from the original", file=sys.stderr)
        return 1
    print(f"PSNR_LP_t  {volume_psnr_lpt(pairs, (1 << volume.bit_depth) - 1):.3f} dB")
    _print_report(rate_report(data))
    return 0


def cmd_bench(args) -> int:
    volume = load_volume(args.input)
    base = _config(args, volume.bit_depth)
    ks = args.ks or range(1, N_DENSITIES + 1)
    methods = args.methods or METHODS
    rows = bench.run_bench(volume, bench.sweep_configs(base, ks, methods))
    print(bench.format_table(rows))
    if args.csv:
        with open(args.csv, "w", encoding="ascii") as fh:
            fh.write(bench.format_csv(rows))
    return 0 if all(r.lossless for r in rows) else 1


def cmd_gen_phantom(args) -> int:
    seq = translating_phantom(args.width, args.height, args.frames, tuple(args.velocity),
                              args.noise, args.seed, args.bit_depth)
    save_volume(Volume.from_sequence(seq, args.bit_depth), args.output)
    print(f"{args.output}: {args.width}x{args.height}x1x{args.frames}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphlift", description=__doc__.split("\n")[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode a volume")
    p.add_argument("input")
    p.add_argument("output")
    _add_codec_flags(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a container")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="output volume (default <input>.vol)")
    p.add_argument("--bl-only", action="store_true", help="decode only the LP base layer (half frame rate)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("info", help="show container header and byte split")
    p.add_argument("input")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("metrics", help="PSNR_LP_t and byte split of a container")
    p.add_argument("input")
    p.add_argument("--original", help="volume to check the decode against")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bench", help="sweep densities, methods and mc modes")
    p.add_argument("input")
    p.add_argument("--csv", help="also write rows to this CSV file")
    p.add_argument("--ks", type=int, nargs="+", choices=range(1, N_DENSITIES + 1), metavar="K",
                   help="densities to sweep (default all 16)")
    p.add_argument("--methods", nargs="+", choices=METHODS, help="interpolation methods (default all)")
    _add_codec_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-phantom", help="write a translating phantom volume")
    p.add_argument("output")
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--frames", type=int, default=6)
    p.add_argument("--velocity", type=int, nargs=2, default=(2, 1), metavar=("VX", "VY"))
    p.add_argument("--noise", type=float, default=3.0, help="Gaussian noise sigma")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bit-depth", type=int, default=12)
    p.set_defaults(func=cmd_gen_phantom)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, VolumeFormatError, CorruptStreamError, ValueError) as exc:
        print(f"graphlift {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
