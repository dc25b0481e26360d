"""Time the hot kernels with numba against the plain numpy/Python fallback.

Each mode runs in its own interpreter because the switch
(``GRAPHLIFT_DISABLE_NUMBA``) is read at import time::

    python benchmarks/bench_kernels.py [--size 128] [--repeat 3]

Numba timings exclude compilation (one warm-up call per kernel).
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def run_all(size, repeat):
    from graphlift import NUMBA_ENABLED
    from graphlift.block import block_search
    from graphlift.entropy import ac_decode, ac_encode, bilevel_decode, bilevel_encode
    from graphlift.graph_mc import estimate_motion
    from graphlift.motion_map import build_binary_mask, compute_threshold, radius_assignment
    from graphlift.sampling import build_sampling_mask, interpolate
    from graphlift.volume_io import translating_phantom

    seq = translating_phantom(size, size, 2, velocity=(2, 1), noise_sigma=3).astype(np.int64)
    f_odd, f_even = seq
    radius = radius_assignment(f_odd, f_even, 3)
    rng = np.random.default_rng(0)
    symbols = rng.integers(0, 49, size * size)
    mask = build_binary_mask(f_odd, f_even, compute_threshold(f_odd, f_even, 50, 4095))
    sampling = build_sampling_mask(4, size, size)
    sub_map = np.where((mask == 1) & (sampling == 1), 32, 0)
    ac_blob = ac_encode(symbols, 49)
    bl_blob = bilevel_encode(mask)

    cases = {
        "motion search (r<=3)": lambda: estimate_motion(f_odd, f_even, radius),
        "block search (4x4, r=3)": lambda: block_search(f_odd, f_even, 4, 3),
        "range encode": lambda: ac_encode(symbols, 49),
        "range decode": lambda: ac_decode(ac_blob, 49),
        "bi-level encode": lambda: bilevel_encode(mask),
        "bi-level decode": lambda: bilevel_decode(bl_blob, size, size),
        "natural-neighbour interp (k=4)": lambda: interpolate(sub_map, mask, sampling, 3, "natural"),
    }
    out = {}
    for name, fn in cases.items():
        fn()  # warm-up / compile
        out[name] = _best(fn, repeat)
    return {"numba": NUMBA_ENABLED, "times": out}


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--size", type=int, default=128, help="frame side in pixels")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        json.dump(run_all(args.size, args.repeat), sys.stdout)
        return

    results = {}
    for label, flag in (("numba", "0"), ("fallback", "1")):
        env = dict(os.environ, GRAPHLIFT_DISABLE_NUMBA=flag)
        cmd = [sys.executable, __file__, "--child", "--size", str(args.size), "--repeat", str(args.repeat)]
        proc = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
        results[label] = json.loads(proc.stdout)

    print(f"frame {args.size}x{args.size}, best of {args.repeat}")
    print(f"{'kernel':<34}{'numba [ms]':>12}{'fallback [ms]':>15}{'speed-up':>10}")
    for name, t_fast in results["numba"]["times"].items():
        t_slow = results["fallback"]["times"][name]
        print(f"{name:<34}{1e3 * t_fast:>12.2f}{1e3 * t_slow:>15.2f}{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
