"""Compare the numba and numpy F2 kernels.

    python benchmarks/bench_gf2.py [--repeat 5]

Times rank on random packed matrices and one minimal resolution with each
backend, after a warm-up call so numba compile time is not counted.
"""

import argparse
import time

import numpy as np

from obstructa import gf2
from obstructa._backend import HAVE_NUMBA, set_backend
from obstructa.ext_a1.module import stunted_module
from obstructa.ext_a1.resolution import minimal_resolution


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for rows, cols in [(200, 200), (600, 400), (1500, 1500)]:
        dense = rng.integers(0, 2, size=(rows, cols), dtype=np.uint8)
        out.append((f"rank {rows}x{cols}", lambda d=dense: gf2.rank_dense(d)))
    out.append((
        "resolve P_49^120, s<=8",
        lambda: minimal_resolution(stunted_module(49, 120), 8, 120),
    ))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    print(f"{'case':28s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, fn in cases():
        row = {}
        for b in backends:
            set_backend(b)
            row[b] = best_of(fn, args.repeat)
        line = f"{name:28s}" + "".join(f"{row[b]:11.4f}s" for b in backends)
        if "numba" in row:
            line += f"  {row['numpy'] / row['numba']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
