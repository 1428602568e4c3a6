"""Compiled vs pure-Python grid kernels.

    python3 benchmarks/bench_kernels.py [--denom 64] [--repeat 3]
"""
import argparse
import random
import time

from copduality import _kernels_py
from copduality import kernels


def timed(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--denom", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    print(f"backend selected at import: {kernels.KERNEL_BACKEND}")
    if kernels.KERNEL_BACKEND != "cython":
        print("compiled extension not available; only the fallback can be timed")
    print(f"{'kernel':<16}{'p':>3}{'points':>9}{'python s':>11}{'compiled s':>12}{'speedup':>9}")
    for p in (3, 4, 5):
        D = [[0] * p for _ in range(p)]
        for i in range(p):
            for j in range(i, p):
                D[i][j] = D[j][i] = rng.randint(-4, 4)
        npts = sum(1 for _ in _kernels_py.compositions(p, args.denom))
        for name in ("grid_min_int", "grid_min_float"):
            t_py, r_py = timed(lambda: getattr(_kernels_py, name)(D, args.denom), args.repeat)
            t_c, r_c = timed(lambda: getattr(kernels, name)(D, args.denom), args.repeat)
            if name == "grid_min_int" and r_py != r_c:
                raise SystemExit(f"backends disagree on {name}: {r_py} vs {r_c}")
            print(f"{name:<16}{p:>3}{npts:>9}{t_py:>11.4f}{t_c:>12.4f}{t_py / t_c:>9.1f}")


if __name__ == "__main__":
    main()
