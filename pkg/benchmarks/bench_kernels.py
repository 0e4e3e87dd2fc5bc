"""Time the compiled DP kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 400,1000,2000] [--repeat 3]

Both backends are loaded directly, so no environment switch is needed.  The
script also checks that the two produce bit-identical fields.
"""
import argparse
import time

import numpy as np

from zombie_torus import _pykernels
from zombie_torus.strategy import builtin, trajectory

try:
    from zombie_torus import _kernels
except ImportError:
    _kernels = None


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="400,1000,2000")
    ap.add_argument("--strategies", default="stay,go_down,diagonal,square:2")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'strategy':<12}{'n':>6}{'numpy s':>10}{'cython s':>10}{'speedup':>9}  same")
    for spec in args.strategies.split(","):
        name, _, arg = spec.partition(":")
        for n in (int(v) for v in args.sizes.split(",")):
            s = builtin(name, n, k=int(arg)) if arg else builtin(name, n, seed=0)
            xs, ys = trajectory(s).as_arrays()
            tp, fp = best_time(lambda: _pykernels.capture_field(xs, ys, s.M), args.repeat)
            if _kernels is None:
                print(f"{spec:<12}{n:>6}{tp:>10.3f}{'-':>10}{'-':>9}  -")
                continue
            tc, fc = best_time(lambda: _kernels.capture_field(xs, ys, s.M), args.repeat)
            same = "yes" if np.array_equal(fp, fc) else "NO"
            print(f"{spec:<12}{n:>6}{tp:>10.3f}{tc:>10.3f}{tp / tc:>8.1f}x  {same}")


if __name__ == "__main__":
    main()
