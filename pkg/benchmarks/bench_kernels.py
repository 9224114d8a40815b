"""Compare the numba and numpy kernel back ends.

    python benchmarks/bench_kernels.py [--points N] [--repeat R]

Each kernel is called once to trigger compilation, then timed as the best
of R runs.  Outputs of the two back ends are compared as a sanity check.
"""

import argparse
import time

import numpy as np

from revdiff import _kernels
from revdiff.smoothmap import make_jet_interp


def best_of(fn, repeat):
    fn()  # warm-up / jit compile
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(n):
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.2, 1.2, n)
    ji = make_jet_interp(0.0, 1.0, 0.0, 2.0, [3.0, 0.5, 0.1], [3.0, -1.0, 2.0])
    prm, cu, cv = ji._prm, ji._cu, ji._cv
    y = rng.uniform(-0.2, 2.2, n)
    b = x + 1e-12 * rng.standard_normal(n)
    return {
        "bump": (lambda k: k.bump(x, 0.3)),
        "bump_inverse": (lambda k: k.bump_inverse(x, 0.3)),
        "jet_interp": (lambda k: k.jet_interp(x, prm, cu, cv)),
        "jet_interp_inverse": (lambda k: k.jet_interp_inverse(y, prm, cu, cv)),
        "sup_abs_error": (lambda k: k.sup_abs_error(x, b)),
    }


def _first(out):
    return np.asarray(out[0] if isinstance(out, tuple) else out, dtype=float)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if not _kernels._HAVE_NUMBA:
        print("numba is not installed; only the numpy back end is available")
        return
    print(f"{args.points} points, best of {args.repeat}")
    print(f"{'kernel':<20} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8} {'max diff':>10}")
    for name, call in cases(args.points).items():
        t_np = best_of(lambda: call(_kernels.numpy_kernels), args.repeat)
        t_nb = best_of(lambda: call(_kernels.numba_kernels), args.repeat)
        diff = np.max(np.abs(_first(call(_kernels.numpy_kernels)) - _first(call(_kernels.numba_kernels))))
        print(f"{name:<20} {1e3 * t_np:>10.2f} {1e3 * t_nb:>10.2f} {t_np / t_nb:>8.1f} {diff:>10.1e}")


if __name__ == "__main__":
    main()
