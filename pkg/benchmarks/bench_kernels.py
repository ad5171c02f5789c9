"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best-of-N time for each backend, the
speedup, and whether the two backends agree on the outputs.
"""
import argparse
import time

import numpy as np

from oraclegeom import _kernels_py
from oraclegeom.lp import objective_rows

try:
    from oraclegeom import _kernels as _compiled
except ImportError:
    _compiled = None


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def cases(rng):
    # Seidel LP: 3D, 400 random halfspaces around a feasible point
    A = rng.normal(size=(400, 3))
    b = A @ rng.uniform(-0.5, 0.5, 3) + rng.uniform(0.01, 1.0, 400)
    R = objective_rows(3)
    yield "seidel_lp", lambda k: k.seidel_lp(A, b, R, 1e6, 1e-9), lambda a, c: (
        a[0] == c[0] and np.allclose(a[1], c[1], atol=1e-7))

    P2 = rng.normal(size=(500, 2))
    yield "tukey_depth 2D", lambda k: [k.tukey_depth(P2, c, 1e-12) for c in P2[:20]], lambda a, c: a == c

    P3 = rng.normal(size=(120, 3))
    yield "tukey_depth 3D", lambda k: [k.tukey_depth(P3, c, 1e-12) for c in P3[:5]], lambda a, c: a == c

    S = rng.uniform(-1, 1, size=(40, 2))
    C = rng.uniform(-1, 1, size=(20000, 2))
    r2 = rng.uniform(0, 1, 20000)
    yield "disk_masks", lambda k: k.disk_masks(S, C, r2, 1e-9), lambda a, c: np.array_equal(a, c)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled extension not built; only the numpy fallback is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<16}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}  agree")
    for name, call, same in cases(rng):
        tp, op = best_of(lambda: call(_kernels_py), args.repeat)
        if _compiled is None:
            print(f"{name:<16}{tp:>12.4f}{'-':>12}{'-':>10}  -")
            continue
        tc, oc = best_of(lambda: call(_compiled), args.repeat)
        print(f"{name:<16}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x  {bool(same(op, oc))}")


if __name__ == "__main__":
    main()
