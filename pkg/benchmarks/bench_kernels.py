"""Compare the compiled and numpy kernel backends on word-ball sized inputs.

    python3 benchmarks/bench_kernels.py [--rows N] [--repeat R]
"""

import argparse
import math
import timeit

import numpy as np

from hypquilt._kernels import _pykernels as py

try:
    from hypquilt._kernels import _ckernels as cy
except ImportError:  # extension not built
    cy = None


def random_mats(n, seed=0):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, 4))
    det = m[:, 0] * m[:, 3] - m[:, 1] * m[:, 2]
    m[det < 0, :2] *= -1
    return np.ascontiguousarray(m / np.sqrt(np.abs(det))[:, None])


def cases(mats):
    radii = np.array([1.0, 4 / 3, 2.0])
    return {
        "displacements": lambda k: k.displacements(mats, 0.0, math.sqrt(2.0)),
        "orbit_min_distance": lambda k: k.orbit_min_distance(mats, 0.1, 1.2, 0.3, 1.5),
        "min_dist_to_centered": lambda k: k.min_dist_to_centered(mats, 0.1, 1.2, radii),
        "bisectors": lambda k: k.bisectors(mats, 0.0, math.sqrt(2.0)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    mats = random_mats(args.rows)
    backends = [("numpy", py)] + ([("cython", cy)] if cy is not None else [])
    print(f"{args.rows} matrices, best of {args.repeat} runs (ms)")
    print(f"{'kernel':<22}" + "".join(f"{n:>10}" for n, _ in backends) + "   speedup")
    for name, fn in cases(mats).items():
        best = [min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) * 1e3
                for _, k in backends]
        sp = f"{best[0] / best[1]:8.2f}x" if len(best) > 1 else "       -"
        print(f"{name:<22}" + "".join(f"{b:10.2f}" for b in best) + "  " + sp)
    if cy is None:
        print("compiled kernels not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
