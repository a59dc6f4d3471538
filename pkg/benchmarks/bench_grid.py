"""Benchmark the compiled grid sweep kernel against the pure-Python one.

Run:  python3 benchmarks/bench_grid.py [--W 128] [--sweeps 20]
"""

import argparse
import time

import numpy as np

from wulffclusters import euclidean
from wulffclusters import _gridpy
from wulffclusters.gridmin import _cell_centers, _lens_exterior_labels, direction_weights
from wulffclusters.anisotropy import Direction

try:
    from wulffclusters import _gridcore
except ImportError:
    _gridcore = None


def setup(W, R=12.0, m=28.8):
    a = euclidean()
    x, y, h = _cell_centers(W, R)
    inside = x * x + y * y < R * R
    n1 = int(round(m / (h * h)))
    labels = np.ascontiguousarray(
        _lens_exterior_labels(a, Direction(np.pi / 2), m, R, W),
        dtype=np.int8)
    r2 = (x * x + y * y).ravel().copy()
    r2[~inside.ravel()] = np.inf
    labels.ravel()[np.argsort(r2, kind="stable")[:n1]] = 1
    act_i, act_j = np.nonzero(inside)
    return (labels, np.ascontiguousarray(~inside, dtype=np.uint8),
            np.ascontiguousarray(act_i, dtype=np.int64),
            np.ascontiguousarray(act_j, dtype=np.int64),
            direction_weights(a, h))


def run(kernel, W, sweeps, seed=0):
    labels, frozen, act_i, act_j, weights = setup(W)
    rng = np.random.default_rng(seed)
    n = len(act_i)
    t0 = time.perf_counter()
    for _ in range(sweeps):
        kernel.sweep(labels, frozen, act_i, act_j, weights,
                     rng.permutation(n),
                     rng.integers(0, 2, n, dtype=np.int8),
                     rng.integers(0, 8, n, dtype=np.int8),
                     rng.integers(0, n, n, dtype=np.int64),
                     rng.random(n), 0.01, 0.0)
    dt = time.perf_counter() - t0
    return dt, labels


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--W", type=int, default=128)
    ap.add_argument("--sweeps", type=int, default=20)
    args = ap.parse_args()

    t_py, lab_py = run(_gridpy, args.W, args.sweeps)
    print(f"python  : {t_py:8.3f} s "
          f"({args.sweeps / t_py:6.2f} sweeps/s at W={args.W})")
    if _gridcore is None:
        print("cython  : not built")
        return
    t_cy, lab_cy = run(_gridcore, args.W, args.sweeps)
    print(f"cython  : {t_cy:8.3f} s "
          f"({args.sweeps / t_cy:6.2f} sweeps/s at W={args.W})")
    print(f"speedup : {t_py / t_cy:6.1f}x")
    print(f"identical results: {np.array_equal(lab_py, lab_cy)}")


if __name__ == "__main__":
    main()
