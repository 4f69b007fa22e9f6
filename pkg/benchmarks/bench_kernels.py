"""Compare the compiled and pure-Python propagation kernels.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from matspec import _backend, corpus
from matspec.propagator import integrate

CASES = [
    ("square_well", corpus.square_well(), 5.0),
    ("rotated_pair", corpus.rotated_pair(), 5.0),
    ("matrix_bump3", corpus.matrix_bump3(), 50.0),
    ("deep_well", corpus.deep_well(), -10.0),
]


def time_case(p, lam, kernel, repeat):
    n = p.n
    xe = p.support_end + 1.0
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out, stats = integrate(p, lam, 0.0, [xe], np.eye(2 * n), kernel=kernel, return_stats=True)
        best = min(best, time.perf_counter() - t0)
    return best, out[0], stats.steps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    kernels = _backend.available()
    if "cython" not in kernels:
        print("compiled kernel not built; only the Python fallback is available")
    print(f"{'case':14s} {'lambda':>8s} {'steps':>6s} " + " ".join(f"{k:>10s}" for k in kernels)
          + f" {'speedup':>8s} {'rel diff':>9s}")
    for name, p, lam in CASES:
        res = {k: time_case(p, lam, f, args.repeat) for k, f in kernels.items()}
        line = f"{name:14s} {lam:8g} {res['python'][2]:6d} " + " ".join(f"{r[0]:10.4f}" for r in res.values())
        if "cython" in res:
            speed = res["python"][0] / res["cython"][0]
            a, b = res["python"][1], res["cython"][1]
            diff = np.max(np.abs(a - b)) / np.max(np.abs(a))
            line += f" {speed:8.1f} {diff:9.1e}"
        print(line)


if __name__ == "__main__":
    main()
