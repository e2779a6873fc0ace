"""Compare the compiled pointwise kernel with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each case applies ``sum_k M_k(x) u_k(x)`` with K matrix fields of fibre
dimension d over a 4-dimensional grid, once per backend, and checks that
both give the same result.
"""

import argparse
import time

import numpy as np

from foliage.kernels import backends, pointwise_apply

CASES = [
    ("all axes 16^4", (16, 16, 16, 16), (16, 16, 16, 16)),
    ("all axes 24^4", (24, 24, 24, 24), (24, 24, 24, 24)),
    ("one axis 32^4", (32, 1, 1, 1), (32, 32, 32, 32)),
]


def run(field, full, K, d, backend, repeat):
    rng = np.random.default_rng(0)
    Ms = [rng.standard_normal(field + (d, d)) + 1j * rng.standard_normal(field + (d, d))
          for _ in range(K)]
    us = [rng.standard_normal(full + (d,)) + 0j for _ in range(K)]
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = pointwise_apply(Ms, us, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--terms", type=int, default=5)
    ap.add_argument("--dim", type=int, default=8)
    args = ap.parse_args()
    names = [b for b in ("compiled", "python") if b in backends()]
    print(f"{'case':<16}" + "".join(f"{b:>12}" for b in names) + f"{'max diff':>12}")
    for label, field, full in CASES:
        times, outs = [], []
        for b in names:
            t, o = run(field, full, args.terms, args.dim, b, args.repeat)
            times.append(t)
            outs.append(o)
        diff = max(float(np.max(np.abs(o - outs[0]))) for o in outs)
        print(f"{label:<16}" + "".join(f"{t:>11.3f}s" for t in times) + f"{diff:>12.1e}")


if __name__ == "__main__":
    main()
