"""Compiled kernels vs the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]

Times one experiment replication (quantile map, draw assembly and the
compensated precision-weighted sums) and the bare LP quantile solve, then
checks that both implementations return the same numbers.
"""
import argparse
import sys
import timeit

import numpy as np

from gvmix import _backend, _fallback
from gvmix.wfamily import open_uniform

try:
    from gvmix import _kernels
except ImportError:
    _kernels = None

CASES = [
    ("rp beta=0.7", _backend.KIND_RP, 0.7, 0.0),
    ("rp beta=1", _backend.KIND_RP, 1.0, 0.0),
    ("lp beta=1 gamma=-1", _backend.KIND_LP, 1.0, -1.0),
    ("point mass", _backend.KIND_POINT, 1.0, 0.0),
]


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1

    rng = np.random.default_rng(0)
    u = open_uniform(rng, args.n)
    z = rng.standard_normal(args.n)

    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<32}{'compiled [s]':>14}{'python [s]':>14}{'speedup':>10}{'max rel diff':>15}")
    rows = []
    for name, kind, beta, gamma in CASES:
        tc = best_of(lambda: _kernels.replicate(kind, beta, gamma, 0.0, u, z), args.repeat)
        tp = best_of(lambda: _fallback.replicate(kind, beta, gamma, 0.0, u, z), args.repeat)
        a = np.array(_kernels.replicate(kind, beta, gamma, 0.0, u, z))
        b = np.array(_fallback.replicate(kind, beta, gamma, 0.0, u, z))
        diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
        rows.append((f"replicate: {name}", tc, tp, diff))

    tc = best_of(lambda: _kernels.lp_neglog_quantile(u, 1.0, -1.0), args.repeat)
    tp = best_of(lambda: _fallback.lp_neglog_quantile(u, 1.0, -1.0), args.repeat)
    a = np.asarray(_kernels.lp_neglog_quantile(u, 1.0, -1.0))
    b = _fallback.lp_neglog_quantile(u, 1.0, -1.0)
    rows.append(("lp quantile solve", tc, tp, float(np.max(np.abs(a - b) / b))))

    for name, tc, tp, diff in rows:
        print(f"{name:<32}{tc:>14.4f}{tp:>14.4f}{tp / tc:>9.1f}x{diff:>15.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
