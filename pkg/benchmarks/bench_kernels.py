"""Time the numba and numpy sampling kernels on the same inputs.

    python3 benchmarks/bench_kernels.py --samples 1000000 --fixture pentagon
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from quasifold import _kernels as K
from quasifold import fixtures
from quasifold.delzant import build_construction
from quasifold.verify import certify_moment_image


def _inputs(D, N, rng):
    F = D.floats
    mu = rng.random((N, D.n))
    moduli = np.abs(mu @ F.normals.T - F.offsets)
    return {
        "halfspace_slack": (mu, F.normals, F.offsets),
        "level_residual": (moduli, F.basis, F.offsets),
        "solve_moments": (moduli, F.offsets, F.normals, F.solve_idx, F.solve_inv),
        "sup_distance": (mu, F.vertices),
    }


def _best(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--fixture", choices=sorted(fixtures.ALL_SIMPLE), default="pentagon")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    D = build_construction(fixtures.ALL_SIMPLE[args.fixture]())
    inputs = _inputs(D, args.samples, np.random.default_rng(args.seed))
    print(f"fixture={args.fixture} N={args.samples} active backend={K.BACKEND}")
    if not K.HAVE_NUMBA:
        print("numba is not installed; only the numpy kernels can be timed")

    print(f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, call_args in inputs.items():
        t_np = _best(getattr(K, f"{name}_numpy"), call_args, args.repeat)
        if K.HAVE_NUMBA:
            fn = getattr(K, f"{name}_numba")
            fn(*call_args)  # compile outside the timing
            t_nb = _best(fn, call_args, args.repeat)
            print(f"{name:<18}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<18}{t_np * 1e3:>12.2f}{'-':>12}{'-':>10}")

    certify_moment_image(D, 2048, seed=args.seed)
    t0 = time.perf_counter()
    certify_moment_image(D, args.samples, seed=args.seed)
    print(f"certify_moment_image end to end ({K.BACKEND}): {(time.perf_counter() - t0) * 1e3:.1f} ms")
    return 0


if __name__ == "__main__":
    sys.exit(main())
