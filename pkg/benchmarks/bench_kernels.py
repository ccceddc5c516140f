"""Time each kernel on its numba and numpy paths.

Usage: python benchmarks/bench_kernels.py [--points N] [--repeat R]

Both paths are reachable in one process regardless of HYPROJ_NO_NUMBA; the
numba functions are called once before timing so compilation is excluded.
"""
import argparse
import timeit

import numpy as np

from hyproj import _backend, kernels


def cases(points, rng):
    x = rng.standard_normal((points, 3))
    x *= (0.95 * rng.uniform(size=points) ** (1 / 3) / np.linalg.norm(x, axis=1))[:, None]
    y = np.ascontiguousarray(x[::-1])
    basis = np.ascontiguousarray(np.linalg.qr(rng.standard_normal((3, 2)))[0])
    u = np.ascontiguousarray(x[:, :2])
    off = np.zeros(2)
    rot = np.stack([np.eye(2)] * 4)
    trans = np.array([[0.0, 0.0], [0.75, 0.0], [0.0, 0.75], [0.75, 0.75]])
    choices = rng.integers(0, 4, points // 10)
    return {
        "psi_rows": (x,),
        "psi_inv_rows": (x,),
        "poincare_dist_pairs": (x, y),
        "poincare_dist_from": (x[0].copy(), x),
        "project_coords": (x, basis),
        "cell_keys": (u, 2.0**-8, off),
        "count_cells": (u, 2.0**-8, off),
        "orbit": (choices, np.full(4, 0.25), rot, trans, np.zeros(2)),
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=200_000)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    if not _backend.NUMBA_AVAILABLE:
        raise SystemExit("numba is not importable; nothing to compare")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, call_args in cases(args.points, rng).items():
        fn_np = getattr(kernels, name + "_numpy")
        fn_nb = getattr(kernels, name + "_numba")
        fn_nb(*call_args)
        t_np = min(timeit.repeat(lambda: fn_np(*call_args), number=1, repeat=args.repeat)) * 1e3
        t_nb = min(timeit.repeat(lambda: fn_nb(*call_args), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<22}{t_np:>12.2f}{t_nb:>12.2f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
