"""Time the numba kernels against their numpy fallbacks on the same inputs.

    python benchmarks/bench_kernels.py [--repeat N]

Each row reports the best of N runs per backend after one warm-up call
(which also triggers JIT compilation) and checks that both agree.
"""
from __future__ import annotations

import argparse
import itertools
import timeit

import numpy as np

from internality import _kernels
from internality.groups import FiniteGroup


def orbit_case(n=8, width=4):
    # S_n acting diagonally on width-tuples of points
    gens = np.asarray([[1, 0] + list(range(2, n)), list(range(1, n)) + [0]], dtype=np.int64)
    tuples = np.asarray(list(itertools.product(range(n), repeat=width)), dtype=np.int64)
    return gens, tuples, n


def preserves_case(n=8):
    # every permutation of n points against the edges of a cycle
    cands = np.asarray(list(itertools.permutations(range(n))), dtype=np.int64)
    rows = np.asarray([(i, (i + 1) % n) for i in range(n)], dtype=np.int64)
    return cands, rows, n


def assoc_case(n=5):
    g = FiniteGroup.symmetric(n)
    m = len(g)
    comp = np.empty((m, m), dtype=np.int64)
    for a in range(m):
        for b in range(m):
            comp[a, b] = g.mul(a, b)
    return (comp,)


CASES = [
    ("orbit_labels", "_orbit_labels_numpy", "_orbit_labels_numba", orbit_case),
    ("preserves_rows", "_preserves_numpy", "_preserves_numba", preserves_case),
    ("assoc", "_assoc_numpy", "_assoc_numba", assoc_case),
]


def _same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable or disabled; timing the numpy backend only")
    print(f"{'kernel':<16}{'numpy (ms)':>12}{'numba (ms)':>12}{'speedup':>10}  agree")
    for name, np_name, nb_name, build in CASES:
        inputs = build()
        fn_np = getattr(_kernels, np_name)
        ref = fn_np(*inputs)
        t_np = min(timeit.repeat(lambda: fn_np(*inputs), number=1, repeat=args.repeat)) * 1e3
        if _kernels.HAVE_NUMBA:
            fn_nb = getattr(_kernels, nb_name)
            out = fn_nb(*inputs)
            t_nb = min(timeit.repeat(lambda: fn_nb(*inputs), number=1, repeat=args.repeat)) * 1e3
            print(f"{name:<16}{t_np:>12.2f}{t_nb:>12.2f}{t_np / t_nb:>9.1f}x  {_same(ref, out)}")
        else:
            print(f"{name:<16}{t_np:>12.2f}{'-':>12}{'-':>10}  -")


if __name__ == "__main__":
    main()
