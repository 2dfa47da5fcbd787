"""Time the numba kernels against the numpy fallbacks on realistic inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each case runs once untimed (JIT warm-up), then `repeat` times; the best
time is reported. Outputs of the two implementations are compared, and a
mismatch aborts the run.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from partalg import _kernels
from partalg.diagcat import Diagram
from partalg.intlinalg import primes
from partalg.polyring import _to_coeff_array
from partalg.setpart import enumerate_even_partitions, enumerate_partitions
from partalg.spinegram import gram_matrix, spine_basis


def _labels(parts):
    return np.array([p.labels() for p in parts], dtype=np.int64)


def cases():
    rng = np.random.default_rng(12345)

    # every pair from P_{3,3}: 203^2 stackings of 3 -> 3 -> 3
    p33 = _labels(enumerate_partitions(3, 3))
    i, j = np.meshgrid(np.arange(len(p33)), np.arange(len(p33)), indexing="ij")
    P, Q = p33[i.ravel()], p33[j.ravel()]
    yield "compose P33 x P33", "compose_labels", (P, Q, 3, 3, 3)

    # Potts image of the all-singletons partition of 6 + 6 nodes at Q = 3
    single = Diagram(enumerate_partitions(6, 6)[0])
    yield "potts 12 singletons, Q=3", "potts_indices", (
        np.array(single.labels(), dtype=np.int64), len(single.blocks), 3, 6, 6)

    p = primes(1)[0]
    A = rng.integers(0, p, size=(300, 300), dtype=np.int64)
    A[:, -1] = A[:, 0]  # force a rank drop
    yield "rank mod p 300x300", "rank_mod_p", (A, p)
    yield "det mod p 300x300", "det_mod_p", (rng.integers(0, p, size=(300, 300), dtype=np.int64), p)

    g = gram_matrix(spine_basis("tonal", 6))
    C = _to_coeff_array(g.entries())
    yield "poly elimination tonal n=6 (31x31)", "poly_sym_eliminate", (C,)

    g = gram_matrix(spine_basis("tonal", 8))
    C = _to_coeff_array(g.entries())
    yield "poly elimination tonal n=8 (379x379)", "poly_sym_eliminate", (C,)


def _same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def _best(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write results to this file")
    args = ap.parse_args(argv)
    if _kernels.numba_impl is None:
        print("numba is not importable; nothing to compare", file=sys.stderr)
        return 1
    rows = []
    print(f"{'case':40s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, kernel, kargs in cases():
        t_np, out_np = _best(getattr(_kernels.numpy_impl, kernel), kargs, args.repeat)
        t_nb, out_nb = _best(getattr(_kernels.numba_impl, kernel), kargs, args.repeat)
        if not _same(out_np, out_nb):
            print(f"{name}: implementations disagree", file=sys.stderr)
            return 2
        rows.append({"case": name, "numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb})
        print(f"{name:40s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
