"""Exact rank and determinant of integer matrices.

Small matrices use Bareiss fraction-free elimination with full pivoting on
Python integers. Larger ones use elimination modulo 31-bit primes; enough
primes are taken that their product beats the Hadamard bound, which makes
the result exact rather than probabilistic.
"""
from __future__ import annotations

import math

import numpy as np

from . import _kernels

BAREISS_LIMIT = 24  # use Bareiss when min(rows, cols) is at most this


def bareiss(A):
    """Return (rank, det) of an integer matrix given as a list of rows.

    det is None unless the matrix is square. Full pivoting: the pivot is the
    entry of smallest nonzero absolute value in the remaining block.
    """
    M = [list(map(int, row)) for row in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    sign = 1
    prev = 1
    rank = 0
    for k in range(min(rows, cols)):
        best = None
        for i in range(k, rows):
            Mi = M[i]
            for j in range(k, cols):
                v = Mi[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != k:
            M[i], M[k] = M[k], M[i]
            sign = -sign
        if j != k:
            for row in M:
                row[j], row[k] = row[k], row[j]
            sign = -sign
        piv = M[k][k]
        Mk = M[k]
        for i in range(k + 1, rows):
            Mi = M[i]
            f = Mi[k]
            for j in range(k + 1, cols):
                Mi[j] = (piv * Mi[j] - f * Mk[j]) // prev
            Mi[k] = 0
        prev = piv
        rank += 1
    det = None
    if rows == cols:
        det = sign * M[-1][-1] if rank == rows and rows else (1 if rows == 0 else 0)
    return rank, det


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_PRIMES: list = []


def primes(count: int) -> list:
    """The `count` largest primes below 2**31, descending (cached)."""
    candidate = _PRIMES[-1] - 2 if _PRIMES else (1 << 31) - 1
    while len(_PRIMES) < count:
        if _is_prime(candidate):
            _PRIMES.append(candidate)
        candidate -= 2
    return _PRIMES[:count]


def _prime_stream():
    k = 0
    while True:
        k += 1
        yield primes(k)[-1]


def hadamard_log2(A, size=None) -> float:
    """log2 of a bound on |minor| over all square minors of order <= size."""
    A = [[int(v) for v in row] for row in A]
    norms = sorted((math.sqrt(sum(v * v for v in row)) for row in A if any(row)), reverse=True)
    if size is not None:
        norms = norms[:size]
    return sum(math.log2(x) for x in norms if x > 1)


def _as_int64(A):
    arr = np.array(A, dtype=object)
    if arr.size and max(abs(int(v)) for v in arr.flat) >= (1 << 62):
        return None
    return np.array(A, dtype=np.int64).reshape(arr.shape) if arr.size else np.zeros(arr.shape, np.int64)


def _reducer(A):
    """A function p -> A mod p as an int64 array; converts A only once."""
    arr = _as_int64(A)
    if arr is not None:
        return lambda p: arr % p
    return lambda p: np.array([[int(v) % p for v in row] for row in A], dtype=np.int64)


def int_rank(A) -> int:
    A = [list(row) for row in A]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    if rows == 0 or cols == 0:
        return 0
    if min(rows, cols) <= BAREISS_LIMIT:
        return bareiss(A)[0]
    full = min(rows, cols)
    bound = hadamard_log2(A, full) + 1
    best = 0
    logprod = 0.0
    reduce = _reducer(A)
    for p in _prime_stream():
        r = _kernels.rank_mod_p(reduce(p), p)
        best = max(best, r)
        if best == full:
            return best
        logprod += math.log2(p)
        # a nonzero minor of order best+1 cannot be divisible by all primes used
        if logprod > bound:
            return best


def int_det(A) -> int:
    A = [list(row) for row in A]
    N = len(A)
    if N == 0:
        return 1
    if any(len(row) != N for row in A):
        raise ValueError("determinant of a non-square matrix")
    if N <= BAREISS_LIMIT:
        return bareiss(A)[1]
    bound = hadamard_log2(A) + 2
    residue, modulus = 0, 1
    reduce = _reducer(A)
    for p in _prime_stream():
        d = _kernels.det_mod_p(reduce(p), p)
        # CRT step
        t = (d - residue) * pow(modulus, -1, p) % p
        residue += modulus * t
        modulus *= p
        if math.log2(modulus) > bound:
            break
    if residue > modulus // 2:
        residue -= modulus
    return residue
