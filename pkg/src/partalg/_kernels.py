"""Inner loops, in two interchangeable implementations.

Each kernel exists as a numba-compiled loop version and a vectorised numpy
version with the same signature and the same output. The numba versions are
used when numba imports and PARTALG_DISABLE_NUMBA is unset or "0"; both sets
stay reachable as ``numba_impl`` and ``numpy_impl`` for tests and benchmarks.

Kernels:
    compose_labels     batched diagram stacking (union-find)
    potts_indices      nonzero coordinates of a Potts image
    rank_mod_p         rank of an integer matrix over F_p
    det_mod_p          determinant over F_p
    poly_sym_eliminate Gaussian elimination of a symmetric matrix over Z[d]
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

# stored coefficients stay below this, so one product fits in int64
COEFF_LIMIT = 1 << 31

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("PARTALG_DISABLE_NUMBA", "0") in ("", "0")


# --------------------------------------------------------------- numpy versions


def _rgs(row):
    seen = {}
    return [seen.setdefault(int(v), len(seen)) for v in row]


def compose_labels_np(P, Q, n, m, k):
    """Stack diagrams P[b] (n->m) atop Q[b] (m->k), given as node block labels.

    Returns the block labels of the n+k outer nodes (restricted growth form)
    and the number of components closed off in the middle row.
    """
    P = np.asarray(P, dtype=np.int64)
    Q = np.asarray(Q, dtype=np.int64)
    B = P.shape[0]
    V = n + m + k
    lab = np.tile(np.arange(V, dtype=np.int64), (B, 1))
    rows = np.arange(B)[:, None]
    p_nodes = np.arange(n + m)
    q_nodes = np.arange(n, V)
    nb_p = n + m
    nb_q = m + k
    # min-label propagation through both block systems until stable
    while True:
        best = np.full((B, max(nb_p, 1)), V, dtype=np.int64)
        np.minimum.at(best, (np.broadcast_to(rows, P.shape), P), lab[:, p_nodes])
        new = lab.copy()
        new[:, p_nodes] = np.minimum(new[:, p_nodes], best[rows, P])
        best = np.full((B, max(nb_q, 1)), V, dtype=np.int64)
        np.minimum.at(best, (np.broadcast_to(rows, Q.shape), Q), new[:, q_nodes])
        new[:, q_nodes] = np.minimum(new[:, q_nodes], best[rows, Q])
        if np.array_equal(new, lab):
            break
        lab = new
    outer = np.concatenate([lab[:, :n], lab[:, n + m:]], axis=1)
    middle = lab[:, n:n + m]
    out = np.empty((B, n + k), dtype=np.int64)
    powers = np.zeros(B, dtype=np.int64)
    for b in range(B):
        out[b] = _rgs(outer[b])
        powers[b] = len(set(middle[b].tolist()) - set(outer[b].tolist()))
    return out, powers


def potts_indices_np(labels, nblocks, Q, n, m):
    """Row and column index of every nonzero entry of a Potts image.

    One entry per colouring of the blocks; words are read base Q with the
    first letter most significant.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if nblocks == 0:
        return np.zeros(1, np.int64), np.zeros(1, np.int64)
    colours = np.indices((Q,) * nblocks, dtype=np.int64).reshape(nblocks, -1).T
    node_colour = colours[:, labels]
    wn = Q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    wm = Q ** np.arange(m - 1, -1, -1, dtype=np.int64)
    rows = node_colour[:, :n] @ wn if n else np.zeros(len(colours), np.int64)
    cols = node_colour[:, n:] @ wm if m else np.zeros(len(colours), np.int64)
    return rows.astype(np.int64), cols.astype(np.int64)


def _inv_mod(a, p):
    return pow(int(a), -1, int(p))


def rank_mod_p_np(A, p):
    M = np.array(A, dtype=np.int64) % p
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if len(nz) == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r, c:] = M[r, c:] * _inv_mod(M[r, c], p) % p
        f = M[r + 1:, c].copy()
        M[r + 1:, c:] = (M[r + 1:, c:] - np.outer(f, M[r, c:])) % p
        r += 1
    return r


def det_mod_p_np(A, p):
    M = np.array(A, dtype=np.int64) % p
    N = M.shape[0]
    det = 1
    for c in range(N):
        nz = np.nonzero(M[c:, c])[0]
        if len(nz) == 0:
            return 0
        piv = c + nz[0]
        if piv != c:
            M[[c, piv]] = M[[piv, c]]
            det = -det
        d = int(M[c, c])
        det = det * d % p
        row = M[c, c:] * _inv_mod(d, p) % p
        f = M[c + 1:, c].copy()
        M[c + 1:, c:] = (M[c + 1:, c:] - np.outer(f, row)) % p
    return det % p


def _degree_rows(X):
    # degree of each polynomial along the last axis, -1 for zero
    nz = X != 0
    L = X.shape[-1]
    last = L - 1 - np.argmax(nz[..., ::-1], axis=-1)
    return np.where(nz.any(axis=-1), last, -1)


def poly_sym_eliminate_np(A):
    """Symmetric-pivot elimination of a square matrix over Z[d].

    A has shape (N, N, L): coefficient arrays, constant term first. At each
    step the remaining diagonal entry of least degree is the pivot; every other
    row is reduced by an exact polynomial multiple of the pivot row.

    Returns (status, pivots, order): status 0 success, 1 a division was not
    exact or a coefficient left the safe range, 2 the matrix is singular.
    det(A) is the product of the pivots on success.
    """
    M = np.array(A, dtype=np.int64)
    N, _, L = M.shape
    pivots = np.zeros((N, L), dtype=np.int64)
    order = np.full(N, -1, dtype=np.int64)
    alive = np.ones(N, dtype=bool)
    for step in range(N):
        idx = np.nonzero(alive)[0]
        diag_deg = _degree_rows(M[idx, idx])
        if np.all(diag_deg < 0):
            if np.any(M[np.ix_(idx, idx)] != 0):
                return 1, pivots, order
            return 2, pivots, order
        cand = np.where(diag_deg >= 0, diag_deg, L + 1)
        k = int(idx[int(np.argmin(cand))])
        dk = int(_degree_rows(M[k, k]))
        lead = int(M[k, k, dk])
        others = idx[idx != k]
        if len(others):
            rem = M[others, k].copy()
            quo = np.zeros((len(others), L), dtype=np.int64)
            for top in range(L - 1, dk - 1, -1):
                c = rem[:, top]
                if np.any(c % lead):
                    return 1, pivots, order
                c = c // lead
                quo[:, top - dk] = c
                rem[:, top - dk:top + 1] -= c[:, None] * M[k, k, :dk + 1][None, :]
            if np.any(rem != 0):
                return 1, pivots, order
            if np.abs(quo).max(initial=0) >= COEFF_LIMIT:
                return 1, pivots, order
            prow = M[k, idx]  # (len(idx), L)
            dq = int(_degree_rows(quo).max(initial=-1))
            if dq >= 0:
                dp = int(_degree_rows(prow).max(initial=-1))
                if dp + dq >= L:
                    return 1, pivots, order
                sub = M[np.ix_(others, idx)]
                for s in range(dq + 1):
                    qs = quo[:, s]
                    if not np.any(qs):
                        continue
                    sub[:, :, s:] -= qs[:, None, None] * prow[None, :, :L - s]
                if np.abs(sub).max(initial=0) >= COEFF_LIMIT:
                    return 1, pivots, order
                M[np.ix_(others, idx)] = sub
        pivots[step] = M[k, k]
        order[step] = k
        alive[k] = False
    return 0, pivots, order


numpy_impl = SimpleNamespace(
    compose_labels=compose_labels_np,
    potts_indices=potts_indices_np,
    rank_mod_p=rank_mod_p_np,
    det_mod_p=det_mod_p_np,
    poly_sym_eliminate=poly_sym_eliminate_np,
)


# --------------------------------------------------------------- numba versions

if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True, nogil=True)
    def _find(parent, x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    @njit(cache=True, nogil=True)
    def _union(parent, a, b):
        ra = _find(parent, a)
        rb = _find(parent, b)
        if ra != rb:
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb

    @njit(cache=True, nogil=True)
    def _compose_nb(P, Q, n, m, k):
        B = P.shape[0]
        V = n + m + k
        out = np.empty((B, n + k), np.int64)
        powers = np.zeros(B, np.int64)
        parent = np.empty(V, np.int64)
        first = np.empty(V + 1, np.int64)
        touched = np.zeros(V, np.bool_)
        relabel = np.empty(V, np.int64)
        for b in range(B):
            for v in range(V):
                parent[v] = v
                touched[v] = False
                relabel[v] = -1
            for v in range(n + m + 1):
                first[v] = -1
            for v in range(n + m):
                lab = P[b, v]
                if first[lab] < 0:
                    first[lab] = v
                else:
                    _union(parent, first[lab], v)
            for v in range(m + k + 1):
                first[v] = -1
            for j in range(m + k):
                lab = Q[b, j]
                if first[lab] < 0:
                    first[lab] = n + j
                else:
                    _union(parent, first[lab], n + j)
            nxt = 0
            for i in range(n + k):
                v = i if i < n else i + m
                r = _find(parent, v)
                touched[r] = True
                if relabel[r] < 0:
                    relabel[r] = nxt
                    nxt += 1
                out[b, i] = relabel[r]
            cnt = 0
            for v in range(n, n + m):
                r = _find(parent, v)
                if not touched[r]:
                    touched[r] = True
                    cnt += 1
            powers[b] = cnt
        return out, powers

    @njit(cache=True, nogil=True)
    def _potts_nb(labels, nblocks, Q, n, m):
        total = 1
        for _ in range(nblocks):
            total *= Q
        rows = np.zeros(total, np.int64)
        cols = np.zeros(total, np.int64)
        colour = np.zeros(max(nblocks, 1), np.int64)
        for c in range(total):
            x = c
            for j in range(nblocks - 1, -1, -1):
                colour[j] = x % Q
                x //= Q
            r = 0
            for i in range(n):
                r = r * Q + colour[labels[i]]
            s = 0
            for i in range(n, n + m):
                s = s * Q + colour[labels[i]]
            rows[c] = r
            cols[c] = s
        return rows, cols

    @njit(cache=True, nogil=True)
    def _inv_mod_nb(a, p):
        t, newt = 0, 1
        r, newr = p, a % p
        while newr != 0:
            q = r // newr
            t, newt = newt, t - q * newt
            r, newr = newr, r - q * newr
        if t < 0:
            t += p
        return t

    @njit(cache=True, nogil=True)
    def _rank_mod_p_nb(A, p):
        M = A % p
        rows, cols = M.shape
        r = 0
        for c in range(cols):
            if r == rows:
                break
            piv = -1
            for i in range(r, rows):
                if M[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(c, cols):
                    tmp = M[r, j]
                    M[r, j] = M[piv, j]
                    M[piv, j] = tmp
            inv = _inv_mod_nb(M[r, c], p)
            for j in range(c, cols):
                M[r, j] = M[r, j] * inv % p
            for i in range(r + 1, rows):
                f = M[i, c]
                if f != 0:
                    for j in range(c, cols):
                        M[i, j] = (M[i, j] - f * M[r, j]) % p
            r += 1
        return r

    @njit(cache=True, nogil=True)
    def _det_mod_p_nb(A, p):
        M = A % p
        N = M.shape[0]
        det = 1
        for c in range(N):
            piv = -1
            for i in range(c, N):
                if M[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                return 0
            if piv != c:
                for j in range(c, N):
                    tmp = M[c, j]
                    M[c, j] = M[piv, j]
                    M[piv, j] = tmp
                det = (p - det) % p
            d = M[c, c]
            det = det * d % p
            inv = _inv_mod_nb(d, p)
            for j in range(c, N):
                M[c, j] = M[c, j] * inv % p
            for i in range(c + 1, N):
                f = M[i, c]
                if f != 0:
                    for j in range(c, N):
                        M[i, j] = (M[i, j] - f * M[c, j]) % p
        return det

    @njit(cache=True, nogil=True)
    def _deg_nb(a):
        for t in range(a.shape[0] - 1, -1, -1):
            if a[t] != 0:
                return t
        return -1

    @njit(cache=True, nogil=True)
    def _poly_sym_nb(A):
        M = A.copy()
        N = M.shape[0]
        L = M.shape[2]
        pivots = np.zeros((N, L), np.int64)
        order = np.full(N, -1, np.int64)
        alive = np.ones(N, np.bool_)
        rem = np.zeros(L, np.int64)
        quo = np.zeros(L, np.int64)
        for step in range(N):
            k = -1
            dk = L + 1
            for i in range(N):
                if alive[i]:
                    d = _deg_nb(M[i, i])
                    if d >= 0 and d < dk:
                        dk = d
                        k = i
            if k < 0:
                for i in range(N):
                    if alive[i]:
                        for j in range(N):
                            if alive[j] and _deg_nb(M[i, j]) >= 0:
                                return 1, pivots, order
                return 2, pivots, order
            lead = M[k, k, dk]
            for i in range(N):
                if not alive[i] or i == k:
                    continue
                for t in range(L):
                    rem[t] = M[i, k, t]
                    quo[t] = 0
                di = _deg_nb(rem)
                while di >= dk:
                    if rem[di] % lead != 0:
                        return 1, pivots, order
                    c = rem[di] // lead
                    if abs(c) >= COEFF_LIMIT:
                        return 1, pivots, order
                    quo[di - dk] = c
                    for t in range(dk + 1):
                        rem[di - dk + t] -= c * M[k, k, t]
                    di = _deg_nb(rem)
                if di >= 0:
                    return 1, pivots, order
                dq = _deg_nb(quo)
                if dq < 0:
                    continue
                for j in range(N):
                    if not alive[j]:
                        continue
                    for s in range(dq + 1):
                        q = quo[s]
                        if q == 0:
                            continue
                        for t in range(L):
                            v = M[k, j, t]
                            if v == 0:
                                continue
                            if s + t >= L:
                                return 1, pivots, order
                            w = M[i, j, s + t] - q * v
                            if abs(w) >= COEFF_LIMIT:
                                return 1, pivots, order
                            M[i, j, s + t] = w
            for t in range(L):
                pivots[step, t] = M[k, k, t]
            order[step] = k
            alive[k] = False
        return 0, pivots, order

    def compose_labels_nb(P, Q, n, m, k):
        P = np.ascontiguousarray(P, dtype=np.int64)
        Q = np.ascontiguousarray(Q, dtype=np.int64)
        return _compose_nb(P, Q, n, m, k)

    def potts_indices_nb(labels, nblocks, Q, n, m):
        return _potts_nb(np.ascontiguousarray(labels, dtype=np.int64), nblocks, Q, n, m)

    def rank_mod_p_nb(A, p):
        return int(_rank_mod_p_nb(np.ascontiguousarray(A, dtype=np.int64), np.int64(p)))

    def det_mod_p_nb(A, p):
        return int(_det_mod_p_nb(np.ascontiguousarray(A, dtype=np.int64), np.int64(p)))

    def poly_sym_eliminate_nb(A):
        status, pivots, order = _poly_sym_nb(np.ascontiguousarray(A, dtype=np.int64))
        return int(status), pivots, order

    numba_impl = SimpleNamespace(
        compose_labels=compose_labels_nb,
        potts_indices=potts_indices_nb,
        rank_mod_p=rank_mod_p_nb,
        det_mod_p=det_mod_p_nb,
        poly_sym_eliminate=poly_sym_eliminate_nb,
    )
else:  # pragma: no cover
    numba_impl = None

active = numba_impl if USE_NUMBA else numpy_impl

compose_labels = active.compose_labels
potts_indices = active.potts_indices
rank_mod_p = active.rank_mod_p
det_mod_p = active.det_mod_p
poly_sym_eliminate = active.poly_sym_eliminate


def set_thread_cap(cap):
    """Apply PARTALG_THREADS to numba's thread pool when numba is active."""
    if cap and USE_NUMBA:
        numba.set_num_threads(max(1, min(cap, numba.config.NUMBA_NUM_THREADS)))
