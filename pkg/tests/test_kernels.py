import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from partalg import _kernels
from partalg.intlinalg import primes
from partalg.polyring import _to_coeff_array
from partalg.spinegram import gram_matrix, spine_basis

nb = _kernels.numba_impl
npy = _kernels.numpy_impl
needs_numba = pytest.mark.skipif(nb is None, reason="numba not importable")


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def rgs(draw, size):
    out, top = [], 0
    for _ in range(size):
        v = draw(st.integers(0, top))
        out.append(v)
        top = max(top, v + 1)
    return out


@needs_numba
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(1, 6), st.data())
def test_compose_kernels_agree(n, m, k, batch, data):
    P = np.array([rgs(data.draw, n + m) for _ in range(batch)], dtype=np.int64).reshape(batch, n + m)
    Q = np.array([rgs(data.draw, m + k) for _ in range(batch)], dtype=np.int64).reshape(batch, m + k)
    assert _same(nb.compose_labels(P, Q, n, m, k), npy.compose_labels(P, Q, n, m, k))


@needs_numba
@given(st.integers(0, 3), st.integers(0, 3), st.integers(1, 3), st.data())
def test_potts_kernels_agree(n, m, Q, data):
    labels = np.array(rgs(data.draw, n + m), dtype=np.int64)
    nblocks = int(labels.max() + 1) if len(labels) else 0
    a = nb.potts_indices(labels, nblocks, Q, n, m)
    b = npy.potts_indices(labels, nblocks, Q, n, m)
    # same set of coordinates; order may differ
    assert sorted(zip(*map(np.ndarray.tolist, a))) == sorted(zip(*map(np.ndarray.tolist, b)))


@needs_numba
@given(st.integers(1, 8), st.integers(1, 8), st.data())
def test_modular_kernels_agree(r, c, data):
    p = primes(1)[0]
    A = np.array(data.draw(st.lists(st.lists(st.integers(-5, 5), min_size=c, max_size=c),
                                    min_size=r, max_size=r)), dtype=np.int64)
    assert nb.rank_mod_p(A % p, p) == npy.rank_mod_p(A % p, p)
    if r == c:
        assert nb.det_mod_p(A % p, p) == npy.det_mod_p(A % p, p)


@needs_numba
@pytest.mark.parametrize("algebra,n", [("ordinary", 3), ("ordinary", 4), ("tonal", 4), ("tonal", 6)])
def test_elimination_kernels_agree(algebra, n):
    C = _to_coeff_array(gram_matrix(spine_basis(algebra, n)).entries())
    assert _same(nb.poly_sym_eliminate(C), npy.poly_sym_eliminate(C))


@needs_numba
def test_elimination_reports_singular():
    C = np.zeros((2, 2, 4), dtype=np.int64)
    assert nb.poly_sym_eliminate(C)[0] == npy.poly_sym_eliminate(C)[0] == 2


def _active_in_subprocess(flag):
    env = dict(os.environ)
    if flag is None:
        env.pop("PARTALG_DISABLE_NUMBA", None)
    else:
        env["PARTALG_DISABLE_NUMBA"] = flag
    code = "from partalg import _kernels; print(_kernels.active is _kernels.numpy_impl)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip() == "True"


def test_env_flag_selects_numpy():
    assert _active_in_subprocess("1")
    if nb is not None:
        assert not _active_in_subprocess("0")
        assert not _active_in_subprocess(None)


def test_numpy_path_end_to_end():
    env = dict(os.environ, PARTALG_DISABLE_NUMBA="1")
    code = ("from partalg.spinegram import gram_report; r = gram_report('tonal', 6); "
            "print(r.factorization.factors, r.checks['saturation'])")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "((0, 31), (1, 30), (2, 15)) True"
