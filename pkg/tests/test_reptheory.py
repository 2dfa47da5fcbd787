from collections import Counter
from fractions import Fraction
from itertools import product
from math import factorial

import pytest
from hypothesis import given, strategies as st

from partalg.errors import DomainError
from partalg.reptheory import (
    Label, addable, algebra_dim, bratelli, gamma_leq, gamma_points, index_set, integer_partitions,
    removable, restrict, restrict_twice, semisimplicity_verdict, specht_dim, spine_bad_set,
    top_dim, x_generators,
)
from partalg.setpart import bell, t_count

from oracles import bell_triangle, even_partitions


def L(lam=(), mu=None):
    return Label(tuple(lam), None if mu is None else tuple(mu))


def tableaux(lam):
    """Standard tableaux count by removing corners."""
    lam = tuple(x for x in lam if x)
    if not lam:
        return 1
    total = 0
    for i in range(len(lam)):
        if i == len(lam) - 1 or lam[i] > lam[i + 1]:
            total += tableaux(lam[:i] + (lam[i] - 1,) + lam[i + 1:])
    return total


def test_specht_examples():
    assert specht_dim((2, 1)) == 2
    assert specht_dim((5,)) == 1
    assert specht_dim((1, 1, 1)) == 1
    assert specht_dim(()) == 1
    with pytest.raises(DomainError):
        specht_dim((1, 2))


@pytest.mark.parametrize("k", range(0, 9))
def test_hook_formula(k):
    parts = list(integer_partitions(k))
    for lam in parts:
        assert specht_dim(lam) == tableaux(lam)
    assert sum(specht_dim(lam) ** 2 for lam in parts) == factorial(k)


def test_removable_addable():
    assert sorted(removable((2, 1))) == [(1, 1), (2,)]
    assert sorted(addable((2, 1))) == [(2, 1, 1), (2, 2), (3, 1)]
    assert addable(()) == [(1,)] and removable(()) == []


def test_index_set_examples():
    assert set(index_set("tonal", 2)) == {L((), ()), L((2,), ()), L((1, 1), ()), L((), (1,))}
    assert set(index_set("ordinary", 2)) == {L(()), L((1,)), L((2,)), L((1, 1))}
    assert index_set("tonal", 1) == [L((1,), ())]
    assert L((), ()) not in index_set("tonal", 4, delta_zero=True)
    assert index_set("ordinary", 3, delta_zero=True) == index_set("ordinary", 3)
    assert gamma_points(2) == [(0, 0), (0, 1), (2, 0)]


@pytest.mark.parametrize("n", range(0, 9))
def test_tonal_rank_parity(n):
    assert all(lab.rank % 2 == n % 2 and lab.rank <= n for lab in index_set("tonal", n))


def test_x_generators():
    assert set(x_generators(2)) == {(-2, 1), (0, -1)}
    for v in x_generators(3):
        assert sum(v) == -1


def leq_by_search(a, b, d, bound):
    gens = x_generators(d)
    diff = tuple(x - y for x, y in zip(a, b))
    for cs in product(range(bound + 1), repeat=len(gens)):
        if tuple(sum(c * g[i] for c, g in zip(cs, gens)) for i in range(d)) == diff:
            return True
    return False


def test_gamma_leq_examples():
    assert gamma_leq((0, 0), (2, 0))
    assert gamma_leq((1, 1), (1, 1))
    assert not gamma_leq((2, 0), (0, 0))
    with pytest.raises(DomainError):
        gamma_leq((1,), (1, 1))


@pytest.mark.parametrize("n", range(0, 9))
def test_gamma_leq_partial_order(n):
    pts = gamma_points(n)
    rel = {(a, b): gamma_leq(a, b) for a in pts for b in pts}
    for a in pts:
        assert rel[a, a]
    for a in pts:
        for b in pts:
            assert rel[a, b] == leq_by_search(a, b, 2, n)
            if a != b and rel[a, b]:
                assert not rel[b, a]
            for c in pts:
                if rel[a, b] and rel[b, c]:
                    assert rel[a, c]


def test_restrict_examples():
    r = restrict(L((), (1,)))
    assert r[L((1,), ())] >= 1 and r[L((1,), (1,))] >= 1
    # (1) itself: once for keep-keep, once for remove-then-add
    assert restrict(L((1,))) == Counter({L(()): 1, L((2,)): 1, L((1, 1)): 1, L((1,)): 2})
    assert restrict(L((1,), ())) == Counter({L((), ()): 1, L((), (1,)): 1, L((2,), ()): 1, L((1, 1), ()): 1})


@given(st.integers(0, 6).flatmap(lambda n: st.sampled_from(index_set("ordinary", n))))
def test_ordinary_restriction_ranks(lab):
    assert {x.rank for x in restrict(lab)} <= {lab.rank - 1, lab.rank, lab.rank + 1}


@given(st.integers(0, 7).flatmap(lambda n: st.sampled_from(index_set("tonal", n))))
def test_tonal_restriction_ranks(lab):
    assert {x.rank for x in restrict(lab)} <= {lab.rank - 1, lab.rank + 1}
    assert {x.rank for x in restrict_twice(lab)} <= {lab.rank - 2, lab.rank, lab.rank + 2}


def test_bratelli_examples():
    g = bratelli("ordinary", 4)
    assert g.dim(4, L(())) == 15
    assert g.levels[0] == (0, [L(())]) and g.dim(0, L(())) == 1
    t = bratelli("tonal", 4)
    assert t.dim(4, L((), ())) == 4
    with pytest.raises(DomainError):
        bratelli("tonal", -1)


def test_ordinary_dims():
    g = bratelli("ordinary", 6)
    for n in range(7):
        assert g.dim(n, L(())) == bell(n) == bell_triangle(n)
        assert sum(g.dim(n, lab) ** 2 for lab in g.levels[n][1]) == bell(2 * n) == algebra_dim("ordinary", n)
        for lab in g.levels[n][1]:
            if lab.rank == n:
                assert g.dim(n, lab) == specht_dim(lab.lam)


def test_tonal_dims():
    g = bratelli("tonal", 8)
    for n in range(9):
        total = sum(g.dim(n, lab) ** 2 for lab in g.levels[n][1])
        assert total == algebra_dim("tonal", n) == sum(t_count(n, t) for t in range(n + 1))
        if n <= 4:
            assert total == len(even_partitions(2 * n))
        for lab in g.levels[n][1]:
            if lab.rank == n:
                assert g.dim(n, lab) == top_dim(lab)
        if n % 2 == 0:
            assert g.dim(n, L((), ())) == sum(t_count(n // 2, t) for t in range(n // 2 + 1))
        else:
            assert g.dim(n, L((1,), ())) == sum(t_count((n + 1) // 2, t) for t in range(n // 2 + 2))


def test_bratelli_serialisation():
    g = bratelli("tonal", 2)
    dot = g.to_dot()
    assert dot.startswith("digraph") and "subgraph level_2" in dot and '"∅|(1) (' in dot
    js = g.to_json()
    assert js["algebra"] == "P2" and js["levels"][0]["nodes"][0]["dim"] == "1"
    assert all(e["mult"] >= 1 for e in js["edges"])
    assert "n=1" in g.to_text()


def test_spine_bad_sets():
    assert spine_bad_set("tonal", 4) == [1]
    assert spine_bad_set("tonal", 6) == [1, 2]
    assert spine_bad_set("tonal", 5) == [1, 2]
    assert spine_bad_set("ordinary", 3) == [1, 2]


def test_verdict_examples():
    v = semisimplicity_verdict("tonal", Fraction(1, 2))
    assert v.semisimple_all_n and v.witness_n is None
    v = semisimplicity_verdict("tonal", 0, 3)
    assert v.semisimple_at_n is True and not v.semisimple_all_n
    v = semisimplicity_verdict("tonal", 2, 4)
    assert v.spine_bad_set == [1] and v.spine_simple_at_n and not v.semisimple_all_n
    assert v.semisimple_at_n is None and v.witness_n > 4
    assert semisimplicity_verdict("tonal", 0, 4).semisimple_at_n is False
    assert semisimplicity_verdict("ordinary", 0, 3).semisimple_at_n is False
    assert semisimplicity_verdict("ordinary", 3, 4).semisimple_at_n is False
    assert semisimplicity_verdict("ordinary", "-7/3", 4).semisimple_at_n is True
    with pytest.raises(DomainError):
        semisimplicity_verdict("tonal", "x")


@given(st.integers(0, 6))
def test_witness_is_first_bad_level(k):
    for alg in ("ordinary", "tonal"):
        v = semisimplicity_verdict(alg, k)
        if k == 0:
            continue
        first = next(n for n in range(1, 40) if k in spine_bad_set(alg, n))
        assert v.witness_n == first


def test_label_format():
    assert str(L((), (1,))) == "∅|(1)"
    assert str(L((2, 1))) == "(2,1)"
    assert L((1,), (1,)).rank == 3
    assert L((2,), ()).to_json() == {"lambda": [2], "mu": []}
