import pytest
from hypothesis import given, strategies as st

from partalg.errors import CapacityError, DomainError
from partalg.setpart import (
    SetPartition, bell, enumerate_even_partitions, enumerate_partitions, is_tonal, join,
    order_key, refines, shape, stirling2, t_count, word_partition,
)

from oracles import bell_triangle, blocks_key, even_partitions, set_partitions, stirling2 as st2
from oracles import t_count_by_enumeration


def P(n, m, *blocks):
    return SetPartition.from_blocks(n, m, blocks)


def test_empty_enumeration():
    parts = enumerate_partitions(0, 0)
    assert len(parts) == 1 and parts[0].blocks == ()


def test_three_nodes_in_order():
    got = [str(p) for p in enumerate_partitions(3, 0)]
    assert got == ["(1)(2)(3)", "(1 2)(3)", "(1 3)(2)", "(1)(2 3)", "(1 2 3)"]


@pytest.mark.parametrize("n,m", [(0, 1), (1, 1), (2, 2), (3, 1), (2, 3), (4, 0)])
def test_enumeration_matches_brute_force(n, m):
    ours = {blocks_key(p.blocks) for p in enumerate_partitions(n, m)}
    ref = {blocks_key(p) for p in set_partitions(range(1, n + m + 1))}
    assert ours == ref
    assert len(enumerate_partitions(n, m)) == len(ref)


def test_two_two_has_fifteen():
    assert len(enumerate_partitions(2, 2)) == 15


def test_enumeration_cap():
    with pytest.raises(CapacityError):
        enumerate_partitions(5, 5, cap=100)


def test_order_is_sorted_by_key():
    parts = enumerate_partitions(5, 0)
    assert parts == sorted(parts, key=order_key)


@pytest.mark.parametrize("n", [0, 2, 4, 6])
def test_even_partitions(n):
    ours = {blocks_key(p.blocks) for p in enumerate_even_partitions(n)}
    assert ours == {blocks_key(p) for p in even_partitions(n)}


def test_even_examples():
    assert [str(p) for p in enumerate_even_partitions(2)] == ["(1 2)"]
    assert [str(p) for p in enumerate_even_partitions(4)] == [
        "(1 2)(3 4)", "(1 3)(2 4)", "(1 4)(2 3)", "(1 2 3 4)"]
    assert len(enumerate_even_partitions(6)) == 31
    assert enumerate_even_partitions(3) == []


def test_tonal_example():
    # {{1,2,6,6'},{3,4},{5,3'},{1',2'},{4',5'}} with n = m = 6
    n = 6
    p = P(6, 6, (1, 2, 6, n + 6), (3, 4), (5, n + 3), (n + 1, n + 2), (n + 4, n + 5))
    assert is_tonal(p, 2)
    assert not is_tonal(p, 3)


@pytest.mark.parametrize("n", [0, 1, 4])
@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_identity_is_tonal(n, d):
    p = P(n, n, *[(i, n + i) for i in range(1, n + 1)])
    assert is_tonal(p, d)


def test_is_tonal_rejects_bad_d():
    with pytest.raises(DomainError):
        is_tonal(P(1, 0, (1,)), 0)


def test_counts_examples():
    assert bell(4) == 15
    assert stirling2(3, 2) == 3
    assert t_count(3, 2) == 15 and t_count(3, 3) == 15
    assert sum(t_count(3, t) for t in range(4)) == 31
    assert bell(0) == 1 and stirling2(0, 0) == 1


@given(st.integers(0, 12))
def test_bell_is_sum_of_stirling(n):
    assert bell(n) == sum(stirling2(n, l) for l in range(n + 1)) == bell_triangle(n)


@given(st.integers(0, 10), st.integers(0, 10))
def test_stirling_recurrence(n, k):
    assert stirling2(n, k) == st2(n, k)


@pytest.mark.parametrize("m", range(0, 5))
def test_t_count_by_enumeration(m):
    for t in range(m + 1):
        assert t_count(m, t) == t_count_by_enumeration(m, t)


def test_refines():
    assert refines(P(3, 0, (1,), (2,), (3,)), P(3, 0, (1, 2), (3,)))
    assert not refines(P(3, 0, (1, 2), (3,)), P(3, 0, (1, 3), (2,)))


@given(st.integers(0, 5).flatmap(lambda n: st.sampled_from(enumerate_partitions(n, 0))))
def test_refines_reflexive(p):
    assert refines(p, p)


def test_shape():
    assert shape(P(4, 0, (1, 2), (3,), (4,))) == (2, 1, 1)
    assert shape(P(4, 0, (1, 2, 3, 4))) == (4,)
    assert shape(enumerate_partitions(0, 0)[0]) == ()


def test_word_partition():
    assert str(word_partition((1, 1, 2))) == "(1 2)(3)"
    assert str(word_partition((1, 1, 1))) == "(1 2 3)"
    assert str(word_partition((1, 1, 2, 3))) == "(1 2)(3)(4)"


parts4 = enumerate_partitions(4, 0)


@given(st.sampled_from(parts4), st.sampled_from(parts4))
def test_join_is_least_upper_bound(p, q):
    j = join(p, q)
    assert refines(p, j) and refines(q, j)
    for r in parts4:
        if refines(p, r) and refines(q, r):
            assert refines(j, r)


@given(st.integers(0, 3), st.integers(0, 3), st.data())
def test_json_round_trip(n, m, data):
    p = data.draw(st.sampled_from(enumerate_partitions(n, m)))
    assert SetPartition.from_json(p.to_json()) == p
    assert SetPartition.from_labels(n, m, p.labels()) == p


def test_from_blocks_rejects_garbage():
    with pytest.raises(DomainError):
        P(2, 0, (1, 1), (2,))
    with pytest.raises(DomainError):
        P(2, 0, (1,))
    with pytest.raises(DomainError):
        P(1, 0, (1, 2))
