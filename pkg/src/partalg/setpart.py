"""Set partitions of the node set {1..n} u {1'..m'}, their enumeration and counts.

Nodes are stored as integers: top node i is i, bottom node i' is n + i.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import Iterable, Sequence

from .config import DEFAULT
from .errors import CapacityError, DomainError, ShapeMismatchError

PartitionShape = tuple  # weakly decreasing tuple of block sizes


@dataclass(frozen=True)
class NodeSet:
    top_count: int
    bottom_count: int

    def __post_init__(self):
        if self.top_count < 0 or self.bottom_count < 0:
            raise DomainError("node counts must be nonnegative")

    @property
    def size(self) -> int:
        return self.top_count + self.bottom_count

    def label(self, node: int) -> str:
        if node <= self.top_count:
            return str(node)
        return f"{node - self.top_count}'"


@dataclass(frozen=True)
class SetPartition:
    """Canonical form: each block ascending, blocks ordered by least node."""

    n: int
    m: int
    blocks: tuple

    @classmethod
    def from_blocks(cls, n: int, m: int, blocks: Iterable[Iterable[int]]) -> "SetPartition":
        seen = set()
        out = []
        for b in blocks:
            b = tuple(sorted(b))
            if not b:
                raise DomainError("empty block")
            for v in b:
                if not 1 <= v <= n + m:
                    raise DomainError(f"node {v} outside 1..{n + m}")
                if v in seen:
                    raise DomainError(f"node {v} appears twice")
                seen.add(v)
            out.append(b)
        if len(seen) != n + m:
            missing = sorted(set(range(1, n + m + 1)) - seen)
            raise DomainError(f"nodes not covered: {missing}")
        out.sort()
        return cls(n, m, tuple(out))

    @classmethod
    def from_labels(cls, n: int, m: int, labels: Sequence[int]) -> "SetPartition":
        """Build from a per-node block label list (node i has label labels[i-1])."""
        groups: dict = {}
        for node, lab in enumerate(labels, 1):
            groups.setdefault(int(lab), []).append(node)
        return cls(n, m, tuple(sorted(tuple(g) for g in groups.values())))

    @property
    def node_set(self) -> NodeSet:
        return NodeSet(self.n, self.m)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def labels(self) -> list:
        """Restricted growth string: block index (0-based) of each node."""
        out = [0] * (self.n + self.m)
        for k, b in enumerate(self.blocks):
            for v in b:
                out[v - 1] = k
        return out

    def block_of(self, node: int) -> tuple:
        for b in self.blocks:
            if node in b:
                return b
        raise KeyError(node)

    def to_json(self) -> dict:
        ns = self.node_set
        return {
            "n": self.n,
            "m": self.m,
            "blocks": [[v if v <= self.n else ns.label(v) for v in b] for b in self.blocks],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SetPartition":
        n, m = int(obj["n"]), int(obj["m"])
        blocks = []
        for b in obj["blocks"]:
            nodes = []
            for v in b:
                if isinstance(v, str) and v.endswith("'"):
                    nodes.append(n + int(v[:-1]))
                else:
                    nodes.append(int(v))
            blocks.append(nodes)
        return cls.from_blocks(n, m, blocks)

    def __str__(self) -> str:
        ns = self.node_set
        return "".join("(" + " ".join(ns.label(v) for v in b) + ")" for b in self.blocks)


def order_key(p: SetPartition):
    """Sort key of the canonical enumeration order.

    More blocks first; then shape ascending; then the block list with larger
    blocks first, compared lexicographically.
    """
    blocks = sorted(p.blocks, key=lambda b: (-len(b), b))
    return (-len(p.blocks), shape(p), tuple(blocks))


def _generate(nodes: tuple, even: bool):
    # block containing the smallest remaining node, then recurse
    if not nodes:
        yield ()
        return
    first, rest = nodes[0], nodes[1:]
    k = len(rest)
    for r in range(k + 1):
        if even and r % 2 == 0:
            continue
        for chosen in combinations(rest, r):
            block = (first,) + chosen
            remaining = tuple(v for v in rest if v not in chosen)
            for tail in _generate(remaining, even):
                yield (block,) + tail


def _check_cap(count: int, cap: int | None):
    cap = DEFAULT.enumeration_cap if cap is None else cap
    if count > cap:
        raise CapacityError(f"enumeration of {count} partitions exceeds cap {cap}")


def enumerate_partitions(n: int, m: int = 0, cap: int | None = None, even: bool = False) -> list:
    """All partitions of {1..n} u {1'..m'} in canonical order.

    With even=True only partitions whose blocks all have even size.
    """
    if n < 0 or m < 0:
        raise DomainError("node counts must be nonnegative")
    total = n + m
    if even:
        if total % 2:
            return []
        _check_cap(sum(t_count(total // 2, t) for t in range(total // 2 + 1)), cap)
    else:
        _check_cap(bell(total), cap)
    parts = [SetPartition(n, m, tuple(sorted(bs))) for bs in _generate(tuple(range(1, total + 1)), even)]
    parts.sort(key=order_key)
    return parts


def enumerate_even_partitions(n: int, cap: int | None = None) -> list:
    return enumerate_partitions(n, 0, cap=cap, even=True)


def is_tonal(p: SetPartition, d: int) -> bool:
    if d < 1:
        raise DomainError("d must be positive")
    for b in p.blocks:
        top = sum(1 for v in b if v <= p.n)
        if (top - (len(b) - top)) % d:
            return False
    return True


@lru_cache(maxsize=None)
def stirling2(n: int, l: int) -> int:
    if n < 0 or l < 0:
        raise DomainError("arguments must be nonnegative")
    if n == 0 or l == 0:
        return 1 if n == l else 0
    if l > n:
        return 0
    return l * stirling2(n - 1, l) + stirling2(n - 1, l - 1)


def bell(n: int) -> int:
    return sum(stirling2(n, l) for l in range(n + 1))


def t_count(m: int, t: int) -> int:
    """Number of partitions of 2m nodes into t blocks, all of even size."""
    if m < 0 or t < 0:
        raise DomainError("arguments must be nonnegative")
    if t == 0 or m == 0:
        # the closed formula is only valid for m, t >= 1
        return 1 if m == t else 0
    s = sum((-1) ** (t - j) * comb(2 * t, t - j) * j ** (2 * m) for j in range(1, t + 1))
    value = Fraction(s, factorial(t) * 2 ** (t - 1))
    if value.denominator != 1:
        raise ArithmeticError("closed formula gave a non-integer")
    return int(value)


def refines(p: SetPartition, q: SetPartition) -> bool:
    """True iff every block of p lies inside a block of q."""
    if (p.n, p.m) != (q.n, q.m):
        raise ShapeMismatchError("partitions live on different node sets")
    where = {}
    for k, b in enumerate(q.blocks):
        for v in b:
            where[v] = k
    return all(len({where[v] for v in b}) == 1 for b in p.blocks)


def shape(p: SetPartition) -> PartitionShape:
    return tuple(sorted((len(b) for b in p.blocks), reverse=True))


def word_partition(w) -> SetPartition:
    """Kernel partition of a word: positions i ~ j iff w[i] == w[j].

    w may be a digit string like "112" or a sequence of letters.
    """
    letters = list(w)
    groups: dict = {}
    for pos, a in enumerate(letters, 1):
        groups.setdefault(a, []).append(pos)
    return SetPartition(len(letters), 0, tuple(sorted(tuple(g) for g in groups.values())))


def join(p: SetPartition, q: SetPartition) -> SetPartition:
    """Finest partition coarser than both p and q."""
    if (p.n, p.m) != (q.n, q.m):
        raise ShapeMismatchError("partitions live on different node sets")
    parent = list(range(p.n + p.m + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for b in p.blocks + q.blocks:
        r = find(b[0])
        for v in b[1:]:
            s = find(v)
            if s != r:
                parent[s] = r
    groups: dict = {}
    for v in range(1, p.n + p.m + 1):
        groups.setdefault(find(v), []).append(v)
    return SetPartition(p.n, p.m, tuple(sorted(tuple(g) for g in groups.values())))
