"""Labels of standard modules, restriction rules, Bratelli graphs, semisimplicity.

Ordinary labels are integer partitions lambda with |lambda| <= n. Tonal
labels are pairs (lambda, mu) of rank |lambda| + 2|mu|, with rank <= n and
rank = n mod 2. Standard-module dimensions are produced purely by the
restriction recursion from the single module at level 0; the top-rank
closed forms are only used as a check.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial

from .errors import DomainError
from .setpart import bell, t_count


# ------------------------------------------------------------------ integer partitions


def integer_partitions(k: int, max_part: int | None = None):
    """All partitions of k as weakly decreasing tuples, in reverse lexicographic order."""
    if max_part is None:
        max_part = k
    if k == 0:
        yield ()
        return
    for first in range(min(k, max_part), 0, -1):
        for rest in integer_partitions(k - first, first):
            yield (first,) + rest


def removable(lam: tuple) -> list:
    """Partitions obtained by deleting one box."""
    out = []
    for i in range(len(lam)):
        if i == len(lam) - 1 or lam[i] > lam[i + 1]:
            new = list(lam)
            new[i] -= 1
            out.append(tuple(x for x in new if x))
    return out


def addable(lam: tuple) -> list:
    """Partitions obtained by adding one box."""
    out = []
    for i in range(len(lam) + 1):
        if i == 0 or lam[i - 1] > (lam[i] if i < len(lam) else 0):
            new = list(lam) + [0]
            new[i] += 1
            out.append(tuple(x for x in new if x))
    return out


def specht_dim(lam) -> int:
    """Number of standard tableaux of shape lam, by the hook length formula."""
    lam = tuple(int(x) for x in lam)
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)) or any(x <= 0 for x in lam):
        raise DomainError(f"{lam} is not a partition")
    conj = [sum(1 for x in lam if x > j) for j in range(lam[0])] if lam else []
    hooks = 1
    for i, row in enumerate(lam):
        for j in range(row):
            hooks *= row - j + conj[j] - i - 1
    return factorial(sum(lam)) // hooks


# ------------------------------------------------------------------ labels


@dataclass(frozen=True, order=True)
class Label:
    lam: tuple = ()
    mu: tuple | None = None  # None for the ordinary algebra

    @property
    def tonal(self) -> bool:
        return self.mu is not None

    @property
    def rank(self) -> int:
        return sum(self.lam) + (2 * sum(self.mu) if self.tonal else 0)

    def __str__(self):
        def part(p):
            return "(" + ",".join(map(str, p)) + ")" if p else "∅"

        if self.tonal:
            return f"{part(self.lam)}|{part(self.mu)}"
        return part(self.lam)

    def to_json(self) -> dict:
        out = {"lambda": list(self.lam)}
        if self.tonal:
            out["mu"] = list(self.mu)
        return out


def _algebra(algebra: str) -> str:
    from .spinegram import algebra_name

    return algebra_name(algebra)


def _sort_key(lab: Label):
    return (lab.rank, tuple(-x for x in lab.lam), tuple(-x for x in (lab.mu or ())),
            len(lab.lam))


def gamma_points(n: int, d: int = 2) -> list:
    """(m_1..m_d) in N_0^d with (n - sum i m_i)/d a nonnegative integer."""
    out = []

    def rec(i, used, acc):
        if i > d:
            if (n - used) % d == 0:
                out.append(tuple(acc))
            return
        k = 0
        while used + i * k <= n:
            rec(i + 1, used + i * k, acc + [k])
            k += 1

    rec(1, 0, [])
    return sorted(out)


def index_set(algebra: str, n: int, delta_zero: bool = False) -> list:
    """Labels of standard modules at level n, in rank then dominance-like order.

    For the tonal algebra with delta_zero and n even the label (∅,∅) is
    dropped. For the ordinary algebra the flag changes nothing.
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    alg = _algebra(algebra)
    if alg == "ordinary":
        labels = [Label(lam) for k in range(n + 1) for lam in integer_partitions(k)]
    else:
        labels = []
        for l, m in gamma_points(n, 2):
            for lam in integer_partitions(l):
                for mu in integer_partitions(m):
                    labels.append(Label(lam, mu))
        if delta_zero and n % 2 == 0:
            labels = [x for x in labels if x != Label((), ())]
    return sorted(labels, key=_sort_key)


def x_generators(d: int) -> list:
    """The vectors e_k - e_i - e_j with i + j = k mod d (1-based indices)."""
    gens = set()
    for k in range(1, d + 1):
        for i in range(1, d + 1):
            for j in range(1, d + 1):
                if (i + j - k) % d == 0:
                    v = [0] * d
                    v[k - 1] += 1
                    v[i - 1] -= 1
                    v[j - 1] -= 1
                    gens.add(tuple(v))
    return sorted(gens)


def gamma_leq(a, b, d: int = 2) -> bool:
    """True when a - b is a nonnegative integer combination of the X_d vectors.

    Every X_d vector lowers the coordinate sum by exactly one, so the number
    of vectors in any combination is sum(b) - sum(a) and the search over
    multisets of that size is exhaustive.
    """
    a, b = tuple(a), tuple(b)
    if len(a) != d or len(b) != d:
        raise DomainError(f"points must have {d} coordinates")
    diff = tuple(x - y for x, y in zip(a, b))
    count = -sum(diff)
    if count < 0:
        return False
    gens = x_generators(d)
    for combo in combinations_with_replacement(gens, count):
        if tuple(sum(col) for col in zip(*combo)) == diff if combo else all(x == 0 for x in diff):
            return True
    return False


# ------------------------------------------------------------------ restriction


def restrict(label: Label, algebra: str | None = None) -> Counter:
    """Standard factors of the restriction of a standard module one level down.

    Ordinary: the two half steps remove-or-keep then add-or-keep, so lambda
    minus a box, lambda plus a box, lambda with a box moved, and lambda itself
    with multiplicity one plus its number of removable boxes. Tonal: the four
    families (l-□, m), (l+□, m-□), (l-□, m+□), (l+□, m), each move once.
    Labels of any rank are returned; bratelli filters them by level.
    """
    alg = _algebra(algebra) if algebra else ("tonal" if label.tonal else "ordinary")
    out: Counter = Counter()
    if alg == "ordinary":
        lam = label.lam
        out[Label(lam)] += 1  # keep, keep
        for r in removable(lam):
            out[Label(r)] += 1  # remove, keep
            for a in addable(r):
                out[Label(a)] += 1  # remove, add
        for a in addable(lam):
            out[Label(a)] += 1  # keep, add
        return out
    lam, mu = label.lam, label.mu if label.mu is not None else ()
    for r in removable(lam):
        out[Label(r, mu)] += 1
        for a in addable(mu):
            out[Label(r, a)] += 1
    for a in addable(lam):
        out[Label(a, mu)] += 1
        for r in removable(mu):
            out[Label(a, r)] += 1
    return out


def restrict_twice(label: Label) -> Counter:
    """Two tonal steps, n -> n - 2."""
    out: Counter = Counter()
    for mid, k in restrict(label).items():
        for low, j in restrict(mid).items():
            out[low] += k * j
    return out


def top_dim(label: Label) -> int:
    """Dimension of a standard module at level equal to its rank."""
    if not label.tonal:
        return specht_dim(label.lam)
    l, m = sum(label.lam), sum(label.mu)
    placements = factorial(l + 2 * m) // (factorial(l) * factorial(m) * 2 ** m)
    return placements * specht_dim(label.lam) * specht_dim(label.mu)


# ------------------------------------------------------------------ Bratelli graph


@dataclass
class BratelliGraph:
    algebra: str
    levels: list  # [(n, [Label, ...])]
    dims: dict  # (n, Label) -> int
    edges: list = field(default_factory=list)  # (n, upper Label, lower Label, multiplicity)

    def dim(self, n: int, label: Label) -> int:
        return self.dims[(n, label)]

    def to_json(self) -> dict:
        return {
            "algebra": "P1" if self.algebra == "ordinary" else "P2",
            "levels": [
                {"n": n, "nodes": [dict(lab.to_json(), dim=str(self.dims[(n, lab)])) for lab in labs]}
                for n, labs in self.levels
            ],
            "edges": [
                {"from": {"n": n, **up.to_json()}, "to": {"n": n - 1, **low.to_json()}, "mult": k}
                for n, up, low, k in self.edges
            ],
        }

    def to_dot(self) -> str:
        def node_id(n, lab):
            return f'"{n}:{lab}"'

        lines = ["digraph bratelli {", "  rankdir=TB;"]
        for n, labs in self.levels:
            lines.append(f"  subgraph level_{n} {{")
            lines.append("    rank=same;")
            for lab in labs:
                lines.append(f'    {node_id(n, lab)} [label="{lab} ({self.dims[(n, lab)]})"];')
            lines.append("  }")
        for n, up, low, k in self.edges:
            lines.append(f'  {node_id(n, up)} -> {node_id(n - 1, low)} [label="{k}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = []
        for n, labs in self.levels:
            cells = ", ".join(f"{lab}:{self.dims[(n, lab)]}" for lab in labs)
            lines.append(f"n={n}: {cells}")
        return "\n".join(lines) + "\n"


def bratelli(algebra: str, n_max: int) -> BratelliGraph:
    """Levels 0..n_max, restriction edges, and dimensions from the recursion."""
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    alg = _algebra(algebra)
    levels, dims, edges = [], {}, []
    root = Label(()) if alg == "ordinary" else Label((), ())
    levels.append((0, [root]))
    dims[(0, root)] = 1
    for n in range(1, n_max + 1):
        labs = index_set(alg, n)
        below = set(levels[-1][1])
        for lab in labs:
            total = 0
            for low, k in sorted(restrict(lab, alg).items(), key=lambda kv: _sort_key(kv[0])):
                if low in below:
                    edges.append((n, lab, low, k))
                    total += k * dims[(n - 1, low)]
            dims[(n, lab)] = total
        levels.append((n, labs))
    return BratelliGraph(alg, levels, dims, edges)


def algebra_dim(algebra: str, n: int) -> int:
    """Dimension of the whole algebra: B(2n), or the even partitions of 2n nodes."""
    if _algebra(algebra) == "ordinary":
        return bell(2 * n)
    return sum(t_count(n, t) for t in range(n + 1))


# ------------------------------------------------------------------ semisimplicity


def _as_rational(delta):
    if isinstance(delta, Fraction):
        return delta
    if isinstance(delta, int):
        return Fraction(delta)
    try:
        return Fraction(str(delta).strip())
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"cannot read {delta!r} as a rational number") from None


def spine_bad_set(algebra: str, n: int) -> list:
    """Values of d in N at which the spine module at level n fails to be simple."""
    alg = _algebra(algebra)
    if alg == "ordinary":
        top = n - 1
    elif n % 2 == 0:
        top = n // 2 - 1
    else:
        top = (n - 1) // 2
    return list(range(1, top + 1))


@dataclass
class Verdict:
    algebra: str
    delta: Fraction
    semisimple_all_n: bool
    witness_n: int | None
    n: int | None = None
    semisimple_at_n: bool | None = None
    spine_bad_set: list | None = None
    spine_simple_at_n: bool | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "algebra": "P1" if self.algebra == "ordinary" else "P2",
            "delta": str(self.delta),
            "semisimple_all_n": self.semisimple_all_n,
            "witness_n": self.witness_n,
        }
        if self.n is not None:
            out["n"] = self.n
            out["semisimple_at_n"] = self.semisimple_at_n
            out["spine_criterion"] = {"bad_set": self.spine_bad_set, "spine_simple": self.spine_simple_at_n}
        out["notes"] = list(self.notes)
        return out


def semisimplicity_verdict(algebra: str, delta, n: int | None = None) -> Verdict:
    """All-n verdict, and optionally what the spine criterion says at one n.

    Semisimple for every n exactly when delta is not a nonnegative integer.
    witness_n is the least n at which non-semisimplicity is certified: by the
    spine module failing to be simple when delta = k >= 1, and by the
    nilpotent ideal generated by E_0 when delta = 0. At a fixed n the answer
    is None when the spine criterion alone cannot decide.
    """
    alg = _algebra(algebra)
    d = _as_rational(delta)
    natural = d.denominator == 1 and d >= 0
    k = int(d) if natural else None
    notes = []
    if not natural:
        witness = None
    elif k == 0:
        witness = 1 if alg == "ordinary" else 2
        notes.append("E_0 squares to zero at d=0 and generates a nilpotent ideal")
        if alg == "tonal":
            notes.append("at d=0 the tonal algebra is semisimple exactly for odd n")
    else:
        # smallest level whose spine bad set contains k
        witness = k + 1 if alg == "ordinary" else 2 * k + 1
    v = Verdict(alg, d, not natural, witness, notes=notes)
    if n is not None:
        if n < 0:
            raise DomainError("n must be nonnegative")
        bad = spine_bad_set(alg, n)
        v.n, v.spine_bad_set = n, bad
        v.spine_simple_at_n = not (natural and k in bad)
        if not natural or n == 0:
            v.semisimple_at_n = True
        elif k == 0:
            v.semisimple_at_n = (n % 2 == 1) if alg == "tonal" else False
        else:
            v.semisimple_at_n = False if not v.spine_simple_at_n else None
        notes.append("fixed-n answer from the spine criterion, not a block classification")
    return v
