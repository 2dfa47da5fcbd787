"""The partition category: diagrams, stacking, tensor, flip, generators, text form."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import DomainError, ParityError, ParseError, ShapeMismatchError
from .polyring import DELTA, Poly
from .setpart import SetPartition, is_tonal


@dataclass(frozen=True)
class Diagram:
    """A partition of n top nodes and m bottom nodes, read as a morphism n -> m."""

    partition: SetPartition

    @classmethod
    def from_blocks(cls, n: int, m: int, blocks: Iterable[Iterable[int]]) -> "Diagram":
        """Blocks use internal numbering: bottom node i' is n + i."""
        return cls(SetPartition.from_blocks(n, m, blocks))

    @classmethod
    def from_labels(cls, n: int, m: int, labels) -> "Diagram":
        return cls(SetPartition.from_labels(n, m, labels))

    @property
    def source(self) -> int:
        return self.partition.n

    @property
    def target(self) -> int:
        return self.partition.m

    @property
    def blocks(self) -> tuple:
        return self.partition.blocks

    def labels(self) -> list:
        return self.partition.labels()

    def propagating(self) -> list:
        n = self.source
        return [b for b in self.blocks if b[0] <= n < b[-1]]

    def top_partition(self) -> SetPartition:
        """The partition restricted to the top row."""
        n = self.source
        tops = [tuple(v for v in b if v <= n) for b in self.blocks]
        return SetPartition(n, 0, tuple(sorted(b for b in tops if b)))

    def to_json(self) -> dict:
        obj = self.partition.to_json()
        return {"source": self.source, "target": self.target, "blocks": obj["blocks"]}

    @classmethod
    def from_json(cls, obj: dict) -> "Diagram":
        return cls(SetPartition.from_json({"n": obj["source"], "m": obj["target"], "blocks": obj["blocks"]}))

    def __str__(self) -> str:
        return print_diagram(self)


# ------------------------------------------------------------- composition


def _label_array(ds, width):
    arr = np.empty((len(ds), width), dtype=np.int64)
    for i, d in enumerate(ds):
        arr[i] = d.labels()
    return arr


def compose_many(pairs) -> list:
    """Compose a list of (p, q) pairs sharing shapes; returns [(diagram, power)]."""
    pairs = list(pairs)
    if not pairs:
        return []
    n, m = pairs[0][0].source, pairs[0][0].target
    k = pairs[0][1].target
    for p, q in pairs:
        if p.target != q.source:
            raise ShapeMismatchError(f"cannot stack {p.source}->{p.target} on {q.source}->{q.target}")
        if (p.source, p.target, q.target) != (n, m, k):
            raise ShapeMismatchError("compose_many needs pairs of equal shapes")
    P = _label_array([p for p, _ in pairs], n + m)
    Q = _label_array([q for _, q in pairs], m + k)
    out, powers = _kernels.compose_labels(P, Q, n, m, k)
    return [(Diagram.from_labels(n, k, row), int(c)) for row, c in zip(out.tolist(), powers.tolist())]


def compose(p: Diagram, q: Diagram):
    """Stack p (n->m) on top of q (m->k). Returns (diagram, number of closed loops)."""
    if p.target != q.source:
        raise ShapeMismatchError(f"cannot stack {p.source}->{p.target} on {q.source}->{q.target}")
    return compose_many([(p, q)])[0]


def tensor(p: Diagram, q: Diagram) -> Diagram:
    """Place q to the right of p."""
    n1, m1, n2, m2 = p.source, p.target, q.source, q.target
    N = n1 + n2

    def mp(v):
        return v if v <= n1 else N + (v - n1)

    def mq(v):
        return n1 + v if v <= n2 else N + m1 + (v - n2)

    blocks = [tuple(map(mp, b)) for b in p.blocks] + [tuple(map(mq, b)) for b in q.blocks]
    return Diagram.from_blocks(N, m1 + m2, blocks)


def tensor_all(ds) -> Diagram:
    result = empty_diagram()
    for d in ds:
        result = tensor(result, d)
    return result


def flip(p: Diagram) -> Diagram:
    """Exchange the rows: top i becomes bottom i' and vice versa."""
    n, m = p.source, p.target

    def f(v):
        return m + v if v <= n else v - n

    return Diagram.from_blocks(m, n, [tuple(map(f, b)) for b in p.blocks])


def empty_diagram() -> Diagram:
    return Diagram(SetPartition(0, 0, ()))


# ------------------------------------------------------------- generators


def identity(n: int) -> Diagram:
    return Diagram.from_blocks(n, n, [(i, n + i) for i in range(1, n + 1)])


def permutation(n: int, images) -> Diagram:
    """Permutation diagram; top node i is joined to bottom node images[i-1]."""
    return Diagram.from_blocks(n, n, [(i, n + j) for i, j in enumerate(images, 1)])


def w(l: int) -> Diagram:
    return Diagram.from_blocks(l, 0, [tuple(range(1, l + 1))] if l else [])


def wstar(l: int) -> Diagram:
    return flip(w(l))


def b(l: int) -> Diagram:
    return Diagram.from_blocks(l, l, [tuple(range(1, 2 * l + 1))] if l else [])


def b0(l: int) -> Diagram:
    return compose(w(l), wstar(l))[0]


def _check_n(n, need, name):
    if n < need:
        raise DomainError(f"{name} needs n >= {need}, got {n}")


def a_element(n: int, m) -> Diagram:
    """(b^1)^{m_1} (x) ... (x) (b^d)^{m_d} (x) (w^d w^d*)^{(n - sum i m_i)/d}; d = len(m)."""
    m = tuple(int(x) for x in m)
    d = len(m)
    if d < 1 or any(x < 0 for x in m):
        raise DomainError("a-element needs a nonempty vector of nonnegative counts")
    used = sum((i + 1) * x for i, x in enumerate(m))
    if used > n:
        raise DomainError(f"a-element needs n >= {used}")
    if (n - used) % d:
        raise ParityError(f"n - {used} must be divisible by {d}")
    parts = []
    for i, x in enumerate(m):
        parts += [b(i + 1)] * x
    parts += [b0(d)] * ((n - used) // d)
    return tensor_all(parts)


def generator(name: str, n: int = 0, i: int = 1, l: int = 0, m=(0, 0)) -> Diagram:
    """Named diagrams.

    identity(n), sigma(n, i), U(n, i), omega(n), w(l), wstar(l), b(l), b0(l),
    W(n, l), Wb(n, l), Wb_bar(n, l), A1(n), A12(n), E0(n), E1(n), a(n, m).
    sigma and U act on positions i, i+1.
    """
    if name == "identity":
        return identity(n)
    if name == "sigma":
        _check_n(n, i + 1, name)
        imgs = list(range(1, n + 1))
        imgs[i - 1], imgs[i] = imgs[i], imgs[i - 1]
        return permutation(n, imgs)
    if name == "U":
        _check_n(n, i + 1, name)
        return tensor_all([identity(i - 1), b0(2), identity(n - i - 1)])
    if name == "omega":
        return permutation(n, list(range(n, 0, -1)))
    if name in ("w", "wstar", "b", "b0"):
        return {"w": w, "wstar": wstar, "b": b, "b0": b0}[name](l)
    if name == "W":
        _check_n(n, l, name)
        return tensor(b0(l), identity(n - l))
    if name == "Wb":
        _check_n(n, l + 1, name)
        return tensor(b(l + 1), identity(n - l - 1))
    if name == "Wb_bar":
        _check_n(n, l + 1, name)
        return tensor(identity(n - l - 1), b(l + 1))
    if name == "A1":
        _check_n(n, 1, name)
        return tensor(b0(1), identity(n - 1))
    if name == "A12":
        _check_n(n, 2, name)
        return tensor(b(2), identity(n - 2))
    if name == "E0":
        return b0(n)
    if name == "E1":
        return b(n)
    if name == "a":
        return a_element(n, m)
    raise DomainError(f"unknown generator {name!r}")


def prop_vector(p: Diagram, d: int) -> tuple:
    """Count propagating blocks by top size mod d; slot d holds size 0 mod d."""
    if not is_tonal(p.partition, d):
        raise DomainError(f"diagram is not {d}-tonal")
    counts = [0] * d
    n = p.source
    for blk in p.propagating():
        top = sum(1 for v in blk if v <= n)
        counts[(top - 1) % d] += 1
    return tuple(counts)


# ------------------------------------------------------------- linear combinations


class LinComb:
    """Finite Q[d]-combination of diagrams of one shape."""

    __slots__ = ("source", "target", "terms")

    def __init__(self, source: int, target: int, terms=None):
        self.source = source
        self.target = target
        clean = {}
        for dgm, c in (terms or {}).items():
            if (dgm.source, dgm.target) != (source, target):
                raise ShapeMismatchError("all terms must share source and target")
            c = c if isinstance(c, Poly) else Poly([c])
            if not c.is_zero:
                clean[dgm] = c
        self.terms = clean

    @classmethod
    def of(cls, d: Diagram, coeff=1) -> "LinComb":
        return cls(d.source, d.target, {d: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Diagram):
            other = LinComb.of(other)
        if not isinstance(other, LinComb):
            return NotImplemented
        return (self.source, self.target, self.terms) == (other.source, other.target, other.terms)

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.terms.items())))

    def _check(self, other):
        if (self.source, self.target) != (other.source, other.target):
            raise ShapeMismatchError("shapes differ")

    def __add__(self, other):
        if isinstance(other, Diagram):
            other = LinComb.of(other)
        self._check(other)
        terms = dict(self.terms)
        for dgm, c in other.terms.items():
            terms[dgm] = terms.get(dgm, Poly()) + c
        return LinComb(self.source, self.target, terms)

    def __neg__(self):
        return LinComb(self.source, self.target, {d: -c for d, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, Diagram):
            other = LinComb.of(other)
        return self + (-other)

    def scale(self, c) -> "LinComb":
        return LinComb(self.source, self.target, {d: v * c for d, v in self.terms.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def items(self):
        # deterministic order
        return sorted(self.terms.items(), key=lambda kv: print_diagram(kv[0]))

    def evaluate(self, x) -> "LinComb":
        """Set d = x in every coefficient."""
        return LinComb(self.source, self.target, {d: Poly([c.eval(x)]) for d, c in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c}) {print_diagram(d)}" for d, c in self.items())


def _as_lin(x) -> LinComb:
    return LinComb.of(x) if isinstance(x, Diagram) else x


def compose_lin(a, b) -> LinComb:
    a, b = _as_lin(a), _as_lin(b)
    if a.target != b.source:
        raise ShapeMismatchError("cannot stack combinations of these shapes")
    pairs = [(p, q) for p in a.terms for q in b.terms]
    coeffs = [a.terms[p] * b.terms[q] for p, q in pairs]
    terms: dict = {}
    for (r, k), c in zip(compose_many(pairs), coeffs):
        terms[r] = terms.get(r, Poly()) + c * DELTA ** k
    return LinComb(a.source, b.target, terms)


def tensor_lin(a, b) -> LinComb:
    a, b = _as_lin(a), _as_lin(b)
    terms: dict = {}
    for p, c in a.terms.items():
        for q, e in b.terms.items():
            r = tensor(p, q)
            terms[r] = terms.get(r, Poly()) + c * e
    return LinComb(a.source + b.source, a.target + b.target, terms)


def flip_lin(a) -> LinComb:
    a = _as_lin(a)
    return LinComb(a.target, a.source, {flip(p): c for p, c in a.terms.items()})


def is_nilpotent_mod_delta0(x, max_power: int = 16) -> bool:
    """True if some power x^k, k <= max_power, vanishes once d = 0."""
    x = _as_lin(x)
    if x.source != x.target:
        raise ShapeMismatchError("nilpotency needs a square element")
    x0 = x.evaluate(0)
    power = x0
    for _ in range(max_power):
        if power.is_zero():
            return True
        power = compose_lin(power, x0).evaluate(0)
    return power.is_zero()


# ------------------------------------------------------------- text form

_WS = re.compile(r"\s*")
_INT = re.compile(r"\d+")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    @property
    def byte_offset(self) -> int:
        return len(self.text[: self.pos].encode("utf-8"))

    def error(self, message):
        return ParseError(message, self.byte_offset)

    def skip(self):
        self.pos = _WS.match(self.text, self.pos).end()

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        if not self.peek(s):
            raise self.error(f"expected {s!r}")
        self.pos += len(s)

    def integer(self) -> int:
        self.skip()
        mt = _INT.match(self.text, self.pos)
        if not mt:
            raise self.error("expected an integer")
        self.pos = mt.end()
        return int(mt.group())

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)


_BLOCK = re.compile(r"\(\s*\d+'?(\s+\d+'?)*\s*\)")


def _parse_diagram_at(sc: _Scanner) -> Diagram:
    sc.expect("P[")
    n = sc.integer()
    sc.expect(",")
    m = sc.integer()
    sc.expect("]")
    sc.expect(":")
    blocks = []
    seen = {}
    while True:
        sc.skip()
        if not _BLOCK.match(sc.text, sc.pos):
            if sc.peek("(") and sc.text[sc.pos + 1:].lstrip()[:1].isdigit():
                raise sc.error("malformed block")
            break
        sc.expect("(")
        block = []
        while not sc.peek(")"):
            start = sc.byte_offset
            v = sc.integer()
            primed = sc.text.startswith("'", sc.pos)
            if primed:
                sc.pos += 1
            limit = m if primed else n
            if not 1 <= v <= limit:
                raise ParseError(f"node {v}{chr(39) if primed else ''} outside P[{n},{m}]", start)
            node = n + v if primed else v
            if node in seen:
                raise ParseError(f"duplicate node {v}{chr(39) if primed else ''}", start)
            seen[node] = True
            block.append(node)
        sc.expect(")")
        blocks.append(block)
    if len(seen) != n + m:
        missing = [v if v <= n else f"{v - n}'" for v in range(1, n + m + 1) if v not in seen]
        raise sc.error(f"nodes not covered: {missing}")
    return Diagram.from_blocks(n, m, blocks)


def parse_diagram(text: str) -> Diagram:
    """Parse e.g. "P[2,2]: (1 2')(1' 2)"."""
    sc = _Scanner(text)
    d = _parse_diagram_at(sc)
    if not sc.at_end():
        raise sc.error("unexpected trailing text")
    return d


def print_diagram(p: Diagram) -> str:
    return f"P[{p.source},{p.target}]: {p.partition}"


# ------------------------------------------------------------- expressions
#
# expr    := term (("∘" | ";") term)*
# term    := factor (("⊗" | "&") factor)*
# factor  := scalar* primary "*"*
# scalar  := INT | ("d" | "δ") ("^" INT)?
# primary := diagram | "(" expr ")"
#
# "*" after a primary is the flip. Composition stacks left on top of right.


def parse_expression(text: str) -> LinComb:
    sc = _Scanner(text)
    value = _expr(sc)
    if not sc.at_end():
        raise sc.error("unexpected trailing text")
    return value


def _expr(sc):
    value = _term(sc)
    while True:
        if sc.peek("∘"):
            sc.expect("∘")
        elif sc.peek(";"):
            sc.expect(";")
        else:
            return value
        rhs = _term(sc)
        try:
            value = compose_lin(value, rhs)
        except ShapeMismatchError as exc:
            raise ShapeMismatchError(f"{exc} (near byte {sc.byte_offset})") from None


def _term(sc):
    value = _factor(sc)
    while True:
        if sc.peek("⊗"):
            sc.expect("⊗")
        elif sc.peek("&"):
            sc.expect("&")
        else:
            return value
        value = tensor_lin(value, _factor(sc))


def _factor(sc):
    coeff = Poly([1])
    while True:
        sc.skip()
        mt = _INT.match(sc.text, sc.pos)
        if mt:
            sc.pos = mt.end()
            coeff = coeff * int(mt.group())
            continue
        if sc.peek("d") or sc.peek("δ"):
            sc.pos += 1
            k = 1
            if sc.peek("^"):
                sc.expect("^")
                k = sc.integer()
            coeff = coeff * DELTA ** k
            continue
        break
    if sc.peek("P["):
        value = LinComb.of(_parse_diagram_at(sc))
    elif sc.peek("("):
        sc.expect("(")
        value = _expr(sc)
        sc.expect(")")
    else:
        raise sc.error("expected a diagram or '('")
    while sc.peek("*"):
        sc.expect("*")
        value = flip_lin(value)
    return value.scale(coeff)


def format_lincomb(x: LinComb) -> str:
    """One term per line: coefficient, tab, diagram."""
    if x.is_zero():
        return f"0 in P[{x.source},{x.target}]"
    return "\n".join(f"{c}\t{print_diagram(d)}" for d, c in x.items())
