"""Exact polynomials in one variable d (written delta in JSON) over Q.

Also: interpolation, integer-root extraction, Smith normal form over Q[d],
rank of a specialised polynomial matrix, and two exact determinant routes.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .config import thread_cap
from .errors import DomainError, InternalError
from .intlinalg import int_det, int_rank


def _norm(c):
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, (int, np.integer)):
        return int(c)
    return _norm(Fraction(c))


class Poly:
    """Immutable dense polynomial, constant term first."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        cs = [_norm(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self._hash = None

    # construction
    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1) -> "Poly":
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    # basic properties
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def is_monomial(self) -> bool:
        return sum(1 for c in self.coeffs if c) == 1

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("Poly", self.coeffs))
        return self._hash

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"

    def __str__(self):
        return self.format()

    def format(self, var: str = "d") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mag = -c if c < 0 else c
            if k == 0:
                body = str(mag)
            else:
                mono = var if k == 1 else f"{var}^{k}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    # arithmetic
    @staticmethod
    def _coerce(x) -> "Poly":
        return x if isinstance(x, Poly) else Poly([x])

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        if len(a) < len(b):
            a, b = b, a
        out = [0] * (len(a) + len(b) - 1)
        for j, y in enumerate(b):
            if y:
                for i, x in enumerate(a):
                    out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise DomainError("negative power of a polynomial")
        result, base = Poly([1]), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def eval(self, x):
        """Exact value at x (int or Fraction)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return _norm(acc)

    __call__ = eval

    def derive(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def divmod(self, other: "Poly"):
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = [Fraction(c) for c in self.coeffs]
        db = other.degree
        lead = Fraction(other.leading)
        if len(rem) - 1 < db:
            return Poly(), self
        quo = [Fraction(0)] * (len(rem) - db)
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k] / lead
            if c:
                quo[k - db] = c
                for t, b in enumerate(other.coeffs):
                    rem[k - db + t] -= c * b
        return Poly(quo), Poly(rem[:db])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other) -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def synthetic_divide(self, root):
        """Divide by (d - root); return (quotient, remainder value)."""
        if not self.coeffs:
            return Poly(), 0
        acc = 0
        quo = []
        for c in reversed(self.coeffs):
            acc = acc * root + c
            quo.append(acc)
        rem = quo.pop()
        return Poly(reversed(quo)), _norm(rem)

    def monic(self) -> "Poly":
        if self.is_zero:
            return self
        lead = Fraction(self.leading)
        return Poly([Fraction(c) / lead for c in self.coeffs])

    # serialisation
    def to_json(self) -> dict:
        return {"var": "delta", "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "Poly":
        return cls(Fraction(s) for s in obj["coeffs"])


DELTA = Poly([0, 1])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero if both are zero)."""
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


def product(polys: Sequence[Poly]) -> Poly:
    """Balanced product tree; cheap for many low-degree factors."""
    polys = list(polys)
    if not polys:
        return Poly([1])
    while len(polys) > 1:
        nxt = [polys[i] * polys[i + 1] for i in range(0, len(polys) - 1, 2)]
        if len(polys) % 2:
            nxt.append(polys[-1])
        polys = nxt
    return polys[0]


# ------------------------------------------------------------- interpolation


def interpolate(points) -> Poly:
    """Unique polynomial of degree < len(points) through the given (x, y)."""
    xs = [Fraction(x) for x, _ in points]
    if len(set(xs)) != len(xs):
        raise DomainError("interpolation abscissae must be distinct")
    coef = [Fraction(y) for _, y in points]
    n = len(xs)
    # Newton divided differences in place
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    result = Poly()
    for i in range(n - 1, -1, -1):
        result = result * Poly([-xs[i], 1]) + coef[i]
    return result


# ------------------------------------------------------------- factorisation


@dataclass(frozen=True)
class Factorization:
    unit: Fraction
    factors: tuple  # ((root, multiplicity), ...)
    residual: Poly

    def reconstruct(self) -> Poly:
        p = self.residual * self.unit
        for root, mult in self.factors:
            p = p * Poly([-root, 1]) ** mult
        return p

    def multiplicity(self, root) -> int:
        return dict(self.factors).get(root, 0)

    def residual_is_constant(self) -> bool:
        return self.residual.is_constant()

    def to_json(self) -> dict:
        return {
            "unit": str(self.unit),
            "factors": [{"root": str(r), "mult": m} for r, m in self.factors],
            "residual": self.residual.to_json(),
        }


def factor_integer_roots(p: Poly, root_range=(-64, 64)) -> Factorization:
    """Pull out (d - k)^a for every integer k in root_range (inclusive)."""
    if p.is_zero:
        raise DomainError("cannot factor the zero polynomial")
    lo, hi = root_range
    cs = list(p.coeffs)
    factors = []
    # the root 0 is a shift
    if lo <= 0 <= hi:
        z = 0
        while cs[z] == 0:
            z += 1
        if z:
            factors.append((0, z))
            cs = cs[z:]
    rest = Poly(cs)
    for k in range(lo, hi + 1):
        if k == 0:
            continue
        mult = 0
        while rest.degree >= 1:
            q, r = rest.synthetic_divide(k)
            if r != 0:
                break
            rest = q
            mult += 1
        if mult:
            factors.append((k, mult))
    factors.sort()
    unit = Fraction(rest.leading)
    return Factorization(unit=_norm(unit), factors=tuple(factors), residual=rest.monic())


def rational_roots(p: Poly) -> list:
    """All rational roots by the rational-root test (small coefficients only)."""
    if p.is_zero:
        raise DomainError("zero polynomial")
    cs = list(p.coeffs)
    roots = []
    if cs[0] == 0:
        roots.append(Fraction(0))
        while cs and cs[0] == 0:
            cs.pop(0)
    q = Poly(cs)
    if q.degree < 1:
        return roots
    den = lcm(*[Fraction(c).denominator for c in q.coeffs])
    ints = [int(Fraction(c) * den) for c in q.coeffs]

    def divisors(x):
        x = abs(x)
        return [d for d in range(1, x + 1) if x % d == 0]

    for a in divisors(ints[0]):
        for b in divisors(ints[-1]):
            for s in (1, -1):
                r = Fraction(s * a, b)
                if r not in roots and q.eval(r) == 0:
                    roots.append(r)
    return sorted(roots)


# ------------------------------------------------------------- Smith form


@dataclass(frozen=True)
class SmithForm:
    invariant_factors: tuple  # monic Polys, zeros last
    unit: Fraction = Fraction(1)

    def product(self) -> Poly:
        return product(self.invariant_factors)

    def to_json(self) -> dict:
        return {"invariant_factors": [f.to_json() for f in self.invariant_factors], "unit": str(self.unit)}


def _as_poly_matrix(M):
    return [[x if isinstance(x, Poly) else Poly([x]) for x in row] for row in M]


def smith_form(M) -> SmithForm:
    """Invariant factors over Q[d] by Euclidean row/column elimination."""
    A = _as_poly_matrix(M)
    rows = len(A)
    cols = len(A[0]) if rows else 0
    diag = []
    for t in range(min(rows, cols)):
        while True:
            # pivot: nonzero entry of least degree in the trailing block
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if not A[i][j].is_zero and (best is None or A[i][j].degree < best[0]):
                        best = (A[i][j].degree, i, j)
            if best is None:
                break
            _, i, j = best
            A[t], A[i] = A[i], A[t]
            for row in A:
                row[t], row[j] = row[j], row[t]
            piv = A[t][t]
            clean = True
            for i in range(t + 1, rows):
                if not A[i][t].is_zero:
                    q, r = A[i][t].divmod(piv)
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    clean = clean and r.is_zero
            for j in range(t + 1, cols):
                if not A[t][j].is_zero:
                    q, r = A[t][j].divmod(piv)
                    for row in A:
                        row[j] = row[j] - q * row[t]
                    clean = clean and r.is_zero
            if not clean:
                continue
            # pivot must divide the whole trailing block
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if not (A[i][j] % piv).is_zero:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
        diag.append(A[t][t].monic())
    return SmithForm(invariant_factors=tuple(diag))


def rank_at(M, x) -> int:
    """Rank over Q of the matrix M(x), entries evaluated exactly at x."""
    A = _as_poly_matrix(M)
    vals = [[Fraction(p.eval(x)) for p in row] for row in A]
    ints = []
    for row in vals:
        den = lcm(1, *(v.denominator for v in row))
        ints.append([int(v * den) for v in row])
    return int_rank(ints)


# ------------------------------------------------------------- determinants


def degree_bound(M) -> int:
    """Sum over rows of the largest entry degree: a bound on deg det."""
    A = _as_poly_matrix(M)
    total = 0
    for row in A:
        degs = [p.degree for p in row if not p.is_zero]
        if not degs:
            return 0
        total += max(degs)
    return total


def _eval_int_matrix(A, x):
    return [[p.eval(x) for p in row] for row in A]


def det_by_evaluation(M, bound: int | None = None) -> Poly:
    """Determinant through values at 0..D, exact interpolation, and a check.

    D defaults to the row degree bound. The result must have integer
    coefficients and degree <= D, and must agree with one extra sample at
    D + 1; anything else raises InternalError.
    """
    A = _as_poly_matrix(M)
    if not all(p.is_integral for row in A for p in row):
        raise DomainError("evaluation route needs integer coefficients")
    D = degree_bound(A) if bound is None else bound
    xs = list(range(D + 2))

    def value(x):
        return int_det(_eval_int_matrix(A, x))

    workers = thread_cap() or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            ys = list(pool.map(value, xs))
    else:
        ys = [value(x) for x in xs]
    det = interpolate(list(zip(xs[:-1], ys[:-1])))
    if not det.is_integral:
        raise InternalError("interpolated determinant has non-integer coefficients")
    if det.degree > D or det.eval(xs[-1]) != ys[-1]:
        raise InternalError(f"determinant degree exceeds the bound {D}")
    return det


def _to_coeff_array(A):
    N = len(A)
    L = max((p.degree + 1 for row in A for p in row), default=1)
    L = max(2 * L + 2, 4)
    arr = np.zeros((N, N, L), dtype=np.int64)
    for i, row in enumerate(A):
        for j, p in enumerate(row):
            for t, c in enumerate(p.coeffs):
                if abs(c) >= _kernels.COEFF_LIMIT:
                    return None
                arr[i, j, t] = c
    return arr


def det_by_elimination(M):
    """Determinant by symmetric-pivot elimination over Z[d].

    Returns None when the elimination cannot proceed exactly (a non-exact
    division, a coefficient out of range, or an asymmetric input); callers
    then fall back to det_by_evaluation.
    """
    A = _as_poly_matrix(M)
    N = len(A)
    if N == 0:
        return Poly([1])
    if any(A[i][j] != A[j][i] for i in range(N) for j in range(i)):
        return None
    if not all(p.is_integral for row in A for p in row):
        return None
    arr = _to_coeff_array(A)
    if arr is None:
        return None
    status, pivots, _ = _kernels.poly_sym_eliminate(arr)
    if status == 2:
        return Poly()
    if status != 0:
        return None
    return product([Poly(row.tolist()) for row in pivots])


# "auto" interpolates while N^2 (D + 1) stays below this, then eliminates
AUTO_EVALUATION_LIMIT = 200_000


def det(M, method: str = "auto", bound: int | None = None) -> Poly:
    """Exact determinant of a square polynomial matrix.

    method: "evaluation", "elimination", or "auto" (evaluation for small
    sizes, elimination otherwise, evaluation again if elimination declines).
    """
    A = _as_poly_matrix(M)
    if method == "evaluation":
        return det_by_evaluation(A, bound)
    if method == "elimination":
        d = det_by_elimination(A)
        if d is None:
            raise DomainError("elimination route not applicable to this matrix")
        return d
    if method != "auto":
        raise DomainError(f"unknown determinant method {method!r}")
    N = len(A)
    if not all(p.is_integral for row in A for p in row):
        return _det_fraction_free(A)
    if N * N * (degree_bound(A) + 1) <= AUTO_EVALUATION_LIMIT:
        return det_by_evaluation(A, bound)
    d = det_by_elimination(A)
    return d if d is not None else det_by_evaluation(A, bound)


def _det_fraction_free(A) -> Poly:
    # Bareiss over Q[d] for rational inputs (small matrices only)
    M = [list(row) for row in A]
    N = len(M)
    sign = 1
    prev = Poly([1])
    for k in range(N - 1):
        piv_row = next((i for i in range(k, N) if not M[i][k].is_zero), None)
        if piv_row is None:
            return Poly()
        if piv_row != k:
            M[k], M[piv_row] = M[piv_row], M[k]
            sign = -sign
        for i in range(k + 1, N):
            for j in range(k + 1, N):
                M[i][j] = (M[k][k] * M[i][j] - M[i][k] * M[k][j]).exact_div(prev)
        prev = M[k][k]
    return M[-1][-1] * sign if N else Poly([1])


# ------------------------------------------------------------- matrix helpers


def matmul(A, B):
    A, B = _as_poly_matrix(A), _as_poly_matrix(B)
    inner = len(B)
    cols = len(B[0]) if inner else 0
    out = []
    for row in A:
        out.append([sum((row[t] * B[t][j] for t in range(inner)), Poly()) for j in range(cols)])
    return out


def transpose(A):
    A = _as_poly_matrix(A)
    return [list(col) for col in zip(*A)] if A else []
