"""Spine modules, their Gram matrices, determinants and factorisations.

Three spines are covered:
    ordinary  P_n E_0,       basis indexed by all partitions of n top nodes
    tonal     P2_n E_0,      n even, indexed by even partitions of n nodes
    tonal     P2_n E_1,      n odd, indexed by even partitions of n + 1 nodes

In every case the top row of a basis element is a partition and the bottom
row is one block. For the odd spine that bottom block also swallows one odd
top part; deleting node n + 1 from an even partition of n + 1 nodes picks
out that part, which fixes the order of the odd basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .config import DEFAULT
from .diagcat import Diagram, LinComb, compose_many, flip, flip_lin, generator
from .errors import DomainError, InternalError, ParityError
from .intlinalg import int_rank
from .polyring import (
    DELTA,
    Factorization,
    Poly,
    SmithForm,
    det as poly_det,
    factor_integer_roots,
    matmul,
    rank_at,
    smith_form,
    transpose,
)
from .setpart import (
    SetPartition,
    enumerate_even_partitions,
    enumerate_partitions,
    join,
    stirling2,
    t_count,
)

ALGEBRAS = {"ordinary": "ordinary", "P1": "ordinary", "tonal": "tonal", "P2": "tonal"}
LABELS = {"ordinary": "(∅)", "even": "(∅,∅)", "odd": "((1),∅)"}


def algebra_name(algebra: str) -> str:
    try:
        return ALGEBRAS[algebra]
    except KeyError:
        raise DomainError(f"unknown algebra {algebra!r}; use P1/ordinary or P2/tonal") from None


def json_algebra(algebra: str) -> str:
    return "P1" if algebra_name(algebra) == "ordinary" else "P2"


@dataclass(frozen=True)
class SpineBasis:
    algebra: str  # "ordinary" or "tonal"
    n: int
    kind: str  # "ordinary", "even" or "odd"
    elements: tuple  # Diagrams n -> n
    index_partitions: tuple  # partition indexing each element (n or n + 1 nodes)

    @property
    def label(self) -> str:
        return LABELS[self.kind]

    @property
    def dim(self) -> int:
        return len(self.elements)

    def pivot(self) -> Diagram:
        return generator("E1" if self.kind == "odd" else "E0", self.n)

    def index(self) -> dict:
        return {d: i for i, d in enumerate(self.elements)}


def _with_bottom(n: int, top_blocks, attach=None) -> Diagram:
    bottom = tuple(range(n + 1, 2 * n + 1))
    blocks = [b for b in top_blocks if b != attach]
    if attach is None:
        if n:
            blocks.append(bottom)
    else:
        blocks.append(tuple(attach) + bottom)
    return Diagram.from_blocks(n, n, blocks)


def spine_basis(algebra: str, n: int, kind: Optional[str] = None, cap: int | None = None) -> SpineBasis:
    alg = algebra_name(algebra)
    if n < 0:
        raise DomainError("n must be nonnegative")
    if alg == "ordinary":
        if kind not in (None, "ordinary"):
            raise DomainError("the ordinary algebra has a single spine")
        tops = enumerate_partitions(n, 0, cap=cap)
        elems = [_with_bottom(n, q.blocks) for q in tops]
        return SpineBasis(alg, n, "ordinary", tuple(elems), tuple(tops))
    kind = kind or ("even" if n % 2 == 0 else "odd")
    if kind == "even":
        if n % 2:
            raise ParityError(f"the (∅,∅) spine needs n even, got {n}")
        tops = enumerate_even_partitions(n, cap=cap)
        elems = [_with_bottom(n, q.blocks) for q in tops]
        return SpineBasis(alg, n, "even", tuple(elems), tuple(tops))
    if kind == "odd":
        if n % 2 == 0:
            raise ParityError(f"the ((1),∅) spine needs n odd, got {n}")
        index = enumerate_even_partitions(n + 1, cap=cap)
        elems = []
        for q in index:
            blocks = []
            attach = None
            for blk in q.blocks:
                if n + 1 in blk:
                    attach = tuple(v for v in blk if v != n + 1)
                    blocks.append(attach)
                else:
                    blocks.append(blk)
            elems.append(_with_bottom(n, blocks, attach))
        return SpineBasis(alg, n, "odd", tuple(elems), tuple(index))
    raise DomainError(f"unknown spine kind {kind!r}")


# ------------------------------------------------------------- Gram matrix


@dataclass(frozen=True)
class GramMatrix:
    basis: SpineBasis
    exponents: np.ndarray  # entry (i, j) is d ** exponents[i, j]

    @property
    def dim(self) -> int:
        return self.basis.dim

    def entries(self) -> list:
        return [[Poly.monomial(int(k)) for k in row] for row in self.exponents]

    def to_csv(self) -> str:
        lines = []
        for row in self.exponents:
            lines.append(",".join(f"d^{int(k)}" for k in row))
        return "\n".join(lines) + "\n"


def _labels(ds, width):
    arr = np.empty((len(ds), width), dtype=np.int64)
    for i, d in enumerate(ds):
        arr[i] = d.labels()
    return arr


def gram_matrix(basis: SpineBasis) -> GramMatrix:
    """Entry (i, j) from the stacked diagram flip(x_i) o x_j = d^k * pivot."""
    n = basis.n
    N = basis.dim
    if N == 0:
        return GramMatrix(basis, np.zeros((0, 0), dtype=np.int64))
    flips = _labels([flip(x) for x in basis.elements], 2 * n)
    plain = _labels(basis.elements, 2 * n)
    ii, jj = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    P = flips[ii.ravel()]
    Q = plain[jj.ravel()]
    out, powers = _kernels.compose_labels(P, Q, n, n, n)
    pivot = np.array(basis.pivot().labels(), dtype=np.int64)
    if out.shape[1] and not np.all(out == pivot[None, :]):
        bad = int(np.nonzero(~np.all(out == pivot[None, :], axis=1))[0][0])
        i, j = divmod(bad, N)
        raise InternalError(f"Gram composite ({i}, {j}) is not a multiple of the pivot")
    return GramMatrix(basis, powers.reshape(N, N).astype(np.int64))


def gram_exponents_by_join(basis: SpineBasis) -> np.ndarray:
    """Independent count of the Gram exponents from joins of top partitions.

    Ordinary and even spines: number of blocks of the join. Odd spine: the
    join of the n-node top partitions, minus the block holding both attached
    parts (which must coincide).
    """
    N = basis.dim
    out = np.zeros((N, N), dtype=np.int64)
    if basis.kind != "odd":
        tops = basis.index_partitions
        for i in range(N):
            for j in range(N):
                out[i, j] = join(tops[i], tops[j]).num_blocks
        return out
    n = basis.n
    tops = [x.top_partition() for x in basis.elements]
    marks = []
    for x in basis.elements:
        blk = next(b for b in x.blocks if b[-1] > n)
        marks.append(next(v for v in blk if v <= n))
    for i in range(N):
        for j in range(N):
            jn = join(tops[i], tops[j])
            if jn.block_of(marks[i]) != jn.block_of(marks[j]):
                raise InternalError("attached parts fall in different join blocks")
            out[i, j] = jn.num_blocks - 1
    return out


def predicted_degree(algebra: str, n: int, kind: Optional[str] = None) -> int:
    """Degree of the Gram determinant from the block-count formulas.

    Ordinary: sum_l l S(n, l). Even: sum_t t T(n/2, t). Odd: the even value at
    n + 1 minus e * dim, with e from odd_even_check.
    """
    alg = algebra_name(algebra)
    if alg == "ordinary":
        return sum(l * stirling2(n, l) for l in range(n + 1))
    kind = kind or ("even" if n % 2 == 0 else "odd")
    if kind == "even":
        if n % 2:
            raise ParityError("even spine needs n even")
        return sum(t * t_count(n // 2, t) for t in range(n // 2 + 1))
    holds, e = odd_even_check(n)
    if not holds:
        raise InternalError("no scalar relation between odd and even Gram matrices")
    dim = sum(t_count((n + 1) // 2, t) for t in range((n + 1) // 2 + 1))
    return predicted_degree("tonal", n + 1) - e * dim


def gram_det(g: GramMatrix, method: str = "auto") -> Poly:
    """Exact determinant.

    "evaluation": values at d = 0..D (D the row degree bound) and
    interpolation; "elimination": symmetric elimination over Z[d];
    "auto": evaluation for small sizes, elimination for large. The predicted
    degree is never used here, so comparing against it is a real check.
    """
    return poly_det(g.entries(), method=method)


# ------------------------------------------------------------- report


def head_dim_formula(algebra: str, n: int, Q: int, kind: Optional[str] = None) -> int:
    """Rank of the Gram form at d = Q from the counting formulas."""
    alg = algebra_name(algebra)
    if alg == "ordinary":
        return sum(stirling2(n, l) for l in range(1, Q + 1))
    kind = kind or ("even" if n % 2 == 0 else "odd")
    half = n // 2 if kind == "even" else (n + 1) // 2
    return sum(t_count(half, t) for t in range(0, Q + 1))


def root_limit(algebra: str, n: int) -> int:
    """Largest d at which the spine can fail to be simple."""
    alg = algebra_name(algebra)
    if alg == "ordinary":
        return max(n - 1, 0)
    return max(n // 2 - 1, 0) if n % 2 == 0 else (n - 1) // 2


@dataclass
class GramReport:
    algebra: str
    n: int
    kind: str
    dim: int
    det: Poly
    factorization: Factorization
    degree: int
    predicted_degree: int
    head_dims: dict
    checks: dict
    smith: Optional[SmithForm] = None

    def to_json(self) -> dict:
        obj = {
            "algebra": json_algebra(self.algebra),
            "n": self.n,
            "label": LABELS[self.kind],
            "dim": self.dim,
            "det": self.det.to_json(),
            "factors": [{"root": int(r), "mult": m} for r, m in self.factorization.factors],
            "unit": str(self.factorization.unit),
            "residual": self.factorization.residual.to_json(),
            "degree": self.degree,
            "predicted_degree": self.predicted_degree,
            "head_dims": {str(k): v for k, v in sorted(self.head_dims.items())},
            "checks": dict(self.checks),
        }
        if self.smith is not None:
            obj["smith"] = self.smith.to_json()
        return obj


def gram_report(algebra: str, n: int, smith: bool = False, method: str = "auto",
                kind: Optional[str] = None, smith_limit: int | None = None) -> GramReport:
    basis = spine_basis(algebra, n, kind)
    dim = basis.dim
    limit = DEFAULT.smith_dim_limit if smith_limit is None else smith_limit
    if smith and dim > limit:
        raise DomainError(f"Smith form limited to dim <= {limit}; this spine has dim {dim}")
    g = gram_matrix(basis)
    det = gram_det(g, method=method)
    fac = factor_integer_roots(det, (0, n))
    predicted = predicted_degree(basis.algebra, n, basis.kind)
    qmax = root_limit(basis.algebra, n)
    head = {q: head_dim_formula(basis.algebra, n, q, basis.kind) for q in range(1, qmax + 1)}
    # E0 squares to d E0, so the even and ordinary determinants carry d^dim;
    # E1 is idempotent and the odd determinant has no d factor at all
    saturated = fac.multiplicity(0) == (0 if basis.kind == "odd" else dim)
    for k in range(1, n + 1):
        expect = dim - head_dim_formula(basis.algebra, n, k, basis.kind)
        saturated = saturated and fac.multiplicity(k) == expect
    explained = fac.residual.is_constant() and fac.residual == 1
    checks = {
        "degree_match": det.degree == predicted,
        "saturation": bool(saturated and explained and fac.unit == 1),
        "unexplained_factor": not explained,
    }
    sm = smith_form(g.entries()) if smith else None
    return GramReport(basis.algebra, n, basis.kind, dim, det, fac, det.degree, predicted, head, checks, sm)


# ------------------------------------------------------------- other checks


def odd_even_check(n: int):
    """Find e with Gamma_{n+1}(∅,∅) = d^e Gamma_n((1),∅) entrywise.

    Returns (True, e) or (False, None).
    """
    if n < 1 or n % 2 == 0:
        raise ParityError("odd_even_check needs odd n >= 1")
    odd = gram_matrix(spine_basis("tonal", n, "odd"))
    even = gram_matrix(spine_basis("tonal", n + 1, "even"))
    if odd.exponents.shape != even.exponents.shape:
        raise DomainError("basis sizes differ")
    diff = even.exponents - odd.exponents
    e = int(diff.flat[0])
    if np.all(diff == e):
        return True, e
    return False, None


def _algebra_basis(algebra: str, n: int) -> list:
    alg = algebra_name(algebra)
    parts = enumerate_partitions(n, n, even=(alg == "tonal"))
    return [Diagram(p) for p in parts]


def verify_heredity(algebra: str, n: int) -> bool:
    """Check E0 p E0 = d^c E0 for every basis diagram p, and flip(E0) = E0."""
    alg = algebra_name(algebra)
    if alg == "tonal" and n % 2:
        raise ParityError("E0 lies in the tonal algebra only for even n")
    E0 = generator("E0", n)
    if flip(E0) != E0:
        return False
    basis = _algebra_basis(alg, n)
    left = compose_many([(E0, p) for p in basis])
    both = compose_many([(r, E0) for r, _ in left])
    return all(r == E0 for r, _ in both)


@dataclass(frozen=True)
class SimplicityRoots:
    predicted: frozenset
    computed: frozenset

    @property
    def equal(self) -> bool:
        return self.predicted == self.computed


def spine_simplicity_roots(algebra: str, n: int, method: str = "auto") -> SimplicityRoots:
    """Positive integers d where the spine Gram determinant vanishes."""
    alg = algebra_name(algebra)
    predicted = frozenset(range(1, root_limit(alg, n) + 1))
    if n == 0:
        return SimplicityRoots(predicted, frozenset())
    rep = gram_report(alg, n, method=method)
    computed = frozenset(int(r) for r, m in rep.factorization.factors if r >= 1 and m > 0)
    return SimplicityRoots(predicted, computed)


def rank_at_specialisation(g: GramMatrix, Q) -> int:
    """Rank of the Gram matrix at d = Q; integer Q skips the polynomial layer."""
    if isinstance(Q, int):
        E = g.exponents
        top = int(E.max()) if E.size else 0
        if Q == 0:
            return int_rank((E == 0).astype(np.int64).tolist())
        if abs(Q) ** top < (1 << 62):
            return int_rank((np.int64(Q) ** E).tolist())
        return int_rank([[Q ** int(k) for k in row] for row in E.tolist()])
    return rank_at(g.entries(), Q)


# ------------------------------------------------------------- left action


def action_matrix(a, basis: SpineBasis) -> list:
    """Matrix of left multiplication; column j holds the coordinates of a x_j.

    Products that leave the span (fewer propagating parts, odd spine only)
    are dropped, as they vanish in the quotient module.
    """
    a = LinComb.of(a) if isinstance(a, Diagram) else a
    if (a.source, a.target) != (basis.n, basis.n):
        raise DomainError("algebra element and module have different n")
    index = basis.index()
    N = basis.dim
    M = [[Poly() for _ in range(N)] for _ in range(N)]
    terms = list(a.terms.items())
    pairs = [(p, x) for p, _ in terms for x in basis.elements]
    results = compose_many(pairs)
    for t, (p, c) in enumerate(terms):
        for j in range(N):
            r, k = results[t * N + j]
            if r in index:
                i = index[r]
                M[i][j] = M[i][j] + c * DELTA ** k
            elif basis.kind == "odd" and not r.propagating():
                continue
            else:
                raise InternalError(f"{r} is outside the spine module")
    return M


def intertwines(a, basis: SpineBasis, g: Optional[GramMatrix] = None) -> bool:
    """rho(a)^T Gamma == Gamma rho(a*): the form is contravariant.

    For a flip-symmetric a this is rho(a)^T Gamma == Gamma rho(a).
    """
    g = g or gram_matrix(basis)
    G = g.entries()
    rho = action_matrix(a, basis)
    rho_star = action_matrix(flip_lin(a), basis)
    return matmul(transpose(rho), G) == matmul(G, rho_star)
