"""The Potts functor: diagrams to 0/1 matrices on Q-colourings of the nodes.

Rows of the image of p : n -> m are words of length n over {1..Q}, columns
words of length m. Words are read base Q with the first letter most
significant, so for Q = 2, n = 3 the order is 111, 112, 121, ..., 222.
"""
from __future__ import annotations

from itertools import permutations

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .config import DEFAULT
from .diagcat import Diagram, LinComb, permutation
from .errors import CapacityError, DomainError, InternalError, ParityError, ShapeMismatchError
from .intlinalg import int_rank
from .polyring import Poly
from .setpart import enumerate_even_partitions, enumerate_partitions, stirling2, t_count

_SAFE = 1 << 62


class SparseIntMatrix:
    """Exact integer matrix in coordinate form.

    Entries are kept sorted by (row, col) with no duplicates and no zeros,
    so two equal matrices have identical arrays.
    """

    __slots__ = ("rows", "cols", "r", "c", "v")

    def __init__(self, rows: int, cols: int, r=(), c=(), v=()):
        r = np.asarray(r, dtype=np.int64).ravel()
        c = np.asarray(c, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        if not (len(r) == len(c) == len(v)):
            raise ValueError("coordinate arrays differ in length")
        if len(r) and (r.min() < 0 or r.max() >= rows or c.min() < 0 or c.max() >= cols):
            raise ValueError("coordinate out of range")
        if len(r):
            key = r * cols + c
            order = np.argsort(key, kind="stable")
            key, v = key[order], v[order]
            uniq, start = np.unique(key, return_index=True)
            v = np.add.reduceat(v, start) if len(v) else v
            keep = v != 0
            uniq, v = uniq[keep], v[keep]
            r, c = uniq // cols, uniq % cols
        self.rows, self.cols, self.r, self.c, self.v = int(rows), int(cols), r, c, v

    # construction

    @classmethod
    def from_dense(cls, A) -> "SparseIntMatrix":
        A = np.asarray(A, dtype=np.int64)
        if A.ndim == 1:
            A = A.reshape(-1, 1)
        r, c = np.nonzero(A)
        return cls(A.shape[0], A.shape[1], r, c, A[r, c])

    @classmethod
    def identity(cls, size: int) -> "SparseIntMatrix":
        idx = np.arange(size)
        return cls(size, size, idx, idx, np.ones(size, np.int64))

    @classmethod
    def _from_scipy(cls, M) -> "SparseIntMatrix":
        M = M.tocoo()
        return cls(M.shape[0], M.shape[1], M.row, M.col, M.data)

    def to_scipy(self):
        return sp.csr_matrix((self.v, (self.r, self.c)), shape=(self.rows, self.cols), dtype=np.int64)

    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.rows, self.cols), dtype=np.int64)
        A[self.r, self.c] = self.v
        return A

    # arithmetic

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.v)

    def max_abs(self) -> int:
        return int(np.abs(self.v).max()) if len(self.v) else 0

    def __eq__(self, other):
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return (self.shape == other.shape and np.array_equal(self.r, other.r)
                and np.array_equal(self.c, other.c) and np.array_equal(self.v, other.v))

    def __hash__(self):
        return hash((self.shape, self.r.tobytes(), self.c.tobytes(), self.v.tobytes()))

    def __add__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.shape != other.shape:
            raise ShapeMismatchError(f"cannot add {self.shape} and {other.shape}")
        if self.max_abs() + other.max_abs() >= _SAFE:
            raise CapacityError("entries too large for exact 64-bit sparse arithmetic")
        return SparseIntMatrix(self.rows, self.cols, np.concatenate([self.r, other.r]),
                               np.concatenate([self.c, other.c]), np.concatenate([self.v, other.v]))

    def __neg__(self):
        return SparseIntMatrix(self.rows, self.cols, self.r, self.c, -self.v)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int) -> "SparseIntMatrix":
        k = int(k)
        if k and self.max_abs() * abs(k) >= _SAFE:
            raise CapacityError("entries too large for exact 64-bit sparse arithmetic")
        return SparseIntMatrix(self.rows, self.cols, self.r, self.c, self.v * k)

    def __matmul__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise ShapeMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        # worst case |entry| <= inner * max|A| * max|B|
        if self.cols * self.max_abs() * other.max_abs() >= _SAFE:
            raise CapacityError("product could overflow exact 64-bit sparse arithmetic")
        return SparseIntMatrix._from_scipy(self.to_scipy() @ other.to_scipy())

    def kron(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.max_abs() * other.max_abs() >= _SAFE:
            raise CapacityError("entries too large for exact 64-bit sparse arithmetic")
        return SparseIntMatrix._from_scipy(sp.kron(self.to_scipy(), other.to_scipy(), format="coo"))

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.cols, self.rows, self.c, self.r, self.v)

    @property
    def T(self):
        return self.transpose()

    def is_zero(self) -> bool:
        return self.nnz == 0

    # serialisation

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "coo": [[int(r), int(c), str(int(v))] for r, c, v in zip(self.r, self.c, self.v)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SparseIntMatrix":
        coo = obj["coo"]
        return cls(obj["rows"], obj["cols"], [e[0] for e in coo], [e[1] for e in coo],
                   [int(e[2]) for e in coo])

    def __repr__(self):
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


def kron_power(g: SparseIntMatrix, n: int) -> SparseIntMatrix:
    out = SparseIntMatrix.identity(1)
    for _ in range(n):
        out = out.kron(g)
    return out


# ------------------------------------------------------------------ words


def word_index(word, Q: int) -> int:
    """Position of a word (letters 1..Q) in the base-Q order."""
    idx = 0
    for a in word:
        a = int(a)
        if not 1 <= a <= Q:
            raise DomainError(f"letter {a} outside 1..{Q}")
        idx = idx * Q + (a - 1)
    return idx


def word_at(index: int, Q: int, n: int) -> tuple:
    if not 0 <= index < Q ** n:
        raise DomainError(f"index {index} outside 0..{Q ** n - 1}")
    out = []
    for _ in range(n):
        index, a = divmod(index, Q)
        out.append(a + 1)
    return tuple(reversed(out))


def format_word(word) -> str:
    """Digit string such as "112"; letters above 9 are dot separated."""
    if any(int(a) > 9 for a in word):
        return ".".join(str(int(a)) for a in word)
    return "".join(str(int(a)) for a in word)


def _all_words(Q: int, n: int) -> np.ndarray:
    """Every word as a 0-based letter array, in index order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((Q,) * n, dtype=np.int64).reshape(n, -1).T


# ------------------------------------------------------------------ functor


def _check_capacity(size: int, capacity: int | None, what: str):
    cap = DEFAULT.potts_capacity if capacity is None else capacity
    if size > cap:
        raise CapacityError(f"{what} needs {size} entries, over the capacity {cap}")


def potts_image(p: Diagram, Q: int, capacity: int | None = None) -> SparseIntMatrix:
    """The Q^n x Q^m 0/1 matrix: 1 exactly when the colouring is constant on blocks."""
    if Q < 1:
        raise DomainError("Q must be positive")
    n, m = p.source, p.target
    _check_capacity(Q ** (n + m), capacity, "Potts image")
    rows, cols = _kernels.potts_indices(np.asarray(p.labels(), dtype=np.int64),
                                        len(p.blocks), Q, n, m)
    return SparseIntMatrix(Q ** n, Q ** m, rows, cols, np.ones(len(rows), np.int64))


def potts_lin(x, Q: int, capacity: int | None = None) -> SparseIntMatrix:
    """Linear extension, with every coefficient evaluated at d = Q."""
    if isinstance(x, Diagram):
        x = LinComb.of(x)
    out = SparseIntMatrix(Q ** x.source, Q ** x.target)
    for d, coeff in x.items():
        c = coeff.eval(Q)
        if c != int(c):
            raise DomainError("coefficient is not an integer at d = Q")
        out = out + potts_image(d, Q, capacity).scale(int(c))
    return out


def _column_matrix(diagrams, Q: int, capacity: int | None) -> np.ndarray:
    """Dense matrix whose columns are the flattened Potts images, duplicate rows removed."""
    cols = []
    for d in diagrams:
        img = potts_image(d, Q, capacity)
        col = np.zeros(img.rows * img.cols, dtype=np.int64)
        col[img.r * img.cols + img.c] = img.v
        cols.append(col)
    A = np.stack(cols, axis=1)
    # repeated rows do not change the rank
    return np.unique(A, axis=0)


def potts_span_rank(diagrams, Q: int, capacity: int | None = None) -> int:
    """Rank over Q of the span of the Potts images (flattened to vectors)."""
    diagrams = list(diagrams)
    if not diagrams:
        return 0
    shapes = {(d.source, d.target) for d in diagrams}
    if len(shapes) != 1:
        raise ShapeMismatchError("diagrams must share source and target")
    return int_rank(_column_matrix(diagrams, Q, capacity).tolist())


def _kernel_codes(words: np.ndarray) -> np.ndarray:
    """For each word and position j, the first position holding the same letter."""
    N, n = words.shape
    codes = np.empty((N, n), dtype=np.int64)
    for j in range(n):
        codes[:, j] = j
        for i in range(j - 1, -1, -1):
            codes[words[:, i] == words[:, j], j] = i
    return codes


def orbit_count_formula(Q: int, n: int, signed: bool = False) -> int:
    if signed:
        if n % 2:
            return 0
        return sum(t_count(n // 2, t) for t in range(0, Q + 1))
    if n == 0:
        return 1
    return sum(stirling2(n, l) for l in range(1, Q + 1))


def orbit_count(Q: int, n: int, signed: bool = False, capacity: int | None = None) -> int:
    """Number of colour-permutation orbits on words of length n.

    With signed=True only words whose every letter occurs an even number of
    times are counted; these orbits index the vectors fixed by signed
    permutation matrices acting diagonally. Computed by enumerating words and
    checked against the Stirling and T sums.
    """
    if Q < 1 or n < 0:
        raise DomainError("need Q >= 1 and n >= 0")
    _check_capacity(Q ** n, capacity, "orbit enumeration")
    words = _all_words(Q, n)
    if signed:
        even = np.ones(len(words), dtype=bool)
        for a in range(Q):
            even &= (words == a).sum(axis=1) % 2 == 0
        words = words[even]
    if len(words) == 0:
        count = 0
    elif n == 0:
        count = 1
    else:
        count = len(np.unique(_kernel_codes(words), axis=0))
    if count != orbit_count_formula(Q, n, signed):
        raise InternalError(f"orbit count {count} disagrees with the closed form")
    return count


# ------------------------------------------------------------------ symmetry groups


def swap_generators(Q: int) -> list:
    """Adjacent transpositions of the Q colours, as Q x Q matrices."""
    gens = []
    for i in range(Q - 1):
        P = np.eye(Q, dtype=np.int64)
        P[[i, i + 1]] = P[[i + 1, i]]
        gens.append(SparseIntMatrix.from_dense(P))
    return gens


def signed_generators(Q: int) -> list:
    """Swaps plus diag(-1, 1, ..., 1); together they generate all signed permutations."""
    D = np.eye(Q, dtype=np.int64)
    D[0, 0] = -1
    return swap_generators(Q) + [SparseIntMatrix.from_dense(D)]


def _as_signed_permutation(g: SparseIntMatrix):
    """(perm, sign) with g e_i = sign[i] e_perm[i], or None if g is not of that kind."""
    if g.rows != g.cols or g.nnz != g.rows or not np.all(np.abs(g.v) == 1):
        return None
    perm = np.full(g.cols, -1, dtype=np.int64)
    sign = np.zeros(g.cols, dtype=np.int64)
    perm[g.c] = g.r
    sign[g.c] = g.v
    if np.any(perm < 0) or len(np.unique(perm)) != g.rows:
        return None
    return perm, sign


def _power_action(perm, sign, Q: int, n: int):
    """The action of g^{(x) n} on word indices: (perm, sign) arrays of length Q^n."""
    words = _all_words(Q, n)
    weights = Q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    img = perm[words] @ weights if n else np.zeros(1, np.int64)
    sgn = np.prod(sign[words], axis=1) if n else np.ones(1, np.int64)
    return img.astype(np.int64), sgn.astype(np.int64)


def _fixed_dim(actions, size: int) -> int:
    """Dimension of the vectors fixed by signed permutations of a basis of `size`.

    Each action maps e_i to sign[i] e_perm[i]. A fixed vector is constant up
    to the tracked sign along each orbit; an orbit contributes one dimension
    unless its signs contradict.
    """
    parent = list(range(size))
    parity = [0] * size  # sign of i relative to its parent, as 0/1
    bad = [False] * size

    def find(x):
        path = []
        while parent[x] != x:
            path.append(x)
            x = parent[x]
        root = x
        acc = 0
        for y in reversed(path):
            acc ^= parity[y]
            parity[y] = acc
            parent[y] = root
        return root

    for perm, sign in actions:
        for i, (j, s) in enumerate(zip(perm.tolist(), sign.tolist())):
            # coefficient at j equals s times coefficient at i
            rel = 0 if s == 1 else 1
            ri, rj = find(i), find(j)
            pi, pj = parity[i] if i != ri else 0, parity[j] if j != rj else 0
            if ri == rj:
                if pi ^ pj ^ rel:
                    bad[ri] = True
            else:
                parent[rj] = ri
                parity[rj] = pi ^ pj ^ rel
                bad[ri] = bad[ri] or bad[rj]
    roots = {find(i) for i in range(size)}
    return sum(1 for r in roots if not bad[r])


def invariant_dim(generators, Q: int, n: int, capacity: int | None = None) -> int:
    """Dimension of the vectors in (Q^Q)^{(x) n} fixed by every g^{(x) n}."""
    _check_capacity(Q ** n, capacity, "invariant space")
    acts = [_as_signed_permutation(g) for g in generators]
    if all(a is not None for a in acts):
        return _fixed_dim([_power_action(p, s, Q, n) for p, s in acts], Q ** n)
    size = Q ** n
    blocks = [(kron_power(g, n) - SparseIntMatrix.identity(size)).to_dense() for g in generators]
    if not blocks:
        return size
    return size - int_rank(np.vstack(blocks).tolist())


def commutant_dim(generators, n: int, capacity: int | None = None, method: str = "auto") -> int:
    """dim { Z : Z g^{(x) n} = g^{(x) n} Z for every generator g }.

    Signed permutation generators are handled by orbit counting on pairs of
    words; anything else, or method="linear", solves the stacked commutator
    system exactly.
    """
    generators = list(generators)
    if not generators:
        raise DomainError("commutant_dim needs Q; pass at least one generator or use Q**(2n)")
    Q = generators[0].rows
    if any(g.shape != (Q, Q) for g in generators):
        raise ShapeMismatchError("generators must be square of one size")
    size = Q ** n
    _check_capacity(size * size, capacity, "commutant")
    acts = [_as_signed_permutation(g) for g in generators]
    if method == "auto" and all(a is not None for a in acts):
        pair_actions = []
        for perm, sign in acts:
            p1, s1 = _power_action(perm, sign, Q, n)
            # G E_ij G^T = s_i s_j E_{p(i) p(j)}
            pair_actions.append(((p1[:, None] * size + p1[None, :]).ravel(),
                                 (s1[:, None] * s1[None, :]).ravel()))
        return _fixed_dim(pair_actions, size * size)
    # row-major vec: vec(Z G - G Z) = (I (x) G^T - G (x) I) vec(Z)
    rows = []
    eye = SparseIntMatrix.identity(size)
    for g in generators:
        G = kron_power(g, n)
        rows.append((eye.kron(G.T) - G.kron(eye)).to_dense())
    return size * size - int_rank(np.vstack(rows).tolist())


def trivial_commutant_dim(Q: int, n: int) -> int:
    """With no symmetry the commutant is the full matrix algebra."""
    return Q ** (2 * n)


# ------------------------------------------------------------------ heads


def head_dim_via_potts(algebra: str, n: int, Q: int, capacity: int | None = None) -> int:
    """Rank of the Potts image of the spine basis (its top-row partitions)."""
    from .spinegram import algebra_name

    alg = algebra_name(algebra)
    if Q < 1:
        raise DomainError("Q must be positive")
    if alg == "ordinary":
        tops = enumerate_partitions(n, 0)
    else:
        if n % 2:
            raise ParityError("the tonal head via Potts needs n even")
        tops = enumerate_even_partitions(n)
    return potts_span_rank([Diagram(p) for p in tops], Q, capacity)


def algebra_image_dim(diagrams, Q: int, capacity: int | None = None) -> int:
    """Dimension of the span of the Potts images of a set of n -> n diagrams."""
    return potts_span_rank(diagrams, Q, capacity)


def antisymmetrizer(n: int) -> LinComb:
    """The signed sum of all permutation diagrams on n strands."""
    terms = {}
    for images in permutations(range(1, n + 1)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if images[i] > images[j])
        terms[permutation(n, images)] = -1 if inv % 2 else 1
    return LinComb(n, n, {d: Poly.const(c) for d, c in terms.items()})
