"""
Z/2 cohomology of involutive lattices

Exact integer linear algebra (Smith normal form, echelon lattices, integer
solving) and the cohomology of the group of order two with coefficients in a
free lattice M carrying an involution tau:

    H^1(M) = Ker(1 + tau) / Im(tau - 1)
    H^2(M) = Ker(1 - tau) / Im(1 + tau)      (= Tate H^0)

All matrices are numpy arrays of dtype object holding Python ints, so every
computation is exact at arbitrary precision.
"""

from __future__ import annotations

import itertools
import logging
import operator
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class LatticeError(ValueError):
    """Malformed lattice, involution or matrix shape."""


class CocycleError(ValueError):
    """A representative does not satisfy the cocycle condition."""


class EquivarianceError(ValueError):
    """A map does not commute with the involutions."""


# ---------------------------------------------------------------------------
# Matrix helpers
# ---------------------------------------------------------------------------

def _exact(value: Any) -> int:
    try:
        return operator.index(value)
    except TypeError:
        raise LatticeError(f"Expected an integer entry, got {value!r}") from None


def as_matrix(rows: Any, n_cols: Optional[int] = None) -> np.ndarray:
    """
    Build an exact integer matrix (dtype object) from nested sequences.

    Args:
        rows: nested sequence or numpy array
        n_cols: column count to use when there are no rows

    Returns:
        2-D object array of Python ints
    """
    if isinstance(rows, np.ndarray):
        source = rows
    else:
        rows = [list(row) for row in rows]
        if not rows:
            return np.zeros((0, n_cols or 0), dtype=object)
        source = np.array(rows, dtype=object)
    if source.ndim != 2:
        raise LatticeError(f"Expected a rectangular matrix, got shape {source.shape}")
    out = np.empty(source.shape, dtype=object)
    for idx, value in np.ndenumerate(source):
        out[idx] = _exact(value)
    return out


def as_vector(values: Any) -> np.ndarray:
    """Build an exact integer vector (dtype object)."""
    source = np.asarray(values, dtype=object)
    if source.ndim != 1:
        raise LatticeError(f"Expected a vector, got shape {source.shape}")
    out = np.empty(source.shape, dtype=object)
    for idx, value in enumerate(source):
        out[idx] = _exact(value)
    return out


def zeros(*shape: int) -> np.ndarray:
    return np.zeros(shape, dtype=object)


def identity(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def mat_mul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact product that also handles an empty inner dimension."""
    if A.shape[-1] != B.shape[0]:
        raise LatticeError(f"Shape mismatch in product: {A.shape} @ {B.shape}")
    if A.shape[-1] == 0:
        return np.zeros(A.shape[:-1] + B.shape[1:], dtype=object)
    return A @ B


def is_zero(x: np.ndarray) -> bool:
    return not any(value != 0 for value in x.flat)


def integer_det(A: Any) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    M = [[int(x) for x in row] for row in as_matrix(A)]
    n = len(M)
    if n == 0:
        return 1
    if any(len(row) != n for row in M):
        raise LatticeError("Determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

class SmithNormalForm:
    """Smith normal form of an m x n integer matrix.

    The matrix A is transformed to a diagonal matrix D by unimodular U, V:

        D = U A V

    with the nonzero diagonal entries positive and each dividing the next.
    U^-1 is tracked alongside U so that quotient generators can be read off
    without a separate inversion.

    Usage
    -----
    snf = SmithNormalForm(A).run()
    snf.U, snf.D, snf.V, snf.U_inv, snf.rank
    """

    def __init__(self, A: Any):
        self.D = as_matrix(A).copy()
        m, n = self.D.shape
        self.U = identity(m)
        self.U_inv = identity(m)
        self.V = identity(n)
        self.rank = 0

    def run(self) -> "SmithNormalForm":
        m, n = self.D.shape
        D = self.D
        for t in range(min(m, n)):
            entries = [(abs(D[i, j]), i, j) for i in range(t, m) for j in range(t, n) if D[i, j] != 0]
            if not entries:
                break
            _, i, j = min(entries)
            self._swap_rows(t, i)
            self._swap_cols(t, j)
            while True:
                self._clear_pivot_line(t)
                leftovers = [(abs(D[i, t]), i, None) for i in range(t + 1, m) if D[i, t] != 0]
                leftovers += [(abs(D[t, j]), None, j) for j in range(t + 1, n) if D[t, j] != 0]
                if leftovers:
                    _, i, j = min(leftovers, key=lambda item: item[0])
                    if i is not None:
                        self._swap_rows(t, i)
                    else:
                        self._swap_cols(t, j)
                    continue
                bad = next(
                    (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i, j] % D[t, t] != 0),
                    None,
                )
                if bad is None:
                    break
                self._add_row(t, bad, 1)
            if D[t, t] < 0:
                self._negate_row(t)
            self.rank = t + 1
        return self

    @property
    def diagonal(self) -> List[int]:
        return [self.D[i, i] for i in range(min(self.D.shape))]

    def _clear_pivot_line(self, t: int):
        D = self.D
        m, n = D.shape
        for i in range(t + 1, m):
            q = D[i, t] // D[t, t]
            if q:
                self._add_row(i, t, -q)
        for j in range(t + 1, n):
            q = D[t, j] // D[t, t]
            if q:
                self._add_col(j, t, -q)

    def _swap_rows(self, a: int, b: int):
        if a == b:
            return
        self.D[[a, b], :] = self.D[[b, a], :]
        self.U[[a, b], :] = self.U[[b, a], :]
        self.U_inv[:, [a, b]] = self.U_inv[:, [b, a]]

    def _swap_cols(self, a: int, b: int):
        if a == b:
            return
        self.D[:, [a, b]] = self.D[:, [b, a]]
        self.V[:, [a, b]] = self.V[:, [b, a]]

    def _add_row(self, target: int, source: int, q: int):
        self.D[target, :] = self.D[target, :] + q * self.D[source, :]
        self.U[target, :] = self.U[target, :] + q * self.U[source, :]
        self.U_inv[:, source] = self.U_inv[:, source] - q * self.U_inv[:, target]

    def _add_col(self, target: int, source: int, q: int):
        self.D[:, target] = self.D[:, target] + q * self.D[:, source]
        self.V[:, target] = self.V[:, target] + q * self.V[:, source]

    def _negate_row(self, t: int):
        self.D[t, :] = -self.D[t, :]
        self.U[t, :] = -self.U[t, :]
        self.U_inv[:, t] = -self.U_inv[:, t]


def smith_normal_form(A: Any) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Smith normal form with transformation matrices.

    Args:
        A: integer matrix

    Returns:
        (U, D, V) with U·A·V = D, D diagonal with divisibility chain, U and V unimodular
    """
    snf = SmithNormalForm(A).run()
    return snf.U, snf.D, snf.V


def kernel_basis(A: Any) -> np.ndarray:
    """Integer basis of Ker A, returned as the columns of a matrix."""
    snf = SmithNormalForm(A).run()
    return snf.V[:, snf.rank:]


def solve_integer(A: Any, b: Any) -> Optional[np.ndarray]:
    """
    One integer solution of A x = b, or None when there is none.

    Free coordinates are set to zero, so b = 0 always yields x = 0.
    """
    snf = SmithNormalForm(A).run()
    m, n = snf.D.shape
    c = mat_mul(snf.U, as_vector(b))
    y = zeros(n)
    for i in range(m):
        if i < snf.rank:
            d = snf.D[i, i]
            if c[i] % d:
                return None
            y[i] = c[i] // d
        elif c[i] != 0:
            return None
    return mat_mul(snf.V, y)


def _left_inverse(K: np.ndarray) -> np.ndarray:
    snf = SmithNormalForm(K).run()
    k = K.shape[1]
    if snf.rank != k or any(d != 1 for d in snf.diagonal):
        raise LatticeError("Sublattice is not saturated; torsion coefficients are not supported")
    return mat_mul(snf.V, snf.U[:k, :])


# ---------------------------------------------------------------------------
# Echelon lattices
# ---------------------------------------------------------------------------

def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    return x, y, g


class IntegerLattice:
    """A sublattice of Z^N kept as an echelon basis, grown one vector at a time.

    Each basis row has a positive pivot and zeros before it; rows are sorted
    by pivot column. `reduce` returns the unique representative of x + L
    whose pivot coordinates lie in [0, pivot).
    """

    __slots__ = ["N", "rows", "pivots"]

    def __init__(self, ambient_dimension: int):
        self.N = ambient_dimension
        self.rows: List[List[int]] = []
        self.pivots: List[int] = []

    @classmethod
    def from_rows(cls, vectors: Any, ambient_dimension: Optional[int] = None) -> "IntegerLattice":
        vectors = as_matrix(vectors, ambient_dimension)
        lattice = cls(vectors.shape[1] if ambient_dimension is None else ambient_dimension)
        for vec in vectors:
            lattice.add_vector(vec)
        return lattice

    def __len__(self) -> int:
        return len(self.rows)

    def add_vector(self, vec0: Sequence[int]):
        vec = [int(x) for x in vec0]
        if len(vec) != self.N:
            raise LatticeError(f"Vector of length {len(vec)} in a lattice of dimension {self.N}")
        for j in range(self.N):
            if vec[j] == 0:
                continue
            if j not in self.pivots:
                if vec[j] < 0:
                    vec = [-x for x in vec]
                where = sum(1 for p in self.pivots if p < j)
                self.rows.insert(where, vec)
                self.pivots.insert(where, j)
                return
            p = self.pivots.index(j)
            row = self.rows[p]
            a, b = row[j], vec[j]
            x, y, g = xgcd(a, b)
            ag, bg = a // g, b // g
            new_row = [x * r + y * v for r, v in zip(row, vec)]
            vec = [-bg * r + ag * v for r, v in zip(row, vec)]
            if new_row[j] < 0:
                new_row = [-r for r in new_row]
            self.rows[p] = new_row

    def reduce(self, x: Sequence[int]) -> np.ndarray:
        out = [int(v) for v in x]
        for pivot, row in zip(self.pivots, self.rows):
            q = out[pivot] // row[pivot]
            if q:
                out = [o - q * r for o, r in zip(out, row)]
        return as_vector(out)

    def __contains__(self, x: Sequence[int]) -> bool:
        return is_zero(self.reduce(x))


def hermite_rows(vectors: Any, ambient_dimension: Optional[int] = None) -> np.ndarray:
    """Echelon basis (rows) of the lattice spanned by the given rows."""
    lattice = IntegerLattice.from_rows(vectors, ambient_dimension)
    return as_matrix(lattice.rows, lattice.N)


def reduce_mod_lattice(x: Sequence[int], rows: Any) -> np.ndarray:
    return IntegerLattice.from_rows(rows, len(x)).reduce(x)


# ---------------------------------------------------------------------------
# Exterior and tensor squares
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def wedge_pairs(n: int) -> Tuple[Tuple[int, int], ...]:
    """Basis e_i^e_j of the exterior square, i < j, in lexicographic order."""
    return tuple(itertools.combinations(range(n), 2))


@lru_cache(maxsize=None)
def wedge_index(n: int) -> Dict[Tuple[int, int], int]:
    return {pair: k for k, pair in enumerate(wedge_pairs(n))}


def wedge_square_matrix(A: Any) -> np.ndarray:
    """Matrix of the induced map on exterior squares, for any m x n matrix A."""
    A = as_matrix(A)
    m, n = A.shape
    rows, cols = wedge_pairs(m), wedge_pairs(n)
    out = zeros(len(rows), len(cols))
    for r, (a, b) in enumerate(rows):
        for c, (i, j) in enumerate(cols):
            out[r, c] = A[a, i] * A[b, j] - A[b, i] * A[a, j]
    return out


@lru_cache(maxsize=None)
def wedge_quotient_matrix(n: int) -> np.ndarray:
    """The quotient M⊗M -> Λ²M, with e_i⊗e_j at index i*n + j."""
    out = zeros(len(wedge_pairs(n)), n * n)
    for k, (i, j) in enumerate(wedge_pairs(n)):
        out[k, i * n + j] = 1
        out[k, j * n + i] = -1
    return out


# ---------------------------------------------------------------------------
# Lattices, groups and classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InvolutiveLattice:
    """A free Z-module of finite rank with an involution matrix."""

    rank: int
    tau: np.ndarray
    label: str = "M"

    def __post_init__(self):
        tau = as_matrix(self.tau, self.rank)
        if tau.shape != (self.rank, self.rank):
            raise LatticeError(f"{self.label}: tau has shape {tau.shape}, expected {(self.rank, self.rank)}")
        if not np.array_equal(mat_mul(tau, tau), identity(self.rank)):
            raise LatticeError(f"{self.label}: tau is not an involution (tau·tau != I)")
        object.__setattr__(self, "tau", tau)

    @classmethod
    def from_matrix(cls, tau: Any, label: str = "M") -> "InvolutiveLattice":
        tau = as_matrix(tau)
        return cls(tau.shape[0], tau, label)

    def __repr__(self) -> str:
        return f"InvolutiveLattice({self.label}, rank={self.rank})"


def cocycle_matrix(M: InvolutiveLattice, degree: int) -> np.ndarray:
    if degree == 1:
        return identity(M.rank) + M.tau
    if degree == 2:
        return identity(M.rank) - M.tau
    raise CocycleError(f"Unsupported cohomological degree: {degree}")


def coboundary_matrix(M: InvolutiveLattice, degree: int) -> np.ndarray:
    if degree == 1:
        return M.tau - identity(M.rank)
    if degree == 2:
        return identity(M.rank) + M.tau
    raise CocycleError(f"Unsupported cohomological degree: {degree}")


@dataclass(frozen=True, eq=False)
class FinAbGroup:
    """A finite abelian cohomology group with an explicit basis.

    `basis` holds representative vectors (columns) of the chosen generators;
    `coordinate_map` reads the coordinates of any cocycle in that basis.
    """

    invariants: Tuple[int, ...]
    free_rank: int
    basis: np.ndarray
    ambient: InvolutiveLattice
    degree: int
    coordinate_map: np.ndarray
    boundaries: IntegerLattice

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariants:
            out *= d
        return out

    @property
    def dimension(self) -> int:
        return len(self.invariants)

    def contains(self, rep: Any) -> bool:
        rep = as_vector(rep)
        return len(rep) == self.ambient.rank and is_zero(mat_mul(cocycle_matrix(self.ambient, self.degree), rep))

    def coordinates(self, rep: Any) -> Tuple[int, ...]:
        values = mat_mul(self.coordinate_map, as_vector(rep))
        return tuple(int(v) % d for v, d in zip(values, self.invariants))

    def canonical(self, rep: Any) -> np.ndarray:
        return self.boundaries.reduce(rep)

    def element(self, coords: Sequence[int]) -> "CohClass":
        rep = mat_mul(self.basis, as_vector(list(coords)))
        return CohClass(self.degree, self.canonical(rep), self.ambient)

    def elements(self) -> Iterator["CohClass"]:
        for coords in itertools.product(*(range(d) for d in self.invariants)):
            yield self.element(coords)

    def unit(self, i: int) -> "CohClass":
        coords = [0] * self.dimension
        coords[i] = 1
        return self.element(coords)

    def describe(self) -> str:
        if not self.invariants:
            return "0"
        if all(d == 2 for d in self.invariants):
            return "Z/2" if self.dimension == 1 else f"(Z/2)^{self.dimension}"
        return " x ".join(f"Z/{d}" for d in self.invariants)


@dataclass(frozen=True, eq=False)
class CohClass:
    """A class in H^1 or H^2 stored through a representative cocycle."""

    degree: int
    rep: np.ndarray
    ambient: InvolutiveLattice

    def __post_init__(self):
        if self.degree not in (1, 2):
            raise CocycleError(f"Unsupported cohomological degree: {self.degree}")
        rep = as_vector(self.rep)
        if len(rep) != self.ambient.rank:
            raise CocycleError(
                f"Representative of length {len(rep)} for {self.ambient.label} of rank {self.ambient.rank}"
            )
        if not is_zero(mat_mul(cocycle_matrix(self.ambient, self.degree), rep)):
            condition = "(I + tau)·rep = 0" if self.degree == 1 else "(I - tau)·rep = 0"
            raise CocycleError(f"{list(rep)} violates the cocycle condition {condition} on {self.ambient.label}")
        object.__setattr__(self, "rep", rep)

    @property
    def group(self) -> FinAbGroup:
        return cohomology(self.ambient, self.degree)

    def coordinates(self) -> Tuple[int, ...]:
        return self.group.coordinates(self.rep)

    def canonical(self) -> "CohClass":
        return CohClass(self.degree, self.group.canonical(self.rep), self.ambient)

    def is_zero(self) -> bool:
        return not any(self.coordinates())

    def _check_compatible(self, other: "CohClass"):
        if not isinstance(other, CohClass):
            raise TypeError(f"Cannot combine a cohomology class with {type(other).__name__}")
        if other.ambient is not self.ambient or other.degree != self.degree:
            raise LatticeError(
                f"Classes live in different groups: H^{self.degree}({self.ambient.label}) "
                f"vs H^{other.degree}({other.ambient.label})"
            )

    def equals(self, other: "CohClass") -> bool:
        self._check_compatible(other)
        return self.coordinates() == other.coordinates()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CohClass):
            return NotImplemented
        if other.ambient is not self.ambient or other.degree != self.degree:
            return False
        return self.coordinates() == other.coordinates()

    def __hash__(self) -> int:
        return hash((id(self.ambient), self.degree, self.coordinates()))

    def __add__(self, other: "CohClass") -> "CohClass":
        self._check_compatible(other)
        return CohClass(self.degree, self.rep + other.rep, self.ambient)

    def __neg__(self) -> "CohClass":
        return CohClass(self.degree, -self.rep, self.ambient)

    def __sub__(self, other: "CohClass") -> "CohClass":
        return self + (-other)

    def __repr__(self) -> str:
        return f"CohClass(H^{self.degree}({self.ambient.label}), rep={list(self.rep)})"


def _quotient_group(M: InvolutiveLattice, degree: int) -> FinAbGroup:
    n = M.rank
    P = cocycle_matrix(M, degree)
    Q = coboundary_matrix(M, degree)
    boundaries = IntegerLattice.from_rows(Q.T, n)
    K = kernel_basis(P)
    k = K.shape[1]
    if k == 0:
        return FinAbGroup((), 0, zeros(n, 0), M, degree, zeros(0, n), boundaries)

    L = _left_inverse(K)
    C = mat_mul(L, Q)
    if not np.array_equal(mat_mul(K, C), Q):
        raise LatticeError(f"{M.label}: coboundaries are not contained in cocycles")

    snf = SmithNormalForm(C).run()
    diagonal = snf.diagonal
    keep = [i for i in range(k) if i >= snf.rank or diagonal[i] != 1]
    invariants = tuple(diagonal[i] if i < snf.rank else 0 for i in keep)
    free_rank = sum(1 for d in invariants if d == 0)
    if free_rank:
        raise LatticeError(f"{M.label}: H^{degree} has a free part, which cannot happen for Z/2")
    basis = mat_mul(K, snf.U_inv[:, keep])
    coordinate_map = mat_mul(snf.U, L)[keep, :]
    group = FinAbGroup(invariants, 0, basis, M, degree, coordinate_map, boundaries)
    logger.debug(f"H^{degree}({M.label}) = {group.describe()}")
    return group


@lru_cache(maxsize=512)
def cohomology(M: InvolutiveLattice, degree: int) -> FinAbGroup:
    """H^degree(Z/2, M) for degree 1 or 2 (cached per lattice object)."""
    if degree not in (1, 2):
        raise CocycleError(f"Unsupported cohomological degree: {degree}")
    return _quotient_group(M, degree)


def h1(M: InvolutiveLattice) -> FinAbGroup:
    """H^1 = Ker(1 + tau) / Im(tau - 1)."""
    return cohomology(M, 1)


def h2(M: InvolutiveLattice) -> FinAbGroup:
    """H^2 = Ker(1 - tau) / Im(1 + tau)."""
    return cohomology(M, 2)


def tate_h0(M: InvolutiveLattice) -> FinAbGroup:
    """Tate H^0 = M^G / (1 + tau)M; for the group of order two it coincides with H^2."""
    return cohomology(M, 2)


@lru_cache(maxsize=256)
def tensor_square(M: InvolutiveLattice) -> InvolutiveLattice:
    return InvolutiveLattice(M.rank * M.rank, np.kron(M.tau, M.tau), f"{M.label}⊗{M.label}")


@lru_cache(maxsize=256)
def exterior_square(M: InvolutiveLattice) -> InvolutiveLattice:
    return InvolutiveLattice(len(wedge_pairs(M.rank)), wedge_square_matrix(M.tau), f"Λ²{M.label}")


def cup_h1_h1(x: CohClass, y: CohClass) -> CohClass:
    """
    Cup product H^1(M) x H^1(M) -> H^2(M⊗M).

    The representative is rep(x) ⊗ tau·rep(y); M⊗M carries tau⊗tau.
    """
    if x.ambient is not y.ambient:
        raise LatticeError(f"Cup product of classes on {x.ambient.label} and {y.ambient.label}")
    if x.degree != 1 or y.degree != 1:
        raise CocycleError("cup_h1_h1 takes two degree-1 classes")
    M = x.ambient
    rep = np.kron(x.rep, mat_mul(M.tau, y.rep))
    return CohClass(2, rep, tensor_square(M))


def pushforward(f: Any, c: CohClass, target: InvolutiveLattice) -> CohClass:
    """
    Image of a class under an equivariant map f: M -> N.

    Raises:
        EquivarianceError: if f·tau_M != tau_N·f
    """
    F = as_matrix(f, c.ambient.rank)
    if F.shape != (target.rank, c.ambient.rank):
        raise LatticeError(f"Map of shape {F.shape} from {c.ambient.label} to {target.label}")
    if not np.array_equal(mat_mul(F, c.ambient.tau), mat_mul(target.tau, F)):
        raise EquivarianceError(f"Map {c.ambient.label} -> {target.label} does not commute with the involutions")
    return CohClass(c.degree, mat_mul(F, c.rep), target)


def wedge_class(c: CohClass, M: InvolutiveLattice) -> CohClass:
    """Push a class on M⊗M down to Λ²M."""
    if c.ambient is not tensor_square(M):
        raise LatticeError(f"{c.ambient.label} is not the tensor square of {M.label}")
    return pushforward(wedge_quotient_matrix(M.rank), c, exterior_square(M))


# ---------------------------------------------------------------------------
# F2 linear algebra
# ---------------------------------------------------------------------------

def _f2_reduce(A: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    A = A.copy()
    m, n = A.shape
    pivot_cols: List[int] = []
    r = 0
    for c in range(n):
        pivot = next((rr for rr in range(r, m) if A[rr, c] == 1), None)
        if pivot is None:
            continue
        if pivot != r:
            A[[r, pivot]] = A[[pivot, r]]
        for rr in range(m):
            if rr != r and A[rr, c] == 1:
                A[rr, :] ^= A[r, :]
        pivot_cols.append(c)
        r += 1
        if r == m:
            break
    return A, pivot_cols


def _f2_array(rows: Sequence[Sequence[int]], n_cols: int = 0) -> np.ndarray:
    if len(rows) == 0:
        return np.zeros((0, n_cols), dtype=np.uint8)
    return np.array([[int(v) % 2 for v in row] for row in rows], dtype=np.uint8)


def f2_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over F2 of the given row vectors."""
    A = _f2_array(rows)
    if A.size == 0:
        return 0
    _, pivots = _f2_reduce(A)
    return len(pivots)


def solve_f2(A: Sequence[Sequence[int]], b: Sequence[int]) -> Optional[np.ndarray]:
    """Solve A x = b over F2; returns one solution (free variables 0) or None."""
    A = _f2_array(A)
    b = np.array([int(v) % 2 for v in b], dtype=np.uint8)
    m = len(b)
    n = A.shape[1] if A.size else 0
    if m == 0:
        return np.zeros(n, dtype=np.uint8)
    Ab, pivots = _f2_reduce(np.concatenate([A.reshape(m, n), b[:, None]], axis=1))
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.uint8)
    for row, c in enumerate(pivots):
        x[c] = Ab[row, n]
    return x


# ---------------------------------------------------------------------------
# Cup-wedge injectivity
# ---------------------------------------------------------------------------

@dataclass
class CupWedgeReport:
    lattice: str
    h1_dimension: int
    images: Dict[Tuple[int, int], Tuple[int, ...]]
    rank: int
    passed: bool

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lattice': self.lattice,
            'h1_dimension': self.h1_dimension,
            'wedge_images': {f"{a}^{b}": list(v) for (a, b), v in self.images.items()},
            'rank': self.rank,
            'passed': self.passed,
        }


def check_cup_wedge_injective(M: InvolutiveLattice) -> CupWedgeReport:
    """
    Check that H^1(M) ∧ H^1(M) -> H^2(Λ²M), [w1]∧[w2] -> [w1 ∧ tau w2], has trivial kernel.

    The source is an F2 vector space with basis b_a∧b_b (a < b), so the map is
    injective iff the images of those basis wedges are linearly independent.
    """
    H1 = h1(M)
    units = [H1.unit(i) for i in range(H1.dimension)]
    images: Dict[Tuple[int, int], Tuple[int, ...]] = {}
    for a, b in itertools.combinations(range(H1.dimension), 2):
        images[(a, b)] = wedge_class(cup_h1_h1(units[a], units[b]), M).coordinates()
    rank = f2_rank(list(images.values()))
    passed = rank == len(images)
    if not passed:
        logger.warning(f"Cup-wedge map on {M.label} has a kernel (rank {rank} < {len(images)})")
    return CupWedgeReport(M.label, H1.dimension, images, rank, passed)
