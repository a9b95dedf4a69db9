"""
Class-2 nilpotent groups in normal-form coordinates.

An element of pi/[pi]_3 is written s(v)·z, where s(v) = x_1^{v_1} ... x_n^{v_n}
is the ordered word of the abelianized part v and z lies in the center
[pi]_2/[pi]_3. Multiplication is

    (u, z) ∘ (v, z') = (u + v, z + z' + <u, v>)

with the bilinear pairing <-,-> obtained by collecting ordered words.
Involutions are stored as generator images and applied by substitution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .zcoh import (
    InvolutiveLattice,
    LatticeError,
    SmithNormalForm,
    as_matrix,
    as_vector,
    identity,
    is_zero,
    mat_mul,
    solve_integer,
    wedge_index,
    wedge_pairs,
    wedge_square_matrix,
    zeros,
)

logger = logging.getLogger(__name__)


class Nil2Error(ValueError):
    """Malformed group data or elements from the wrong group."""


class InvolutionError(ValueError):
    """Generator images do not define an involutive automorphism."""


def bracket(i: int, j: int, n: int) -> np.ndarray:
    """[x_i, x_j] in Λ²Z^n: e_i∧e_j for i < j, its negative for i > j."""
    out = zeros(len(wedge_pairs(n)))
    if i < j:
        out[wedge_index(n)[(i, j)]] = 1
    elif i > j:
        out[wedge_index(n)[(j, i)]] = -1
    return out


@lru_cache(maxsize=None)
def free_pairing(n: int) -> np.ndarray:
    """
    Pairing matrix of the free class-2 group of rank n, acting on u⊗v (index i*n + j).

    Collecting s(u)·s(v) back into ordered form moves x_i^{v_i} left past every
    x_j^{u_j} with j > i, producing u_j v_i [x_j, x_i].
    """
    out = zeros(len(wedge_pairs(n)), n * n)
    for i in range(n):
        for j in range(i + 1, n):
            out[:, j * n + i] = bracket(j, i, n)
    return out


@dataclass(frozen=True, eq=False)
class Nil2Element:
    """Normal-form coordinates (v, z) of s(v)·z."""

    v: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", as_vector(self.v))
        object.__setattr__(self, "z", as_vector(self.z))

    def key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return tuple(int(x) for x in self.v), tuple(int(x) for x in self.z)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Nil2Element):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        v, z = self.key()
        return f"Nil2Element(v={list(v)}, z={list(z)})"

    def to_dict(self) -> Dict[str, List[int]]:
        v, z = self.key()
        return {'v': list(v), 'z': list(z)}


ElementLike = Union[Nil2Element, Tuple[Sequence[int], Sequence[int]], Dict[str, Sequence[int]]]


class Nil2Group:
    """
    The quotient of the free class-2 group of rank n by central relations.

    Args:
        n: rank of the abelianization
        relations: vectors in Λ²Z^n spanning a saturated sublattice
        tau_images: image of each generator under the involution (center coordinates)
        label: name used in reports
    """

    def __init__(
        self,
        n: int,
        relations: Optional[Sequence[Sequence[int]]] = None,
        tau_images: Optional[Sequence[ElementLike]] = None,
        label: str = "pi",
    ):
        if n < 0:
            raise Nil2Error(f"Negative rank: {n}")
        self.n = n
        self.label = label
        n_pairs = len(wedge_pairs(n))
        self.relations = as_matrix(relations if relations is not None else [], n_pairs).T
        if self.relations.shape[0] != n_pairs:
            raise Nil2Error(f"Relations must have length {n_pairs} for rank {n}")
        self.quotient, self.center_section = self._center_coordinates()
        self.center_rank = self.quotient.shape[0]
        self.pairing = mat_mul(self.quotient, free_pairing(n))

        if tau_images is None:
            tau_images = [self.generator(i) for i in range(n)]
        if len(tau_images) != n:
            raise InvolutionError(f"{label}: expected {n} generator images, got {len(tau_images)}")
        self.tau_images = [self.element(img) for img in tau_images]
        self.tau_ab = zeros(n, n)
        for i, img in enumerate(self.tau_images):
            self.tau_ab[:, i] = img.v
        self.tau_c = self.induced_center_map(self.tau_ab)

        self._check_involutive()
        self.abelianization = InvolutiveLattice(n, self.tau_ab, f"{label}^ab")
        self.center = InvolutiveLattice(self.center_rank, self.tau_c, f"[{label}]2/[{label}]3")

    def _center_coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        n_pairs = self.relations.shape[0]
        if self.relations.shape[1] == 0:
            return identity(n_pairs), identity(n_pairs)
        snf = SmithNormalForm(self.relations).run()
        if any(snf.D[i, i] != 1 for i in range(snf.rank)):
            raise Nil2Error(f"{self.label}: relations span a non-saturated sublattice (torsion in the center)")
        k = snf.rank
        return snf.U[k:, :], snf.U_inv[:, k:]

    def induced_center_map(self, A: Any) -> np.ndarray:
        """Center matrix induced by an endomorphism A of the abelianization."""
        L = wedge_square_matrix(A)
        if not is_zero(mat_mul(mat_mul(self.quotient, L), self.relations)):
            raise InvolutionError(f"{self.label}: the involution does not preserve the relations")
        return mat_mul(mat_mul(self.quotient, L), self.center_section)

    def _check_involutive(self):
        for i in range(self.n):
            twice = self.apply_tau(self.tau_images[i])
            if twice != self.generator(i):
                raise InvolutionError(
                    f"{self.label}: tau(tau(x_{i + 1})) = {twice}, expected the generator itself"
                )

    # -- elements -----------------------------------------------------------

    def element(self, a: ElementLike) -> Nil2Element:
        if isinstance(a, dict):
            a = Nil2Element(a.get('v', []), a.get('z', []))
        elif not isinstance(a, Nil2Element):
            a = Nil2Element(*a)
        if len(a.v) != self.n or len(a.z) != self.center_rank:
            raise Nil2Error(
                f"{self.label}: element has shape ({len(a.v)}, {len(a.z)}), expected ({self.n}, {self.center_rank})"
            )
        return a

    def identity(self) -> Nil2Element:
        return Nil2Element(zeros(self.n), zeros(self.center_rank))

    def generator(self, i: int) -> Nil2Element:
        v = zeros(self.n)
        v[i] = 1
        return Nil2Element(v, zeros(self.center_rank))

    def section(self, v: Sequence[int]) -> Nil2Element:
        return self.element((v, zeros(self.center_rank)))

    def central(self, z: Sequence[int]) -> Nil2Element:
        return self.element((zeros(self.n), z))

    # -- arithmetic ---------------------------------------------------------

    def pair(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return mat_mul(self.pairing, np.kron(as_vector(u), as_vector(v)))

    def compose(self, a: Nil2Element, b: Nil2Element) -> Nil2Element:
        a, b = self.element(a), self.element(b)
        return Nil2Element(a.v + b.v, a.z + b.z + self.pair(a.v, b.v))

    def inverse(self, a: Nil2Element) -> Nil2Element:
        a = self.element(a)
        return Nil2Element(-a.v, -a.z + self.pair(a.v, a.v))

    def power(self, a: Nil2Element, k: int) -> Nil2Element:
        a = self.element(a)
        return Nil2Element(k * a.v, k * a.z + (k * (k - 1) // 2) * self.pair(a.v, a.v))

    def commutator(self, a: Nil2Element, b: Nil2Element) -> np.ndarray:
        a, b = self.element(a), self.element(b)
        return self.pair(a.v, b.v) - self.pair(b.v, a.v)

    def conjugate(self, g: Nil2Element, a: Nil2Element) -> Nil2Element:
        """g⁻¹ a g."""
        return self.compose(self.compose(self.inverse(g), a), g)

    def product(self, *elements: Nil2Element) -> Nil2Element:
        out = self.identity()
        for a in elements:
            out = self.compose(out, a)
        return out

    def apply_tau(self, a: Nil2Element) -> Nil2Element:
        return evaluate(self, self.tau_images, a, source=self)

    def lift_center(self, z: Sequence[int]) -> np.ndarray:
        """Center coordinates -> a preimage in Λ²Z^n."""
        return mat_mul(self.center_section, as_vector(z))

    def __repr__(self) -> str:
        return f"Nil2Group({self.label}, n={self.n}, center_rank={self.center_rank})"


compose = Nil2Group.compose
inverse = Nil2Group.inverse
power = Nil2Group.power
commutator = Nil2Group.commutator
apply_tau = Nil2Group.apply_tau


def evaluate(
    G: Nil2Group,
    images: Sequence[Nil2Element],
    a: Nil2Element,
    source: Optional[Nil2Group] = None,
) -> Nil2Element:
    """
    Image of a under the homomorphism x_i -> images[i] into G.

    Without `source`, a.z is read in free Λ²Z^n coordinates; with it, in the
    center coordinates of `source`.
    """
    n = len(images)
    z_free = source.lift_center(a.z) if source is not None else as_vector(a.z)
    if len(a.v) != n or len(z_free) != len(wedge_pairs(n)):
        raise Nil2Error(f"Cannot evaluate an element of rank {len(a.v)} on {n} images")
    out = G.identity()
    for i, k in enumerate(a.v):
        if k:
            out = G.compose(out, G.power(images[i], int(k)))
    central = zeros(G.center_rank)
    for k, (i, j) in enumerate(wedge_pairs(n)):
        if z_free[k]:
            central = central + z_free[k] * G.commutator(images[i], images[j])
    return Nil2Element(out.v, out.z + central)


def project(G: Nil2Group, a: Nil2Element) -> Nil2Element:
    """Free coordinates (z in Λ²Z^n) -> coordinates in G."""
    return G.element((a.v, mat_mul(G.quotient, as_vector(a.z))))


def embed(G: Nil2Group, a: Nil2Element, offset: int, N: int) -> Nil2Element:
    """Shift the generator indices of a by `offset` inside the free group of rank N."""
    a = G.element(a)
    if offset < 0 or offset + G.n > N:
        raise Nil2Error(f"Cannot embed rank {G.n} at offset {offset} into rank {N}")
    v = zeros(N)
    v[offset:offset + G.n] = a.v
    z = zeros(len(wedge_pairs(N)))
    z_src = G.lift_center(a.z)
    index = wedge_index(N)
    for k, (i, j) in enumerate(wedge_pairs(G.n)):
        z[index[(i + offset, j + offset)]] += z_src[k]
    return Nil2Element(v, z)


def embed_wedge(w: Sequence[int], n: int, offset: int, N: int) -> np.ndarray:
    """Shift a vector of Λ²Z^n into Λ²Z^N."""
    out = zeros(len(wedge_pairs(N)))
    index = wedge_index(N)
    for k, (i, j) in enumerate(wedge_pairs(n)):
        out[index[(i + offset, j + offset)]] += w[k]
    return out


def check_relations_reversed(G: Nil2Group) -> bool:
    """True iff Λ²tau(r) = -r for every relation r (tau acts on H_2 by -1)."""
    L = wedge_square_matrix(G.tau_ab)
    for k in range(G.relations.shape[1]):
        r = G.relations[:, k]
        if not np.array_equal(mat_mul(L, r), -r):
            logger.warning(f"{G.label}: relation {list(r)} is not reversed by the involution")
            return False
    return True


def involutive_lift(
    n: int,
    relations: Optional[Sequence[Sequence[int]]],
    images: Sequence[ElementLike],
    label: str = "pi",
) -> Nil2Group:
    """
    Correct the central parts of generator images so that they define an involution.

    Writing Z for the c x n matrix of corrections, tau²(x_i) = x_i becomes the
    integer system Z·tau_ab + tau_c·Z = -Q, where column i of Q is the central
    part of tau²(x_i) before correction.

    Raises:
        InvolutionError: if the abelian part is not an involution or no lift exists
    """
    base = Nil2Group(n, relations, label=label)
    images = [base.element(img) for img in images]
    tau_ab = zeros(n, n)
    for i, img in enumerate(images):
        tau_ab[:, i] = img.v
    if not np.array_equal(mat_mul(tau_ab, tau_ab), identity(n)):
        raise InvolutionError(f"{label}: generator images do not square to the identity on the abelianization")
    tau_c = base.induced_center_map(tau_ab)
    c = base.center_rank

    Q = zeros(c, n)
    for i in range(n):
        once = evaluate(base, images, base.generator(i), source=base)
        twice = evaluate(base, images, once, source=base)
        Q[:, i] = twice.z
    if is_zero(Q):
        return Nil2Group(n, relations, images, label)

    system = np.kron(tau_ab.T, identity(c)) + np.kron(identity(n), tau_c)
    rhs = -Q.T.reshape(-1)
    solution = solve_integer(system, rhs)
    if solution is None:
        raise InvolutionError(f"{label}: generator images admit no involutive central correction")
    corrected = [
        Nil2Element(img.v, img.z + solution[i * c:(i + 1) * c]) for i, img in enumerate(images)
    ]
    logger.debug(f"{label}: central corrections {list(solution)}")
    return Nil2Group(n, relations, corrected, label)


def symplectic_class(g: int) -> np.ndarray:
    """ω = Σ e_i∧e_{g+i} in Λ²Z^{2g}."""
    out = zeros(len(wedge_pairs(2 * g)))
    for i in range(g):
        out[wedge_index(2 * g)[(i, g + i)]] = 1
    return out


def surface_center(g: int, tau: Optional[Any] = None) -> Tuple[InvolutiveLattice, np.ndarray]:
    """
    Center Λ²Z^{2g}/<ω> of a genus-g surface group and its quotient map.

    The involution defaults to diag(I_g, -I_g) on the basis a_1..a_g, b_1..b_g.
    """
    if g < 0:
        raise Nil2Error(f"Negative genus: {g}")
    if g == 0:
        return InvolutiveLattice(0, zeros(0, 0), "center(g=0)"), zeros(0, 0)
    if tau is None:
        tau = identity(2 * g)
        for i in range(g, 2 * g):
            tau[i, i] = -1
    tau = as_matrix(tau)
    if tau.shape != (2 * g, 2 * g):
        raise LatticeError(f"Surface involution must be {2 * g}x{2 * g}")
    images = [Nil2Element(tau[:, i], zeros(len(wedge_pairs(2 * g)) - 1)) for i in range(2 * g)]
    G = involutive_lift(2 * g, [symplectic_class(g)], images, label=f"surface(g={g})")
    if not check_relations_reversed(G):
        raise InvolutionError(f"surface(g={g}): the involution does not reverse ω")
    return G.center, G.quotient
