"""
The 2-nilpotent section obstruction δ2: H^1(G, pi^ab) -> H^2(G, [pi]2/[pi]3).

Two independent routes:
  - lift: c(tau, tau) = s(γ) ∘ tau(s(γ)), a central element whose class is δ2(x)
  - Zarkhin: expand x in the κ^ab basis and sum the commutator-pushed cup
    products of pairs of basis classes
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .curve import EquivariantPi1Data, verify_unit_adjunction
from .zcoh import (
    CohClass,
    CocycleError,
    as_vector,
    cup_h1_h1,
    exterior_square,
    f2_rank,
    h1,
    h2,
    identity,
    mat_mul,
    pushforward,
    solve_f2,
    solve_integer,
    zeros,
)

logger = logging.getLogger(__name__)

VERDICT_PASS = 'pass'
VERDICT_FAIL = 'fail'
VERDICT_GATED = 'hypothesis not met'


class BasisUnavailableError(ValueError):
    """κ^ab is not a basis of H^1, so the Zarkhin route cannot expand classes."""


def _lift_cocycle(data: EquivariantPi1Data, x: CohClass) -> np.ndarray:
    if x.ambient is not data.abelianization or x.degree != 1:
        raise CocycleError(f"{x!r} is not a degree-1 class on {data.abelianization.label}")
    G = data.nil2
    gamma = G.section(x.rep)
    c = G.compose(gamma, G.apply_tau(gamma))
    if any(c.v):
        raise CocycleError(f"{x!r}: s(γ)∘tau(s(γ)) is not central")
    return c.z


def delta2_lift(data: EquivariantPi1Data, x: CohClass) -> CohClass:
    """
    δ2(x) as the class of c(tau, tau) = s(γ) ∘ tau(s(γ)) in H^2 of the center.

    The abelian part vanishes by the cocycle condition; the central part is
    fixed by tau_c, so it is a degree-2 cocycle.
    """
    return CohClass(2, _lift_cocycle(data, x), data.center)


def commutator_map(data: EquivariantPi1Data) -> np.ndarray:
    """Antisymmetrized pairing M⊗M -> center: u⊗v -> [s(u), s(v)]."""
    G = data.nil2
    n = G.n
    A = zeros(G.center_rank, n * n)
    for i in range(n):
        for j in range(n):
            A[:, i * n + j] = G.pairing[:, i * n + j] - G.pairing[:, j * n + i]
    return A


def commutator_cup(data: EquivariantPi1Data, x: CohClass, y: CohClass) -> CohClass:
    """[-,-]_*(x ∪ y)."""
    return pushforward(commutator_map(data), cup_h1_h1(x, y), data.center)


def kappa_basis(data: EquivariantPi1Data) -> List[CohClass]:
    report = verify_unit_adjunction(data)
    if not report.passed:
        raise BasisUnavailableError(
            f"{data.spec.name}: κ^ab is not a basis of H^1 (adjunction {report.status}); only the lift route is usable"
        )
    return [data.kappa(c) for c in data.pi0.non_base]


def delta2_zarkhin(data: EquivariantPi1Data, x: CohClass, basis: Optional[List[CohClass]] = None) -> CohClass:
    """
    δ2(x) = Σ_{i<j} [-,-]_*(κ_i ∪ κ_j) over the κ^ab basis classes in x.

    Realized classes are unobstructed, so the diagonal terms vanish.

    Raises:
        BasisUnavailableError: if κ^ab does not form a basis of H^1
    """
    basis = kappa_basis(data) if basis is None else basis
    columns = [b.coordinates() for b in basis]
    matrix = [[col[r] for col in columns] for r in range(len(x.coordinates()))]
    support = solve_f2(matrix, x.coordinates())
    if support is None:
        raise BasisUnavailableError(f"{x!r} is not in the span of the κ^ab classes")
    chosen = [basis[i] for i, bit in enumerate(support) if bit]
    total = CohClass(2, zeros(data.center.rank), data.center)
    for a, b in itertools.combinations(chosen, 2):
        total = total + commutator_cup(data, a, b)
    return total


def kernel_delta2(data: EquivariantPi1Data) -> List[CohClass]:
    """All H^1 classes with δ2 = 0, in enumeration order."""
    return [x for x in h1(data.abelianization).elements() if delta2_lift(data, x).is_zero()]


def solvability_oracle(data: EquivariantPi1Data, x: CohClass) -> bool:
    """x ∈ Ker δ2 iff z + tau_c·z = -c(tau, tau) has an integer solution."""
    c = _lift_cocycle(data, x)
    return solve_integer(identity(data.center.rank) + data.center.tau, -c) is not None


def check_zarkhin_identity(data: EquivariantPi1Data, x: CohClass, y: CohClass) -> bool:
    """δ2(x+y) - δ2(x) - δ2(y) = [-,-]_*(x ∪ y), on the lift route alone."""
    lhs = delta2_lift(data, x + y) - delta2_lift(data, x) - delta2_lift(data, y)
    return lhs.equals(commutator_cup(data, x, y))


def check_representative_independence(
    data: EquivariantPi1Data,
    x: CohClass,
    shifts: int = 10,
    rng: Optional[np.random.Generator] = None,
) -> bool:
    """δ2 is unchanged when rep(x) moves by (tau - 1)w for random integer w."""
    rng = rng if rng is not None else np.random.default_rng(0)
    M = data.abelianization
    reference = delta2_lift(data, x)
    for _ in range(shifts):
        w = as_vector([int(v) for v in rng.integers(-3, 4, size=M.rank)])
        shifted = CohClass(1, x.rep + mat_mul(M.tau - identity(M.rank), w), M)
        if not delta2_lift(data, shifted).equals(reference):
            logger.warning(f"{data.spec.name}: δ2 depends on the representative of {x!r}")
            return False
    return True


def _label(c: CohClass) -> str:
    return ''.join(str(v) for v in c.coordinates()) or '()'


@dataclass
class ObstructionReport:
    """Per-class δ2 table and the verdict on Ker δ2 = Image κ^ab."""

    name: str
    table: pd.DataFrame
    kernel: List[Tuple[int, ...]]
    kappa_image: List[Tuple[int, ...]]
    routes_agree: Optional[bool]
    verdict: str
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict != VERDICT_FAIL

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'verdict': self.verdict,
            'routes_agree': self.routes_agree,
            'kernel': [list(k) for k in self.kernel],
            'kappa_image': [list(k) for k in self.kappa_image],
            'classes': self.table.to_dict(orient='records'),
            'notes': list(self.notes),
        }


def verify_main_theorem(data: EquivariantPi1Data) -> ObstructionReport:
    """
    Compute δ2 on every H^1 class by both routes and compare Ker δ2 with Image κ^ab.

    When the hypothesis (every piece has real points) fails, the verdict is
    'hypothesis not met' but the table and both sets are still reported.
    """
    H1 = h1(data.abelianization)
    realized: Dict[Tuple[int, ...], List[str]] = {}
    for comp in data.pi0.elements:
        realized.setdefault(data.kappa(comp).coordinates(), []).append(comp)

    notes = []
    try:
        basis = kappa_basis(data)
    except BasisUnavailableError as e:
        basis = None
        notes.append(str(e))

    rows = []
    kernel = []
    routes_agree: Optional[bool] = True if basis is not None else None
    for x in H1.elements():
        lift = delta2_lift(data, x)
        zarkhin = delta2_zarkhin(data, x, basis) if basis is not None else None
        in_kernel = lift.is_zero()
        if in_kernel:
            kernel.append(x.coordinates())
        agree = None if zarkhin is None else lift.equals(zarkhin)
        if agree is False:
            routes_agree = False
        rows.append({
            'class': _label(x),
            'rep': [int(v) for v in x.rep],
            'delta2_lift': list(lift.coordinates()),
            'delta2_zarkhin': None if zarkhin is None else list(zarkhin.coordinates()),
            'routes_agree': agree,
            'in_kernel': in_kernel,
            'oracle': solvability_oracle(data, x),
            'realized_by': realized.get(x.coordinates(), []),
        })
        logger.debug(f"{data.spec.name}: δ2({_label(x)}) = {lift.coordinates()}")

    kappa_image = sorted(realized)
    if not data.hypothesis.met:
        verdict = VERDICT_GATED
        notes.extend(data.hypothesis.violations)
    elif sorted(kernel) == kappa_image and routes_agree is not False:
        verdict = VERDICT_PASS
    else:
        verdict = VERDICT_FAIL
        logger.warning(f"{data.spec.name}: Ker δ2 = {sorted(kernel)} but Image κ^ab = {kappa_image}")
    logger.info(f"{data.spec.name}: |Ker δ2| = {len(kernel)}, |Image κ^ab| = {len(kappa_image)}, verdict {verdict}")
    return ObstructionReport(data.spec.name, pd.DataFrame(rows), kernel, kappa_image, routes_agree, verdict, notes)


@dataclass
class PushforwardReport:
    dimension: int
    images: List[Tuple[int, ...]]
    rank: int
    passed: bool

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            'h2_dimension': self.dimension,
            'images': [list(v) for v in self.images],
            'rank': self.rank,
            'passed': self.passed,
        }


def check_pushforward_injective(data: EquivariantPi1Data) -> PushforwardReport:
    """
    [-,-]_*: H^2(Λ²pi^ab) -> H^2(center) has trivial kernel.

    The commutator map Λ²pi^ab -> center is the quotient by the relations.
    """
    source = exterior_square(data.abelianization)
    H2 = h2(source)
    images = [
        pushforward(data.nil2.quotient, H2.unit(i), data.center).coordinates() for i in range(H2.dimension)
    ]
    rank = f2_rank(images)
    passed = rank == H2.dimension
    if not passed:
        logger.warning(f"{data.spec.name}: [-,-]_* is not injective on H^2")
    return PushforwardReport(H2.dimension, images, rank, passed)
