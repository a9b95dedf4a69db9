"""
Albanese approximations Alb1 and Alb2 as lattice quotients.

Alb1 = pi^ab \\ (pi^ab ⊗ R) is a torus; Alb2 = (pi/[pi]3) \\ ((pi^ab ⊕ center) ⊗ R)
is a nilmanifold with the lattice acting on the left by

    γ·(a, z) = (γ.v + a, γ.z + z + <γ.v, a>)

The real structure acts by a -> L·a on Alb1 and by

    g(a, z) = (L·a, tau_c·z + Q(a))

on Alb2, where Q is the real extension of the central part of the
substitution tau(s(a)); coordinates of fixed points lie in ½Z.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .curve import EquivariantPi1Data
from .nil2 import Nil2Element
from .obstruction import delta2_lift
from .zcoh import CohClass, as_vector, h1, identity, mat_mul, solve_integer, zeros

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 16
PLOT_DIMENSION_LIMIT = 4

Point = Tuple[Fraction, ...]


def _rational(values: Sequence[Any]) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = Fraction(v)
    return out


def _frac(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def _is_integral(values: Sequence[Fraction]) -> bool:
    return all(Fraction(v).denominator == 1 for v in values)


def _fmt(point: Sequence[Fraction]) -> str:
    return "(" + ", ".join(str(Fraction(v)) for v in point) + ")"


@dataclass
class AlbModel:
    """Fundamental-domain description of Alb1 (level 1) or Alb2 (level 2)."""

    level: int
    data: EquivariantPi1Data

    def __post_init__(self):
        if self.level not in (1, 2):
            raise ValueError(f"Unsupported Albanese level: {self.level}")

    @property
    def group(self):
        return self.data.nil2

    @property
    def linear_part(self) -> np.ndarray:
        return self.group.tau_ab

    @property
    def dimension(self) -> int:
        return self.group.n + (self.group.center_rank if self.level == 2 else 0)

    def pair(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return mat_mul(self.group.pairing, np.kron(u, v))

    def quadratic_part(self, a: Sequence[Any]) -> np.ndarray:
        """Q(a) = Σ a_j ζ_j + Σ (a_j² - a_j)/2·<w_j,w_j> + Σ_{j<k} a_j a_k <w_j,w_k>, tau(x_j) = (w_j, ζ_j)."""
        a = _rational(a)
        images = self.group.tau_images
        out = _rational([0] * self.group.center_rank)
        for j, img in enumerate(images):
            if a[j]:
                out = out + a[j] * img.z + (a[j] * a[j] - a[j]) / 2 * self.pair(img.v, img.v)
        for j, k in itertools.combinations(range(len(images)), 2):
            if a[j] and a[k]:
                out = out + a[j] * a[k] * self.pair(images[j].v, images[k].v)
        return out

    def split(self, point: Sequence[Any]) -> Tuple[np.ndarray, np.ndarray]:
        point = _rational(point)
        n = self.group.n
        if len(point) != self.dimension:
            raise ValueError(f"Point of dimension {len(point)} in a model of dimension {self.dimension}")
        return point[:n], point[n:]

    def involution(self, point: Sequence[Any]) -> Point:
        a, z = self.split(point)
        La = mat_mul(self.linear_part, a)
        if self.level == 1:
            return tuple(La)
        return tuple(La) + tuple(mat_mul(self.group.tau_c, z) + self.quadratic_part(a))

    def act(self, element: Nil2Element, point: Sequence[Any]) -> Point:
        """Left action of a lattice element."""
        a, z = self.split(point)
        v = _rational(element.v)
        if self.level == 1:
            return tuple(v + a)
        return tuple(v + a) + tuple(_rational(element.z) + z + self.pair(v, a))

    def project(self, point: Sequence[Any]) -> Point:
        a, _ = self.split(point)
        return tuple(a)

    def check_model(self, rng: Optional[np.random.Generator] = None, samples: int = 20) -> bool:
        """Involutivity, covering and equivariance on random rational points."""
        rng = rng if rng is not None else np.random.default_rng(0)
        G = self.group
        for _ in range(samples):
            point = tuple(Fraction(int(p), int(q)) for p, q in zip(
                rng.integers(-6, 7, size=self.dimension), rng.integers(1, 5, size=self.dimension)
            ))
            image = self.involution(point)
            if self.involution(image) != point:
                logger.warning(f"{self.data.spec.name}: Alb{self.level} involution is not involutive at {_fmt(point)}")
                return False
            if self.level == 2:
                lower = AlbModel(1, self.data)
                if self.project(image) != lower.involution(self.project(point)):
                    logger.warning(f"{self.data.spec.name}: Alb2 involution does not cover Alb1 at {_fmt(point)}")
                    return False
            gamma = G.element((
                [int(x) for x in rng.integers(-2, 3, size=G.n)],
                [int(x) for x in rng.integers(-2, 3, size=G.center_rank)],
            ))
            tau_gamma = G.apply_tau(gamma)
            if self.involution(self.act(gamma, point)) != self.act(tau_gamma, image):
                logger.warning(f"{self.data.spec.name}: Alb{self.level} involution is not equivariant")
                return False
        return True


def build_alb(data: EquivariantPi1Data, level: int) -> AlbModel:
    model = AlbModel(level, data)
    logger.debug(f"{data.spec.name}: Alb{level} of dimension {model.dimension}")
    return model


@dataclass
class FixedComponent:
    level: int
    point: Point
    h1_class: CohClass
    translation: Tuple[int, ...]

    @property
    def label(self) -> str:
        return _fmt(self.point)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'level': self.level,
            'point': [str(v) for v in self.point],
            'h1_class': list(self.h1_class.coordinates()),
            'translation': list(self.translation),
        }


def _fixed_translation(model: AlbModel, a: np.ndarray) -> Optional[np.ndarray]:
    m = mat_mul(model.linear_part, a) - a
    if not _is_integral(m):
        return None
    return as_vector([int(v) for v in m])


def fixed_components_alb1(model: AlbModel) -> List[FixedComponent]:
    """
    Components of the fixed set of a -> L·a on the torus.

    A fixed point has L·a = a + m with m an integer 1-cocycle; points lie in the
    same component iff their cocycles agree in H^1. Every class is met by a
    point of {0, ½}^n, and the lexicographically smallest such point represents it.
    """
    if model.level != 1:
        raise ValueError("fixed_components_alb1 needs a level-1 model")
    M = model.data.abelianization
    n = M.rank
    found: Dict[Tuple[int, ...], FixedComponent] = {}
    if n <= ENUMERATION_LIMIT:
        candidates = (
            _rational([Fraction(b, 2) for b in bits]) for bits in itertools.product((0, 1), repeat=n)
        )
    else:
        candidates = (
            _rational([_frac(Fraction(-int(v), 2)) for v in x.rep]) for x in h1(M).elements()
        )
    for a in candidates:
        m = _fixed_translation(model, a)
        if m is None:
            continue
        cls = CohClass(1, m, M)
        key = cls.coordinates()
        if key not in found:
            found[key] = FixedComponent(1, tuple(a), cls, tuple(int(v) for v in m))
    components = sorted(found.values(), key=lambda fc: fc.point)
    logger.debug(f"{model.data.spec.name}: {len(components)} fixed components of Alb1")
    return components


@dataclass
class LiftResult:
    component: FixedComponent
    lifts: bool
    fiber_translation: Point
    witness: Optional[Point] = None
    translation: Optional[Point] = None

    def __bool__(self) -> bool:
        return self.lifts

    def to_dict(self) -> Dict[str, Any]:
        return {
            'component': self.component.label,
            'lifts': self.lifts,
            'witness': None if self.witness is None else [str(v) for v in self.witness],
            'translation': None if self.translation is None else [str(v) for v in self.translation],
        }


def lifts_to_alb2(model2: AlbModel, fc: FixedComponent) -> LiftResult:
    """
    Decide whether a fixed component of Alb1 meets the image of the fixed set of Alb2.

    Over a with L·a = a + m, the involution followed by s(-m) maps the fiber to
    itself by z -> tau_c·z + t with t = Q(a) - <m, a>, modulo the center lattice.
    (I + tau_c)·t is integral; a fixed point exists iff (I + tau_c)·k = (I + tau_c)·t
    has an integer solution k, and then z = (t - k)/2 is one.
    """
    if model2.level != 2:
        raise ValueError("lifts_to_alb2 needs a level-2 model")
    G = model2.group
    a = _rational(fc.point)
    m = _rational(fc.translation)
    t = model2.quadratic_part(a) - model2.pair(m, a)
    norm = identity(G.center_rank) + G.tau_c
    target = mat_mul(norm, t)
    if not _is_integral(target):
        raise ArithmeticError(f"{model2.data.spec.name}: fiber translation {_fmt(t)} breaks the denominator bound")
    k = solve_integer(norm, as_vector([int(v) for v in target]))
    zero_base = tuple(Fraction(0) for _ in range(G.n))
    if k is not None:
        witness = tuple(fc.point) + tuple((t - _rational(k)) / 2)
        return LiftResult(fc, True, tuple(t), witness=witness)
    translation = zero_base + tuple(_frac(v) for v in t)
    return LiftResult(fc, False, tuple(t), translation=translation)


@dataclass
class ReconcileReport:
    table: pd.DataFrame
    passed: bool
    component_count_matches: bool

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            'passed': self.passed,
            'component_count_matches_h1': self.component_count_matches,
            'components': self.table.to_dict(orient='records'),
        }


def reconcile_with_delta2(data: EquivariantPi1Data, model1: AlbModel, model2: AlbModel) -> ReconcileReport:
    """Component by component: lifts to Alb2 iff the H^1 class lies in Ker δ2."""
    components = fixed_components_alb1(model1)
    rows = []
    for fc in components:
        result = lifts_to_alb2(model2, fc)
        in_kernel = delta2_lift(data, fc.h1_class).is_zero()
        rows.append({
            'component': fc.label,
            'h1_class': list(fc.h1_class.coordinates()),
            'lifts': result.lifts,
            'in_kernel': in_kernel,
            'agree': result.lifts == in_kernel,
            'witness': None if result.witness is None else _fmt(result.witness),
            'translation': None if result.translation is None else _fmt(result.translation),
        })
    table = pd.DataFrame(rows, columns=['component', 'h1_class', 'lifts', 'in_kernel', 'agree', 'witness', 'translation'])
    count_matches = len(components) == h1(data.abelianization).order
    passed = bool(table['agree'].all()) and count_matches
    if not passed:
        logger.warning(f"{data.spec.name}: Alb2 lifting disagrees with Ker δ2")
    return ReconcileReport(table, passed, count_matches)


def plot_data(model: AlbModel) -> Dict[str, Any]:
    """
    Unit-cube fundamental domain, the affine identification of each lattice
    generator, and the fixed points (level 1) or lift witnesses (level 2).
    """
    G = model.group
    dim = model.dimension
    vertices = [list(v) for v in itertools.product((0, 1), repeat=dim)] if dim <= PLOT_DIMENSION_LIMIT else []
    edges = [
        [i, j] for i, j in itertools.combinations(range(len(vertices)), 2)
        if sum(a != b for a, b in zip(vertices[i], vertices[j])) == 1
    ]
    identifications = []
    generators = [G.generator(i) for i in range(G.n)]
    if model.level == 2:
        generators += [G.central(row) for row in identity(G.center_rank)]
    for gen in generators:
        shear = zeros(dim, dim)
        if model.level == 2:
            for j in range(G.n):
                e = zeros(G.n)
                e[j] = 1
                shear[G.n:, j] = model.pair(gen.v, e)
        identifications.append({
            'generator': gen.to_dict(),
            'linear': (identity(dim) + shear).tolist(),
            'translation': list(gen.v) + (list(gen.z) if model.level == 2 else []),
        })
    lower = model if model.level == 1 else AlbModel(1, model.data)
    components = fixed_components_alb1(lower)
    if model.level == 1:
        points = [{'point': [str(v) for v in fc.point], 'h1_class': list(fc.h1_class.coordinates())} for fc in components]
    else:
        points = [lifts_to_alb2(model, fc).to_dict() for fc in components]
    return {
        'level': model.level,
        'dimension': dim,
        'vertices': vertices,
        'edges': edges,
        'identifications': identifications,
        'fixed_points': points,
    }
