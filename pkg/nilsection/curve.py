"""
Combinatorial real curves

A CurveSpec is a list of smooth pieces (each with a standard or explicit
involution model), node gluings between G-stable point sets, and a marked
real base component. `build` assembles the equivariant class-2 data of the
glued curve: pi^ab and [pi]2/[pi]3 with their involutions, the real
components pi_0(X(R)) as a pointed set, and one exact cocycle per component.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .nil2 import (
    InvolutionError,
    Nil2Element,
    Nil2Error,
    Nil2Group,
    check_relations_reversed,
    embed,
    embed_wedge,
    evaluate,
    project,
)
from .presets import CurveModelError, PieceModel, build_model
from .zcoh import CohClass, InvolutiveLattice, f2_rank, h1, zeros

logger = logging.getLogger(__name__)

SPECS_DIR = Path(__file__).parent / 'specs'

PIECE_KINDS = ('proper', 'punctured')
PUNCTURE_TYPES = ('real', 'pair')

OPERATIONS = (
    'attach_base',
    'wedge_real',
    'wedge_pair',
    'pair_identification',
    'conjugate_identification',
    'real_identification',
)


class SpecError(ValueError):
    """Invalid CurveSpec document; messages carry the offending field path."""


class GluingError(SpecError):
    """A gluing is not G-equivariant or is degenerate."""


class DisconnectedSpecError(SpecError):
    """Some pieces are not reachable from the base piece through gluings."""


# ---------------------------------------------------------------------------
# CurveSpec schema
# ---------------------------------------------------------------------------

def _require(data: Dict[str, Any], key: str, where: str, kind: Union[type, Tuple[type, ...]]) -> Any:
    if key not in data:
        raise SpecError(f"{where}.{key}: missing required field")
    return _typed(data[key], f"{where}.{key}", kind)


def _typed(value: Any, where: str, kind: Union[type, Tuple[type, ...]]) -> Any:
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise SpecError(f"{where}: expected an integer, got {value!r}")
    if kind is not int and not isinstance(value, kind):
        names = kind.__name__ if isinstance(kind, type) else '/'.join(k.__name__ for k in kind)
        raise SpecError(f"{where}: expected {names}, got {type(value).__name__}")
    return value


@dataclass
class SmoothPiece:
    name: str
    kind: str = 'proper'
    genus: int = 0
    ovals: int = 1
    punctures: List[str] = field(default_factory=list)
    model: Union[str, Dict[str, Any]] = 'standard'

    @property
    def component_names(self) -> List[str]:
        prefix = 'arc' if self.kind == 'punctured' else 'oval'
        return [f"{prefix}{i}" for i in range(self.ovals)]

    @property
    def has_real_points(self) -> bool:
        return self.ovals > 0

    @classmethod
    def from_dict(cls, data: Any, where: str) -> "SmoothPiece":
        data = _typed(data, where, dict)
        name = _require(data, 'name', where, str)
        kind = data.get('kind', 'proper')
        if kind not in PIECE_KINDS:
            raise SpecError(f"{where}.kind: expected one of {PIECE_KINDS}, got {kind!r}")
        genus = _typed(data.get('genus', 0), f"{where}.genus", int)
        if genus < 0:
            raise SpecError(f"{where}.genus: must be nonnegative")
        punctures = _typed(data.get('punctures', []), f"{where}.punctures", list)
        for i, p in enumerate(punctures):
            if p not in PUNCTURE_TYPES:
                raise SpecError(f"{where}.punctures[{i}]: expected one of {PUNCTURE_TYPES}, got {p!r}")
        if kind == 'proper' and punctures:
            raise SpecError(f"{where}.punctures: proper pieces have no punctures")
        real = sum(1 for p in punctures if p == 'real')
        default_ovals = real if kind == 'punctured' else 1
        ovals = _typed(data.get('ovals', default_ovals), f"{where}.ovals", int)
        if ovals < 0:
            raise SpecError(f"{where}.ovals: must be nonnegative")
        if kind == 'punctured' and ovals != real:
            raise SpecError(f"{where}.ovals: a punctured piece has one arc per real puncture ({real}), got {ovals}")
        model = data.get('model', 'standard')
        _typed(model, f"{where}.model", (str, dict))
        return cls(name, kind, genus, ovals, list(punctures), model)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {'name': self.name, 'kind': self.kind, 'genus': self.genus, 'ovals': self.ovals}
        if self.punctures:
            out['punctures'] = list(self.punctures)
        if self.model != 'standard':
            out['model'] = self.model
        return out


@dataclass(frozen=True)
class GluingPoint:
    """One glued point: a real point on a component, or a point of a conjugate pair."""

    piece: str
    real: bool
    component: Optional[str] = None
    path: Optional[Tuple[int, ...]] = None
    conjugate: bool = False

    @classmethod
    def from_dict(cls, data: Any, where: str) -> "GluingPoint":
        data = _typed(data, where, dict)
        piece = _require(data, 'piece', where, str)
        real = _require(data, 'real', where, bool)
        component = data.get('component')
        if real:
            component = _require(data, 'component', where, str)
        elif component is not None:
            raise SpecError(f"{where}.component: only real points lie on a component")
        path = data.get('path')
        if path is not None:
            path = tuple(_typed(x, f"{where}.path[{i}]", int) for i, x in enumerate(_typed(path, f"{where}.path", list)))
        conjugate = _typed(data.get('conjugate', False), f"{where}.conjugate", bool)
        return cls(piece, real, component, path, conjugate)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {'piece': self.piece, 'real': self.real}
        if self.component is not None:
            out['component'] = self.component
        if self.path is not None:
            out['path'] = list(self.path)
        if self.conjugate:
            out['conjugate'] = True
        return out


@dataclass
class NodeGluing:
    points: Tuple[GluingPoint, GluingPoint]

    @classmethod
    def from_dict(cls, data: Any, where: str) -> "NodeGluing":
        data = _typed(data, where, dict)
        points = _require(data, 'points', where, list)
        if len(points) != 2:
            raise SpecError(f"{where}.points: a gluing identifies exactly two points, got {len(points)}")
        return cls(tuple(GluingPoint.from_dict(p, f"{where}.points[{i}]") for i, p in enumerate(points)))

    def to_dict(self) -> Dict[str, Any]:
        return {'points': [p.to_dict() for p in self.points]}


@dataclass
class BasePoint:
    piece: str
    component: str

    def to_dict(self) -> Dict[str, Any]:
        return {'piece': self.piece, 'component': self.component}


@dataclass
class CurveSpec:
    name: str
    pieces: List[SmoothPiece]
    gluings: List[NodeGluing]
    base: BasePoint
    description: str = ""

    def piece(self, name: str) -> SmoothPiece:
        for p in self.pieces:
            if p.name == name:
                return p
        raise SpecError(f"Unknown piece '{name}'")

    @classmethod
    def from_dict(cls, data: Any) -> "CurveSpec":
        data = _typed(data, 'spec', dict)
        name = _typed(data.get('name', 'unnamed'), 'name', str)
        description = _typed(data.get('description', ''), 'description', str)
        raw_pieces = _typed(data.get('pieces'), 'pieces', list) if 'pieces' in data else None
        if not raw_pieces:
            raise SpecError("pieces: at least one piece is required")
        pieces = [SmoothPiece.from_dict(p, f"pieces[{i}]") for i, p in enumerate(raw_pieces)]
        names = [p.name for p in pieces]
        for i, n in enumerate(names):
            if n in names[:i]:
                raise SpecError(f"pieces[{i}].name: duplicate piece name '{n}'")
        by_name = {p.name: p for p in pieces}

        gluings = [
            NodeGluing.from_dict(g, f"gluings[{i}]")
            for i, g in enumerate(_typed(data.get('gluings', []), 'gluings', list))
        ]
        for i, gl in enumerate(gluings):
            for j, point in enumerate(gl.points):
                where = f"gluings[{i}].points[{j}]"
                if point.piece not in by_name:
                    raise SpecError(f"{where}.piece: unknown piece '{point.piece}'")
                if point.real and point.component not in by_name[point.piece].component_names:
                    raise SpecError(f"{where}.component: '{point.component}' is not a real component of '{point.piece}'")

        raw_base = _require(data, 'base', 'spec', dict)
        base = BasePoint(_require(raw_base, 'piece', 'base', str), _require(raw_base, 'component', 'base', str))
        if base.piece not in by_name:
            raise SpecError(f"base.piece: unknown piece '{base.piece}'")
        if base.component not in by_name[base.piece].component_names:
            raise SpecError(f"base.component: '{base.component}' is not a real component of '{base.piece}'")
        return cls(name, pieces, gluings, base, description)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {'name': self.name}
        if self.description:
            out['description'] = self.description
        out['pieces'] = [p.to_dict() for p in self.pieces]
        out['gluings'] = [g.to_dict() for g in self.gluings]
        out['base'] = self.base.to_dict()
        return out


def bundled_specs() -> List[str]:
    """Names of the CurveSpec documents shipped with the package."""
    return sorted(p.stem for p in SPECS_DIR.glob('*.json'))


def load_spec(source: Union[str, Path]) -> CurveSpec:
    """
    Load a CurveSpec from a JSON file or a bundled spec name.

    Raises:
        SpecError: with line:column for JSON errors, field paths for schema errors
    """
    path = Path(source)
    if not path.exists() and str(source) in bundled_specs():
        path = SPECS_DIR / f"{source}.json"
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecError(f"{source}: cannot read spec ({e.strerror})") from None
    except UnicodeDecodeError as e:
        raise SpecError(f"{source}: not valid UTF-8 (byte {e.start})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    try:
        return CurveSpec.from_dict(data)
    except SpecError as e:
        raise type(e)(f"{source}: {e}") from None


def dump_spec(spec: CurveSpec, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
    return path


# ---------------------------------------------------------------------------
# Gluing plan
# ---------------------------------------------------------------------------

@dataclass
class GluingStep:
    operation: str
    gluing: Optional[int]
    piece: Optional[str]
    points: Tuple[Optional[GluingPoint], GluingPoint]


class _ComponentTracker:
    """Union-find over global component labels; roots keep insertion order."""

    def __init__(self):
        self.parent: Dict[str, str] = {}

    def add(self, label: str):
        self.parent[label] = label

    def find(self, label: str) -> str:
        while self.parent[label] != label:
            self.parent[label] = self.parent[self.parent[label]]
            label = self.parent[label]
        return label

    def merge(self, keep: str, other: str):
        self.parent[self.find(other)] = self.find(keep)

    def roots(self) -> List[str]:
        return [label for label in self.parent if self.parent[label] == label]

    def members(self, root: str) -> List[str]:
        return [label for label in self.parent if self.find(label) == root]


def _label(piece: str, component: str) -> str:
    return f"{piece}.{component}"


def _check_gluing(index: int, gluing: NodeGluing):
    p, q = gluing.points
    if p.real != q.real:
        raise GluingError(
            f"gluings[{index}]: a real point cannot be glued to a non-real point (not G-equivariant)"
        )
    if p == q:
        raise GluingError(f"gluings[{index}]: both points are the same point")


def plan_gluings(spec: CurveSpec) -> List[GluingStep]:
    """
    Order the build: base piece first, then gluings that attach new pieces
    (rescanned in list order until none applies), then intra gluings.
    """
    for i, gl in enumerate(spec.gluings):
        _check_gluing(i, gl)
    base_point = GluingPoint(spec.base.piece, True, spec.base.component)
    steps = [GluingStep('attach_base', None, spec.base.piece, (None, base_point))]
    attached = {spec.base.piece}
    used = set()
    changed = True
    while changed:
        changed = False
        for i, gl in enumerate(spec.gluings):
            if i in used:
                continue
            p, q = gl.points
            if (p.piece in attached) == (q.piece in attached):
                continue
            y, x = (p, q) if p.piece in attached else (q, p)
            steps.append(GluingStep('wedge_real' if y.real else 'wedge_pair', i, x.piece, (y, x)))
            attached.add(x.piece)
            used.add(i)
            changed = True

    missing = [p.name for p in spec.pieces if p.name not in attached]
    if missing:
        raise DisconnectedSpecError(f"{spec.name}: pieces {missing} are not connected to the base piece")

    for i, gl in enumerate(spec.gluings):
        if i in used:
            continue
        p, q = gl.points
        if p.real:
            op = 'real_identification'
        elif p.piece == q.piece and p.path == q.path and p.conjugate != q.conjugate:
            op = 'conjugate_identification'
        else:
            op = 'pair_identification'
        steps.append(GluingStep(op, i, None, (p, q)))
    return steps


@dataclass
class PointedSet:
    base: str
    elements: List[str]
    members: Dict[str, List[str]] = field(default_factory=dict)

    @classmethod
    def from_tracker(cls, base: str, tracker: _ComponentTracker) -> "PointedSet":
        roots = tracker.roots()
        elements = [base] + [r for r in roots if r != base]
        return cls(base, elements, {r: tracker.members(r) for r in elements})

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def non_base(self) -> List[str]:
        return [e for e in self.elements if e != self.base]

    def to_dict(self) -> Dict[str, Any]:
        return {'base': self.base, 'elements': list(self.elements), 'members': dict(self.members)}


def _track_components(spec: CurveSpec, steps: Sequence[GluingStep]) -> _ComponentTracker:
    tracker = _ComponentTracker()
    for step in steps:
        y, x = step.points
        if step.operation in ('attach_base', 'wedge_real', 'wedge_pair'):
            for comp in spec.piece(step.piece).component_names:
                tracker.add(_label(step.piece, comp))
            if step.operation == 'wedge_real':
                tracker.merge(_label(y.piece, y.component), _label(x.piece, x.component))
        elif step.operation == 'conjugate_identification':
            tracker.add(f"node{step.gluing}")
        elif step.operation == 'real_identification':
            tracker.merge(_label(y.piece, y.component), _label(x.piece, x.component))
    return tracker


def pi0_real(spec: CurveSpec) -> PointedSet:
    """Real components of the glued curve as a pointed set, base first."""
    steps = plan_gluings(spec)
    tracker = _track_components(spec, steps)
    base = tracker.find(_label(spec.base.piece, spec.base.component))
    return PointedSet.from_tracker(base, tracker)


# ---------------------------------------------------------------------------
# Hypothesis gate
# ---------------------------------------------------------------------------

@dataclass
class HypothesisReport:
    pieces_without_real_points: List[str] = field(default_factory=list)

    @property
    def met(self) -> bool:
        return not self.pieces_without_real_points

    @property
    def violations(self) -> List[str]:
        return [f"piece '{p}' has no real points" for p in self.pieces_without_real_points]

    def to_dict(self) -> Dict[str, Any]:
        return {'met': self.met, 'violations': self.violations}


def check_hypothesis(spec: CurveSpec) -> HypothesisReport:
    report = HypothesisReport([p.name for p in spec.pieces if not p.has_real_points])
    for v in report.violations:
        logger.warning(f"{spec.name}: {v}; the main theorem does not apply")
    return report


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

STEP_GENERATORS = {
    'wedge_pair': 1,
    'pair_identification': 2,
    'conjugate_identification': 1,
    'real_identification': 1,
}


class _Assembly:
    """Everything happens in the free class-2 group of rank N; generators are allocated in build order."""

    def __init__(self, N: int):
        self.N = N
        self.F = Nil2Group(N, label="free")
        self.images: List[Nil2Element] = [self.F.identity()] * N
        self.size = 0
        self.relations: List[np.ndarray] = []
        self.offsets: Dict[str, int] = {}
        self.models: Dict[str, PieceModel] = {}
        self.elements: Dict[str, Nil2Element] = {}
        self.tracker = _ComponentTracker()

    def allocate(self, k: int) -> int:
        offset = self.size
        self.size += k
        return offset

    def gen(self, i: int) -> Nil2Element:
        return self.F.generator(i)

    def tau(self, a: Nil2Element) -> Nil2Element:
        return evaluate(self.F, self.images, a)

    def embed(self, piece: str, a: Nil2Element) -> Nil2Element:
        model = self.models[piece]
        return embed(model.group, a, self.offsets[piece], self.N)

    def component(self, piece: str, component: str) -> Nil2Element:
        return self.elements[self.tracker.find(_label(piece, component))]

    def add_component(self, label: str, element: Nil2Element):
        self.tracker.add(label)
        self.elements[label] = element

    def path_element(self, point: GluingPoint) -> Nil2Element:
        model = self.models[point.piece]
        local = self._local_path(model, point)
        return self.embed(point.piece, local)

    @staticmethod
    def _local_path(model: PieceModel, point: GluingPoint) -> Nil2Element:
        G = model.group
        if point.path is None:
            local = G.identity()
        elif len(point.path) != G.n:
            raise GluingError(f"path {list(point.path)} on piece '{point.piece}' needs {G.n} coordinates")
        else:
            local = G.section(point.path)
        return G.apply_tau(local) if point.conjugate else local

    def prefix_lattice(self) -> InvolutiveLattice:
        """pi^ab of the space built so far; its generators are a prefix."""
        tau = zeros(self.size, self.size)
        for i in range(self.size):
            tau[:, i] = self.images[i].v[:self.size]
        return InvolutiveLattice(self.size, tau, "prefix")

    def h1_dimension(self) -> int:
        return h1(self.prefix_lattice()).dimension

    def attach(self, piece: str, model: PieceModel):
        self.models[piece] = model
        self.offsets[piece] = self.allocate(model.rank)
        for r in range(model.group.relations.shape[1]):
            self.relations.append(embed_wedge(model.group.relations[:, r], model.rank, self.offsets[piece], self.N))

    # -- steps ----------------------------------------------------------------

    def wedge_real(self, y: Optional[GluingPoint], x: GluingPoint, model: PieceModel):
        """tau(ι λ) = c_y^-1 ι(c_q tau_P(λ) c_q^-1) c_y; component C gets ι(c_C c_q^-1) c_y."""
        P = model.group
        c_y = self.F.identity() if y is None else self.component(y.piece, y.component)
        c_q = model.components[x.component]
        self.attach(x.piece, model)
        offset = self.offsets[x.piece]
        for i in range(P.n):
            local = P.product(c_q, P.tau_images[i], P.inverse(c_q))
            self.images[offset + i] = self.F.conjugate(c_y, self.embed(x.piece, local))
        for comp, c in model.components.items():
            label = _label(x.piece, comp)
            self.add_component(label, self.F.compose(self.embed(x.piece, P.compose(c, P.inverse(c_q))), c_y))
            if y is not None and comp == x.component:
                self.tracker.merge(_label(y.piece, y.component), label)

    def wedge_pair(self, y: GluingPoint, x: GluingPoint, model: PieceModel):
        """tau(ι λ) = ν^-1 ι(tau_P λ) ν, tau(ν) = ν^-1; component C gets A·ι(B^-1 c_C tau_P(B))·ν·tau(A)^-1."""
        P = model.group
        A = self.path_element(y)
        nu_index = self.allocate(1)
        nu = self.gen(nu_index)
        self.images[nu_index] = self.F.inverse(nu)
        self.attach(x.piece, model)
        offset = self.offsets[x.piece]
        for i in range(P.n):
            self.images[offset + i] = self.F.conjugate(nu, self.embed(x.piece, P.tau_images[i]))
        B = self._local_path(model, x)
        tau_A_inv = self.F.inverse(self.tau(A))
        for comp, c in model.components.items():
            X = P.product(P.inverse(B), c, P.apply_tau(B))
            element = self.F.product(A, self.embed(x.piece, X), nu, tau_A_inv)
            self.add_component(_label(x.piece, comp), element)

    def pair_identification(self):
        mu = self.allocate(2)
        self.images[mu] = self.gen(mu + 1)
        self.images[mu + 1] = self.gen(mu)

    def conjugate_identification(self, index: int):
        nu = self.allocate(1)
        self.images[nu] = self.F.inverse(self.gen(nu))
        self.add_component(f"node{index}", self.gen(nu))

    def real_identification(self, p: GluingPoint, q: GluingPoint):
        c1, c2 = self.component(p.piece, p.component), self.component(q.piece, q.component)
        rho = self.allocate(1)
        self.images[rho] = self.F.product(self.F.inverse(c1), self.gen(rho), c2)
        self.tracker.merge(_label(p.piece, p.component), _label(q.piece, q.component))


@dataclass
class EquivariantPi1Data:
    """Equivariant class-2 data of a based real curve."""

    spec: CurveSpec
    nil2: Nil2Group
    pi0: PointedSet
    kappa_elements: Dict[str, Nil2Element]
    build_log: pd.DataFrame
    hypothesis: HypothesisReport

    @property
    def abelianization(self) -> InvolutiveLattice:
        return self.nil2.abelianization

    @property
    def center(self) -> InvolutiveLattice:
        return self.nil2.center

    @property
    def pi0_real(self) -> PointedSet:
        return self.pi0

    def kappa(self, component: str) -> CohClass:
        return CohClass(1, self.kappa_elements[component].v, self.abelianization)

    @property
    def kappa_classes(self) -> List[CohClass]:
        return [self.kappa(c) for c in self.pi0.elements]

    def summary(self) -> Dict[str, Any]:
        return {
            'name': self.spec.name,
            'rank': self.nil2.n,
            'center_rank': self.nil2.center_rank,
            'h1': h1(self.abelianization).describe(),
            'components': len(self.pi0),
            'hypothesis_met': self.hypothesis.met,
        }


def _expected_h1_change(op: str, h1_piece: int, classes_differ: bool) -> int:
    if op in ('attach_base', 'wedge_real'):
        return h1_piece
    if op == 'wedge_pair':
        return h1_piece + 1
    if op == 'pair_identification':
        return 0
    if op == 'conjugate_identification':
        return 1
    return -1 if classes_differ else 0


def build(spec: CurveSpec) -> EquivariantPi1Data:
    """
    Assemble the equivariant class-2 data of a CurveSpec.

    Raises:
        DisconnectedSpecError: if some piece is not reachable from the base
        GluingError: for non-equivariant or degenerate gluings
        CurveModelError: if a piece has no model or the assembled involution is inconsistent
    """
    logger.info(f"Building {spec.name}: {len(spec.pieces)} pieces, {len(spec.gluings)} gluings")
    hypothesis = check_hypothesis(spec)
    steps = plan_gluings(spec)
    models = {
        p.name: build_model(p.name, p.kind, p.genus, p.ovals, p.punctures, p.model, f"pieces[{i}]")
        for i, p in enumerate(spec.pieces)
    }
    base_model = models[spec.base.piece]
    if spec.base.component not in base_model.components:
        raise SpecError(f"base.component: '{spec.base.component}' is not a real component")

    N = sum(m.rank for m in models.values()) + sum(STEP_GENERATORS.get(s.operation, 0) for s in steps)
    asm = _Assembly(N)
    rows = []
    for k, step in enumerate(steps):
        h1_before = asm.h1_dimension()
        comps_before = len(asm.tracker.roots())
        first_new = asm.size
        y, x = step.points
        h1_piece = 0
        classes_differ = False
        if step.operation in ('attach_base', 'wedge_real'):
            h1_piece = h1(models[x.piece].group.abelianization).dimension
            asm.wedge_real(y, x, models[x.piece])
        elif step.operation == 'wedge_pair':
            h1_piece = h1(models[x.piece].group.abelianization).dimension
            asm.wedge_pair(y, x, models[x.piece])
        elif step.operation == 'pair_identification':
            asm.pair_identification()
        elif step.operation == 'conjugate_identification':
            asm.conjugate_identification(step.gluing)
        else:
            M = asm.prefix_lattice()
            d1, d2 = asm.component(y.piece, y.component), asm.component(x.piece, x.component)
            classes_differ = not CohClass(1, (d1.v - d2.v)[:asm.size], M).is_zero()
            asm.real_identification(y, x)
        rows.append({
            'step': k,
            'operation': step.operation,
            'gluing': step.gluing,
            'piece': step.piece,
            'new_generators': list(range(first_new, asm.size)),
            'h1_before': h1_before,
            'h1_after': asm.h1_dimension(),
            'expected_h1_change': _expected_h1_change(step.operation, h1_piece, classes_differ),
            'components_before': comps_before,
            'components_after': len(asm.tracker.roots()),
        })
        logger.debug(f"{spec.name}: {step.operation} -> rank {asm.size}, dim H1 {rows[-1]['h1_after']}")

    group, shape = _finalize(spec.name, asm)
    base_label = asm.tracker.find(_label(spec.base.piece, spec.base.component))
    pi0 = PointedSet.from_tracker(base_label, asm.tracker)
    kappa = {}
    for root in pi0.elements:
        c = project(shape, asm.elements[root])
        if group.compose(c, group.apply_tau(c)) != group.identity():
            raise CurveModelError(f"{spec.name}: the section of component '{root}' is not exact")
        kappa[root] = c

    data = EquivariantPi1Data(spec, group, pi0, kappa, pd.DataFrame(rows), hypothesis)
    logger.info(f"Built {spec.name}: {data.summary()}")
    return data


def _finalize(name: str, asm: _Assembly) -> Tuple[Nil2Group, Nil2Group]:
    if asm.size != asm.N:
        raise CurveModelError(f"{name}: planned {asm.N} generators but allocated {asm.size}")
    try:
        shape = Nil2Group(asm.N, asm.relations, label=name)
        images = [project(shape, img) for img in asm.images]
        group = Nil2Group(asm.N, asm.relations, images, label=name)
    except (InvolutionError, Nil2Error) as e:
        raise CurveModelError(f"{name}: assembled involution is inconsistent: {e}") from None
    if not check_relations_reversed(group):
        raise CurveModelError(f"{name}: tau does not act by -1 on the surface relations")
    return group, shape


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass
class AdjunctionReport:
    """Outcome of checking that κ^ab is the unit of the free F2 vector space adjunction."""

    status: str
    base_is_zero: bool
    distinct_nonzero: bool
    is_basis: bool
    h1_dimension: int
    classes: Dict[str, Tuple[int, ...]]
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == 'pass'

    def to_dict(self) -> Dict[str, Any]:
        return {
            'status': self.status,
            'base_is_zero': self.base_is_zero,
            'distinct_nonzero': self.distinct_nonzero,
            'is_basis': self.is_basis,
            'h1_dimension': self.h1_dimension,
            'classes': {k: list(v) for k, v in self.classes.items()},
            'notes': list(self.notes),
        }


def verify_unit_adjunction(data: EquivariantPi1Data) -> AdjunctionReport:
    """
    Check (a) base -> 0, (b) non-base classes are distinct and nonzero,
    (c) they form an F2 basis of H^1(G, pi^ab).
    """
    H1 = h1(data.abelianization)
    classes = {c: data.kappa(c).coordinates() for c in data.pi0.elements}
    base_is_zero = not any(classes[data.pi0.base])
    others = [classes[c] for c in data.pi0.non_base]
    distinct_nonzero = all(any(v) for v in others) and len(set(others)) == len(others)
    is_basis = len(others) == H1.dimension and f2_rank(others) == H1.dimension
    notes = []
    if not data.hypothesis.met:
        status = 'skipped'
        notes = data.hypothesis.violations
    else:
        status = 'pass' if base_is_zero and distinct_nonzero and is_basis else 'fail'
        if status == 'fail':
            logger.warning(f"{data.spec.name}: kappa^ab is not the unit of the adjunction")
    return AdjunctionReport(status, base_is_zero, distinct_nonzero, is_basis, H1.dimension, classes, notes)


@dataclass
class SymPi0:
    """The free F2 vector space on pi_0(X(R)) minus the base, with its unit map."""

    basis: List[str]
    unit: Dict[str, Tuple[int, ...]]
    identification: List[Tuple[int, ...]]
    composite: Dict[str, Tuple[int, ...]]
    matches_kappa: bool

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dimension': self.dimension,
            'basis': list(self.basis),
            'unit': {k: list(v) for k, v in self.unit.items()},
            'composite_matches_kappa': self.matches_kappa,
        }


def sym_pi0(data: EquivariantPi1Data) -> SymPi0:
    """
    Free vector space on the non-base components; the composite of the unit with
    the identification b_i -> κ(b_i) is compared against κ^ab itself.
    """
    basis = data.pi0.non_base
    k = len(basis)
    unit = {}
    for c in data.pi0.elements:
        vec = [0] * k
        if c != data.pi0.base:
            vec[basis.index(c)] = 1
        unit[c] = tuple(vec)
    identification = [data.kappa(b).coordinates() for b in basis]
    dim = h1(data.abelianization).dimension
    composite = {}
    for c, vec in unit.items():
        image = [0] * dim
        for coeff, column in zip(vec, identification):
            if coeff:
                image = [(a + b) % 2 for a, b in zip(image, column)]
        composite[c] = tuple(image)
    matches = all(composite[c] == data.kappa(c).coordinates() for c in data.pi0.elements)
    return SymPi0(basis, unit, identification, composite, matches)


@dataclass
class GluingLemmaReport:
    table: pd.DataFrame
    passed: bool

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        return {'passed': self.passed, 'steps': self.table.to_dict(orient='records')}


def check_gluing_lemmas(data: EquivariantPi1Data) -> GluingLemmaReport:
    """Compare the H^1 change of every build step with the change the gluing lemmas predict."""
    log = data.build_log.copy()
    log['h1_change'] = log['h1_after'] - log['h1_before']
    log['passed'] = log['h1_change'] == log['expected_h1_change']
    table = log[['step', 'operation', 'gluing', 'h1_before', 'h1_after', 'expected_h1_change', 'passed']]
    passed = bool(table['passed'].all())
    if not passed:
        logger.warning(f"{data.spec.name}: a gluing step changed H1 against the lemma prediction")
    return GluingLemmaReport(table, passed)
