"""
Random CurveSpec corpus for the property suites.

Pieces are drawn from the preset involution library, attached along a random
tree of wedge gluings, and optionally closed up with the intra-curve gluing
cases. Total rank of the glued group stays within MAX_RANK.
"""

from __future__ import annotations

import logging
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .curve import BasePoint, CurveSpec, GluingPoint, NodeGluing, SmoothPiece, plan_gluings

logger = logging.getLogger(__name__)

MAX_RANK = 6
MAX_PIECES = 3
VIOLATOR_RATE = 0.1
EXTRA_GLUING_RATE = 0.5

# generators each gluing case adds to the glued group
GLUING_COST = {
    'wedge_real': 0,
    'wedge_pair': 1,
    'pair_identification': 2,
    'conjugate_identification': 1,
    'real_identification': 1,
}


def piece_rank(piece: SmoothPiece) -> int:
    """Rank of pi^ab of a preset piece."""
    if piece.kind == 'punctured':
        real = sum(1 for p in piece.punctures if p == 'real')
        return real - 1 + 2 * (len(piece.punctures) - real)
    return 2 * piece.genus


def _punctured(name: str, rng: np.random.Generator) -> SmoothPiece:
    m = int(rng.integers(1, 5))
    k = int(rng.integers(0, 2))
    return SmoothPiece(name, 'punctured', 0, m, ['real'] * m + ['pair'] * k)


PRESETS: Dict[str, Callable[[str, np.random.Generator], SmoothPiece]] = {
    'punctured': _punctured,
    'conic': lambda name, rng: SmoothPiece(name, 'proper', 0, 1),
    'elliptic': lambda name, rng: SmoothPiece(name, 'proper', 1, 2),
    'nonsplit': lambda name, rng: SmoothPiece(name, 'proper', 1, 1, model='nonsplit'),
    'mcurve': lambda name, rng: SmoothPiece(name, 'proper', 2, 3),
    'genus2': lambda name, rng: SmoothPiece(name, 'proper', 2, 1),
}


def pointless_conic(name: str) -> SmoothPiece:
    return SmoothPiece(name, 'proper', 0, 0)


def _draw_piece(name: str, rng: np.random.Generator, budget: int) -> Optional[SmoothPiece]:
    kinds = list(PRESETS)
    for _ in range(8):
        kind = kinds[int(rng.integers(len(kinds)))]
        piece = PRESETS[kind](f"{kind}{name}", rng)
        if piece_rank(piece) <= budget:
            return piece
    return None


def _real_point(piece: SmoothPiece, rng: np.random.Generator) -> GluingPoint:
    names = piece.component_names
    return GluingPoint(piece.name, True, names[int(rng.integers(len(names)))])


def _pair_point(piece: SmoothPiece, rng: np.random.Generator, conjugate: Optional[bool] = None) -> GluingPoint:
    rank = piece_rank(piece)
    path = None
    if rank and rng.random() < 0.3:
        path = tuple(int(x) for x in rng.integers(-1, 2, size=rank))
    if conjugate is None:
        conjugate = bool(rng.random() < 0.5)
    return GluingPoint(piece.name, False, None, path, conjugate)


class _Draft:
    """A spec under construction together with its remaining rank budget."""

    def __init__(self, name: str, rng: np.random.Generator):
        self.name = name
        self.rng = rng
        self.pieces: List[SmoothPiece] = []
        self.gluings: List[NodeGluing] = []
        self.budget = MAX_RANK

    def add_piece(self, piece: SmoothPiece) -> bool:
        """Attach a piece to a random earlier piece along a wedge gluing."""
        rank = piece_rank(piece)
        if not self.pieces:
            self.pieces.append(piece)
            self.budget -= rank
            return True
        parent = self.pieces[int(self.rng.integers(len(self.pieces)))]
        real = piece.has_real_points and parent.has_real_points and self.rng.random() < 0.6
        cost = rank + GLUING_COST['wedge_real' if real else 'wedge_pair']
        if cost > self.budget:
            return False
        if real:
            points = (_real_point(parent, self.rng), _real_point(piece, self.rng))
        else:
            points = (_pair_point(parent, self.rng), _pair_point(piece, self.rng))
        self.pieces.append(piece)
        self.gluings.append(NodeGluing(points))
        self.budget -= cost
        return True

    def _real_labels(self) -> List[Tuple[SmoothPiece, str]]:
        return [(p, c) for p in self.pieces for c in p.component_names]

    def add_intra_gluing(self) -> Optional[str]:
        """One of the three intra-curve cases, if the budget allows; returns its name."""
        options = [op for op in ('pair_identification', 'conjugate_identification', 'real_identification')
                   if GLUING_COST[op] <= self.budget]
        labels = self._real_labels()
        if len(labels) < 2 and 'real_identification' in options:
            options.remove('real_identification')
        if len(self.pieces) < 2 and 'pair_identification' in options:
            options.remove('pair_identification')
        if not options:
            return None
        op = options[int(self.rng.integers(len(options)))]
        if op == 'real_identification':
            i, j = self.rng.choice(len(labels), size=2, replace=False)
            (p, c), (q, d) = labels[int(i)], labels[int(j)]
            points = (GluingPoint(p.name, True, c), GluingPoint(q.name, True, d))
        elif op == 'conjugate_identification':
            piece = self.pieces[int(self.rng.integers(len(self.pieces)))]
            point = _pair_point(piece, self.rng, conjugate=False)
            points = (point, GluingPoint(piece.name, False, None, point.path, True))
        else:
            i, j = self.rng.choice(len(self.pieces), size=2, replace=False)
            points = (_pair_point(self.pieces[int(i)], self.rng), _pair_point(self.pieces[int(j)], self.rng))
        self.gluings.append(NodeGluing(points))
        self.budget -= GLUING_COST[op]
        return op

    def finish(self, description: str) -> CurveSpec:
        base = self.pieces[0]
        return CurveSpec(self.name, self.pieces, self.gluings, BasePoint(base.name, base.component_names[0]), description)


def random_spec(name: str, rng: np.random.Generator, violator: bool = False) -> CurveSpec:
    """
    Draw one CurveSpec of total rank at most MAX_RANK.

    Args:
        violator: glue in a pointless conic, so that the hypothesis of the
            main theorem fails

    Returns:
        a CurveSpec whose gluings are all G-equivariant
    """
    draft = _Draft(name, rng)
    reserve = GLUING_COST['wedge_pair'] if violator else 0
    draft.budget -= reserve
    n_pieces = int(rng.integers(1, MAX_PIECES + 1))
    for i in range(n_pieces):
        piece = _draw_piece(str(i), rng, draft.budget)
        if piece is None:
            break
        draft.add_piece(piece)
    if not draft.pieces:
        draft.add_piece(PRESETS['conic']('conic0', rng))
    draft.budget += reserve
    if violator:
        draft.add_piece(pointless_conic(f"pointless{len(draft.pieces)}"))
    while rng.random() < EXTRA_GLUING_RATE:
        if draft.add_intra_gluing() is None:
            break
    kind = "hypothesis violator" if violator else "random gluing"
    return draft.finish(f"{kind}: {len(draft.pieces)} pieces, {len(draft.gluings)} gluings")


def spec_rank(spec: CurveSpec) -> int:
    """Rank of pi^ab of the glued curve, from the pieces and the planned gluing cases."""
    steps = plan_gluings(spec)
    return sum(piece_rank(p) for p in spec.pieces) + sum(GLUING_COST.get(s.operation, 0) for s in steps)


def generate_corpus(seed: int, size: int) -> List[CurveSpec]:
    """
    Deterministic corpus of `size` specs for a fixed seed.

    About one spec in ten is a hypothesis violator. Names are
    corpus_{seed}_{index:03d}.
    """
    if size < 1:
        raise ValueError(f"Corpus size must be at least 1, got {size}")
    rng = np.random.default_rng(seed)
    specs = []
    for i in range(size):
        violator = bool(rng.random() < VIOLATOR_RATE)
        specs.append(random_spec(f"corpus_{seed}_{i:03d}", rng, violator))
    logger.info(f"Generated {size} specs from seed {seed} ({sum(1 for s in specs if 'violator' in s.description)} violators)")
    return specs
