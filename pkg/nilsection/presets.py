"""
Standard involution models for smooth pieces.

Each model is a class-2 group with its real-structure involution, plus one
exact oval section c per real component (c ∘ tau(c) = 1), the first being
the local base component with c = 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .nil2 import (
    InvolutionError,
    Nil2Element,
    Nil2Error,
    Nil2Group,
    check_relations_reversed,
    involutive_lift,
    project,
    symplectic_class,
)
from .zcoh import LatticeError, as_matrix, identity, is_zero, solve_integer, wedge_index, wedge_pairs, zeros

logger = logging.getLogger(__name__)

MODEL_KINDS = ('standard', 'nonsplit')


class CurveModelError(ValueError):
    """A piece has no supported involution model, or its model is inconsistent."""


@dataclass
class PieceModel:
    """Equivariant class-2 data of one smooth piece."""

    name: str
    group: Nil2Group
    components: Dict[str, Nil2Element] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.group.n

    @property
    def has_real_points(self) -> bool:
        return bool(self.components)

    @property
    def base_component(self) -> Optional[str]:
        return next(iter(self.components), None)


def _free_element(n: int, v: Sequence[int], pairs: Optional[Dict[tuple, int]] = None) -> Nil2Element:
    z = zeros(len(wedge_pairs(n)))
    for (i, j), value in (pairs or {}).items():
        z[wedge_index(n)[(i, j)]] += value
    return Nil2Element(v, z)


def _unit(n: int, i: int, sign: int = 1) -> np.ndarray:
    v = zeros(n)
    v[i] = sign
    return v


def exact_section(G: Nil2Group, c: Nil2Element, label: str) -> Nil2Element:
    """
    Correct the central part of c so that c ∘ tau(c) = 1.

    Adding a central y changes c ∘ tau(c) by y + tau_c·y.
    """
    c = G.element(c)
    w = G.compose(c, G.apply_tau(c))
    if not is_zero(w.v):
        raise CurveModelError(f"{label}: oval class {list(c.v)} violates the cocycle condition")
    if is_zero(w.z):
        return c
    correction = solve_integer(identity(G.center_rank) + G.tau_c, -w.z)
    if correction is None:
        raise CurveModelError(f"{label}: oval section {c} cannot be made exact")
    return Nil2Element(c.v, c.z + correction)


def punctured_model(name: str, real_punctures: int, conjugate_pairs: int) -> PieceModel:
    """
    P^1 minus m real punctures and k conjugate pairs.

    Generators: loops l_1..l_{m-1} around real punctures (tau(l) = l^-1), then
    for each conjugate pair loops u, u' swapped by tau. Arc 0 is the base arc;
    arc j has section l_j.
    """
    m, k = real_punctures, conjugate_pairs
    if m < 1:
        raise CurveModelError(f"{name}: punctured pieces need at least one real puncture")
    if k < 0:
        raise CurveModelError(f"{name}: negative number of conjugate pairs")
    n = m - 1 + 2 * k
    G0 = Nil2Group(n, label=name)
    images: List[Nil2Element] = []
    for i in range(m - 1):
        images.append(G0.inverse(G0.generator(i)))
    for p in range(k):
        u = m - 1 + 2 * p
        images.append(G0.generator(u + 1))
        images.append(G0.generator(u))
    G = Nil2Group(n, tau_images=images, label=name)
    components = {"arc0": G.identity()}
    for j in range(1, m):
        components[f"arc{j}"] = exact_section(G, G.generator(j - 1), name)
    return PieceModel(name, G, components)


def standard_model(name: str, genus: int, ovals: int) -> PieceModel:
    """
    Smooth proper curve of genus g with r >= 1 ovals and g - r + 1 even.

    Generators, in order: c_1..c_{r-1}, l_1..l_{r-1}, then A, B, A', B' for
    each pair of handles swapped by tau. tau(l_k) = l_k^-1,
    tau(c_k) = l_k^-1 c_k l_k, A <-> A', B <-> B'. The surface relation is
    Σ c_k∧l_k + Σ (A∧B + B'∧A'). Oval k has section l_k.
    """
    g, r = genus, ovals
    if r < 1:
        raise CurveModelError(f"{name}: the standard model needs at least one oval")
    if g < r - 1 or (g - r + 1) % 2:
        raise CurveModelError(f"{name}: no standard model for genus {g} with {r} ovals (need g >= r-1, g-r+1 even)")
    n = 2 * g
    h = r - 1
    if n == 0:
        G = Nil2Group(0, label=name)
        return PieceModel(name, G, {"oval0": G.identity()})

    omega: Dict[tuple, int] = {}
    for k in range(h):
        omega[(k, h + k)] = 1
    for p in range((g - h) // 2):
        A, B, A2, B2 = (2 * h + 4 * p + t for t in range(4))
        omega[(A, B)] = 1
        omega[(A2, B2)] = -1
    relation = _free_element(n, zeros(n), omega).z

    F = Nil2Group(n, label=f"{name}-free")
    free_images: List[Nil2Element] = [F.identity()] * n
    for k in range(h):
        c, l = F.generator(k), F.generator(h + k)
        free_images[k] = F.conjugate(l, c)
        free_images[h + k] = F.inverse(l)
    for p in range((g - h) // 2):
        A, B, A2, B2 = (2 * h + 4 * p + t for t in range(4))
        free_images[A], free_images[A2] = F.generator(A2), F.generator(A)
        free_images[B], free_images[B2] = F.generator(B2), F.generator(B)

    quotient_shape = Nil2Group(n, [relation], label=name)
    images = [project(quotient_shape, img) for img in free_images]
    G = _lifted_group(name, n, [relation], images)
    components = {"oval0": G.identity()}
    for k in range(h):
        components[f"oval{k + 1}"] = exact_section(G, G.generator(h + k), name)
    return PieceModel(name, G, components)


def nonsplit_elliptic_model(name: str) -> PieceModel:
    """Genus 1 with one oval and tau = [[1, 1], [0, -1]]: a -> a, b -> a·b^-1."""
    images = [Nil2Element(_unit(2, 0), []), Nil2Element([1, -1], [])]
    relation = _free_element(2, zeros(2), {(0, 1): 1}).z
    G = _lifted_group(name, 2, [relation], images)
    return PieceModel(name, G, {"oval0": G.identity()})


def pointless_conic_model(name: str) -> PieceModel:
    return PieceModel(name, Nil2Group(0, label=name), {})


def _int_list(value: Any, n: int, where: str) -> List[int]:
    if not isinstance(value, list) or len(value) != n or not all(isinstance(x, int) for x in value):
        raise CurveModelError(f"{where}: expected a list of {n} integers, got {value!r}")
    return value


def explicit_model(
    name: str,
    model: Dict[str, Any],
    kind: str = 'punctured',
    genus: int = 0,
    where: Optional[str] = None,
) -> PieceModel:
    """
    User-supplied model: {"tau": columns, "images": [{v, z}], "relations": [...], "ovals": [{v, z}]}.

    Central parts of images and oval sections are corrected automatically.
    A proper piece of genus g needs rank 2g; without explicit relations it
    gets the surface relation ω = Σ a_i∧b_i, which tau has to reverse.
    """
    where = where or f"{name}.model"
    if 'tau' not in model:
        raise CurveModelError(f"{where}.tau: explicit model needs a 'tau' matrix")
    try:
        tau = as_matrix(model['tau'])
    except (LatticeError, TypeError, ValueError) as e:
        raise CurveModelError(f"{where}.tau: {e}") from None
    n = tau.shape[0]
    if tau.shape[1] != n:
        raise CurveModelError(f"{where}.tau: expected a square matrix, got shape {tau.shape}")
    relations = model.get('relations') or []
    if kind == 'proper':
        if n != 2 * genus:
            raise CurveModelError(f"{where}.tau: rank {n}, but a proper piece of genus {genus} has rank {2 * genus}")
        if genus > 0 and not relations:
            relations = [list(symplectic_class(genus))]
        if genus > 0 and len(relations) != 1:
            raise CurveModelError(f"{where}.relations: a proper piece has exactly one surface relation")
    try:
        bare = Nil2Group(n, relations, label=name)
    except (Nil2Error, LatticeError, TypeError) as e:
        raise CurveModelError(f"{where}.relations: {e}") from None
    raw_images = model.get('images')
    if raw_images is None:
        raw_images = [{'v': list(tau[:, i]), 'z': [0] * bare.center_rank} for i in range(n)]
    if not isinstance(raw_images, list) or len(raw_images) != n:
        raise CurveModelError(f"{where}.images: expected {n} generator images")
    images = []
    for i, img in enumerate(raw_images):
        try:
            images.append(bare.element(img))
        except (Nil2Error, LatticeError, TypeError, ValueError) as e:
            raise CurveModelError(f"{where}.images[{i}]: {e}") from None
        if not np.array_equal(images[-1].v, tau[:, i]):
            raise CurveModelError(f"{where}.images[{i}]: image disagrees with column {i} of tau")
    G = _lifted_group(name, n, relations, images, where)

    ovals = model.get('ovals') or [{'v': [0] * n}]
    if not isinstance(ovals, list):
        raise CurveModelError(f"{where}.ovals: expected a list of sections")
    prefix = 'arc' if kind == 'punctured' else 'oval'
    components: Dict[str, Nil2Element] = {}
    for k, oval in enumerate(ovals):
        at = f"{where}.ovals[{k}]"
        if not isinstance(oval, dict) or 'v' not in oval:
            raise CurveModelError(f"{at}.v: every oval needs its class 'v'")
        v = _int_list(oval['v'], n, f"{at}.v")
        z = _int_list(oval.get('z') or [0] * G.center_rank, G.center_rank, f"{at}.z")
        c = G.element((v, z))
        if k == 0 and not is_zero(c.v):
            raise CurveModelError(f"{at}.v: the first oval is the local base and must have v = 0")
        components[f"{prefix}{k}"] = G.identity() if k == 0 else exact_section(G, c, at)
    return PieceModel(name, G, components)


def _lifted_group(
    name: str, n: int, relations: Sequence[Any], images: Sequence[Nil2Element], where: Optional[str] = None,
) -> Nil2Group:
    where = where or name
    try:
        G = involutive_lift(n, relations, images, label=name)
    except (InvolutionError, Nil2Error) as e:
        raise CurveModelError(f"{where}: {e}") from None
    if not check_relations_reversed(G):
        raise CurveModelError(f"{where}: tau must act by -1 on the surface relation")
    return G


def build_model(
    name: str,
    kind: str,
    genus: int,
    ovals: int,
    punctures: Sequence[str],
    model: Any = 'standard',
    where: Optional[str] = None,
) -> PieceModel:
    """
    Dispatch a piece description to its involution model.

    Args:
        kind: 'proper' or 'punctured'
        model: 'standard', 'nonsplit' or an explicit model dict
        where: field path of the piece, for error messages

    Raises:
        CurveModelError: for combinations without a supported model
    """
    if isinstance(model, dict):
        where = where or name
        piece = explicit_model(name, model, kind, genus, f"{where}.model")
        if len(piece.components) != ovals:
            raise CurveModelError(f"{where}.ovals: explicit model has {len(piece.components)} ovals, piece declares {ovals}")
        return piece
    if model not in MODEL_KINDS:
        raise CurveModelError(f"{name}: unknown model '{model}'")

    if kind == 'punctured':
        if genus != 0:
            raise CurveModelError(f"{name}: punctured pieces of positive genus are not supported")
        real = sum(1 for p in punctures if p == 'real')
        pairs = sum(1 for p in punctures if p == 'pair')
        return punctured_model(name, real, pairs)

    if model == 'nonsplit':
        if (genus, ovals) != (1, 1):
            raise CurveModelError(f"{name}: the non-split model exists for genus 1 with one oval only")
        return nonsplit_elliptic_model(name)
    if ovals == 0:
        if genus != 0:
            raise CurveModelError(f"{name}: pointless pieces of positive genus are not supported")
        return pointless_conic_model(name)
    return standard_model(name, genus, ovals)
