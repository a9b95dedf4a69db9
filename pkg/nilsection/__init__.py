"""
nilsection: the 2-nilpotent section obstruction for real curves.

Builds the Galois-equivariant class-2 quotient of the fundamental group of a
combinatorially described real curve, computes δ2 on H^1(G, pi^ab) and
compares its kernel with the classes of the real components.
"""

from .alb import AlbModel, build_alb, fixed_components_alb1, lifts_to_alb2, plot_data, reconcile_with_delta2
from .curve import (
    CurveSpec,
    DisconnectedSpecError,
    EquivariantPi1Data,
    GluingError,
    SpecError,
    build,
    bundled_specs,
    check_gluing_lemmas,
    load_spec,
    pi0_real,
    sym_pi0,
    verify_unit_adjunction,
)
from .nil2 import InvolutionError, Nil2Element, Nil2Error, Nil2Group
from .obstruction import (
    BasisUnavailableError,
    check_pushforward_injective,
    check_zarkhin_identity,
    delta2_lift,
    delta2_zarkhin,
    kernel_delta2,
    verify_main_theorem,
)
from .presets import CurveModelError
from .spec_generator import generate_corpus
from .zcoh import (
    CocycleError,
    CohClass,
    EquivarianceError,
    InvolutiveLattice,
    LatticeError,
    check_cup_wedge_injective,
    cup_h1_h1,
    h1,
    h2,
    smith_normal_form,
)

__version__ = "0.1.0"

__all__ = [
    "AlbModel",
    "BasisUnavailableError",
    "CocycleError",
    "CohClass",
    "CurveModelError",
    "CurveSpec",
    "DisconnectedSpecError",
    "EquivarianceError",
    "EquivariantPi1Data",
    "GluingError",
    "InvolutionError",
    "InvolutiveLattice",
    "LatticeError",
    "Nil2Element",
    "Nil2Error",
    "Nil2Group",
    "SpecError",
    "build",
    "build_alb",
    "bundled_specs",
    "check_cup_wedge_injective",
    "check_gluing_lemmas",
    "check_pushforward_injective",
    "check_zarkhin_identity",
    "cup_h1_h1",
    "delta2_lift",
    "delta2_zarkhin",
    "fixed_components_alb1",
    "generate_corpus",
    "h1",
    "h2",
    "kernel_delta2",
    "lifts_to_alb2",
    "load_spec",
    "pi0_real",
    "plot_data",
    "reconcile_with_delta2",
    "smith_normal_form",
    "sym_pi0",
    "verify_main_theorem",
    "verify_unit_adjunction",
]
