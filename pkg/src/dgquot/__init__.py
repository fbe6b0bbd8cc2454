"""Exact finite-window models of the dg Lie algebra controlling graded submodules.

Everything is computed over the rationals or a prime field; no floating point
enters any certificate.
"""

from .dgla import (
    ClassicalPoint,
    DgLieElement,
    StretchDgLie,
    axiom_suite,
    build_ambient,
    classical_point_from_submodule,
    project_window,
    rank_locus_predicates,
    tangent_cohomology,
)
from .exact import GF, QQ, ContractError, ExactMatrix
from .graded import (
    GradedModule,
    GradedRing,
    HilbertData,
    SubmodulePoint,
    build_polynomial_ring,
    free_module,
    generated_submodule,
    hom_quotient_oracle,
)
from .instance import Instance, line_point_instance, plane_point_instance, polynomial_instance
from .koszul import CdgaPresentation, check_d_squared, emit_cdga, tower_morphism

__version__ = "0.1.0"

__all__ = [
    "GF",
    "QQ",
    "CdgaPresentation",
    "ClassicalPoint",
    "ContractError",
    "DgLieElement",
    "ExactMatrix",
    "GradedModule",
    "GradedRing",
    "HilbertData",
    "Instance",
    "StretchDgLie",
    "SubmodulePoint",
    "axiom_suite",
    "build_ambient",
    "build_polynomial_ring",
    "check_d_squared",
    "classical_point_from_submodule",
    "emit_cdga",
    "free_module",
    "generated_submodule",
    "hom_quotient_oracle",
    "line_point_instance",
    "plane_point_instance",
    "polynomial_instance",
    "project_window",
    "rank_locus_predicates",
    "tangent_cohomology",
    "tower_morphism",
]
