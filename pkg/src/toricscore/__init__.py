"""Exact polymology products on toric varieties and their complete intersections."""

__version__ = "0.1.0"

from toricscore.errors import (
    ArityError,
    ClassCompatibilityError,
    ClassGroupTorsionError,
    ClassMismatchError,
    DegenerateDeformationError,
    DivisibilityError,
    FanError,
    HypothesisError,
    NonConstantQuotientError,
    NotBlockCompleteError,
    ProblemParseError,
    ToricScoreError,
    VariableMismatchError,
)
from toricscore.polynomial import Polynomial, poly_exact_div, poly_mul
from toricscore.toric import (
    Fan,
    ToricVariety,
    class_group,
    hirzebruch,
    intersection_number,
    primitive_collections,
    product_of_projective_spaces,
    projective_space,
    validate_fan,
)
from toricscore.polymology import (
    DeformedEuler,
    eval_top,
    product_V,
    quotient_dims,
    sr_ideal,
    undeformed_euler,
    validate_deformation,
)
from toricscore.score import (
    CompleteIntersectionData,
    EvalReport,
    HypersurfaceData,
    complete_intersection,
    default_jacobian_J,
    extract_gamma,
    restriction_consistency_check,
    score_product,
)

__all__ = [
    "ArityError",
    "ClassCompatibilityError",
    "ClassGroupTorsionError",
    "ClassMismatchError",
    "CompleteIntersectionData",
    "DeformedEuler",
    "DegenerateDeformationError",
    "DivisibilityError",
    "EvalReport",
    "Fan",
    "FanError",
    "HypersurfaceData",
    "HypothesisError",
    "NonConstantQuotientError",
    "NotBlockCompleteError",
    "Polynomial",
    "ProblemParseError",
    "ToricScoreError",
    "ToricVariety",
    "VariableMismatchError",
    "class_group",
    "complete_intersection",
    "default_jacobian_J",
    "eval_top",
    "extract_gamma",
    "hirzebruch",
    "intersection_number",
    "poly_exact_div",
    "poly_mul",
    "primitive_collections",
    "product_V",
    "product_of_projective_spaces",
    "projective_space",
    "quotient_dims",
    "restriction_consistency_check",
    "score_product",
    "sr_ideal",
    "undeformed_euler",
    "validate_deformation",
    "validate_fan",
]
