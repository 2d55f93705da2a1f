"""Decide whether a constant or left-invariant connection is a Levi-Civita connection."""
from .connection import ConstantConnection, MetricField, christoffels_from_metric, spread_metric
from .dim2 import classify_dim2, so_form_for
from .errors import CapacityError, InvalidInputError, NotSupportedError, SingularMetricError, TorsionError
from .lie_group import InvariantConnection, LieAlgebraStructure, levi_civita_invariant
from .linalg import DEFAULT_TOL, MatrixSubspace, Tolerances, mat_exp
from .solver import TOOL_VERSION, Verdict, analyze, analyze_lg, extendable_with, obstruction_space
from .two_forms import PolyTwoForm, exterior_derivative_max_coeff
from .verify import VerifyReport, sample_condition_group, sample_condition_rn, verify_metric

__version__ = TOOL_VERSION

__all__ = [
    "CapacityError",
    "ConstantConnection",
    "DEFAULT_TOL",
    "InvalidInputError",
    "InvariantConnection",
    "LieAlgebraStructure",
    "MatrixSubspace",
    "MetricField",
    "NotSupportedError",
    "PolyTwoForm",
    "SingularMetricError",
    "Tolerances",
    "TorsionError",
    "Verdict",
    "VerifyReport",
    "analyze",
    "analyze_lg",
    "christoffels_from_metric",
    "classify_dim2",
    "exterior_derivative_max_coeff",
    "extendable_with",
    "levi_civita_invariant",
    "mat_exp",
    "obstruction_space",
    "sample_condition_group",
    "sample_condition_rn",
    "so_form_for",
    "spread_metric",
    "verify_metric",
]
