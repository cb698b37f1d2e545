"""Fredholm analysis of linear boundary-value problems ``y' + A y = f``, ``B y = c``."""

from .boundary import (
    BoundaryOperator,
    IntegralTerm,
    PointTerm,
    apply_boundary,
    caputo_derivative,
)
from .characteristic import (
    CharacteristicMatrix,
    FredholmReport,
    characteristic_matrix,
    fredholm_analysis,
    kernel_basis,
)
from .errors import BvpError
from .functions import DataFunction, evaluate_coefficient
from .fundamental import (
    FundamentalMatrix,
    derivative_of_column,
    evaluate_Y,
    fundamental_matrix,
    particular_solution,
)
from .problem import (
    Interval,
    ProblemSpec,
    SpaceParams,
    load_problem,
    parse_problem,
    serialize_problem,
)
from .sobolev import NormBreakdown, sobolev_slobodetsky_norm
from .solver import BvpSolution, Status, evaluate_solution, solve

__version__ = "0.1.0"

__all__ = [
    "BoundaryOperator",
    "BvpError",
    "BvpSolution",
    "CharacteristicMatrix",
    "DataFunction",
    "FredholmReport",
    "FundamentalMatrix",
    "IntegralTerm",
    "Interval",
    "NormBreakdown",
    "PointTerm",
    "ProblemSpec",
    "SpaceParams",
    "Status",
    "apply_boundary",
    "caputo_derivative",
    "characteristic_matrix",
    "derivative_of_column",
    "evaluate_Y",
    "evaluate_coefficient",
    "evaluate_solution",
    "fredholm_analysis",
    "fundamental_matrix",
    "kernel_basis",
    "load_problem",
    "parse_problem",
    "particular_solution",
    "serialize_problem",
    "sobolev_slobodetsky_norm",
    "solve",
]
