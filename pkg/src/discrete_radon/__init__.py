"""Discrete Radon operators along polynomial mappings, with the arithmetic and
analytic machinery used to study their maximal functions."""

from .core import (
    FunctionFamily,
    LatticeFunction,
    MultiIndexSet,
    PolynomialMapping,
    build_gamma,
    canonical_eval,
    lift,
    lp_norm,
    moment_gamma,
    parse_mapping,
)
from .estimators import RadonMaximal, RadonOperator
from .operators import apply, norm_ratio_experiment

__all__ = [
    "FunctionFamily",
    "LatticeFunction",
    "MultiIndexSet",
    "PolynomialMapping",
    "RadonMaximal",
    "RadonOperator",
    "apply",
    "build_gamma",
    "canonical_eval",
    "lift",
    "lp_norm",
    "moment_gamma",
    "norm_ratio_experiment",
    "parse_mapping",
]

__version__ = "0.1.0"
