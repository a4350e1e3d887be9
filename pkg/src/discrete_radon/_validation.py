"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import math
import numbers
from typing import Iterable, Optional, Sequence

from sklearn.exceptions import NotFittedError

from .core import FunctionFamily, LatticeFunction, PolynomialMapping, parse_mapping


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_exponent(p, name: str = "p", allow_inf: bool = False, open_interval: bool = True) -> float:
    p = float(p)
    if math.isinf(p) and allow_inf:
        return p
    if not math.isfinite(p) or p < 1 or (open_interval and p == 1):
        raise ValueError(f"{name} must lie in {'(1' if open_interval else '[1'}, inf), got {p}")
    return p


def check_mapping(mapping) -> PolynomialMapping:
    if isinstance(mapping, PolynomialMapping):
        return mapping
    if isinstance(mapping, dict):
        return PolynomialMapping.from_json(mapping)
    if isinstance(mapping, str):
        return parse_mapping(mapping)
    raise TypeError(f"cannot interpret {type(mapping).__name__} as a polynomial mapping")


def check_functions(X, dim: Optional[int] = None) -> list[LatticeFunction]:
    """Accept one LatticeFunction, a FunctionFamily, or a sequence of them."""
    if isinstance(X, LatticeFunction):
        members = [X]
    elif isinstance(X, FunctionFamily):
        members = list(X)
    elif isinstance(X, Iterable) and not isinstance(X, (str, bytes, dict)):
        members = list(X)
    else:
        raise TypeError(f"expected lattice functions, got {type(X).__name__}")
    if not members:
        raise ValueError("no functions given")
    for f in members:
        if not isinstance(f, LatticeFunction):
            raise TypeError(f"expected LatticeFunction, got {type(f).__name__}")
        if dim is not None and f.dim != dim:
            raise ValueError(f"function lives on Z^{f.dim}, expected Z^{dim}")
    return members


def check_grid(grid: Sequence[int], name: str = "grid") -> list[int]:
    grid = [check_positive_int(v, f"{name} entry", minimum=0) for v in grid]
    if not grid:
        raise ValueError(f"{name} must be non-empty")
    return grid


def check_is_fitted(est, attr: str) -> None:
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted; call fit first")
