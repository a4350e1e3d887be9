"""Estimator-style wrappers: fit prepares the pushed kernel, transform applies it."""

from __future__ import annotations

from typing import Optional, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_exponent, check_functions, check_grid, check_is_fitted, check_mapping, check_positive_int
from .core import LatticeFunction, lp_norm, square_function
from .kernels import dyadic_decompose_kernel, named_kernel
from .operators import KINDS, average_weights, convolve_pushed, dyadic_grid, dyadic_weights, pointwise_sup, truncated_weights


class RadonOperator(BaseEstimator, TransformerMixin):
    """One operator at a single scale N (for ``dyadic-sum``, the scale index n).

    Parameters
    ----------
    mapping : PolynomialMapping, JSON dict, or text such as "x, x**2"
    kind : "average", "truncated" or "dyadic-sum"
    N : scale
    kernel : kernel name used by the singular kinds
    """

    def __init__(self, mapping="x, x**2", kind: str = "average", N: int = 8, kernel: str = "hilbert"):
        self.mapping = mapping
        self.kind = kind
        self.N = N
        self.kernel = kernel

    def _weights(self, P, N):
        if self.kind == "average":
            return average_weights(P, N)
        K = named_kernel(self.kernel, P.k)
        if self.kind == "truncated":
            return truncated_weights(P, K, N)
        return dyadic_weights(P, dyadic_decompose_kernel(K, max(N, 1)), N)

    def fit(self, X=None, y=None):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        self.mapping_ = check_mapping(self.mapping)
        N = check_positive_int(self.N, "N", minimum=0 if self.kind == "dyadic-sum" else 1)
        self.weights_ = self._weights(self.mapping_, N)
        return self

    def transform(self, X) -> list[LatticeFunction]:
        check_is_fitted(self, "weights_")
        return [convolve_pushed(f, self.weights_) for f in check_functions(X, self.mapping_.d0)]


class RadonMaximal(BaseEstimator, TransformerMixin):
    """Pointwise sup over a grid of scales; ``score`` returns the vector-valued norm ratio."""

    def __init__(self, mapping="x, x**2", kind: str = "average", grid: Optional[Sequence[int]] = None, kernel: str = "hilbert", p: float = 2.0):
        self.mapping = mapping
        self.kind = kind
        self.grid = grid
        self.kernel = kernel
        self.p = p

    def fit(self, X=None, y=None):
        grid = dyadic_grid(6) if self.grid is None else check_grid(self.grid)
        self.operators_ = [RadonOperator(self.mapping, self.kind, N, self.kernel).fit() for N in grid]
        self.mapping_ = self.operators_[0].mapping_
        return self

    def transform(self, X) -> list[LatticeFunction]:
        check_is_fitted(self, "operators_")
        members = check_functions(X, self.mapping_.d0)
        per_scale = [op.transform(members) for op in self.operators_]
        return [pointwise_sup([outs[t] for outs in per_scale]) for t in range(len(members))]

    def score(self, X, y=None) -> float:
        p = check_exponent(self.p)
        members = check_functions(X, self.mapping_.d0)
        denom = lp_norm(square_function(members), p)
        return lp_norm(square_function(self.transform(members)), p) / denom
