"""Discrete Radon averages, truncated singular transforms and their maximal functions.

All operators are evaluated by direct summation. Kernel weights are first pushed
through the mapping (so colliding images P(y) = P(y') are merged), then convolved
with ``f``; every output point accumulates its terms in the order in which the
image points first appear along a lexicographic sweep of y.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import FunctionFamily, LatticeFunction, PolynomialMapping, lp_norm, square_function
from .kernels import CZKernel, DyadicKernelPiece, averaging_kernel

KINDS = ("average", "truncated", "dyadic-sum")


@dataclass(frozen=True)
class OperatorResult:
    values: LatticeFunction
    N: int
    kind: str
    meta: dict = field(default_factory=dict)


def _check_dims(f: LatticeFunction, P: PolynomialMapping) -> None:
    if f.dim != P.d0:
        raise ValueError(f"function lives on Z^{f.dim} but the mapping takes values in Z^{P.d0}")


def push_weights(P: PolynomialMapping, ys: Sequence[tuple[int, ...]], weights: Sequence) -> dict:
    """Merge weights over colliding images P(y); keeps first-appearance order."""
    out: dict[tuple[int, ...], object] = {}
    for y, w in zip(ys, weights):
        z = P(y)
        if z in out:
            out[z] = out[z] + w
        else:
            out[z] = w
    return out


def convolve_pushed(f: LatticeFunction, pushed: dict) -> LatticeFunction:
    """g(x) = sum_z w(z) f(x - z) with z iterated in the order of ``pushed``."""
    acc: dict[tuple[int, ...], object] = {}
    support = list(f.data.items())
    for z, w in pushed.items():
        if w == 0:
            continue
        for u, v in support:
            x = tuple(a + b for a, b in zip(u, z))
            term = w * v
            if x in acc:
                acc[x] = acc[x] + term
            else:
                acc[x] = term
    return LatticeFunction(f.dim, acc)


def average_weights(P: PolynomialMapping, N: int) -> dict:
    """Pushforward of the averaging kernel K_N through L, with exact rational masses."""
    if N < 1:
        raise ValueError("N must be >= 1")
    ys = list(itertools.product(range(1, N + 1), repeat=P.k))
    mass = Fraction(1, N**P.k)
    return push_weights(P, ys, [mass] * len(ys))


def apply_average(f: LatticeFunction, P: PolynomialMapping, N: int) -> OperatorResult:
    """M_N f(x) = N^{-k} sum_{y in {1..N}^k} f(x - P(y))."""
    _check_dims(f, P)
    return OperatorResult(convolve_pushed(f, average_weights(P, N)), N, "average")


def truncated_weights(P: PolynomialMapping, K: CZKernel, N: int) -> dict:
    ys = [y for y in itertools.product(range(-N, N + 1), repeat=P.k) if any(y)]
    if not ys:
        return {}
    vals = K(np.array(ys, dtype=float))
    return push_weights(P, ys, [complex(v) if v.imag else float(v.real) for v in vals])


def apply_truncated(f: LatticeFunction, P: PolynomialMapping, K: CZKernel, N: int) -> OperatorResult:
    """T_N f(x) = sum over 0 < |y|_inf <= N of f(x - P(y)) K(y)."""
    _check_dims(f, P)
    if K.k != P.k:
        raise ValueError("kernel dimension differs from the mapping's source dimension")
    return OperatorResult(convolve_pushed(f, truncated_weights(P, K, N)), N, "truncated")


def dyadic_weights(P: PolynomialMapping, pieces: Sequence[DyadicKernelPiece], n: int) -> dict:
    if n < 0 or n >= len(pieces):
        raise ValueError(f"need pieces K_0..K_{n}, only {len(pieces)} available")
    reach = int(math.floor(pieces[n].support[1]))
    ys = [y for y in itertools.product(range(-reach, reach + 1), repeat=P.k) if any(y)]
    if not ys:
        return {}
    pts = np.array(ys, dtype=float)
    total = np.zeros(len(ys), dtype=complex)
    for piece in pieces[: n + 1]:
        total = total + piece(pts)
    return push_weights(P, ys, [complex(v) if v.imag else float(v.real) for v in total])


def apply_dyadic_singular_sum(
    f: LatticeFunction, P: PolynomialMapping, pieces: Sequence[DyadicKernelPiece], n: int
) -> OperatorResult:
    """sum_{j<=n} sum_y f(x - P(y)) K_j(y)."""
    _check_dims(f, P)
    return OperatorResult(convolve_pushed(f, dyadic_weights(P, pieces, n)), n, "dyadic-sum")


def apply(
    f: LatticeFunction,
    P: PolynomialMapping,
    kind: str,
    N: int,
    kernel: Optional[CZKernel] = None,
    pieces: Optional[Sequence[DyadicKernelPiece]] = None,
) -> OperatorResult:
    """Dispatch on ``kind``; for ``dyadic-sum`` the parameter is the scale index n."""
    if kind == "average":
        return apply_average(f, P, N)
    if kind == "truncated":
        if kernel is None:
            raise ValueError("truncated operator needs a kernel")
        return apply_truncated(f, P, kernel, N)
    if kind == "dyadic-sum":
        if pieces is None:
            raise ValueError("dyadic-sum operator needs kernel pieces")
        return apply_dyadic_singular_sum(f, P, pieces, N)
    raise ValueError(f"unknown operator kind {kind!r}; expected one of {KINDS}")


def dyadic_grid(nmax: int) -> list[int]:
    return [2**n for n in range(nmax + 1)]


def pointwise_sup(functions: Sequence[LatticeFunction]) -> LatticeFunction:
    acc: dict[tuple[int, ...], float] = {}
    dim = functions[0].dim
    for g in functions:
        for pt, v in g.data.items():
            a = abs(v)
            if a > acc.get(pt, 0):
                acc[pt] = a
    return LatticeFunction(dim, acc)


def maximal(
    f: LatticeFunction,
    P: PolynomialMapping,
    kind: str = "average",
    grid: Optional[Sequence[int]] = None,
    kernel: Optional[CZKernel] = None,
    pieces: Optional[Sequence[DyadicKernelPiece]] = None,
) -> LatticeFunction:
    """Pointwise sup over ``grid`` of |operator_N f|; default grid 1, 2, 4, ..., 2^6."""
    grid = dyadic_grid(6) if grid is None else list(grid)
    if not grid:
        raise ValueError("grid must be non-empty")
    return pointwise_sup([apply(f, P, kind, N, kernel, pieces).values for N in grid])


@dataclass(frozen=True)
class NormRatio:
    ratio: float
    per_N: list[tuple[int, float]]
    numerator: float
    denominator: float


def norm_ratio_experiment(
    family: FunctionFamily | Sequence[LatticeFunction],
    P: PolynomialMapping,
    kind: str,
    p: float,
    grid: Sequence[int],
    kernel: Optional[CZKernel] = None,
    pieces: Optional[Sequence[DyadicKernelPiece]] = None,
) -> NormRatio:
    """||(sum_t sup_N |R_N f_t|^2)^(1/2)||_p / ||(sum_t |f_t|^2)^(1/2)||_p."""
    members = list(family)
    if not members:
        raise ValueError("family must be non-empty")
    if not 1 < p < math.inf:
        raise ValueError("p must lie in (1, inf)")
    denom = lp_norm(square_function(members), p)
    if denom == 0:
        raise ZeroDivisionError("family has zero norm")
    outputs = [[apply(f, P, kind, N, kernel, pieces).values for N in grid] for f in members]
    sups = [pointwise_sup(outs) for outs in outputs]
    numer = lp_norm(square_function(sups), p)
    per_N = []
    for i, N in enumerate(grid):
        per_N.append((N, lp_norm(square_function([outs[i] for outs in outputs]), p) / denom))
    return NormRatio(numer / denom, per_N, numer, denom)


def cyclic_average_via_multiplier(f: LatticeFunction, P: PolynomialMapping, N: int, M: int) -> np.ndarray:
    """M_N f on (Z/MZ)^d computed through the multiplier m_N; P must be canonical.

    Uses the convention hat f(xi) = sum_x f(x) e(x . xi), so M_N f is the inverse
    transform of m_N hat f. Returns a dense complex array of shape (M,)*d.
    """
    from .expsums import multiplier_m_cyclic

    gamma = P.gamma
    if P.d0 != gamma.d or not np.array_equal(P.matrix, np.eye(gamma.d, dtype=np.int64)):
        raise ValueError("the cyclic cross-check is defined for the canonical mapping")
    dense = np.zeros((M,) * gamma.d, dtype=complex)
    for pt, v in f.data.items():
        dense[tuple(c % M for c in pt)] += complex(v)
    m = multiplier_m_cyclic(N, gamma, M)
    return np.fft.fftn(m * np.fft.ifftn(dense))


def to_cyclic(g: LatticeFunction, M: int) -> np.ndarray:
    dense = np.zeros((M,) * g.dim, dtype=complex)
    for pt, v in g.data.items():
        dense[tuple(c % M for c in pt)] += complex(v)
    return dense


def pullback_along_lift(f: LatticeFunction, P: PolynomialMapping, x: Sequence[int], points) -> LatticeFunction:
    """F^x(z) = f(x + L z) restricted to the given points of Z^d."""
    L = P.matrix
    out = {}
    for z in points:
        target = tuple(int(a) for a in np.asarray(x) + L @ np.asarray(z, dtype=np.int64))
        v = f[target]
        if v != 0:
            out[tuple(z)] = v
    return LatticeFunction(P.gamma.d, out)
