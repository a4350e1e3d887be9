"""Calderon-Zygmund kernels, smooth dyadic decomposition, and the averaging kernel."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .core import LatticeFunction, MultiIndexSet, PolynomialMapping, canonical_eval

ArrayFn = Callable[[np.ndarray], np.ndarray]


def _as_points(y, k: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if k == 1 and (y.ndim == 0 or y.shape[-1] != 1):
        y = y[..., None]
    if y.shape[-1] != k:
        raise ValueError(f"expected points in R^{k}, got shape {y.shape}")
    return y


@dataclass(frozen=True)
class CZKernel:
    """A kernel K on R^k minus the origin with an optional analytic gradient.

    ``func`` and ``grad`` act on arrays of shape (..., k) and return arrays of shape
    (...) and (..., k).
    """

    k: int
    func: ArrayFn
    grad: Optional[ArrayFn] = None
    cz_constant: float = 1.0
    name: str = "custom"

    def __call__(self, y) -> np.ndarray:
        return np.asarray(self.func(_as_points(y, self.k)), dtype=complex)

    def gradient(self, y) -> np.ndarray:
        y = _as_points(y, self.k)
        if self.grad is not None:
            return np.asarray(self.grad(y), dtype=complex)
        return finite_difference_gradient(self, y)


def finite_difference_gradient(K, y: np.ndarray) -> np.ndarray:
    """Central differences with a step proportional to |y|."""
    y = np.asarray(y, dtype=float)
    r = np.linalg.norm(y, axis=-1, keepdims=True)
    h = 1e-5 * np.maximum(r, 1.0)
    out = np.empty(y.shape, dtype=complex)
    for i in range(y.shape[-1]):
        e = np.zeros(y.shape[-1])
        e[i] = 1.0
        out[..., i] = (K(y + h * e) - K(y - h * e)) / (2 * h[..., 0])
    return out


def hilbert_kernel() -> CZKernel:
    def func(y):
        return 1.0 / y[..., 0]

    def grad(y):
        return -1.0 / y**2

    return CZKernel(1, func, grad, cz_constant=2.0, name="hilbert")


def riesz_kernel(i: int, k: int) -> CZKernel:
    """Riesz kernel y_i / |y|^(k+1); ``i`` is 1-based."""
    if not 1 <= i <= k:
        raise ValueError(f"Riesz index {i} out of range for k={k}")
    c = i - 1

    def func(y):
        r = np.linalg.norm(y, axis=-1)
        return y[..., c] / r ** (k + 1)

    def grad(y):
        r = np.linalg.norm(y, axis=-1)[..., None]
        g = -(k + 1) * y[..., c : c + 1] * y / r ** (k + 3)
        g[..., c] += 1.0 / r[..., 0] ** (k + 1)
        return g

    # |y|^k|K| <= 1 and |y|^{k+1}|grad K| <= k
    return CZKernel(k, func, grad, cz_constant=float(k + 1), name=f"riesz-{i}")


def named_kernel(name: str, k: int = 1) -> CZKernel:
    """Kernels selectable by name: ``hilbert`` or ``riesz-<i>``."""
    if name == "hilbert":
        if k != 1:
            raise ValueError("the Hilbert kernel lives in dimension k=1")
        return hilbert_kernel()
    if name.startswith("riesz-"):
        return riesz_kernel(int(name.split("-", 1)[1]), k)
    raise ValueError(f"unknown kernel {name!r}")


# ---------------------------------------------------------------------------
# radial quadrature on annuli

_GL_NODES = 16


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=None)
def _sphere_rule(k: int, m: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Nodes on S^{k-1} closed under antipodes, with weights summing to |S^{k-1}|."""
    if k == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    # half the nodes, then their exact negatives, so odd kernels cancel exactly
    phi = np.pi * np.arange(m) / m
    if k == 2:
        half = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        weights = np.full(m, np.pi / m)
    elif k == 3:
        t, wt = gauss_legendre(m)
        st = np.sqrt(1 - t**2)
        half = np.stack(
            [
                (st[:, None] * np.cos(phi)[None, :]).ravel(),
                (st[:, None] * np.sin(phi)[None, :]).ravel(),
                np.repeat(t, m),
            ],
            axis=-1,
        )
        weights = (wt[:, None] * np.full(m, np.pi / m)[None, :]).ravel()
    else:
        raise ValueError("annulus quadrature supports k <= 3 only")
    return np.concatenate([half, -half]), np.concatenate([weights, weights])


def spherical_mean(K, r: np.ndarray, k: int) -> np.ndarray:
    """A(r) = integral of K(r w) over the unit sphere, summed exactly per radius."""
    nodes, weights = _sphere_rule(k)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    vals = K(r[:, None, None] * nodes[None, :, :]) * weights[None, :]
    re = np.array([math.fsum(row) for row in vals.real])
    im = np.array([math.fsum(row) for row in vals.imag])
    return re + 1j * im


def radial_integral(K, k: int, r0: float, r1: float, tol: float = 1e-10, max_panels: int = 1 << 14) -> complex:
    """Integral of K over the annulus r0 <= |y| <= r1 via log-radial Gauss-Legendre."""
    if r1 <= r0:
        return 0.0 + 0.0j
    u0, u1 = math.log(r0), math.log(r1)
    x, w = gauss_legendre(_GL_NODES)

    def rule(panels: int) -> complex:
        edges = np.linspace(u0, u1, panels + 1)
        half = np.diff(edges) / 2
        mid = (edges[:-1] + edges[1:]) / 2
        u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        ww = (half[:, None] * w[None, :]).ravel()
        r = np.exp(u)
        vals = spherical_mean(K, r, k) * r**k * ww
        return complex(math.fsum(vals.real), math.fsum(vals.imag))

    panels = max(1, math.ceil((u1 - u0) / 0.25))
    prev = rule(panels)
    while panels < max_panels:
        panels *= 2
        cur = rule(panels)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    return prev


@dataclass(frozen=True)
class CZReport:
    size_ratio: float
    cancellation: float
    cz_constant: float

    @property
    def size_ok(self) -> bool:
        return self.size_ratio <= self.cz_constant * (1 + 1e-9)

    @property
    def cancellation_ok(self) -> bool:
        return self.cancellation <= self.cz_constant * (1 + 1e-9)

    @property
    def passed(self) -> bool:
        return self.size_ok and self.cancellation_ok


def sample_directions(k: int, count: int = 16) -> np.ndarray:
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        t = 2 * np.pi * (np.arange(count) + 0.5) / count
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    # Fibonacci sphere
    i = np.arange(count) + 0.5
    z = 1 - 2 * i / count
    phi = np.pi * (1 + 5**0.5) * i
    s = np.sqrt(1 - z**2)
    return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=-1)


def size_ratio(K, k: int, radii: np.ndarray) -> float:
    """max of |y|^k |K(y)| + |y|^{k+1} |grad K(y)| over radii x sample directions."""
    dirs = sample_directions(k)
    y = (np.asarray(radii, dtype=float)[:, None, None] * dirs[None, :, :]).reshape(-1, k)
    r = np.linalg.norm(y, axis=-1)
    vals = K(y)
    grads = K.gradient(y) if hasattr(K, "gradient") else finite_difference_gradient(K, y)
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(grads))):
        raise FloatingPointError("kernel evaluation failed at a sample point")
    ratio = r**k * np.abs(vals) + r ** (k + 1) * np.linalg.norm(grads, axis=-1)
    return float(ratio.max())


def cz_check(
    K: CZKernel, radial_samples: int = 64, lambda_grid: Sequence[float] = (2.0, 10.0, 100.0, 1e4), r_max: float = 1e6
) -> CZReport:
    """Sample the size/gradient bound and the annular cancellation integrals."""
    radii = np.geomspace(1.0, r_max, radial_samples)
    size = size_ratio(K, K.k, radii)
    cancel = 0.0
    for lam in lambda_grid:
        if lam < 1:
            raise ValueError("cancellation radii must be >= 1")
        cancel = max(cancel, abs(radial_integral(K, K.k, 1.0, float(lam))))
    return CZReport(size, cancel, K.cz_constant)


# ---------------------------------------------------------------------------
# smooth dyadic partition of unity


def _mollifier_tail(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    a = _mollifier_tail(t)
    b = _mollifier_tail(1 - t)
    return a / (a + b)


def cutoff(r) -> np.ndarray:
    """eta(r): 1 for r <= 1/2, 0 for r >= 1."""
    return 1.0 - smooth_step(2 * np.asarray(r, dtype=float) - 1)


def dyadic_bump(r) -> np.ndarray:
    """Non-negative smooth bump supported in [1/2, 1]."""
    r = np.asarray(r, dtype=float)
    s = (r - 0.5) * (1.0 - r)
    out = np.zeros_like(r)
    inside = s > 0
    out[inside] = np.exp(-1.0 / (16 * s[inside]))
    return out


def partition_piece(j: int, r) -> np.ndarray:
    """psi_j(r) = eta(r / 2^j) - eta(r / 2^(j-1)), supported in (2^(j-2), 2^j).

    For j = 0 the subtracted term is eta(2r).
    """
    r = np.asarray(r, dtype=float)
    return cutoff(r / 2.0**j) - cutoff(r / 2.0 ** (j - 1))


@lru_cache(maxsize=None)
def _bump_mass(k: int) -> float:
    """Integral over R^k of dyadic_bump(|y|)."""
    area = {1: 2.0, 2: 2 * math.pi, 3: 4 * math.pi}[k]
    x, w = gauss_legendre(64)
    edges = np.linspace(0.5, 1.0, 33)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    r = (mid[:, None] + half[:, None] * x).ravel()
    ww = (half[:, None] * w).ravel()
    return area * math.fsum(dyadic_bump(r) * r ** (k - 1) * ww)


def normalized_bump(j: int, k: int, r) -> np.ndarray:
    """Radial bump supported in [2^(j-1), 2^j] with unit integral over R^k."""
    scale = 2.0**j
    return dyadic_bump(np.asarray(r, dtype=float) / scale) / (scale**k * _bump_mass(k))


@dataclass(frozen=True)
class DyadicKernelPiece:
    """K_j = K psi_j - C_j B_j + C_{j-1} B_{j-1}.

    C_j is the integral of K against psi_0 + ... + psi_j, so every piece has zero
    integral and the partial sums telescope back to K away from the outer edge.
    """

    j: int
    parent: CZKernel
    mass_here: complex
    mass_below: complex

    @property
    def k(self) -> int:
        return self.parent.k

    @property
    def mean_zero(self) -> bool:
        return self.j >= 1

    @property
    def support(self) -> tuple[float, float]:
        return 2.0 ** (self.j - 2), 2.0**self.j

    @property
    def cz_constant(self) -> float:
        return self.parent.cz_constant

    def __call__(self, y) -> np.ndarray:
        y = _as_points(y, self.k)
        r = np.linalg.norm(y, axis=-1)
        lo, hi = self.support
        out = np.zeros(r.shape, dtype=complex)
        inside = (r > lo) & (r < hi)
        if np.any(inside):
            ri = r[inside]
            val = self.parent(y[inside]) * partition_piece(self.j, ri)
            val = val - self.mass_here * normalized_bump(self.j, self.k, ri)
            if self.j >= 1:
                val = val + self.mass_below * normalized_bump(self.j - 1, self.k, ri)
            out[inside] = val
        return out

    def gradient(self, y) -> np.ndarray:
        return finite_difference_gradient(self, _as_points(y, self.k))


def dyadic_decompose_kernel(K: CZKernel, jmax: int) -> list[DyadicKernelPiece]:
    """Pieces K_0..K_jmax; their sum equals K on 1/2 <= |y| < 2^(jmax-1)."""
    if jmax < 1:
        raise ValueError("jmax must be >= 1")
    k = K.k
    pieces = []
    below = 0j
    for j in range(jmax + 1):
        # C_j = integral of K * (eta(r/2^j) - eta(2r)) over 1/4 < r < 2^j
        here = below + radial_integral(
            lambda y, j=j: K(y) * partition_piece(j, np.linalg.norm(y, axis=-1)),
            k,
            2.0 ** (j - 2),
            2.0**j,
            tol=1e-13,
        )
        pieces.append(DyadicKernelPiece(j, K, here, below))
        below = here
    return pieces


# ---------------------------------------------------------------------------
# averaging kernel


@dataclass(frozen=True)
class AveragingKernel:
    """K_N = N^{-k} sum over y in {1..N}^k of the point mass at Q(y)."""

    N: int
    gamma: MultiIndexSet
    kernel: LatticeFunction = field(repr=False)

    @property
    def total_mass(self) -> Fraction:
        return sum(self.kernel.data.values(), Fraction(0))

    def pushforward(self, P: PolynomialMapping) -> LatticeFunction:
        """Image of the kernel under the linear map L of P (collisions merged)."""
        if P.gamma != self.gamma:
            raise ValueError("mapping and kernel use different multi-index sets")
        out: dict[tuple[int, ...], Fraction] = {}
        for z, m in self.kernel.data.items():
            x = tuple(sum(c * v for c, v in zip(row, z)) for row in P.coeffs)
            out[x] = out.get(x, Fraction(0)) + m
        return LatticeFunction(P.d0, out)


def averaging_kernel(N: int, gamma: MultiIndexSet) -> AveragingKernel:
    if N < 1:
        raise ValueError("N must be >= 1")
    mass = Fraction(1, N**gamma.k)
    acc: dict[tuple[int, ...], Fraction] = {}
    for y in itertools.product(range(1, N + 1), repeat=gamma.k):
        z = canonical_eval(y, gamma)
        acc[z] = acc.get(z, Fraction(0)) + mass
    return AveragingKernel(N, gamma, LatticeFunction(gamma.d, acc))
