"""Weyl and Gauss sums, the multipliers m_N, m_j, Phi_N, Phi_j, and rational approximation.

Phases <xi, Q(y)> are reduced modulo 1 in exact integer arithmetic: every real
coefficient is converted to the exact rational value of its float (or kept as a
Fraction), so sums over 10^6 terms do not lose accuracy to phase rounding.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
import sympy

from ._quadrature import oscillatory_integral
from .core import DegreeMatrix, MultiIndexSet, canonical_eval_array, dilate
from .kernels import DyadicKernelPiece


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("phase coefficients must be finite")
    return Fraction(x)


def torus_reduce(xi, centered: bool = True) -> np.ndarray:
    """Reduce coordinates to [-1/2, 1/2) (or [0, 1) when not centered)."""
    out = []
    for c in xi:
        f = as_fraction(c)
        f -= math.floor(f)
        if centered and f >= Fraction(1, 2):
            f -= 1
        out.append(float(f))
    return np.array(out)


@dataclass(frozen=True)
class TorusPoint:
    """Point of T^d stored exactly, reduced to [0, 1) on construction."""

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        red = []
        for c in self.coords:
            f = as_fraction(c)
            red.append(f - math.floor(f))
        object.__setattr__(self, "coords", tuple(red))

    def centered(self) -> np.ndarray:
        return np.array([float(c - 1 if c >= Fraction(1, 2) else c) for c in self.coords])

    def __len__(self):
        return len(self.coords)


@dataclass(frozen=True)
class RationalPoint:
    """a/q with numerators a_gamma in {1, ..., q}."""

    a: tuple[int, ...]
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("denominator must be >= 1")
        a = tuple(int(v) for v in self.a)
        if any(not 1 <= v <= self.q for v in a):
            raise ValueError(f"numerators must lie in 1..{self.q}, got {a}")
        object.__setattr__(self, "a", a)

    @classmethod
    def from_residues(cls, a: Sequence[int], q: int) -> "RationalPoint":
        """Accept any integers and map them to representatives in 1..q."""
        return cls(tuple((int(v) - 1) % q + 1 for v in a), q)

    @property
    def in_Aq(self) -> bool:
        return math.gcd(self.q, *self.a) == 1

    def fractions(self) -> list[Fraction]:
        return [Fraction(v % self.q, self.q) for v in self.a]

    def as_torus(self) -> TorusPoint:
        return TorusPoint(tuple(self.fractions()))


@dataclass(frozen=True)
class WeylPhase:
    """Polynomial phase P(x) = sum over 0 < |gamma| <= degree of xi_gamma x^gamma."""

    k: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for g, c in self.coeffs.items():
            g = tuple(int(e) for e in (g if isinstance(g, (tuple, list)) else (g,)))
            if len(g) != self.k or not any(g):
                raise ValueError(f"bad multi-index {g}")
            if not math.isfinite(float(c)):
                raise ValueError("phase coefficients must be finite")
            clean[g] = as_fraction(c)
        object.__setattr__(self, "coeffs", clean)

    @property
    def degree(self) -> int:
        return max((sum(g) for g, c in self.coeffs.items() if c), default=0)

    def negate(self) -> "WeylPhase":
        return WeylPhase(self.k, {g: -c for g, c in self.coeffs.items()})


# ---------------------------------------------------------------------------
# exact phase reduction


def monomials(points: np.ndarray, gammas: Sequence[Sequence[int]]) -> np.ndarray:
    """points^gamma for each gamma, exact (int64 when safe, else Python ints)."""
    pts = np.asarray(points, dtype=np.int64)
    bound = int(np.abs(pts).max()) if pts.size else 0
    top = max((sum(g) for g in gammas), default=0)
    if bound > 1 and top * math.log2(bound) >= 62:
        pts = pts.astype(object)
        out = np.empty((len(pts), len(gammas)), dtype=object)
    else:
        out = np.empty((len(pts), len(gammas)), dtype=np.int64)
    for c, g in enumerate(gammas):
        col = np.ones(len(pts), dtype=pts.dtype)
        for i, e in enumerate(g):
            if e:
                col = col * pts[:, i] ** e
        out[:, c] = col
    return out


def phase_cycles(xi: Sequence, mono: np.ndarray) -> np.ndarray:
    """<xi, mono_row> mod 1 for every row, as floats in [-1/2, 1/2)."""
    fr = [as_fraction(x) for x in xi]
    D = math.lcm(*(f.denominator for f in fr)) if fr else 1
    nums = [int(f * D) % D for f in fr]
    if D < 2**31 and mono.dtype != object:
        m = mono % D
        r = np.zeros(len(mono), dtype=np.int64)
        for c, a in enumerate(nums):
            if a:
                r = (r + a * m[:, c]) % D
        r = np.where(2 * r >= D, r - D, r)
        return r.astype(float) / D
    m = mono.astype(object)
    r = m.dot(np.array(nums, dtype=object)) if len(nums) else np.zeros(len(mono), dtype=object)
    out = np.empty(len(mono))
    for i, v in enumerate(r):
        v = int(v) % D
        if 2 * v >= D:
            v -= D
        out[i] = v / D
    return out


def exp_sum(cycles: np.ndarray, weights: Optional[np.ndarray] = None) -> complex:
    """sum of w e(cycles), compensated by exact-rounding float sums."""
    vals = np.exp(2j * np.pi * cycles)
    if weights is not None:
        vals = vals * weights
    return complex(math.fsum(vals.real), math.fsum(vals.imag))


# ---------------------------------------------------------------------------
# Weyl and Gauss sums


def weyl_sum(phase: WeylPhase, region, weight: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> complex:
    """S = sum over lattice points n of the region of e(P(n)) phi(n)."""
    if not math.isfinite(region.bounding_radius):
        raise ValueError("region must be bounded")
    if region.k != phase.k:
        raise ValueError("region and phase dimensions differ")
    pts = region.lattice_points()
    if len(pts) == 0:
        return 0j
    gammas = list(phase.coeffs)
    cycles = phase_cycles([phase.coeffs[g] for g in gammas], monomials(pts, gammas))
    w = None if weight is None else np.asarray(weight(pts.astype(float)), dtype=complex)
    return exp_sum(cycles, w)


def _check_gamma_dim(a: RationalPoint, gamma: MultiIndexSet) -> None:
    if len(a.a) != gamma.d:
        raise ValueError(f"rational point has {len(a.a)} coordinates, Gamma has {gamma.d}")


def gauss_sum(a: RationalPoint, gamma: MultiIndexSet) -> complex:
    """G(a/q) = q^{-k} sum over y in {1..q}^k of e(<a/q, Q(y)>)."""
    _check_gamma_dim(a, gamma)
    if not a.in_Aq:
        raise ValueError(f"{a.a}/{a.q} is not in A_q")
    q = a.q
    ys = np.array(list(itertools.product(range(1, q + 1), repeat=gamma.k)), dtype=np.int64)
    mono = canonical_eval_array(ys, gamma)
    return exp_sum(phase_cycles(a.fractions(), mono)) / q**gamma.k


def a_q(q: int, d: int):
    """Iterate the numerator tuples of A_q in lexicographic order."""
    for a in itertools.product(range(1, q + 1), repeat=d):
        if math.gcd(q, *a) == 1:
            yield a


def gauss_sum_max_bruteforce(q: int, gamma: MultiIndexSet) -> float:
    """max over A_q of |G(a/q)| by enumeration of every numerator tuple."""
    return max(abs(gauss_sum(RationalPoint(a, q), gamma)) for a in a_q(q, gamma.d))


def _dth_power_classes(p: int, d: int) -> list[int]:
    if p == 2:
        return [1]
    g = int(sympy.primitive_root(p))
    return [pow(g, i, p) for i in range(math.gcd(d, p - 1))]


def _moment_max_prime_power(p: int, e: int, d: int) -> float:
    """max over A_{p^e} of |G| for the moment curve (y, ..., y^d).

    The linear coefficient is handled by an FFT over y. For a prime modulus the
    top coefficient is normalised through y -> c y to a coset representative of
    the d-th powers, which leaves |G| unchanged.
    """
    q = p**e
    y = np.arange(q, dtype=np.int64)
    powers = [np.ones(q, dtype=np.int64)]
    for _ in range(d):
        powers.append((powers[-1] * y) % q)
    if q == 1:
        return 1.0
    if d == 1:
        return 0.0
    tops = list(range(q)) if e > 1 else [0] + _dth_power_classes(p, d)
    mids = list(itertools.product(range(q), repeat=d - 2))
    a1_unit = (np.arange(q) % p) != 0
    best = 0.0
    for top in tops:
        for start in range(0, len(mids), 4096):
            chunk = mids[start : start + 4096]
            block = np.array(chunk, dtype=np.int64).reshape(len(chunk), d - 2)
            r = (top * powers[d]) % q
            r = np.broadcast_to(r, (len(block), q)).copy()
            for c in range(d - 2):
                r = (r + block[:, c : c + 1] * powers[c + 2][None, :]) % q
            rows = np.exp(2j * np.pi * r / q)
            vals = np.abs(np.fft.ifft(rows, axis=1))
            higher_unit = (top % p != 0) | np.any(block % p != 0, axis=1)
            allowed = higher_unit[:, None] | a1_unit[None, :]
            best = max(best, float(vals[allowed].max(initial=0.0)))
    return best


def gauss_sum_max_moment(q: int, d: int) -> float:
    """max over a in A_q of |G(a/q)| for Gamma = {(1), ..., (d)}.

    A_q factors over the prime powers of q by the Chinese remainder theorem and
    G is multiplicative along that factorisation.
    """
    out = 1.0
    for p, e in sympy.factorint(q).items():
        out *= _moment_max_prime_power(int(p), int(e), d)
    return out


def crt_split(a: RationalPoint, q1: int, q2: int) -> tuple[RationalPoint, RationalPoint]:
    """a/(q1 q2) = a1/q1 + a2/q2 mod 1 for coprime q1, q2."""
    if math.gcd(q1, q2) != 1 or q1 * q2 != a.q:
        raise ValueError("need coprime q1, q2 with q1*q2 = q")
    inv2 = pow(q2, -1, q1) if q1 > 1 else 0
    inv1 = pow(q1, -1, q2) if q2 > 1 else 0
    a1 = [(v * inv2) % q1 for v in a.a]
    a2 = [(v * inv1) % q2 for v in a.a]
    return RationalPoint.from_residues(a1, q1), RationalPoint.from_residues(a2, q2)


# ---------------------------------------------------------------------------
# multipliers


def _box(N: int, k: int) -> np.ndarray:
    return np.array(list(itertools.product(range(1, N + 1), repeat=k)), dtype=np.int64)


def multiplier_m(xi: Sequence, N: int, gamma: MultiIndexSet) -> complex:
    """m_N(xi) = N^{-k} sum over y in {1..N}^k of e(<xi, Q(y)>)."""
    xi = list(xi.coords) if isinstance(xi, TorusPoint) else list(xi)
    if len(xi) != gamma.d:
        raise ValueError("frequency dimension differs from |Gamma|")
    mono = canonical_eval_array(_box(N, gamma.k), gamma)
    return exp_sum(phase_cycles(xi, mono)) / N**gamma.k


def multiplier_m_cyclic(N: int, gamma: MultiIndexSet, M: int) -> np.ndarray:
    """m_N at every frequency j/M of (Z/MZ)^d, as an array of shape (M,)*d."""
    Q = canonical_eval_array(_box(N, gamma.k), gamma)
    Qm = (Q % M).astype(np.int64)
    J = np.array(list(itertools.product(range(M), repeat=gamma.d)), dtype=np.int64)
    r = (J @ Qm.T) % M
    vals = np.exp(2j * np.pi * r / M).mean(axis=1)
    return vals.reshape((M,) * gamma.d)


def piece_lattice(piece: DyadicKernelPiece) -> tuple[np.ndarray, np.ndarray]:
    """Lattice points where K_j may be non-zero, and the kernel values there."""
    lo, hi = piece.support
    R = int(math.floor(hi))
    pts = np.array(
        [y for y in itertools.product(range(-R, R + 1), repeat=piece.k) if lo < math.sqrt(sum(c * c for c in y)) < hi],
        dtype=np.int64,
    ).reshape(-1, piece.k)
    return pts, piece(pts.astype(float))


def multiplier_m_piece(xi: Sequence, piece: DyadicKernelPiece, gamma: MultiIndexSet) -> complex:
    """m_j(xi) = sum over y in Z^k of e(<xi, Q(y)>) K_j(y)."""
    xi = list(xi.coords) if isinstance(xi, TorusPoint) else list(xi)
    pts, vals = piece_lattice(piece)
    if len(pts) == 0:
        return 0j
    return exp_sum(phase_cycles(xi, canonical_eval_array(pts, gamma)), vals)


def phi(xi: Sequence[float], N: float, gamma: MultiIndexSet, tol: float = 1e-8, return_error: bool = False):
    """Phi_N(xi) = integral over [0,1]^k of e(<xi, Q(N y)>) dy."""
    xi = np.asarray(xi.centered() if isinstance(xi, TorusPoint) else [float(c) for c in xi])
    coeffs = dilate(float(N), DegreeMatrix.from_gamma(gamma), xi)
    val, err = oscillatory_integral(coeffs, gamma.gamma_list, np.zeros(gamma.k), np.ones(gamma.k), tol=tol)
    return (val, err) if return_error else val


def phi_piece(xi: Sequence[float], piece: DyadicKernelPiece, gamma: MultiIndexSet, tol: float = 1e-8, return_error: bool = False):
    """Phi_j(xi) = integral over R^k of e(<xi, Q(y)>) K_j(y) dy."""
    xi = np.asarray(xi.centered() if isinstance(xi, TorusPoint) else [float(c) for c in xi])
    lo, hi = piece.support
    box = np.full(piece.k, hi)
    val, err = oscillatory_integral(
        xi, gamma.gamma_list, -box, box, weight=piece, tol=tol, max_width=lo / 4
    )
    return (val, err) if return_error else val


def psi(xi: Sequence[float], pieces: Sequence[DyadicKernelPiece], n: int, gamma: MultiIndexSet) -> complex:
    """Psi_n = Phi_0 + ... + Phi_n."""
    return sum((phi_piece(xi, pieces[j], gamma) for j in range(n + 1)), 0j)


# ---------------------------------------------------------------------------
# major arc approximation


@dataclass(frozen=True)
class ApproxResult:
    error: float
    bound_shape: float
    m_value: complex
    gauss: complex
    phi_value: complex


def _torus_distance(x: Fraction, y: Fraction) -> Fraction:
    d = (x - y) - math.floor(x - y)
    return min(d, 1 - d)


def _check_major_arc(a: RationalPoint, xi, gamma, scale: float, L1, L2, L3) -> list[Fraction]:
    _check_gamma_dim(a, gamma)
    if not a.in_Aq:
        raise ValueError("numerator tuple is not in A_q")
    if not (1 <= a.q <= L3 <= math.sqrt(scale) * (1 + 1e-12)):
        raise ValueError(f"need 1 <= q <= L3 <= sqrt({scale}); got q={a.q}, L3={L3}")
    if L1 < scale or L2 < 1:
        raise ValueError("need L1 >= scale and L2 >= 1")
    xi_f = [as_fraction(c) for c in (xi.coords if isinstance(xi, TorusPoint) else xi)]
    for g, x, r in zip(gamma.gamma_list, xi_f, a.fractions()):
        if _torus_distance(x, r) > Fraction(L2) / Fraction(L1) ** sum(g):
            raise ValueError(f"xi is not within L1^-|gamma| L2 of a/q in coordinate {g}")
    return xi_f


def _theta(xi_f: list[Fraction], a: RationalPoint) -> list[float]:
    out = []
    for x, r in zip(xi_f, a.fractions()):
        t = (x - r) - math.floor(x - r)
        if t >= Fraction(1, 2):
            t -= 1
        out.append(float(t))
    return out


def approx_error(a: RationalPoint, xi, N: int, gamma: MultiIndexSet, L1: float, L2: float, L3: float) -> ApproxResult:
    """|m_N(xi) - G(a/q) Phi_N(xi - a/q)| together with the shape L2 L3 / N."""
    xi_f = _check_major_arc(a, xi, gamma, N, L1, L2, L3)
    m = multiplier_m(xi_f, N, gamma)
    G = gauss_sum(a, gamma)
    ph = phi(_theta(xi_f, a), N, gamma, tol=1e-12)
    return ApproxResult(abs(m - G * ph), L2 * L3 / N, m, G, ph)


def approx_error_piece(
    a: RationalPoint, xi, piece: DyadicKernelPiece, gamma: MultiIndexSet, L1: float, L2: float, L3: float
) -> ApproxResult:
    """|m_j(xi) - G(a/q) Phi_j(xi - a/q)| together with the shape L2 L3 / 2^j."""
    scale = 2.0**piece.j
    xi_f = _check_major_arc(a, xi, gamma, scale, L1, L2, L3)
    m = multiplier_m_piece(xi_f, piece, gamma)
    G = gauss_sum(a, gamma)
    ph = phi_piece(_theta(xi_f, a), piece, gamma, tol=1e-10)
    return ApproxResult(abs(m - G * ph), L2 * L3 / scale, m, G, ph)


# ---------------------------------------------------------------------------
# rational approximation


def continued_fraction_convergents(theta: Fraction, limit: int):
    """Yield convergents (a, q) of theta with q <= limit."""
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    x = theta
    while True:
        c = math.floor(x)
        h0, h1 = h1, c * h1 + h0
        k0, k1 = k1, c * k1 + k0
        if k1 > limit:
            return
        yield h1, k1
        frac = x - c
        if frac == 0:
            return
        x = 1 / frac


def dirichlet_exhaustive(theta, bound: int) -> tuple[int, int]:
    """Smallest q <= bound with |theta - a/q| <= 1/(q bound), by direct search."""
    t = as_fraction(theta)
    for q in range(1, bound + 1):
        a = round(t * q)
        if abs(t - Fraction(a, q)) <= Fraction(1, q * bound):
            g = math.gcd(a, q)
            return a // g, q // g
    raise ArithmeticError("no Dirichlet approximation found")


def dirichlet(theta, bound: int) -> tuple[int, int]:
    """a/q in lowest terms, 1 <= q <= bound, |theta - a/q| <= 1/(q bound)."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    t = as_fraction(theta)
    best = None
    for a, q in continued_fraction_convergents(t, bound):
        best = (a, q)
    if best is not None and abs(t - Fraction(*best)) <= Fraction(1, best[1] * bound):
        return best
    if bound <= 10**4:
        return dirichlet_exhaustive(t, bound)
    raise ArithmeticError("continued fraction step failed the Dirichlet inequality")


@dataclass(frozen=True)
class Rescaled:
    a: int
    q: int
    case: str  # "same" when a'/q' = Q a / q, else "new"
    lower_ok: bool
    upper_ok: bool
    distance_ok: bool


def rescale_rational(theta, a: int, q: int, Q: int, N: float, beta: float, beta_prime: float, beta2: float, j: int = 1) -> Rescaled:
    """Approximate Q theta by a'/q' in the window (log N)^beta2 <= q' <= N^j (log N)^-beta2."""
    t = as_fraction(theta)
    L = math.log(N)
    if abs(t - Fraction(a, q)) > Fraction(1, q * q):
        raise ValueError("need |theta - a/q| <= q^-2")
    if not L**beta <= q <= N**j * L**-beta:
        raise ValueError("q outside the window (log N)^beta <= q <= N^j (log N)^-beta")
    if not (Q >= 1 and Q <= L**beta_prime and beta_prime < beta):
        raise ValueError("need 1 <= Q <= (log N)^beta' with beta' < beta")
    if beta2 > min(beta / 2, beta - beta_prime):
        raise ValueError("need beta2 <= min(beta/2, beta - beta')")
    lo = L**beta2
    hi = N**j * L**-beta2
    target = Q * t

    def check(ap: int, qp: int) -> tuple[bool, bool, bool]:
        dist = abs(target - Fraction(ap, qp))
        return lo <= qp, qp <= hi, float(dist) <= lo / (qp * N**j) * (1 + 1e-12)

    rescaled = Fraction(Q * a, q)
    cand = (rescaled.numerator, rescaled.denominator)
    flags = check(*cand)
    if all(flags):
        return Rescaled(*cand, "same", *flags)
    ap, qp = dirichlet(target, max(1, int(math.floor(hi))))
    case = "same" if Fraction(ap, qp) == rescaled else "new"
    return Rescaled(ap, qp, case, *check(ap, qp))


# ---------------------------------------------------------------------------
# experiments


def beta_alpha(alpha: float, d: int) -> float:
    return (alpha + 2) * (2 * d * d - 2 * d + 1)


@dataclass(frozen=True)
class PhaseChoice:
    phase: WeylPhase
    a: int
    q: int
    beta: float


def minor_arc_quadratic(beta: float) -> Callable[[int], PhaseChoice]:
    """Leading coefficient a/q with q the first prime >= (log N)^beta."""

    def build(N: int) -> PhaseChoice:
        q = int(sympy.nextprime(math.ceil(math.log(N) ** beta) - 1))
        return PhaseChoice(WeylPhase(1, {(2,): Fraction(1, q)}), 1, q, beta)

    return build


def zero_phase() -> Callable[[int], PhaseChoice]:
    """P = 0; no decay is expected."""

    def build(N: int) -> PhaseChoice:
        return PhaseChoice(WeylPhase(1, {}), 1, 1, 0.0)

    return build


def fixed_quadratic(a: int, q: int, beta: float = 0.0) -> Callable[[int], PhaseChoice]:
    def build(N: int) -> PhaseChoice:
        return PhaseChoice(WeylPhase(1, {(2,): Fraction(a, q)}), a, q, beta)

    return build


def weyl_log_decay_experiment(gamma0: Sequence[int], alpha: float, Ngrid: Sequence[int], phase_builder) -> list[dict]:
    """Table of |S_N| against N^k (log N)^-alpha for phases built per N over [1, N]^k."""
    from .geometry import ConvexBody

    gamma0 = tuple(gamma0)
    rows = []
    for N in Ngrid:
        choice = phase_builder(N)
        ph = choice.phase
        k = ph.k
        d = max(ph.degree, 1)
        L = math.log(N)
        xi0 = ph.coeffs.get(gamma0, Fraction(0))
        near = abs(xi0 - Fraction(choice.a, choice.q)) <= Fraction(1, choice.q**2)
        window = L**choice.beta <= choice.q <= N ** sum(gamma0) * L**-choice.beta
        S = weyl_sum(ph, ConvexBody.box([1] * k, [N] * k))
        rows.append(
            {
                "N": N,
                "a": choice.a,
                "q": choice.q,
                "abs_S": abs(S),
                "ratio": abs(S) / N**k,
                "bound": N**k * L**-alpha,
                "beta": choice.beta,
                "beta_alpha": beta_alpha(alpha, d),
                "window_ok": bool(near and window),
                "beta_ok": choice.beta >= beta_alpha(alpha, d),
            }
        )
    return rows


@dataclass(frozen=True)
class DecayFit:
    constant: float
    ratios: np.ndarray
    excluded: int


def decay_check(kind: str, xi_grid: Sequence[Sequence[float]], gamma: MultiIndexSet, N: Optional[float] = None, piece: Optional[DyadicKernelPiece] = None) -> DecayFit:
    """Fitted constant max |value| / shape over the grid.

    kinds: ``phiN`` (|Phi_N| vs min{1, |N^A xi|^-1/d}), ``phiNminus1`` (|Phi_N - 1|
    vs min{1, |N^A xi|}), ``phiPiece`` (|Phi_j| vs min{1, |2^jA xi|^-1/d}) and
    ``phiPieceMeanZero`` (|Phi_j| vs min{1, |2^jA xi|}, j >= 1). Points where the
    shape vanishes are excluded.
    """
    A = DegreeMatrix.from_gamma(gamma)
    d = gamma.d
    scale = N if kind.startswith("phiN") else 2.0 ** piece.j
    ratios, excluded = [], 0
    for xi in xi_grid:
        xi = np.asarray(xi, dtype=float)
        size = float(np.max(np.abs(dilate(scale, A, xi))))
        if kind == "phiN":
            shape = min(1.0, size ** (-1 / d)) if size > 0 else 1.0
            val = abs(phi(xi, N, gamma))
        elif kind == "phiNminus1":
            shape = min(1.0, size)
            if shape == 0:
                excluded += 1
                continue
            val = abs(phi(xi, N, gamma) - 1)
        elif kind == "phiPiece":
            shape = min(1.0, size ** (-1 / d)) if size > 0 else 1.0
            val = abs(phi_piece(xi, piece, gamma))
        elif kind == "phiPieceMeanZero":
            if piece.j < 1:
                raise ValueError("mean-zero decay needs j >= 1")
            shape = min(1.0, size)
            if shape == 0:
                excluded += 1
                continue
            val = abs(phi_piece(xi, piece, gamma))
        else:
            raise ValueError(f"unknown decay kind {kind!r}")
        ratios.append(val / shape)
    ratios = np.array(ratios)
    return DecayFit(float(ratios.max()) if len(ratios) else 0.0, ratios, excluded)
