"""Multi-indices, the canonical polynomial mapping, lattice functions and norms."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

# products above this magnitude are evaluated with Python big integers
BIGINT_THRESHOLD = 2**62


@dataclass(frozen=True)
class MultiIndexSet:
    """The exponent set of all monomials with per-variable degree at most ``N0``.

    ``gamma_list`` excludes the zero multi-index and is sorted lexicographically.
    """

    k: int
    N0: int
    gamma_list: tuple[tuple[int, ...], ...]

    @property
    def d(self) -> int:
        return len(self.gamma_list)

    @property
    def orders(self) -> np.ndarray:
        """Total degrees |gamma|, i.e. the diagonal of the dilation generator."""
        return np.array([sum(g) for g in self.gamma_list], dtype=np.int64)

    def index(self, gamma: Sequence[int]) -> int:
        return self.gamma_list.index(tuple(gamma))

    def __iter__(self):
        return iter(self.gamma_list)

    def __len__(self):
        return len(self.gamma_list)


def build_gamma(k: int, N0: int) -> MultiIndexSet:
    if k < 1 or N0 < 1:
        raise ValueError(f"need k >= 1 and N0 >= 1, got k={k}, N0={N0}")
    gammas = [g for g in itertools.product(range(N0 + 1), repeat=k) if any(g)]
    return MultiIndexSet(k, N0, tuple(sorted(gammas)))


def moment_gamma(d: int) -> MultiIndexSet:
    """Gamma for k=1 and degree d, i.e. the moment curve (y, y^2, ..., y^d)."""
    return build_gamma(1, d)


def _monomial(y: Sequence[int], gamma: Sequence[int]) -> int:
    out = 1
    for base, e in zip(y, gamma):
        out *= base**e
    return out


def canonical_eval(y: Sequence[int], gamma: MultiIndexSet) -> tuple[int, ...]:
    """Evaluate the canonical mapping y -> (y^gamma : gamma in Gamma) exactly."""
    y = tuple(int(v) for v in y)
    if len(y) != gamma.k:
        raise ValueError(f"point has dimension {len(y)}, Gamma expects {gamma.k}")
    return tuple(_monomial(y, g) for g in gamma.gamma_list)


def canonical_eval_array(ys: np.ndarray, gamma: MultiIndexSet) -> np.ndarray:
    """Vectorised canonical mapping for an (n, k) integer array.

    Returns int64 when every monomial fits below ``BIGINT_THRESHOLD``, otherwise an
    object array of Python ints.
    """
    ys = np.asarray(ys, dtype=np.int64).reshape(-1, gamma.k)
    bound = int(np.abs(ys).max()) if ys.size else 0
    big = bound > 1 and gamma.N0 * gamma.k * math.log2(bound) >= math.log2(BIGINT_THRESHOLD)
    if big:
        return np.array([canonical_eval(row, gamma) for row in ys.tolist()], dtype=object).reshape(
            len(ys), gamma.d
        )
    out = np.ones((len(ys), gamma.d), dtype=np.int64)
    for c, g in enumerate(gamma.gamma_list):
        for i, e in enumerate(g):
            if e:
                out[:, c] *= ys[:, i] ** e
    return out


@dataclass(frozen=True)
class DegreeMatrix:
    """Diagonal generator A with (A v)_gamma = |gamma| v_gamma."""

    orders: tuple[int, ...]

    @classmethod
    def from_gamma(cls, gamma: MultiIndexSet) -> "DegreeMatrix":
        return cls(tuple(int(o) for o in gamma.orders))


def dilate(t: float, A: DegreeMatrix, x: Sequence[float]) -> np.ndarray:
    """Anisotropic dilation t^A x = (t^{|gamma|} x_gamma)."""
    if not t > 0:
        raise ValueError(f"dilation parameter must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != len(A.orders):
        raise ValueError("dimension mismatch between point and degree matrix")
    return x * np.power(float(t), np.asarray(A.orders, dtype=float))


@dataclass(frozen=True)
class PolynomialMapping:
    """Integer polynomial mapping P: Z^k -> Z^d0 without constant terms.

    ``coeffs[j][c]`` is the coefficient of the monomial ``gamma.gamma_list[c]`` in
    the j-th component.
    """

    gamma: MultiIndexSet
    coeffs: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return self.gamma.k

    @property
    def d0(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_terms(
        cls, k: int, components: Sequence[Mapping[tuple[int, ...], int]], N0: int | None = None
    ) -> "PolynomialMapping":
        """Build from one {exponent tuple: integer coefficient} dict per component.

        ``N0`` defaults to the largest exponent of any single variable, which is
        the smallest box of multi-indices containing every monomial.
        """
        degree = 1
        for comp in components:
            for exp, c in comp.items():
                if len(exp) != k:
                    raise ValueError(f"exponent {exp} does not have length {k}")
                if not any(exp):
                    if c:
                        raise ValueError("mapping must vanish at 0 (no constant term)")
                    continue
                if int(c) != c:
                    raise ValueError("coefficients must be integers")
                degree = max(degree, max(exp))
        if N0 is not None:
            if N0 < degree:
                raise ValueError(f"N0={N0} is below the largest exponent {degree}")
            degree = N0
        gamma = build_gamma(k, degree)
        rows = []
        for comp in components:
            row = [0] * gamma.d
            for exp, c in comp.items():
                if any(exp):
                    row[gamma.index(exp)] += int(c)
            rows.append(tuple(row))
        return cls(gamma, tuple(rows))

    @classmethod
    def canonical(cls, gamma: MultiIndexSet) -> "PolynomialMapping":
        eye = np.eye(gamma.d, dtype=np.int64)
        return cls(gamma, tuple(tuple(int(v) for v in row) for row in eye))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64).reshape(self.d0, self.gamma.d)

    def __call__(self, y: Sequence[int]) -> tuple[int, ...]:
        q = canonical_eval(y, self.gamma)
        return tuple(sum(c * v for c, v in zip(row, q)) for row in self.coeffs)

    def eval_array(self, ys: np.ndarray) -> np.ndarray:
        Q = canonical_eval_array(ys, self.gamma)
        if Q.dtype == object:
            L = np.array(self.coeffs, dtype=object).reshape(self.d0, self.gamma.d)
            return Q.dot(L.T)
        return Q @ self.matrix.T

    def to_json(self) -> dict:
        comps = []
        for row in self.coeffs:
            comps.append([{"coef": c, "exp": list(g)} for c, g in zip(row, self.gamma.gamma_list) if c])
        return {"k": self.k, "N0": self.gamma.N0, "components": comps}

    @classmethod
    def from_json(cls, obj: dict) -> "PolynomialMapping":
        k = int(obj["k"])
        comps = []
        for comp in obj["components"]:
            terms: dict[tuple[int, ...], int] = {}
            for term in comp:
                exp = tuple(int(e) for e in term["exp"])
                terms[exp] = terms.get(exp, 0) + int(term["coef"])
            comps.append(terms)
        return cls.from_terms(k, comps, N0=obj.get("N0"))


def lift(P: PolynomialMapping) -> tuple[MultiIndexSet, np.ndarray]:
    """Factor P through the canonical mapping: returns Gamma and L with L Q = P."""
    return P.gamma, P.matrix.copy()


def parse_mapping(text: str) -> PolynomialMapping:
    """Parse a mapping given as JSON or as comma separated polynomials.

    Polynomials use ``x`` for k=1 or ``x1, ..., xk``; e.g. ``"x, x**2"``.
    """
    text = text.strip()
    if text.startswith("{"):
        return PolynomialMapping.from_json(json.loads(text))
    import sympy

    exprs = [sympy.sympify(part) for part in text.split(",")]
    names = sorted({str(s) for e in exprs for s in e.free_symbols})
    if names == ["x"]:
        symbols = [sympy.Symbol("x")]
    else:
        k = max((int(n[1:]) for n in names), default=1)
        symbols = [sympy.Symbol(f"x{i + 1}") for i in range(k)]
    comps = []
    for e in exprs:
        poly = sympy.Poly(e, *symbols)
        comps.append({tuple(int(v) for v in m): int(c) for m, c in poly.terms()})
    return PolynomialMapping.from_terms(len(symbols), comps)


def _is_zero(v) -> bool:
    return v == 0


@dataclass(frozen=True)
class LatticeFunction:
    """Finitely supported function on Z^m stored as a sparse map.

    Values may be any numbers (int, Fraction, float, complex); exact zeros are
    dropped on construction.
    """

    dim: int
    data: Mapping[tuple[int, ...], object] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for pt, v in self.data.items():
            pt = tuple(int(c) for c in pt)
            if len(pt) != self.dim:
                raise ValueError(f"point {pt} is not in Z^{self.dim}")
            if not _is_zero(v):
                clean[pt] = v
        object.__setattr__(self, "data", dict(sorted(clean.items())))

    @classmethod
    def delta(cls, point: Sequence[int], value=1) -> "LatticeFunction":
        return cls(len(point), {tuple(point): value})

    @classmethod
    def indicator(cls, points: Iterable[Sequence[int]], dim: int | None = None) -> "LatticeFunction":
        points = [tuple(p) for p in points]
        dim = dim if dim is not None else len(points[0])
        return cls(dim, {p: 1 for p in points})

    @property
    def support(self) -> list[tuple[int, ...]]:
        return list(self.data)

    def __len__(self):
        return len(self.data)

    def __getitem__(self, point) -> object:
        return self.data.get(tuple(point), 0)

    def values_array(self) -> np.ndarray:
        return np.array([complex(v) for v in self.data.values()], dtype=complex)

    def __add__(self, other: "LatticeFunction") -> "LatticeFunction":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        out = dict(self.data)
        for pt, v in other.data.items():
            out[pt] = out.get(pt, 0) + v
        return LatticeFunction(self.dim, out)

    def __sub__(self, other: "LatticeFunction") -> "LatticeFunction":
        return self + other.scale(-1)

    def scale(self, c) -> "LatticeFunction":
        return LatticeFunction(self.dim, {pt: c * v for pt, v in self.data.items()})

    def translate(self, z: Sequence[int]) -> "LatticeFunction":
        """Return x -> f(x - z)."""
        z = tuple(z)
        return LatticeFunction(self.dim, {tuple(a + b for a, b in zip(pt, z)): v for pt, v in self.data.items()})

    def abs(self) -> "LatticeFunction":
        return LatticeFunction(self.dim, {pt: abs(v) for pt, v in self.data.items()})

    def convolve(self, other: "LatticeFunction") -> "LatticeFunction":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        out: dict[tuple[int, ...], object] = {}
        for p, a in other.data.items():
            for u, b in self.data.items():
                x = tuple(s + t for s, t in zip(u, p))
                out[x] = out.get(x, 0) + a * b
        return LatticeFunction(self.dim, out)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "points": [list(p) for p in self.data],
            "values": [[float(complex(v).real), float(complex(v).imag)] for v in self.data.values()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LatticeFunction":
        pts = [tuple(int(c) for c in p) for p in obj["points"]]
        vals = [complex(float(re), float(im)) for re, im in obj["values"]]
        if len(pts) != len(vals):
            raise ValueError("points and values differ in length")
        return cls(int(obj["dim"]), dict(zip(pts, vals)))

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, s: str) -> "LatticeFunction":
        return cls.from_json(json.loads(s))


@dataclass(frozen=True)
class FunctionFamily:
    """A finite sequence (f_t) of lattice functions on a common lattice."""

    members: tuple[LatticeFunction, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if members and len({f.dim for f in members}) != 1:
            raise ValueError("all members of a family must share the lattice dimension")
        object.__setattr__(self, "members", members)

    @property
    def dim(self) -> int:
        return self.members[0].dim

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


def _check_p(p: float) -> float:
    if p != math.inf and not p >= 1:
        raise ValueError(f"norm exponent must be >= 1 or inf, got {p}")
    return float(p)


def _norm_of_magnitudes(mags: np.ndarray, p: float) -> float:
    if mags.size == 0:
        return 0.0
    if p == math.inf:
        return float(mags.max())
    top = mags.max()
    if top == 0:
        return 0.0
    # scaled to avoid overflow for large p
    return float(top * math.fsum((mags / top) ** p) ** (1.0 / p))


def lp_norm(f: LatticeFunction, p: float) -> float:
    p = _check_p(p)
    return _norm_of_magnitudes(np.abs(f.values_array()), p)


def square_function(family: FunctionFamily | Sequence[LatticeFunction]) -> LatticeFunction:
    """Pointwise (sum_t |f_t|^2)^(1/2)."""
    acc: dict[tuple[int, ...], float] = {}
    dim = None
    for f in family:
        dim = f.dim
        for pt, v in f.data.items():
            acc[pt] = acc.get(pt, 0.0) + abs(complex(v)) ** 2
    return LatticeFunction(dim or 1, {pt: math.sqrt(s) for pt, s in acc.items()})


def lp_l2_norm(family: FunctionFamily | Sequence[LatticeFunction], p: float) -> float:
    """Mixed norm || (sum_t |f_t|^2)^(1/2) ||_p."""
    p = _check_p(p)
    return lp_norm(square_function(family), p)


def exact_sum(values: Iterable) -> object:
    """Sum numbers keeping Fractions exact and compensating floats."""
    values = list(values)
    if all(isinstance(v, (int, Fraction)) for v in values):
        return sum(values, Fraction(0))
    re = math.fsum(complex(v).real for v in values)
    im = math.fsum(complex(v).imag for v in values)
    return complex(re, im) if im else re
