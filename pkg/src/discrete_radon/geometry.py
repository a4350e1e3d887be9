"""Convex bodies in R^k, lattice point counts and counts near the boundary."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection

BODY_KINDS = ("ball", "box", "polytope")
SCAN_BUDGET = 5 * 10**8


@dataclass(frozen=True)
class ConvexBody:
    """Closed ball, axis box, or polytope {x : A x <= b} with a stated center."""

    kind: str
    center: tuple[float, ...]
    radius: float = 0.0
    lo: tuple[float, ...] = ()
    hi: tuple[float, ...] = ()
    A: tuple[tuple[float, ...], ...] = ()
    b: tuple[float, ...] = ()
    inner_radius: Optional[float] = None

    def __post_init__(self):
        if self.kind not in BODY_KINDS:
            raise ValueError(f"unknown body kind {self.kind!r}")
        if self.kind == "ball" and not self.radius > 0:
            raise ValueError("ball radius must be positive")
        if self.kind == "box" and any(h < l for l, h in zip(self.lo, self.hi)):
            raise ValueError("box needs lo <= hi")

    @classmethod
    def ball(cls, center: Sequence[float], r: float) -> "ConvexBody":
        return cls("ball", tuple(float(c) for c in center), radius=float(r), inner_radius=float(r))

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float]) -> "ConvexBody":
        lo, hi = tuple(float(v) for v in lo), tuple(float(v) for v in hi)
        center = tuple((a + b) / 2 for a, b in zip(lo, hi))
        return cls("box", center, lo=lo, hi=hi, inner_radius=min(b - a for a, b in zip(lo, hi)) / 2)

    @classmethod
    def polytope(cls, A, b, center: Sequence[float]) -> "ConvexBody":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float)
        c = np.asarray(center, dtype=float)
        if np.any(A @ c >= b):
            raise ValueError("center must lie strictly inside the polytope")
        dist = (b - A @ c) / np.linalg.norm(A, axis=1)
        return cls(
            "polytope", tuple(c), A=tuple(map(tuple, A)), b=tuple(b), inner_radius=float(dist.min())
        )

    @property
    def k(self) -> int:
        return len(self.center)

    def vertices(self) -> np.ndarray:
        A, b = np.array(self.A), np.array(self.b)
        hs = HalfspaceIntersection(np.hstack([A, -b[:, None]]), np.array(self.center))
        return hs.intersections

    @property
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        c = np.array(self.center)
        if self.kind == "ball":
            return c - self.radius, c + self.radius
        if self.kind == "box":
            return np.array(self.lo), np.array(self.hi)
        v = self.vertices()
        return v.min(axis=0), v.max(axis=0)

    @property
    def bounding_radius(self) -> float:
        """Radius r of a ball about the center containing the body."""
        c = np.array(self.center)
        if self.kind == "ball":
            return self.radius
        if self.kind == "box":
            return float(np.linalg.norm(np.array(self.hi) - c))
        return float(np.max(np.linalg.norm(self.vertices() - c, axis=1)))

    def signed_distance(self, x: np.ndarray) -> np.ndarray:
        """Distance to the boundary for points inside, negative outside (polytopes: facet minimum)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        c = np.array(self.center)
        if self.kind == "ball":
            return self.radius - np.linalg.norm(x - c, axis=1)
        if self.kind == "box":
            return np.min(np.minimum(x - np.array(self.lo), np.array(self.hi) - x), axis=1)
        A, b = np.array(self.A), np.array(self.b)
        return np.min((b[None, :] - x @ A.T) / np.linalg.norm(A, axis=1)[None, :], axis=1)

    def contains(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.kind == "ball":
            d = x - np.array(self.center)
            return np.sum(d * d, axis=1) <= self.radius**2
        if self.kind == "box":
            return np.all((x >= np.array(self.lo)) & (x <= np.array(self.hi)), axis=1)
        A, b = np.array(self.A), np.array(self.b)
        return np.all(x @ A.T <= b[None, :] + 1e-12, axis=1)

    def _slabs(self):
        """Integer points of the bounding box, one slab per value of the first coordinate."""
        lo, hi = self.bounding_box
        lo = np.ceil(lo - 1e-9).astype(np.int64)
        hi = np.floor(hi + 1e-9).astype(np.int64)
        if np.any(hi < lo):
            return
        total = math.prod(int(h - l + 1) for l, h in zip(lo, hi))
        if total > SCAN_BUDGET:
            raise MemoryError(f"bounding box holds {total} lattice points, above the scan budget")
        rest = [np.arange(l, h + 1) for l, h in zip(lo[1:], hi[1:])]
        combos = list(itertools.product(*rest))
        tail = np.array(combos, dtype=np.int64).reshape(len(combos), self.k - 1)
        per_block = max(1, (1 << 20) // len(tail))
        for start in range(int(lo[0]), int(hi[0]) + 1, per_block):
            x0 = np.arange(start, min(start + per_block, int(hi[0]) + 1), dtype=np.int64)
            yield np.hstack([np.repeat(x0, len(tail))[:, None], np.tile(tail, (len(x0), 1))])

    def lattice_points(self) -> np.ndarray:
        chunks = [pts[self.contains(pts)] for pts in self._slabs()]
        return np.concatenate(chunks) if chunks else np.zeros((0, self.k), dtype=np.int64)

    def volume(self) -> float:
        if self.kind == "ball":
            return math.pi ** (self.k / 2) / math.gamma(self.k / 2 + 1) * self.radius**self.k
        if self.kind == "box":
            return math.prod(h - l for l, h in zip(self.lo, self.hi))
        if self.k == 1:
            lo, hi = self.bounding_box
            return float(hi[0] - lo[0])
        return float(ConvexHull(self.vertices()).volume)


@dataclass(frozen=True)
class LatticeCount:
    count: int
    volume: float
    r: float

    @property
    def davenport_residual(self) -> float:
        return abs(self.count - self.volume) / self.r ** (self.k - 1) if self.r > 0 else 0.0

    k: int = 2


def lattice_points(body: ConvexBody, return_points: bool = False):
    """Exact count of Z^k points in the body by a bounding-box scan."""
    pts = body.lattice_points()
    res = LatticeCount(len(pts), body.volume(), body.bounding_radius, body.k)
    return (res, pts) if return_points else res


@dataclass(frozen=True)
class BoundaryCount:
    count: int
    total: int
    s: float
    r: float
    sigma: float
    k: int

    @property
    def shape(self) -> float:
        return self.s * self.r ** (self.k - 1)

    @property
    def shape_sigma(self) -> float:
        return self.s * self.r ** (self.k - 1 + 2 * self.sigma)

    @property
    def ratio(self) -> float:
        return self.count / self.shape


def boundary_near_count(body: ConvexBody, s: float, sigma: float = 0.0) -> BoundaryCount:
    """Number of lattice points x in the body with dist(x, boundary) < s."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if not 0 <= sigma <= 1 / 3:
        raise ValueError("sigma must lie in [0, 1/3]")
    near, total = 0, 0
    for pts in body._slabs():
        inside = pts[body.contains(pts)]
        total += len(inside)
        near += int(np.count_nonzero(body.signed_distance(inside) < s))
    return BoundaryCount(near, total, float(s), body.bounding_radius, float(sigma), body.k)


def dilate_body(body: ConvexBody, delta: float) -> ConvexBody:
    """{y : delta^-1 (y - c) + c in body}, the copy scaled by delta about its center."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    c = np.array(body.center)
    if body.kind == "ball":
        return ConvexBody.ball(body.center, body.radius * delta)
    if body.kind == "box":
        return ConvexBody.box(c + delta * (np.array(body.lo) - c), c + delta * (np.array(body.hi) - c))
    A, b = np.array(body.A), np.array(body.b)
    return ConvexBody.polytope(A, A @ c + delta * (b - A @ c), body.center)


def parse_body(text: str, k: int = 2) -> ConvexBody:
    """``ball:r=50[,c=0;0]``, ``box:r=10`` / ``box:lo=0;0,hi=3;4``, ``polytope:A=1;1|-1;0|0;-1,b=5|0|0,c=1;1``."""
    kind, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"bad body parameter {item!r}")
        params[key.strip()] = val.strip()

    def vec(s):
        return [float(v) for v in s.split(";")]

    if kind == "ball":
        center = vec(params["c"]) if "c" in params else [0.0] * k
        return ConvexBody.ball(center, float(params["r"]))
    if kind == "box":
        if "r" in params:
            r = float(params["r"])
            return ConvexBody.box([-r] * k, [r] * k)
        return ConvexBody.box(vec(params["lo"]), vec(params["hi"]))
    if kind == "polytope":
        A = [vec(row) for row in params["A"].split("|")]
        b = [float(v) for v in params["b"].split("|")]
        return ConvexBody.polytope(A, b, vec(params["c"]))
    raise ValueError(f"unknown body kind {kind!r}")
