"""Rademacher-Menshov: dyadic interval decomposition and the max-to-square-function bound."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import LatticeFunction

RM_SLACK = 1e-12


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """[j 2^i, (j+1) 2^i)."""

    i: int
    j: int

    @property
    def start(self) -> int:
        return self.j << self.i

    @property
    def stop(self) -> int:
        return (self.j + 1) << self.i

    def __len__(self):
        return 1 << self.i

    def __repr__(self):
        return f"[{self.start},{self.stop})"


def dyadic_interval_decomposition(m: int, n: int, s: int) -> list[DyadicInterval]:
    """Greedy cover of [m, n) by the longest dyadic interval starting at the current point."""
    if not 0 <= m < n <= 1 << s:
        raise ValueError(f"need 0 <= m < n <= 2^{s}, got m={m}, n={n}")
    out = []
    cur = m
    while cur < n:
        i = s if cur == 0 else (cur & -cur).bit_length() - 1
        while cur + (1 << i) > n:
            i -= 1
        out.append(DyadicInterval(i, cur >> i))
        cur += 1 << i
    return out


def check_decomposition(m: int, n: int, s: int, intervals: Sequence[DyadicInterval]) -> bool:
    """Disjoint exact cover of [m, n) by aligned dyadic intervals, each scale used at most twice."""
    if not intervals:
        return False
    cur = m
    for iv in sorted(intervals, key=lambda iv: iv.start):
        if iv.start != cur or iv.i < 0 or iv.stop > 1 << s:
            return False
        cur = iv.stop
    if cur != n:
        return False
    return max(Counter(iv.i for iv in intervals).values()) <= 2


def _check_length(n_terms: int) -> int:
    s = (n_terms - 1).bit_length() - 1
    if n_terms < 2 or (1 << s) + 1 != n_terms:
        raise ValueError(f"sequence length must be 2^s + 1, got {n_terms}")
    return s


def scale_square_sums(a: np.ndarray, s: int) -> np.ndarray:
    """For i = 0..s: (sum_j |a_{(j+1)2^i} - a_{j 2^i}|^2)^(1/2), along axis 0."""
    out = []
    for i in range(s + 1):
        step = 1 << i
        diffs = a[step::step] - a[: -step : step]
        out.append(np.sqrt(np.sum(np.abs(diffs) ** 2, axis=0)))
    return np.array(out)


def rm_rhs(sequence: Sequence[complex], j0: int) -> float:
    """|a_{j0}| + sqrt(2) * sum_i (sum_j |a_{(j+1)2^i} - a_{j2^i}|^2)^(1/2)."""
    a = np.asarray(sequence, dtype=complex)
    s = _check_length(len(a))
    if not 0 <= j0 <= 1 << s:
        raise ValueError("j0 out of range")
    return float(abs(a[j0]) + math.sqrt(2) * math.fsum(scale_square_sums(a, s)))


def rm_check(sequence: Sequence[complex], j0: int) -> bool:
    a = np.asarray(sequence, dtype=complex)
    return float(np.max(np.abs(a))) <= rm_rhs(a, j0) + RM_SLACK


@dataclass(frozen=True)
class RMDecomposition:
    base: LatticeFunction
    square_functions: list[LatticeFunction]
    sup: LatticeFunction
    bound: LatticeFunction

    def holds(self, slack: float = RM_SLACK) -> bool:
        return all(abs(v) <= self.bound[x].real + slack for x, v in self.sup.data.items())


def rm_function_decomposition(family: Sequence[LatticeFunction], j0: int) -> RMDecomposition:
    """Pointwise square functions over each dyadic scale for g_0, ..., g_{2^s}."""
    s = _check_length(len(family))
    if not 0 <= j0 <= 1 << s:
        raise ValueError("j0 out of range")
    dim = family[0].dim
    if any(g.dim != dim for g in family):
        raise ValueError("all functions must share a dimension")
    points = sorted(set().union(*(g.data for g in family)))
    vals = np.array([[complex(g[x]) for x in points] for g in family], dtype=complex).reshape(len(family), len(points))
    sq = scale_square_sums(vals, s)
    sup = np.max(np.abs(vals), axis=0) if points else np.zeros(0)
    bound = np.abs(vals[j0]) + math.sqrt(2) * sq.sum(axis=0)

    def lf(arr):
        return LatticeFunction(dim, {x: float(v) for x, v in zip(points, arr)})

    return RMDecomposition(family[j0], [lf(row) for row in sq], lf(sup), lf(bound))
