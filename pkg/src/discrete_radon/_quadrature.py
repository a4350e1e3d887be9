"""Gauss-Legendre cell quadrature for oscillatory integrals with polynomial phase.

Cells of the integration box are bisected (along every axis) until the phase
changes by at most ``max_turn`` radians across a cell; each surviving cell then
receives a tensor Gauss-Legendre rule. The error estimate is the difference
between two rules of different order on the same cells.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Optional, Sequence

import numpy as np

from .kernels import gauss_legendre


class QuadratureError(RuntimeError):
    def __init__(self, message: str, value: complex, error: float):
        super().__init__(f"{message} (achieved error {error:.3e})")
        self.value = value
        self.error = error


def _phase_slope_bound(coeffs, gammas, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Upper bound of |d phase / d y_i| (in cycles) on each cell, shape (cells, k)."""
    cells, k = lo.shape
    big = np.maximum(np.abs(lo), np.abs(hi))
    out = np.zeros((cells, k))
    for c, g in zip(coeffs, gammas):
        if c == 0:
            continue
        for i in range(k):
            if g[i] == 0:
                continue
            term = np.full(cells, abs(c) * g[i])
            for l, e in enumerate(g):
                ee = e - 1 if l == i else e
                if ee:
                    term = term * big[:, l] ** ee
            out[:, i] += term
    return out


def _split(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = lo.shape[1]
    mid = (lo + hi) / 2
    new_lo, new_hi = [], []
    for corner in itertools.product((0, 1), repeat=k):
        c = np.array(corner, dtype=bool)
        new_lo.append(np.where(c, mid, lo))
        new_hi.append(np.where(c, hi, mid))
    return np.concatenate(new_lo), np.concatenate(new_hi)


def _cells(coeffs, gammas, lo, hi, max_turn: float, max_width: Optional[float], max_cells: int):
    lo = np.atleast_2d(np.asarray(lo, dtype=float))
    hi = np.atleast_2d(np.asarray(hi, dtype=float))
    done_lo, done_hi = [], []
    while len(lo):
        slope = _phase_slope_bound(coeffs, gammas, lo, hi)
        turn = 2 * np.pi * np.sum(slope * (hi - lo), axis=1)
        bad = turn > max_turn
        if max_width is not None:
            bad |= np.max(hi - lo, axis=1) > max_width
        done_lo.append(lo[~bad])
        done_hi.append(hi[~bad])
        lo, hi = lo[bad], hi[bad]
        if len(lo):
            lo, hi = _split(lo, hi)
        if sum(len(a) for a in done_lo) + len(lo) > max_cells:
            raise MemoryError("quadrature cell budget exceeded")
    return np.concatenate(done_lo), np.concatenate(done_hi)


def _tensor_rule(lo: np.ndarray, hi: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = gauss_legendre(n)
    cells, k = lo.shape
    grids = list(itertools.product(range(n), repeat=k))
    idx = np.array(grids)
    ref = x[idx]
    wref = np.prod(w[idx], axis=1)
    half = (hi - lo) / 2
    mid = (hi + lo) / 2
    pts = mid[:, None, :] + half[:, None, :] * ref[None, :, :]
    wts = np.prod(half, axis=1)[:, None] * wref[None, :]
    return pts.reshape(-1, k), wts.ravel()


def oscillatory_integral(
    coeffs: Sequence[float],
    gammas: Sequence[Sequence[int]],
    lo: Sequence[float],
    hi: Sequence[float],
    weight: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    tol: float = 1e-8,
    max_turn: float = np.pi / 4,
    max_width: Optional[float] = None,
    max_cells: int = 2_000_000,
) -> tuple[complex, float]:
    """Integral of weight(y) e(sum_g c_g y^g) over the box [lo, hi].

    Returns (value, estimated absolute error); raises QuadratureError when the
    target ``tol`` cannot be met after refinement.
    """
    coeffs = [float(c) for c in coeffs]
    gammas = [tuple(int(e) for e in g) for g in gammas]
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    value, err = 0j, math.inf
    for _ in range(4):
        clo, chi = _cells(coeffs, gammas, lo[None, :], hi[None, :], max_turn, max_width, max_cells)
        results = []
        for n in (8, 12):
            pts, wts = _tensor_rule(clo, chi, n)
            phase = np.zeros(len(pts))
            for c, g in zip(coeffs, gammas):
                if c:
                    phase += c * np.prod(pts ** np.array(g), axis=1)
            phase -= np.round(phase)
            vals = np.exp(2j * np.pi * phase)
            if weight is not None:
                vals = vals * weight(pts)
            vals = vals * wts
            results.append(complex(math.fsum(vals.real), math.fsum(vals.imag)))
        value, err = results[1], abs(results[1] - results[0])
        if err <= tol:
            return value, err
        max_turn /= 2
        if max_width is not None:
            max_width /= 2
    raise QuadratureError("oscillatory quadrature did not converge", value, err)
