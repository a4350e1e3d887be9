import math

import numpy as np
import pytest

from discrete_radon.core import LatticeFunction, parse_mapping
from discrete_radon.maximal import (
    DyadicInterval,
    check_decomposition,
    dyadic_interval_decomposition,
    rm_check,
    rm_function_decomposition,
    rm_rhs,
)
from discrete_radon.operators import apply_average


def spans(ivs):
    return [(iv.start, iv.stop) for iv in ivs]


def test_decomposition_examples():
    assert dyadic_interval_decomposition(0, 16, 4) == [DyadicInterval(4, 0)]
    assert spans(dyadic_interval_decomposition(3, 9, 4)) == [(3, 4), (4, 8), (8, 9)]
    ivs = dyadic_interval_decomposition(1, 7, 3)
    assert spans(ivs) == [(1, 2), (2, 4), (4, 6), (6, 7)]
    assert [iv.i for iv in ivs] == [0, 1, 1, 0]


def test_decomposition_bounds():
    for m, n in [(5, 5), (-1, 3), (0, 17)]:
        with pytest.raises(ValueError):
            dyadic_interval_decomposition(m, n, 4)


def test_decomposition_exhaustive_small():
    s = 7
    for m in range(1 << s):
        for n in range(m + 1, (1 << s) + 1):
            assert check_decomposition(m, n, s, dyadic_interval_decomposition(m, n, s))


def test_check_rejects_bad_cover():
    assert not check_decomposition(0, 4, 2, [DyadicInterval(0, 0), DyadicInterval(1, 1)])
    assert not check_decomposition(0, 3, 2, [DyadicInterval(0, 0), DyadicInterval(0, 1), DyadicInterval(0, 2)])


def test_rm_examples():
    assert rm_rhs([2 + 1j] * 5, 3) == pytest.approx(abs(2 + 1j))
    assert rm_rhs([0, 1, 0], 0) == pytest.approx(math.sqrt(2) * math.sqrt(2))
    assert rm_check([0, 1, 0], 0)
    with pytest.raises(ValueError):
        rm_rhs([1, 2, 3, 4], 0)


def test_rm_random_audit():
    rng = np.random.default_rng(2)
    for _ in range(2000):
        s = int(rng.integers(0, 9))
        a = rng.normal(size=(1 << s) + 1) + 1j * rng.normal(size=(1 << s) + 1)
        j0 = int(rng.integers(0, (1 << s) + 1))
        assert rm_check(a, j0)


def test_function_decomposition_constant_family():
    g = LatticeFunction(1, {(0,): 2.0, (3,): -1.0})
    dec = rm_function_decomposition([g] * 5, 1)
    assert all(v == 0 for sq in dec.square_functions for v in sq.data.values())
    assert dec.bound[(0,)] == pytest.approx(2.0)
    assert dec.holds()


def test_function_decomposition_two_functions():
    g0 = LatticeFunction(1, {(0,): 1.0})
    g1 = LatticeFunction(1, {(0,): 4.0, (1,): 1.0})
    dec = rm_function_decomposition([g0, g1], 0)
    assert dec.bound[(0,)] == pytest.approx(1 + math.sqrt(2) * 3)
    assert dec.bound[(1,)] == pytest.approx(math.sqrt(2))


def test_function_decomposition_dyadic_averages():
    P = parse_mapping("x, x**2")
    delta = LatticeFunction.delta((0, 0))
    fam = [apply_average(delta, P, 1 << j).values for j in range(5)]
    dec = rm_function_decomposition(fam, 0)
    assert dec.holds()
    for x in dec.sup.data:
        seq = [complex(g[x]) for g in fam]
        assert dec.bound[x] == pytest.approx(rm_rhs(seq, 0), abs=1e-12)


def test_function_decomposition_dimension_mismatch():
    with pytest.raises(ValueError):
        rm_function_decomposition([LatticeFunction(1, {}), LatticeFunction(2, {})], 0)
