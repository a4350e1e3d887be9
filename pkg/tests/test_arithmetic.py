import itertools
import math
import warnings

import numpy as np
import pytest
import sympy

from discrete_radon.arithmetic import (
    build_denominator_set,
    build_rational_set,
    decompose_o_property,
    factorizations_exhaustive,
    ionescu_wainger_set,
    o_property_check,
    partition_bound,
    partition_family,
    projection_multiplier,
    unique_factorization,
    verify_covering,
)
from discrete_radon.expsums import RationalPoint


def test_small_denominator_set():
    S = build_denominator_set(2, 2)
    assert (S.D, S.N0, S.Q0) == (2, 3, 36)
    assert S.primes_window == []
    assert sorted(S.members()) == [1, 2, 3, 4, 6, 9, 12, 18, 36]
    assert unique_factorization(36, S) == (36, 1)
    assert unique_factorization(1, S) == (1, 1)


def test_window_products():
    S = build_denominator_set(10, 1)
    assert (S.D, S.N0, S.Q0) == (3, 4, math.factorial(4) ** 3)
    assert S.primes_window == [5, 7]
    expected = {5**a for a in (1, 2, 3)} | {7**b for b in (1, 2, 3)} | {5**a * 7**b for a in (1, 2, 3) for b in (1, 2, 3)}
    assert set(S.pi()) == expected and len(expected) == 15
    assert unique_factorization(5 * 24, S) == (24, 5)
    with pytest.raises(ValueError):
        unique_factorization(11, S)


def test_guard():
    with pytest.raises(ValueError):
        build_denominator_set(10**6, 1)


@pytest.mark.parametrize("rho", [0.5, 1.0])
def test_unique_factorization_exhaustive(rho):
    for N in range(1, 13):
        S = build_denominator_set(N, rho)
        for q in range(1, N + 1):
            facs = factorizations_exhaustive(q, S)
            assert facs == [unique_factorization(q, S)]


@pytest.mark.parametrize("rho", [0.5, 1.0])
def test_monotone_denominators(rho):
    prev = set()
    for N in range(1, 13):
        cur = set(build_denominator_set(N, rho).members())
        assert set(range(1, N + 1)) <= cur
        assert prev <= cur
        prev = cur


def test_monotone_rational_sets():
    prev = set()
    for N in range(1, 5):
        cur = ionescu_wainger_set(N, 0.5, 1).as_set()
        assert prev <= cur
        prev = cur


def test_rational_set_examples():
    (only,) = build_rational_set([1], 1).as_set()
    assert only == (0,)
    assert len(build_rational_set([2], 1)) == 1
    assert len(build_rational_set([1, 2, 3], 1)) == 4
    R = build_rational_set([6], 2)
    assert all(math.gcd(6, *p.a) == 1 for p in R)
    with pytest.raises(MemoryError):
        build_rational_set([1000], 3, budget=10**6)


def test_partition_trivial_cases():
    f = partition_family(5, 1, seed=0)
    assert len(f) == 1 and f.parts(0) == [[1, 2, 3, 4, 5]]
    f = partition_family(4, 4, seed=0)
    assert len(f) == 1 and sorted(f.parts(0)) == [[1], [2], [3], [4]]


@pytest.mark.parametrize("N,k", [(4, 2), (8, 2), (10, 3), (12, 3)])
def test_partition_covering_and_bound(N, k):
    f = partition_family(N, k, seed=3)
    assert verify_covering(f)
    assert len(f) <= partition_bound(N, k)
    for i in range(len(f)):
        assert all(f.parts(i))


def test_partition_bound_formula():
    assert partition_bound(4, 2) == math.ceil(4 * math.log(2 * math.e)) + 1


def test_partition_reproducible():
    assert partition_family(10, 3, seed=9).labels == partition_family(10, 3, seed=9).labels


def test_o_property_examples():
    res = o_property_check({1}, 2)
    assert res.ok and res.certificate.k == 0
    assert not o_property_check({6, 10, 15}, 2)
    res = o_property_check({10, 14, 15, 21}, 2)
    assert res.ok
    assert sorted(res.certificate.slots) == [(2, 3), (5, 7)]
    assert not o_property_check({2, 4}, 2)


def test_decompose_singleton():
    dec = decompose_o_property({5}, 2)
    assert sorted(s.members for s in dec.sets) == [(5,), (25,)]


def test_decompose_pair_slice():
    dec = decompose_o_property({5, 7}, 2)
    slice_ = [s for s in dec.sets if s.k == 2 and s.exponents == (1, 1)]
    assert len(slice_) == 1 and slice_[0].members == (35,)


def _pi(V, D):
    out = set()
    for r in range(1, min(D, len(V)) + 1):
        for ps in itertools.combinations(V, r):
            for es in itertools.product(range(1, D + 1), repeat=r):
                out.add(math.prod(p**e for p, e in zip(ps, es)))
    return out


@pytest.mark.parametrize("V,D", [((5, 7, 11), 2), ((5, 7, 11, 13), 2), ((5, 7, 11), 3)])
def test_decompose_covers_and_certifies(V, D):
    dec = decompose_o_property(V, D, seed=1)
    assert dec.union == _pi(V, D)
    assert len(dec.sets) <= dec.bound
    for s in dec.sets:
        assert o_property_check(s.members, D).ok


def test_decompose_rejects_composites():
    with pytest.raises(ValueError):
        decompose_o_property({6}, 2)


def test_projection_at_centers_and_far():
    R = build_rational_set([1, 2, 3], 1)
    eps = [0.05]
    assert projection_multiplier([1 / 3], R, eps) == pytest.approx(1.0)
    assert projection_multiplier([0.0], R, eps) == pytest.approx(1.0)
    assert projection_multiplier([0.17], R, eps) == 0.0


def test_projection_bounds_on_grid():
    for d in (1, 2):
        R = build_rational_set(range(1, 7), d)
        eps = [0.01] * d
        if d == 1:
            grid = np.linspace(0, 1, 10**4, endpoint=False)[:, None]
        else:
            g = np.linspace(0, 1, 100, endpoint=False)
            grid = np.stack(np.meshgrid(g, g, indexing="ij"), -1).reshape(-1, 2)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            vals = [projection_multiplier(x, R, eps, check=(i == 0)) for i, x in enumerate(grid)]
        assert min(vals) >= 0 and max(vals) <= 1 + 1e-12


def test_projection_overlap_warns():
    R = build_rational_set([1, 2, 3, 4, 5, 6], 1)
    with pytest.warns(RuntimeWarning):
        projection_multiplier([0.5], R, [10.0])
