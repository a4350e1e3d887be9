import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discrete_radon.core import (
    BIGINT_THRESHOLD,
    DegreeMatrix,
    FunctionFamily,
    LatticeFunction,
    PolynomialMapping,
    build_gamma,
    canonical_eval,
    canonical_eval_array,
    dilate,
    lift,
    lp_norm,
    moment_gamma,
    parse_mapping,
    square_function,
)


def test_gamma_sizes():
    assert build_gamma(1, 3).d == 3
    assert build_gamma(2, 1).gamma_list == ((0, 1), (1, 0), (1, 1))
    assert build_gamma(2, 2).d == 8
    with pytest.raises(ValueError):
        build_gamma(0, 2)


def test_canonical_eval_moment_curve():
    assert canonical_eval((3,), moment_gamma(3)) == (3, 9, 27)
    assert canonical_eval((2, 5), build_gamma(2, 1)) == (5, 2, 10)


def test_canonical_eval_array_switches_to_bigint():
    gamma = moment_gamma(5)
    ys = np.array([[2**13], [-(2**13)]])
    out = canonical_eval_array(ys, gamma)
    assert out.dtype == object
    assert out[0, 4] == 2**65 and out[1, 4] == -(2**65)
    small = canonical_eval_array(np.array([[3]]), gamma)
    assert small.dtype == np.int64 and small[0, 4] == 243
    assert BIGINT_THRESHOLD == 2**62


def test_dilation():
    A = DegreeMatrix.from_gamma(moment_gamma(2))
    assert np.allclose(dilate(2.0, A, [1.0, 1.0]), [2.0, 4.0])
    with pytest.raises(ValueError):
        dilate(0.0, A, [1.0, 1.0])


def test_example_mapping_lift():
    P = parse_mapping("x1 + 2*x1*x2")
    gamma, L = lift(P)
    assert gamma.k == 2 and gamma.N0 == 1
    for y in itertools.product(range(-4, 5), repeat=2):
        assert P(y) == (y[0] + 2 * y[0] * y[1],)
        q = canonical_eval(y, gamma)
        assert tuple(int(v) for v in L @ np.array(q)) == P(y)


def test_constant_term_rejected():
    with pytest.raises(ValueError):
        PolynomialMapping.from_terms(1, [{(0,): 3, (1,): 1}])


def test_mapping_json_roundtrip():
    P = parse_mapping("x, x**2, 3*x**3 - x")
    Q = PolynomialMapping.from_json(P.to_json())
    assert Q == P
    assert parse_mapping('{"k": 1, "components": [[{"coef": 1, "exp": [1]}]]}')((4,)) == (4,)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.integers(-4, 4), min_size=3, max_size=3),
    st.lists(st.integers(-4, 4), min_size=3, max_size=3),
    st.integers(-30, 30),
)
def test_lift_identity_property(c1, c2, y):
    comps = [{(1,): c1[0], (2,): c1[1], (3,): c1[2]}, {(1,): c2[0], (2,): c2[1], (3,): c2[2]}]
    P = PolynomialMapping.from_terms(1, comps, N0=3)
    gamma, L = lift(P)
    expect = tuple(c[0] * y + c[1] * y**2 + c[2] * y**3 for c in (c1, c2))
    assert tuple(int(v) for v in L @ np.array(canonical_eval((y,), gamma), dtype=object)) == expect


def test_lattice_function_basics():
    f = LatticeFunction.delta((0, 0)) + LatticeFunction.delta((1, 2), 3)
    assert f[(1, 2)] == 3 and f[(5, 5)] == 0
    g = f.translate((1, 1))
    assert g[(2, 3)] == 3
    assert (f - f).support == []
    assert f.scale(2)[(0, 0)] == 2
    assert LatticeFunction.loads(f.dumps()) == f
    conv = f.convolve(LatticeFunction.delta((1, 0)))
    assert conv[(1, 0)] == 1 and conv[(2, 2)] == 3


def test_lp_norms():
    f = LatticeFunction(1, {(0,): 3.0, (1,): -4.0})
    assert lp_norm(f, 2) == pytest.approx(5.0)
    assert lp_norm(f, 1) == pytest.approx(7.0)
    assert lp_norm(f, float("inf")) == 4.0
    with pytest.raises(ValueError):
        lp_norm(f, 0.5)
    sq = square_function([f, f])
    assert sq[(0,)] == pytest.approx(3 * 2**0.5)


def test_family_dimension_check():
    with pytest.raises(ValueError):
        FunctionFamily((LatticeFunction.delta((0,)), LatticeFunction.delta((0, 0))))


def test_fraction_values_stay_exact():
    f = LatticeFunction(1, {(0,): Fraction(1, 3)})
    assert (f + f)[(0,)] == Fraction(2, 3)
