import itertools

import numpy as np
import pytest

from discrete_radon.core import LatticeFunction, PolynomialMapping, build_gamma, moment_gamma, parse_mapping
from discrete_radon.kernels import dyadic_decompose_kernel, hilbert_kernel
from discrete_radon.operators import (
    apply,
    apply_average,
    apply_dyadic_singular_sum,
    apply_truncated,
    cyclic_average_via_multiplier,
    dyadic_grid,
    maximal,
    norm_ratio_experiment,
    to_cyclic,
)

P2 = parse_mapping("x, x**2")


def test_average_of_delta():
    g = apply_average(LatticeFunction.delta((0, 0)), P2, 4).values
    assert g.support == [(1, 1), (2, 4), (3, 9), (4, 16)]
    assert all(v == pytest.approx(0.25) for v in g.data.values())


def test_collisions_are_merged():
    P = parse_mapping("x**2")
    g = apply_truncated(LatticeFunction.delta((0,)), P, hilbert_kernel(), 3).values
    # K(y) + K(-y) = 0 at every image y^2
    assert g.support == []


def test_truncated_oracle():
    f = LatticeFunction(2, {(0, 0): 1.0, (2, -1): -0.5})
    K = hilbert_kernel()
    g = apply_truncated(f, P2, K, 5).values
    for x in [(1, 1), (-1, 1), (3, 3), (0, 0)]:
        ref = sum(f[(x[0] - y, x[1] - y * y)] / y for y in range(-5, 6) if y)
        assert complex(g[x]) == pytest.approx(ref, abs=1e-14)


def test_dyadic_sum_converges_to_truncation_away_from_edge():
    pieces = dyadic_decompose_kernel(hilbert_kernel(), 7)
    f = LatticeFunction.delta((0, 0))
    g = apply_dyadic_singular_sum(f, P2, pieces, 7).values
    # for |y| well inside the support of the cutoff all pieces add up to 1/y
    assert complex(g[(3, 9)]).real == pytest.approx(1 / 3, abs=1e-12)


def test_dispatch_and_errors():
    f = LatticeFunction.delta((0, 0))
    with pytest.raises(ValueError):
        apply(f, P2, "nope", 2)
    with pytest.raises(ValueError):
        apply(f, P2, "truncated", 2)
    with pytest.raises(ValueError):
        apply(LatticeFunction.delta((0,)), P2, "average", 2)
    with pytest.raises(ValueError):
        maximal(f, P2, grid=[])


def test_maximal_of_delta_is_max_average():
    g = maximal(LatticeFunction.delta((0, 0)), P2, grid=[1, 2, 4])
    assert g[(1, 1)] == 1.0 and g[(2, 4)] == 0.5 and g[(4, 16)] == 0.25


@pytest.mark.parametrize("gamma", [moment_gamma(2), build_gamma(2, 1)])
def test_cyclic_identity(gamma):
    P = PolynomialMapping.canonical(gamma)
    rng = np.random.default_rng(3)
    pts = {tuple(int(v) for v in rng.integers(-5, 6, size=gamma.d)) for _ in range(5)}
    f = LatticeFunction(gamma.d, {p: float(rng.normal()) for p in pts})
    for N in (1, 3, 5):
        direct = to_cyclic(apply_average(f, P, N).values, 12)
        assert np.allclose(direct, cyclic_average_via_multiplier(f, P, N, 12), atol=1e-12)


def test_norm_ratio_delta_frozen():
    # single delta, p = 2: sup_N |M_N delta|^2 summed over the orbit, computed by hand
    res = norm_ratio_experiment([LatticeFunction.delta((0, 0))], P2, "average", 2.0, [1, 2])
    # orbit points (1,1): max(1, 1/2) = 1, (2,4): 1/2
    assert res.ratio == pytest.approx((1 + 0.25) ** 0.5)
    assert dyadic_grid(3) == [1, 2, 4, 8]
    with pytest.raises(ValueError):
        norm_ratio_experiment([LatticeFunction.delta((0, 0))], P2, "average", 1.0, [1])
