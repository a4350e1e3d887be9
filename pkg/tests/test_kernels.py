import math

import numpy as np
import pytest

from discrete_radon.kernels import (
    CZKernel,
    averaging_kernel,
    cutoff,
    cz_check,
    dyadic_decompose_kernel,
    hilbert_kernel,
    named_kernel,
    partition_piece,
    radial_integral,
    riesz_kernel,
)
from discrete_radon.core import moment_gamma, PolynomialMapping


def test_hilbert_and_riesz_are_cz():
    assert cz_check(hilbert_kernel()).passed
    rep = cz_check(riesz_kernel(1, 2))
    assert rep.passed and rep.cancellation == 0.0


def test_non_cancelling_kernel_detected():
    K = CZKernel(1, lambda y: 1.0 / np.abs(y[..., 0]), name="abs")
    assert not cz_check(K).passed


def test_named_kernel():
    assert named_kernel("hilbert").k == 1
    assert named_kernel("riesz-2", 3).k == 3
    with pytest.raises(ValueError):
        named_kernel("hilbert", 2)
    with pytest.raises(ValueError):
        named_kernel("nope")


def test_partition_of_unity():
    r = np.geomspace(0.3, 500, 400)
    total = sum(partition_piece(j, r) for j in range(0, 12))
    # telescopes to eta(r / 2^11) - eta(2r), which is 1 on [1/2, 2^10]
    assert np.allclose(total, cutoff(r / 2**11) - cutoff(2 * r))
    assert np.allclose(total[r >= 0.5], 1.0)
    assert cutoff(0.5) == 1.0 and cutoff(1.0) == 0.0


@pytest.mark.parametrize("kernel", [hilbert_kernel(), riesz_kernel(2, 2)])
def test_pieces_sum_to_kernel_and_cancel(kernel):
    pieces = dyadic_decompose_kernel(kernel, 8)
    k = kernel.k
    y = np.array([[1.7] + [0.3] * (k - 1), [-9.25] + [2.0] * (k - 1), [40.0] + [-3.0] * (k - 1)])
    total = sum(p(y) for p in pieces)
    assert np.allclose(total, kernel(y), atol=1e-14)
    for p in pieces[1:]:
        lo, hi = p.support
        assert abs(radial_integral(p, k, lo, hi)) < 1e-10
        assert p.mean_zero


def test_dyadic_requires_positive_jmax():
    with pytest.raises(ValueError):
        dyadic_decompose_kernel(hilbert_kernel(), 0)


def test_averaging_kernel_mass():
    K = averaging_kernel(4, moment_gamma(2))
    assert K.total_mass == 1
    pushed = K.pushforward(PolynomialMapping.canonical(moment_gamma(2)))
    assert pushed[(2, 4)] == pytest.approx(0.25)
