import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from discrete_radon import RadonMaximal, RadonOperator, apply, norm_ratio_experiment
from discrete_radon.core import LatticeFunction, parse_mapping
from discrete_radon.kernels import hilbert_kernel
from discrete_radon.operators import dyadic_grid
from discrete_radon.verify import delta_family


def test_params_and_clone():
    op = RadonOperator(mapping="x, x**3", kind="truncated", N=5)
    assert op.get_params() == {"mapping": "x, x**3", "kind": "truncated", "N": 5, "kernel": "hilbert"}
    assert clone(op).get_params() == op.get_params()
    op.set_params(N=7)
    assert op.N == 7


def test_operator_matches_functional_api():
    f = LatticeFunction.delta((1, 2), 3.0)
    P = parse_mapping("x, x**2")
    for kind in ("average", "truncated"):
        (out,) = RadonOperator(kind=kind, N=6).fit().transform([f])
        ref = apply(f, P, kind, 6, hilbert_kernel()).values
        assert set(out.data) == set(ref.data)
        assert all(abs(out[x] - ref[x]) < 1e-14 for x in ref.data)


def test_unfitted_and_invalid():
    with pytest.raises(NotFittedError):
        RadonOperator().transform([LatticeFunction.delta((0, 0))])
    with pytest.raises(ValueError):
        RadonOperator(kind="wavelet").fit()
    with pytest.raises(ValueError):
        RadonOperator(N=0).fit()
    with pytest.raises(ValueError):
        RadonOperator().fit().transform([LatticeFunction.delta((0,))])
    with pytest.raises(ValueError):
        RadonMaximal(p=0.5).fit().score(delta_family(2))


def test_maximal_score_matches_experiment():
    fam = delta_family(4)
    grid = dyadic_grid(4)
    est = RadonMaximal(grid=grid, p=1.5).fit()
    ref = norm_ratio_experiment(fam, parse_mapping("x, x**2"), "average", 1.5, grid)
    assert est.score(fam) == pytest.approx(ref.ratio, rel=1e-12)
    sups = est.transform(fam)
    assert len(sups) == 4
