import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphdim import decomp as D
from graphdim import funcgen as F
from graphdim.boxdim import Estimator
from graphdim.errors import InfeasibleError, UnsupportedEndpointError, ZeroCrossingError
from graphdim.funcgen import Constant, Linear, Power, Product, Reciprocal, Shift, Weierstrass


@pytest.fixture(scope="module")
def est20():
    return Estimator(m=20, window=(6, 16))


# ---------------------------------------------------------------------------
# f = (1/f) * f**2


def test_equal_split_of_constant(est20):
    res = D.decompose_equal(Constant(2.0), Estimator(m=12, window=(4, 8)))
    assert res.g == Reciprocal(Constant(2.0)) and res.h == Power(Constant(2.0), 2)
    gh = F.sample(res.product, 12).values
    assert (gh == 2.0).all()
    assert res.recon_ok


def test_equal_split_of_weierstrass_type(est20):
    f = F.weierstrass_type(1.5)
    res = D.decompose_equal(f, est20)
    assert res.route == "reciprocal-square"
    assert res.est_g.slope == pytest.approx(1.5, abs=0.08)
    assert res.est_h.slope == pytest.approx(1.5, abs=0.08)
    assert res.recon_error <= 1e-9 * (1 + res.max_abs_f)


@pytest.mark.parametrize("f", [F.weierstrass_type(1.3), Linear(1.0, 1.0), F.PeanoX() + 0.5])
def test_equal_split_is_pointwise_exact(f):
    res = D.decompose_equal(f, Estimator(m=12, window=(4, 8)))
    xs = np.random.default_rng(5).random(100_000)
    fv = F.evaluate_many(f, xs)
    gh = F.evaluate_many(res.g, xs) * F.evaluate_many(res.h, xs)
    assert (np.abs(gh - fv) <= 4 * np.spacing(np.abs(fv))).all()


def test_equal_split_rejects_zero_crossing():
    with pytest.raises(ZeroCrossingError):
        D.decompose_equal(Weierstrass(0.5, 3), Estimator(m=12, window=(4, 8)))


# ---------------------------------------------------------------------------
# f = (k f) * (1/k)


def test_target_on_smooth_function(est20):
    res = D.decompose_target(Linear(1.0, 1.0), 1.5, est20)
    assert res.route == "k-product"
    assert res.g == Product(F.weierstrass_type(1.5), Linear(1.0, 1.0))
    assert res.h == Reciprocal(F.weierstrass_type(1.5))
    assert res.est_g.slope == pytest.approx(1.5, abs=0.08)
    assert res.est_h.slope == pytest.approx(1.5, abs=0.08)
    assert res.recon_error <= 1e-9


def test_target_one_is_smooth(est20):
    res = D.decompose_target(Linear(1.0, 1.0), 1.0, est20)
    assert res.h == Reciprocal(Linear(1.0, 1.0))
    for e in (res.est_f, res.est_g, res.est_h):
        assert e.slope == pytest.approx(1.0, abs=0.03)


def test_target_below_dimension_is_infeasible(est20):
    with pytest.raises(InfeasibleError, match="only if"):
        D.decompose_target(F.weierstrass_type(1.7), 1.3, est20)


def test_target_two_is_unsupported(est20):
    with pytest.raises(UnsupportedEndpointError):
        D.decompose_target(Linear(1.0, 1.0), 2.0, est20)


@pytest.mark.parametrize("beta", [0.5, 2.5, -1.0])
def test_target_out_of_range(beta, est20):
    with pytest.raises(D.TargetRangeError):
        D.decompose_target(Linear(1.0, 1.0), beta, est20)


def test_target_equal_to_dimension_uses_reciprocal_square(est20):
    f = F.weierstrass_type(1.5)
    res = D.decompose_target(f, 1.5, est20)
    assert res.route == "reciprocal-square"


@given(st.floats(1.0, 1.95))
def test_never_silently_returns_below_dimension(beta):
    est = Estimator(m=14, window=(4, 10))
    f = F.weierstrass_type(1.7)
    dim_f = est(f).slope
    if beta < dim_f - D.INFEASIBILITY_TOL:
        with pytest.raises(InfeasibleError):
            D.decompose_target(f, beta, est)
    else:
        res = D.decompose_target(f, beta, est)
        assert res.recon_ok


# ---------------------------------------------------------------------------
# two targets


def test_two_targets():
    est = Estimator(m=22, window=(6, 16))
    res = D.decompose_two_targets(F.weierstrass_type(1.7), 1.7, 1.3, est)
    assert res.est_g.slope == pytest.approx(1.7, abs=0.08)
    assert res.est_h.slope == pytest.approx(1.3, abs=0.08)
    assert res.recon_ok


def test_two_targets_beta_equal_alpha_is_range_error(est20):
    with pytest.raises(D.TargetRangeError):
        D.decompose_two_targets(F.weierstrass_type(1.7), 1.7, 1.7, est20)


def test_two_targets_empty_interval(est20):
    with pytest.raises(D.TargetRangeError):
        D.decompose_two_targets(Constant(3.0), 1.0, 1.0, est20)
    with pytest.raises(D.TargetRangeError):
        D.decompose_two_targets(Constant(3.0), 1.0, 1.2, est20)


def test_two_targets_alpha_must_match_estimate(est20):
    with pytest.raises(InfeasibleError):
        D.decompose_two_targets(F.weierstrass_type(1.3), 1.7, 1.2, est20)


def test_result_serializes(est20):
    res = D.decompose_target(Linear(1.0, 1.0), 1.5, est20)
    d = res.to_dict()
    assert d["route"] == "k-product" and d["recon_ok"]
    assert d["h_tree"]["kind"] == "reciprocal"


# ---------------------------------------------------------------------------
# bi-Lipschitz


def test_bilipschitz_constants_from_bounds():
    c = D.bilipschitz_constants(1.0, 2.0)
    assert c == {"C1": 2.0, "C2": 17.0, "C3": 17.0, "C4": 1.25}


def test_bilipschitz_constant_function():
    s = F.sample(Constant(2.0), 12)
    rep = D.bilipschitz_verify(s, "reciprocal", pairs=10_000)
    assert rep.M1 == rep.M2 == 2.0
    assert rep.C1 == 1.0625 and rep.C2 == 17.0
    assert rep.violations == 0
    # vertical terms vanish: image distances equal the originals
    assert rep.ratio_min == rep.ratio_max == 1.0


@pytest.mark.parametrize("kind", ["reciprocal", "square"])
def test_bilipschitz_shifted_weierstrass(kind):
    s = F.sample(Shift(Weierstrass(0.5, 3, 30), 2.0), 20)
    rep = D.bilipschitz_verify(s, kind, pairs=100_000, seed=42)
    assert rep.pairs_tested == 100_000
    assert rep.violations == 0


@pytest.mark.parametrize("kind", ["reciprocal", "square"])
def test_bilipschitz_ratios_within_bounds(kind):
    s = F.sample(F.weierstrass_type(1.5), 16)
    rep = D.bilipschitz_verify(s, kind, pairs=20_000, seed=1)
    lo, hi = rep.bounds
    assert lo <= rep.ratio_min and rep.ratio_max <= hi
    assert rep.violations == 0


def test_bilipschitz_negative_function_square_map():
    s = F.sample(-F.weierstrass_type(1.5), 14)
    assert D.bilipschitz_verify(s, "square", pairs=10_000).violations == 0


def test_bilipschitz_detects_broken_constants(monkeypatch):
    s = F.sample(F.weierstrass_type(1.5), 14)
    monkeypatch.setattr(D, "bilipschitz_constants",
                        lambda M1, M2: {"C1": 1.0, "C2": 1.0, "C3": 1.0, "C4": 1.0})
    assert D.bilipschitz_verify(s, "reciprocal", pairs=10_000).violations > 0


def test_bilipschitz_rejects_zero_and_bad_kind():
    with pytest.raises(ZeroCrossingError):
        D.bilipschitz_verify(F.sample(Weierstrass(0.5, 3), 12), "reciprocal")
    with pytest.raises(ValueError):
        D.bilipschitz_verify(F.sample(Constant(2.0), 8), "cube")


def test_bilipschitz_is_seeded():
    s = F.sample(F.weierstrass_type(1.3), 14)
    a = D.bilipschitz_verify(s, "square", pairs=5000, seed=7)
    b = D.bilipschitz_verify(s, "square", pairs=5000, seed=7)
    assert a == b
