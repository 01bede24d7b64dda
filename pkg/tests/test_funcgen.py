import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from graphdim import funcgen as F
from graphdim.errors import ZeroCrossingError
from graphdim.funcgen import (
    CantorExtension, Constant, Linear, PeanoX, Power, Product, Reciprocal, Shift, Sum,
    Takagi, Weierstrass,
)


def ulps(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return np.abs(a - b) / np.spacing(np.maximum(np.abs(a), np.abs(b)))


# ---------------------------------------------------------------------------
# pointwise evaluation


def test_weierstrass_at_zero_is_geometric_sum():
    v = F.evaluate(Weierstrass(0.5, 3, 30), 0.0)
    assert v == pytest.approx(2.0 * (1.0 - 0.5**31), rel=1e-15)


def test_reciprocal_of_constant():
    assert F.evaluate(Reciprocal(Constant(2.0)), 0.7) == 0.5


def test_power_of_linear():
    assert F.evaluate(Power(Linear(1.0, 1.0), 2), 1.0) == 4.0


def test_evaluate_rejects_points_outside_unit_interval():
    with pytest.raises(ValueError):
        F.evaluate(Linear(1.0), 1.5)


def test_reciprocal_of_vanishing_function_names_subexpression():
    w = Weierstrass(0.5, 3)
    with pytest.raises(ZeroCrossingError) as info:
        F.sample(Reciprocal(w), 12)
    assert "weier(0.5,3)" in str(info.value)
    assert info.value.index is not None


def test_zero_crossing_error_is_a_zero_division_error():
    with pytest.raises(ZeroDivisionError):
        F.evaluate(Reciprocal(Linear(1.0, -0.5)), 0.5)


def test_sign_change_between_grid_points_is_detected():
    # x - 1/3 never hits zero on a dyadic grid but changes sign
    with pytest.raises(ZeroCrossingError, match="sign changes"):
        F.sample(Reciprocal(Linear(1.0, -1.0 / 3.0)), 8)


@pytest.mark.parametrize("bad", [
    lambda: Weierstrass(1.2, 3), lambda: Weierstrass(0.5, 2.5), lambda: Weierstrass(0.3, 3),
    lambda: Power(Linear(1.0), 0), lambda: CantorExtension(Linear(1.0), 0.5),
    lambda: PeanoX(41),
])
def test_invalid_parameters_rejected(bad):
    with pytest.raises(ValueError):
        bad()


def test_operators_build_trees():
    x = Linear(1.0)
    e = 2 * x + 1
    assert e == Sum(Product(Constant(2.0), x), Constant(1.0))
    assert 1 / x == Product(Constant(1.0), Reciprocal(x))
    assert x**3 == Power(x, 3)


# ---------------------------------------------------------------------------
# sampling


def test_sample_constant():
    s = F.sample(Constant(1.0), 4)
    assert s.values.shape == (17,)
    assert (s.values == 1.0).all()


def test_sample_identity_on_grid():
    s = F.sample(Linear(1.0, 0.0), 4)
    assert s.values.tolist() == [i / 16 for i in range(17)]


def test_sample_range_of_m():
    with pytest.raises(ValueError):
        F.sample(Linear(1.0), 3)
    with pytest.raises(ValueError):
        F.sample(Linear(1.0), 27)


def test_takagi_vanishes_at_zero():
    assert F.sample(Takagi(40), 10).values[0] == 0.0


def test_takagi_known_values():
    s = F.sample(Takagi(), 8)
    # T(1/2) = 1/2, T(1/4) = T(3/4) = 1/2, T(1/8) = 3/8
    assert s.values[128] == 0.5
    assert s.values[64] == 0.5
    assert s.values[32] == 0.375


def test_sample_is_deterministic_and_read_only():
    e = Weierstrass(0.5, 3) + Takagi()
    a = F.sample(e, 12).values
    F.clear_cache()
    b = F.sample(e, 12).values
    assert a.tobytes() == b.tobytes()
    with pytest.raises(ValueError):
        a[0] = 1.0


@pytest.mark.parametrize("expr", [
    Weierstrass(0.5, 3), Takagi(), PeanoX(), CantorExtension(Weierstrass(0.5, 3)),
    Reciprocal(F.weierstrass_type(1.5)), Power(Takagi() + 1, 3),
    Product(PeanoX(), F.weierstrass_type(1.3)),
])
def test_evaluate_reproduces_sample_bitwise(expr):
    m = 12
    s = F.sample(expr, m)
    idx = np.random.default_rng(0).integers(0, 2**m + 1, 200)
    pointwise = np.array([F.evaluate(expr, float(s.x[i]), m=m) for i in idx])
    assert pointwise.tobytes() == s.values[idx].tobytes()


def test_default_truncation_follows_grid():
    w = Weierstrass(0.5, 3)
    assert w.terms(20) == math.ceil(26 / math.log2(3))
    # the omitted tail is below the finest resolved scale
    assert 3 ** (w.terms(20) + 1) > 2**26


# ---------------------------------------------------------------------------
# algebra soundness

_x = st.floats(0.0, 1.0, allow_nan=False)
_leaves = [Weierstrass(0.5, 3), Takagi(), PeanoX(), Linear(2.0, 0.5), F.weierstrass_type(1.7)]


@given(st.lists(_x, min_size=1, max_size=50), st.sampled_from(_leaves), st.sampled_from(_leaves))
def test_combinators_match_composed_arithmetic(xs, f, g):
    xs = np.array(xs)
    fv, gv = F.evaluate_many(f, xs), F.evaluate_many(g, xs)
    assert (ulps(F.evaluate_many(Sum(f, g), xs), fv + gv) <= 4).all()
    assert (ulps(F.evaluate_many(Product(f, g), xs), fv * gv) <= 4).all()
    assert (ulps(F.evaluate_many(Power(f, 3), xs), fv * fv * fv) <= 4).all()
    assert (ulps(F.evaluate_many(Shift(f, 2.5), xs), fv + 2.5) <= 4).all()
    pos = F.weierstrass_type(1.5)
    pv = F.evaluate_many(pos, xs)
    assert (ulps(F.evaluate_many(Reciprocal(pos), xs), 1.0 / pv) <= 4).all()


def test_algebra_soundness_thousand_points():
    xs = np.random.default_rng(1).random(1000)
    f, g = F.weierstrass_type(1.5), Takagi() + 1
    fv, gv = F.evaluate_many(f, xs), F.evaluate_many(g, xs)
    for expr, ref in [(f + g, fv + gv), (f * g, fv * gv), (1 / f, 1.0 / fv), (f**2, fv * fv)]:
        assert ulps(F.evaluate_many(expr, xs), ref).max() <= 4


# ---------------------------------------------------------------------------
# Peano coordinate


def test_peano_endpoints():
    for d in (1, 5, 40):
        assert F.peano_x(0.0, d) == 0.0
        assert F.peano_x(1.0, d) == 1.0


# the two truncations differ by O(3**-depth); at 40 digits both are within 1e-9
PEANO_TOL = 1e-9


def test_peano_one_third_matches_digit_automaton():
    t = 1.0 / 3.0
    x, _ = oracles.peano_point(Fraction(t), 20)
    assert F.peano_x(t, 20) == pytest.approx(float(x), abs=3.0**-9)
    assert F.peano_x(t, 40) == pytest.approx(float(x), abs=PEANO_TOL)
    # same truncation: the automaton output must agree to rounding
    exact = oracles.peano_x_digits(Fraction(t), 20)
    assert F.peano_x(t, 20) == pytest.approx(float(exact), rel=4e-16)


@given(st.floats(0.0, 1.0), st.integers(1, 40))
def test_peano_matches_exact_digit_oracle(t, digits):
    exact = oracles.peano_x_digits(Fraction(t), digits)
    if t == 1.0:
        exact = Fraction(1)
    assert F.peano_x(t, digits) == pytest.approx(float(exact), rel=4e-16, abs=1e-300)


@given(st.integers(0, 2**16))
def test_peano_matches_geometric_recursion_on_grid(i):
    t = i / 2**16
    x, _ = oracles.peano_point(Fraction(t), 20)
    assert F.peano_x(t, 40) == pytest.approx(float(x), abs=PEANO_TOL)


@given(st.floats(0.0, 1.0))
def test_peano_matches_geometric_recursion_off_grid(t):
    x, _ = oracles.peano_point(Fraction(t), 20)
    assert F.peano_x(t, 40) == pytest.approx(float(x), abs=PEANO_TOL)


def test_peano_exact_and_fraction_paths_agree():
    xs = np.random.default_rng(2).integers(0, 2**20, 300) / 2**20
    fast = F._peano_values(xs, 14)
    slow = [F._peano_fraction(Fraction(float(t)), 14) for t in xs]
    assert fast.tolist() == slow


def test_peano_is_continuous_on_fine_grid():
    v = F.sample(PeanoX(), 16).values
    # Hoelder-1/2: |x(s) - x(t)| <= C |s - t|^(1/2)
    assert np.abs(np.diff(v)).max() < 4 * 2.0**-8


def test_peano_range_checks():
    with pytest.raises(ValueError):
        F.peano_x(-0.1, 5)
    with pytest.raises(ValueError):
        F.peano_x(0.5, 0)


# ---------------------------------------------------------------------------
# Cantor extension


def test_cantor_extension_of_constant():
    s = F.cantor_extension(Constant(5.0), 0.25, m=12)
    assert np.allclose(s.values, 5.0, rtol=0, atol=1e-15)


def test_cantor_extension_of_identity():
    s = F.cantor_extension(Linear(1.0, 0.0), 1 / 3, m=14)
    assert np.abs(s.values - s.x).max() < 1e-14


def test_cantor_extension_agrees_at_endpoints():
    inner = Weierstrass(0.5, 3, 30)
    ext = CantorExtension(inner, 1 / 3)
    assert ext.levels(16) == 10
    pts = np.array([float(p) for p in oracles.cantor_endpoints(10)])
    got = F.evaluate_many(ext, pts, m=16)
    want = F.evaluate_many(inner, pts, m=16)
    assert np.abs(got - want).max() < 1e-9


def test_cantor_extension_is_affine_in_gaps():
    inner = Weierstrass(0.5, 3, 30)
    s = F.cantor_extension(inner, 1 / 3, m=16)
    idx = np.random.default_rng(3).integers(0, 2**16 + 1, 400)
    for i in idx:
        x = Fraction(int(i), 2**16)
        gap = oracles.cantor_gap(x, 10)
        if gap is None:
            want = F.evaluate(inner, float(x), m=16)
        else:
            a, b = gap
            fa, fb = F.evaluate(inner, float(a), m=16), F.evaluate(inner, float(b), m=16)
            want = fa + (fb - fa) * float((x - a) / (b - a))
        assert s.values[i] == pytest.approx(want, abs=1e-9)


def test_walk_visits_every_node():
    e = Reciprocal(Sum(Takagi(), Constant(1.0)))
    kinds = [type(n).__name__ for n in F.walk(e)]
    assert kinds == ["Reciprocal", "Sum", "Takagi", "Constant"]


def test_weierstrass_type_is_positive_with_requested_dimension():
    for s in (1.3, 1.5, 1.7):
        k = F.weierstrass_type(s)
        assert k.inner.dimension == pytest.approx(s)
        assert F.sample(k, 14).values.min() >= 1.0 - 1e-12
