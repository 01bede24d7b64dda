"""Finite-scale checks of the dimension rules for sums, products and their algebra.

Every check estimates the dimensions involved with a shared
:class:`~graphdim.boxdim.Estimator`, evaluates one relation with additive
slack on its bounding side, and records the signed margin by which it held
(positive) or failed (negative).  Failures are recorded, never raised.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import funcgen
from .boxdim import Estimator, MIN_SAMPLES_EXP, scan
from .decomp import bilipschitz_verify
from .errors import SandwichViolation, ZeroCrossingError
from .funcgen import (
    CantorExtension, Constant, Expr, Linear, PeanoX, Power, Product, Reciprocal, Shift,
    Sum, Takagi, Weierstrass, weierstrass_type,
)


@dataclass(frozen=True)
class Tolerances:
    slope: float = 0.05        # additive slack on inequality checks
    separation: float = 0.2    # required |dim f - dim g| for the equality rule
    equality: float = 0.07     # |est(fg) - max| for the equality rule
    proxy: float = 0.07        # agreement of upper/lower proxies under 1/f
    smooth: float = 0.03       # |est - 1| where the product is smooth
    fit_range: float = 0.1     # slack on 1 <= est <= 2

    def to_dict(self):
        return asdict(self)


@dataclass
class FixtureResult:
    suite: str
    name: str
    expression: str
    relation: str
    margin: float
    passed: bool
    estimates: Dict[str, dict] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def key(self):
        return f"{self.suite}/{self.name}"

    def to_dict(self):
        return {
            "suite": self.suite, "name": self.name, "expression": self.expression,
            "relation": self.relation, "margin": self.margin, "pass": self.passed,
            "estimates": self.estimates, "notes": self.notes,
        }


@dataclass
class SuiteReport:
    suite: str
    seed: int
    grid_m: int
    window: Tuple[int, int]
    tolerances: Tolerances
    fixtures: List[FixtureResult]
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.fixtures)

    def to_dict(self):
        # elapsed time stays out: reports must be byte-identical across runs
        fixtures = sorted(self.fixtures, key=lambda f: f.key)
        return {
            "suite": self.suite,
            "seed": self.seed,
            "grid_m": self.grid_m,
            "window": list(self.window),
            "tolerances": self.tolerances.to_dict(),
            "fixtures": [f.to_dict() for f in fixtures],
            "margins": {f.key: f.margin for f in fixtures},
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        fixtures = sorted(self.fixtures, key=lambda f: f.key)
        width = max([len(f.key) for f in fixtures] + [7])
        lines = [f"{'status':6}  {'fixture':{width}}  {'margin':>10}  relation"]
        for f in fixtures:
            status = "PASS" if f.passed else "FAIL"
            lines.append(f"{status:6}  {f.key:{width}}  {f.margin:>10.4f}  {f.relation}")
        n_pass = sum(f.passed for f in fixtures)
        lines.append(f"{n_pass}/{len(fixtures)} fixtures passed  "
                     f"(suite={self.suite}, seed={self.seed}, m={self.grid_m}, "
                     f"window={self.window[0]}:{self.window[1]}, {self.elapsed:.1f}s)")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# helpers


def _summary(fit):
    return {"slope": fit.slope, "upper_proxy": fit.upper_proxy,
            "lower_proxy": fit.lower_proxy, "r2": fit.r2}


class _Fits:
    """Estimates for a set of labelled expressions plus side-condition failures."""

    def __init__(self, est: Estimator, tol: Tolerances, **exprs):
        self.fits = {}
        self.problems = []
        for label, e in exprs.items():
            try:
                fit = est(e)
            except SandwichViolation as exc:
                self.problems.append(f"{label}: {exc}")
                continue
            if not fit.in_graph_range(tol.fit_range):
                self.problems.append(f"{label}: slope {fit.slope:.4f} outside [1, 2] +- {tol.fit_range}")
            self.fits[label] = fit

    def __getitem__(self, label):
        return self.fits[label]

    @property
    def ok(self):
        return not self.problems

    def summaries(self):
        return {k: _summary(v) for k, v in sorted(self.fits.items())}


def _result(suite, name, expression, relation, fits: _Fits, margin_fn):
    if not fits.ok:
        return FixtureResult(suite, name, expression, relation, float("-inf"), False,
                             fits.summaries(), list(fits.problems))
    margin = float(margin_fn())
    return FixtureResult(suite, name, expression, relation, margin, margin >= 0.0, fits.summaries())


def _label(e: Expr) -> str:
    return e.describe()


# ---------------------------------------------------------------------------
# polynomials in several functions


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial in ``n_vars`` functions.

    ``terms`` maps exponent tuples to coefficients, e.g. ``{(2, 1): 1.0}``
    is ``f**2 * g``.
    """

    terms: Tuple[Tuple[Tuple[int, ...], float], ...]
    n_vars: int

    @classmethod
    def from_dict(cls, terms: dict, n_vars: Optional[int] = None):
        if n_vars is None:
            n_vars = max((len(e) for e in terms), default=1)
        clean = []
        for exps, c in sorted(terms.items()):
            if len(exps) != n_vars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for {n_vars} variables")
            if c != 0:
                clean.append((tuple(int(e) for e in exps), float(c)))
        return cls(tuple(clean), n_vars)

    def build(self, fs: Sequence[Expr]) -> Expr:
        if len(fs) != self.n_vars:
            raise ValueError(f"polynomial takes {self.n_vars} functions, got {len(fs)}")
        out = None
        for exps, c in self.terms:
            mono = None if c == 1.0 else Constant(c)
            for f, e in zip(fs, exps):
                if e > 0:
                    fac = f if e == 1 else Power(f, e)
                    mono = fac if mono is None else Product(mono, fac)
            if mono is None:
                mono = Constant(c)
            out = mono if out is None else Sum(out, mono)
        return Constant(0.0) if out is None else out

    def describe(self, names=None) -> str:
        names = names or [f"f{i + 1}" for i in range(self.n_vars)]
        parts = []
        for exps, c in self.terms:
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e > 0)
            parts.append(f"{c:g}" if not mono else (mono if c == 1.0 else f"{c:g}*{mono}"))
        return " + ".join(parts) if parts else "0"


def random_polynomial(rng: np.random.Generator, n_vars: int = 2, n_terms: int = 3,
                      max_degree: int = 3) -> Polynomial:
    terms = {}
    while len(terms) < n_terms:
        exps = tuple(int(e) for e in rng.integers(0, max_degree + 1, size=n_vars))
        if sum(exps) == 0 or sum(exps) > max_degree:
            continue
        c = int(rng.integers(-3, 4))
        if c != 0:
            terms[exps] = float(c)
    return Polynomial.from_dict(terms, n_vars)


# ---------------------------------------------------------------------------
# individual checks


def check_product_upper(f: Expr, g: Expr, est: Estimator, tol: Tolerances = Tolerances(),
                        name: str = "product", suite: str = "product_upper") -> FixtureResult:
    """est(f g) <= max(est f, est g) + slack."""
    fg = Product(f, g)
    fits = _Fits(est, tol, f=f, g=g, fg=fg)
    return _result(suite, name, f"f={_label(f)}; g={_label(g)}",
                   f"est(f*g) <= max(est f, est g) + {tol.slope}", fits,
                   lambda: max(fits["f"].slope, fits["g"].slope) + tol.slope - fits["fg"].slope)


def check_sum_upper(f: Expr, g: Expr, est: Estimator, tol: Tolerances = Tolerances(),
                    name: str = "sum", suite: str = "sum_upper") -> FixtureResult:
    """est(f + g) <= max(est f, est g) + slack."""
    fits = _Fits(est, tol, f=f, g=g, fpg=Sum(f, g))
    return _result(suite, name, f"f={_label(f)}; g={_label(g)}",
                   f"est(f+g) <= max(est f, est g) + {tol.slope}", fits,
                   lambda: max(fits["f"].slope, fits["g"].slope) + tol.slope - fits["fpg"].slope)


def check_sum_lower(f: Expr, g: Expr, est: Estimator, tol: Tolerances = Tolerances(),
                    name: str = "sum", suite: str = "sum_lower") -> FixtureResult:
    """lower(f + g) <= max(lower f, upper g) + slack."""
    fits = _Fits(est, tol, f=f, g=g, fpg=Sum(f, g))
    return _result(suite, name, f"f={_label(f)}; g={_label(g)}",
                   f"lower(f+g) <= max(lower f, upper g) + {tol.slope}", fits,
                   lambda: max(fits["f"].lower_proxy, fits["g"].upper_proxy) + tol.slope
                   - fits["fpg"].lower_proxy)


def check_reciprocal_invariance(f: Expr, est: Estimator, tol: Tolerances = Tolerances(),
                                name: str = "reciprocal", suite: str = "reciprocal") -> FixtureResult:
    """|est f - est 1/f| <= slack, and both proxies agree within the proxy tolerance."""
    fits = _Fits(est, tol, f=f, inv=Reciprocal(f))

    def margin():
        a, b = fits["f"], fits["inv"]
        return min(tol.slope - abs(a.slope - b.slope),
                   tol.proxy - abs(a.upper_proxy - b.upper_proxy),
                   tol.proxy - abs(a.lower_proxy - b.lower_proxy))

    return _result(suite, name, f"f={_label(f)}",
                   f"|est f - est 1/f| <= {tol.slope}; proxies within {tol.proxy}", fits, margin)


def check_power_invariance(f: Expr, n: int, est: Estimator, tol: Tolerances = Tolerances(),
                           name: str = "power", suite: str = "power") -> FixtureResult:
    """|est f**n - est f| <= slack."""
    fits = _Fits(est, tol, f=f, fn=Power(f, n))
    return _result(suite, name, f"f={_label(f)}; n={n}",
                   f"|est f^{n} - est f| <= {tol.slope}", fits,
                   lambda: tol.slope - abs(fits["fn"].slope - fits["f"].slope))


def _zero_free(e: Expr, m: int) -> bool:
    s = funcgen.sample(e, m)
    try:
        funcgen.check_zero_free(e, s.values, s.x, on_grid=True)
    except ZeroCrossingError:
        return False
    return True


def check_product_equality(f: Expr, g: Expr, est: Estimator, tol: Tolerances = Tolerances(),
                           name: str = "equality", suite: str = "product_equality") -> FixtureResult:
    """Nowhere-zero f, g with well separated dimensions: |est(f g) - max| <= tolerance."""
    fits = _Fits(est, tol, f=f, g=g, fg=Product(f, g))
    relation = f"|est(f*g) - max(est f, est g)| <= {tol.equality}"
    res = _result(suite, name, f"f={_label(f)}; g={_label(g)}", relation, fits,
                  lambda: tol.equality - abs(fits["fg"].slope - max(fits["f"].slope, fits["g"].slope)))
    if fits.ok:
        gap = abs(fits["f"].slope - fits["g"].slope)
        if gap < tol.separation:
            res.passed = False
            res.notes.append(f"hypothesis not met: |est f - est g| = {gap:.4f} < {tol.separation}")
    for label, e in (("f", f), ("g", g)):
        if not _zero_free(e, est.m):
            res.passed = False
            res.notes.append(f"hypothesis not met: {label} vanishes on the grid")
    return res


def check_product_sharpness(f: Expr, est: Estimator, tol: Tolerances = Tolerances(),
                            name: str = "sharpness", suite: str = "product_equality") -> FixtureResult:
    """f * (1/f) is smooth although both factors share dim f: the equality rule needs distinct dims."""
    g = Reciprocal(f)
    fits = _Fits(est, tol, f=f, g=g, fg=Product(f, g))
    res = _result(suite, name, f"f={_label(f)}; g=1/f",
                  f"|est(f*(1/f)) - 1| <= {tol.smooth} while est f = est 1/f", fits,
                  lambda: tol.smooth - abs(fits["fg"].slope - 1.0))
    if fits.ok:
        res.notes.append(f"max(est f, est 1/f) = {max(fits['f'].slope, fits['g'].slope):.4f}")
    return res


def check_lower_product(f: Expr, g: Expr, est: Estimator, tol: Tolerances = Tolerances(),
                        name: str = "lower", suite: str = "lower_product") -> FixtureResult:
    """lower(f g) <= max(lower f, upper g) + slack."""
    fits = _Fits(est, tol, f=f, g=g, fg=Product(f, g))
    return _result(suite, name, f"f={_label(f)}; g={_label(g)}",
                   f"lower(f*g) <= max(lower f, upper g) + {tol.slope}", fits,
                   lambda: max(fits["f"].lower_proxy, fits["g"].upper_proxy) + tol.slope
                   - fits["fg"].lower_proxy)


def check_polynomial_bound(poly: Polynomial, fs: Sequence[Expr], est: Estimator,
                           tol: Tolerances = Tolerances(), name: str = "polynomial",
                           suite: str = "polynomial") -> FixtureResult:
    """est P(f1, ..., fn) <= max_i est fi + slack."""
    p = poly.build(fs)
    labelled = {f"f{i + 1}": f for i, f in enumerate(fs)}
    fits = _Fits(est, tol, P=p, **labelled)
    return _result(suite, name, f"P={poly.describe()}; " + "; ".join(f"{k}={_label(v)}" for k, v in labelled.items()),
                   f"est P <= max est fi + {tol.slope}", fits,
                   lambda: max(fits[k].slope for k in labelled) + tol.slope - fits["P"].slope)


def check_rational_bound(num: Polynomial, den: Polynomial, fs: Sequence[Expr], est: Estimator,
                         tol: Tolerances = Tolerances(), name: str = "rational",
                         suite: str = "rational") -> FixtureResult:
    """est P/Q <= max_i est fi + slack; Q must not vanish on the grid."""
    q = den.build(fs)
    qs = funcgen.sample(q, est.m)
    try:
        funcgen.check_zero_free(q, qs.values, qs.x, on_grid=True)
    except ZeroCrossingError as exc:
        raise ZeroCrossingError(q, exc.x, exc.index,
                                detail=f"denominator Q = {den.describe()} vanishes") from exc
    r = Product(num.build(fs), Reciprocal(q))
    labelled = {f"f{i + 1}": f for i, f in enumerate(fs)}
    fits = _Fits(est, tol, R=r, **labelled)
    return _result(suite, name,
                   f"R=({num.describe()})/({den.describe()}); "
                   + "; ".join(f"{k}={_label(v)}" for k, v in labelled.items()),
                   f"est P/Q <= max est fi + {tol.slope}", fits,
                   lambda: max(fits[k].slope for k in labelled) + tol.slope - fits["R"].slope)


def check_sandwich(f: Expr, m: int, name: str, suite: str = "sandwich") -> FixtureResult:
    """Every scale in [4, m - 4]: oscillation bounds hold and refinement grows counts by at most 4x + boundary."""
    s = funcgen.sample(f, m)
    records = scan(s, 4, m - MIN_SAMPLES_EXP, strict=False)
    bad = [r.k for r in records if not r.sandwich_ok]
    refine_bad = [b.k for a, b in zip(records, records[1:])
                  if b.grid_count > 4 * a.grid_count + 2 * 2**b.k]
    column_bad = [r.k for r in records if r.grid_count < r.m_cols]
    lower_gap = min(r.grid_count - r.lower_bound for r in records)
    upper_gap = min(r.upper_bound - r.grid_count for r in records)
    res = FixtureResult(suite, name, f"f={_label(f)}",
                        "lower_bound <= N <= upper_bound at every k in [4, m-4]",
                        min(lower_gap, upper_gap), not (bad or refine_bad or column_bad))
    res.estimates = {"counts": {str(r.k): r.grid_count for r in records}}
    if bad:
        res.notes.append(f"sandwich violated at k={bad}")
    if refine_bad:
        res.notes.append(f"refinement bound violated at k={refine_bad}")
    if column_bad:
        res.notes.append(f"fewer boxes than columns at k={column_bad}")
    return res


def check_bilipschitz(f: Expr, map_kind: str, m: int, seed: int, pairs: int = 100_000,
                      name: str = "bilipschitz", suite: str = "bilipschitz") -> FixtureResult:
    rep = bilipschitz_verify(funcgen.sample(f, m), map_kind, pairs=pairs, seed=seed)
    lo, hi = rep.bounds
    margin = min(1.0 - rep.ratio_max / hi, 1.0 - lo / rep.ratio_min) if rep.violations == 0 else -float(rep.violations)
    res = FixtureResult(suite, name, f"f={_label(f)}; map={map_kind}",
                        f"{lo:.6g} <= d'^2/d^2 <= {hi:.6g} on {pairs} pairs", margin, rep.violations == 0)
    res.estimates = {"report": rep.to_dict()}
    return res


# ---------------------------------------------------------------------------
# fixture matrix


def fixtures():
    """Named functions shared by the suites."""
    x = Linear(1.0, 0.0)
    w15 = weierstrass_type(1.5)
    return {
        "zero": Constant(0.0),
        "two": Constant(2.0),
        "x": x,
        "x2p1": Sum(Power(x, 2), Constant(1.0)),
        "xp1": Linear(1.0, 1.0),
        "takagi": Takagi(),
        "peano": PeanoX(),
        "weier_half": Weierstrass(0.5, 3),
        "w13": weierstrass_type(1.3),
        # same dimension, base 5: its frequencies are not those of the base-3 fixtures
        "w13_b5": weierstrass_type(1.3, b=5),
        "w15": w15,
        "w17": weierstrass_type(1.7),
        "w15_cancel": Shift(Product(Constant(-1.0), w15), 2.7),
        "cantor": CantorExtension(Weierstrass(0.5, 3)),
    }


def _sandwich_suite(ctx):
    F = ctx.fx
    items = {
        "zero": F["zero"], "two": F["two"], "x": F["x"], "x2p1": F["x2p1"],
        "takagi": F["takagi"], "peano": F["peano"], "weier_half": F["weier_half"],
        "w13": F["w13"], "w15": F["w15"], "w17": F["w17"], "cantor": F["cantor"],
        "inv_w15": Reciprocal(F["w15"]), "w15_sq": Power(F["w15"], 2),
        "w17_w13": Product(F["w17"], F["w13"]), "x_peano": Product(F["x"], F["peano"]),
    }
    return [check_sandwich(f, ctx.est.m, name) for name, f in items.items()]


def _product_upper_suite(ctx):
    F, e, t = ctx.fx, ctx.est, ctx.tol
    out = [
        check_product_upper(F["zero"], F["peano"], e, t, "zero*peano"),
        check_product_upper(F["x"], F["x"], e, t, "x*x"),
        check_product_upper(F["w17"], F["w13"], e, t, "w17*w13"),
        check_product_upper(F["w15"], F["peano"], e, t, "w15*peano"),
        check_product_upper(F["takagi"], F["w13"], e, t, "takagi*w13"),
    ]
    # the zero-times-peano product is smooth: the inequality is strict
    strict = out[0]
    if strict.passed:
        fg = e(Product(F["zero"], F["peano"])).slope
        mx = max(e(F["zero"]).slope, e(F["peano"]).slope)
        strict.notes.append(f"strict: est(f*g) = {fg:.4f} < max = {mx:.4f}")
        if not (abs(fg - 1.0) <= t.smooth and mx - fg > 2 * t.slope):
            strict.passed = False
            strict.notes.append("expected a smooth product well below the maximum")
    return out


_SUM_PAIRS = (
    ("w15+cancel", "w15", "w15_cancel"),
    ("x+takagi", "x", "takagi"),
    ("x+x", "x", "x"),
    ("w13+w17", "w13", "w17"),
    ("peano+w13", "peano", "w13"),
)


def _sum_upper_suite(ctx):
    return [check_sum_upper(ctx.fx[a], ctx.fx[b], ctx.est, ctx.tol, name) for name, a, b in _SUM_PAIRS]


def _sum_lower_suite(ctx):
    return [check_sum_lower(ctx.fx[a], ctx.fx[b], ctx.est, ctx.tol, name) for name, a, b in _SUM_PAIRS]


def _reciprocal_suite(ctx):
    return [check_reciprocal_invariance(ctx.fx[n], ctx.est, ctx.tol, n) for n in ("w13", "w15", "w17")]


def _power_suite(ctx):
    F, e, t = ctx.fx, ctx.est, ctx.tol
    out = [check_power_invariance(F[n], p, e, t, f"{n}^{p}") for n in ("w13", "w15", "w17") for p in (2, 3, 4)]
    out.append(check_power_invariance(F["w15"], 1, e, t, "w15^1"))
    out.append(check_power_invariance(F["two"], 3, e, t, "two^3"))
    return out


def _product_equality_suite(ctx):
    F, e, t = ctx.fx, ctx.est, ctx.tol
    return [
        check_product_equality(F["w17"], F["w13"], e, t, "w17*w13"),
        check_product_equality(F["w15"], F["two"], e, t, "w15*two"),
        check_product_equality(F["w17"], F["xp1"], e, t, "w17*xp1"),
        check_product_sharpness(F["w15"], e, t, "w15*inv_w15"),
    ]


def _lower_product_suite(ctx):
    F, e, t = ctx.fx, ctx.est, ctx.tol
    return [
        check_lower_product(F["zero"], F["peano"], e, t, "zero*peano"),
        check_lower_product(F["x"], F["x"], e, t, "x*x"),
        check_lower_product(F["w17"], F["w13"], e, t, "w17*w13"),
        check_lower_product(F["peano"], F["w13"], e, t, "peano*w13"),
    ]


def _polynomial_suite(ctx):
    F, e, t = ctx.fx, ctx.est, ctx.tol
    # a pair sharing the base-3 frequency skeleton cancels at coarse scales
    # and then steepens the fitted slope; polynomial rules use independent bases
    pair = (F["w15"], F["w13_b5"])
    out = [
        check_polynomial_bound(Polynomial.from_dict({(1, 0): 1, (0, 1): 1}), pair, e, t, "f+g"),
        check_polynomial_bound(Polynomial.from_dict({(2, 1): 1, (1, 1): 3, (0, 3): -1}), pair, e, t,
                               "f^2g+3fg-g^3"),
        check_polynomial_bound(Polynomial.from_dict({(0, 0): 7}), pair, e, t, "seven"),
        check_polynomial_bound(Polynomial.from_dict({(1, 1, 1): 1, (2, 0, 0): 1, (0, 0, 1): -2}),
                               (F["w13"], F["w15"], F["takagi"]), e, t, "three-functions"),
    ]
    rng = np.random.default_rng([ctx.seed, 1])
    for i in range(2):
        out.append(check_polynomial_bound(random_polynomial(rng), pair, e, t, f"random{i}"))
    return out


def _rational_suite(ctx):
    F, e, t = ctx.fx, ctx.est, ctx.tol
    # a pair sharing the base-3 frequency skeleton cancels at coarse scales
    # and then steepens the fitted slope; polynomial rules use independent bases
    pair = (F["w15"], F["w13_b5"])
    one_plus_g2 = Polynomial.from_dict({(0, 0): 1, (0, 2): 1})
    out = [
        check_rational_bound(Polynomial.from_dict({(1, 0): 1}), Polynomial.from_dict({(1, 0): 1}),
                             pair, e, t, "f/f"),
        check_rational_bound(Polynomial.from_dict({(2, 0): 1, (0, 1): 1}), one_plus_g2, pair, e, t,
                             "(f^2+g)/(1+g^2)"),
    ]
    rng = np.random.default_rng([ctx.seed, 2])
    for i in range(2):
        # denominators of the form 1 + even powers stay positive
        out.append(check_rational_bound(random_polynomial(rng), one_plus_g2, pair, e, t, f"random{i}"))
    return out


def _bilipschitz_suite(ctx):
    F = ctx.fx
    items = {"w13": F["w13"], "w15": F["w15"], "w17": F["w17"], "two": F["two"], "xp1": F["xp1"]}
    return [check_bilipschitz(f, kind, ctx.est.m, ctx.seed, name=f"{name}:{kind}")
            for name, f in items.items() for kind in ("reciprocal", "square")]


SUITES = {
    "sandwich": _sandwich_suite,
    "product_upper": _product_upper_suite,
    "sum_upper": _sum_upper_suite,
    "sum_lower": _sum_lower_suite,
    "reciprocal": _reciprocal_suite,
    "power": _power_suite,
    "product_equality": _product_equality_suite,
    "lower_product": _lower_product_suite,
    "polynomial": _polynomial_suite,
    "rational": _rational_suite,
    "bilipschitz": _bilipschitz_suite,
}


@dataclass
class _Context:
    est: Estimator
    tol: Tolerances
    seed: int
    fx: dict


def run_suite(name: str = "all", seed: int = 42, m: int = 20, window=(6, 16),
              tol: Tolerances = Tolerances()) -> SuiteReport:
    """Run one suite (or ``"all"``) at a fixed grid, window and seed."""
    names = list(SUITES) if name == "all" else [name]
    for n in names:
        if n not in SUITES:
            raise ValueError(f"unknown suite {n!r}; choose from {', '.join(['all', *SUITES])}")
    t0 = time.perf_counter()
    ctx = _Context(Estimator(m=m, window=tuple(window)), tol, seed, fixtures())
    results = []
    for n in names:
        results.extend(SUITES[n](ctx))
    return SuiteReport(name, seed, m, tuple(window), tol, results, time.perf_counter() - t0)


def run_all(seed: int = 42, m: int = 20, window=(6, 16), tol: Tolerances = Tolerances()) -> SuiteReport:
    return run_suite("all", seed, m, window, tol)
