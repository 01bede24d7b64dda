"""Product decompositions ``f = g * h`` with prescribed graph dimensions.

Three constructors:

* :func:`decompose_equal` -- ``g = 1/f``, ``h = f**2``; both keep the
  dimension of ``f``.
* :func:`decompose_target` -- ``g = k * f``, ``h = 1/k`` for a positive
  Weierstrass-type ``k`` of dimension ``beta >= dim f``.
* :func:`decompose_two_targets` -- the same shape with ``beta < dim f``,
  giving ``dim g = dim f`` and ``dim h = beta``.

:func:`bilipschitz_verify` checks, pair by pair on the sampling grid, the
two-sided distance distortion bounds of the maps ``(x, f) -> (x, 1/f)`` and
``(x, f) -> (x, f**2)`` that make reciprocals and squares dimension
preserving.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import funcgen
from .boxdim import Estimator, DimensionEstimate
from .errors import InfeasibleError, UnsupportedEndpointError
from .funcgen import Expr, Linear, Power, Product, Reciprocal

#: how far below est(f) a target may sit before it is rejected
INFEASIBILITY_TOL = 0.05
#: allowed gap between est(f) and the caller's alpha in two-target mode
ALPHA_TOL = 0.1
#: reconstruction must satisfy |f - g h| <= RECON_TOL * (1 + max |f|)
RECON_TOL = 1e-9
BILIPSCHITZ_SLACK = 1e-12


class TargetRangeError(InfeasibleError):
    """Target dimension outside the interval the construction allows."""


@dataclass
class DecompositionResult:
    f: Expr
    g: Expr
    h: Expr
    route: str
    beta_target: float
    alpha_target: Optional[float]
    est_f: DimensionEstimate
    est_g: DimensionEstimate
    est_h: DimensionEstimate
    recon_error: float
    max_abs_f: float
    est_k: Optional[DimensionEstimate] = None

    @property
    def product(self) -> Product:
        return Product(self.g, self.h)

    @property
    def recon_ok(self) -> bool:
        return self.recon_error <= RECON_TOL * (1.0 + self.max_abs_f)

    def to_dict(self):
        return {
            "route": self.route,
            "f": self.f.describe(),
            "g": self.g.describe(),
            "h": self.h.describe(),
            "g_tree": self.g.to_dict(),
            "h_tree": self.h.to_dict(),
            "beta_target": self.beta_target,
            "alpha_target": self.alpha_target,
            "est_f": self.est_f.to_dict(),
            "est_g": self.est_g.to_dict(),
            "est_h": self.est_h.to_dict(),
            "est_k": None if self.est_k is None else self.est_k.to_dict(),
            "recon_error": self.recon_error,
            "recon_ok": self.recon_ok,
        }


def _require_zero_free(f: Expr, m: int) -> funcgen.SampledFunction:
    s = funcgen.sample(f, m)
    funcgen.check_zero_free(f, s.values, s.x, on_grid=True)
    return s


def _finish(f, g, h, route, beta, alpha, est, fs, k=None) -> DecompositionResult:
    gh = funcgen.sample(Product(g, h), est.m).values
    recon = float(np.max(np.abs(fs.values - gh)))
    return DecompositionResult(
        f=f, g=g, h=h, route=route, beta_target=beta, alpha_target=alpha,
        est_f=est(f), est_g=est(g), est_h=est(h),
        recon_error=recon, max_abs_f=float(np.max(np.abs(fs.values))),
        est_k=None if k is None else est(k),
    )


def _make_k(beta: float) -> Expr:
    if beta == 1.0:
        return Linear(1.0, 1.0)
    return funcgen.weierstrass_type(beta)


def decompose_equal(f: Expr, estimator: Optional[Estimator] = None) -> DecompositionResult:
    """``f = (1/f) * f**2``; both factors share the dimension of ``f``."""
    est = estimator or Estimator()
    fs = _require_zero_free(f, est.m)
    beta = est(f).slope
    return _finish(f, Reciprocal(f), Power(f, 2), "reciprocal-square", beta, None, est, fs)


def decompose_target(f: Expr, beta: float, estimator: Optional[Estimator] = None) -> DecompositionResult:
    """Factor ``f`` into two functions whose graphs both have dimension ``beta``.

    Possible exactly when ``dim f <= beta``.  When ``beta`` is within
    estimator noise of ``dim f`` the reciprocal/square route is used.
    """
    if beta == 2.0:
        raise UnsupportedEndpointError(
            "beta = 2 has no finite-scale construction with box dimension exactly 2; "
            "choose beta in [1, 2)")
    if not 1.0 <= beta < 2.0:
        raise TargetRangeError(f"beta must lie in [1, 2), got {beta}")
    est = estimator or Estimator()
    fs = _require_zero_free(f, est.m)
    dim_f = est(f).slope
    if beta < dim_f - INFEASIBILITY_TOL:
        raise InfeasibleError(
            f"beta = {beta} is below the estimated dimension {dim_f:.4f} of f; a product "
            f"g*h with both graph dimensions equal to beta exists only if dim f <= beta")
    if beta != 1.0 and abs(dim_f - beta) <= INFEASIBILITY_TOL:
        return _finish(f, Reciprocal(f), Power(f, 2), "reciprocal-square", beta, None, est, fs)
    k = _make_k(beta)
    return _finish(f, Product(k, f), Reciprocal(k), "k-product", beta, None, est, fs, k=k)


def decompose_two_targets(f: Expr, alpha_check: float, beta: float,
                          estimator: Optional[Estimator] = None) -> DecompositionResult:
    """Factor ``f`` (dimension ``alpha_check``) as ``g * h`` with dims ``alpha_check`` and ``beta``."""
    if not 1.0 <= beta < alpha_check:
        raise TargetRangeError(f"beta must lie in [1, alpha) = [1, {alpha_check}), got {beta}")
    if alpha_check > 2.0:
        raise TargetRangeError(f"alpha must not exceed 2, got {alpha_check}")
    est = estimator or Estimator()
    fs = _require_zero_free(f, est.m)
    dim_f = est(f).slope
    if abs(dim_f - alpha_check) > ALPHA_TOL:
        raise InfeasibleError(
            f"estimated dimension of f is {dim_f:.4f}, not alpha = {alpha_check} (tolerance {ALPHA_TOL})")
    k = _make_k(beta)
    return _finish(f, Product(k, f), Reciprocal(k), "k-product", beta, alpha_check, est, fs, k=k)


@dataclass(frozen=True)
class BiLipschitzReport:
    map_kind: str
    M1: float
    M2: float
    C1: float
    C2: float
    C3: float
    C4: float
    violations: int
    pairs_tested: int
    ratio_min: float
    ratio_max: float
    seed: int

    @property
    def bounds(self):
        """(lower, upper) factors for the squared-distance ratio of this map."""
        if self.map_kind == "reciprocal":
            return 1.0 / self.C2, self.C1
        return 1.0 / self.C4, self.C3

    def to_dict(self):
        lo, hi = self.bounds
        return {
            "map_kind": self.map_kind, "M1": self.M1, "M2": self.M2,
            "C1": self.C1, "C2": self.C2, "C3": self.C3, "C4": self.C4,
            "lower_factor": lo, "upper_factor": hi,
            "ratio_min": self.ratio_min, "ratio_max": self.ratio_max,
            "violations": self.violations, "pairs_tested": self.pairs_tested, "seed": self.seed,
        }


def bilipschitz_constants(M1: float, M2: float) -> dict:
    """Distortion constants from ``inf |f|`` and ``sup |f|``."""
    return {
        "C1": 1.0 + 1.0 / M1**4,
        "C2": 1.0 + M2**4,
        "C3": 1.0 + 4.0 * M2**2,
        "C4": 1.0 + 1.0 / (4.0 * M1**2),
    }


def bilipschitz_verify(f: funcgen.SampledFunction, map_kind: str = "reciprocal",
                       pairs: int = 100_000, seed: int = 42) -> BiLipschitzReport:
    """Count sampled pairs whose squared distance ratio escapes the proven bounds.

    For ``map_kind="reciprocal"`` the image graph is that of ``1/f`` and the
    ratio must lie in ``[1/C2, C1]``; for ``"square"`` it is ``f**2`` and the
    ratio must lie in ``[1/C4, C3]``.
    """
    if map_kind not in ("reciprocal", "square"):
        raise ValueError(f"map_kind must be 'reciprocal' or 'square', got {map_kind!r}")
    x = f.x
    v = f.values
    funcgen.check_zero_free(f.source, v, x, on_grid=True, tol=0.0)
    if map_kind == "square" and v[0] < 0:
        # f keeps one sign; -f has an isometric graph and the same square
        v = -v
    absv = np.abs(v)
    M1, M2 = float(absv.min()), float(absv.max())
    consts = bilipschitz_constants(M1, M2)

    rng = np.random.default_rng(seed)
    i = rng.integers(0, v.size, size=pairs)
    j = rng.integers(0, v.size, size=pairs)
    dx2 = (x[i] - x[j]) ** 2
    d2 = dx2 + (v[i] - v[j]) ** 2
    if map_kind == "reciprocal":
        w = 1.0 / v
        lo, hi = 1.0 / consts["C2"], consts["C1"]
    else:
        w = v * v
        lo, hi = 1.0 / consts["C4"], consts["C3"]
    d2_img = dx2 + (w[i] - w[j]) ** 2

    bad = (d2_img > hi * d2 * (1.0 + BILIPSCHITZ_SLACK)) | (d2_img < lo * d2 * (1.0 - BILIPSCHITZ_SLACK))
    nz = d2 > 0
    ratios = d2_img[nz] / d2[nz]
    return BiLipschitzReport(
        map_kind=map_kind, M1=M1, M2=M2, violations=int(bad.sum()), pairs_tested=int(pairs),
        ratio_min=float(ratios.min()) if ratios.size else 1.0,
        ratio_max=float(ratios.max()) if ratios.size else 1.0,
        seed=int(seed), **consts,
    )
