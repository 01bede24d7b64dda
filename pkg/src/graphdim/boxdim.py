"""Box counting on sampled graphs.

Scales are dyadic, ``delta = 2**-k``, aligned with the ``2**-m`` sampling
grid so every column holds an exact block of samples.  For each scale we
record the number of mesh squares the sampled graph meets together with the
oscillation-sum bounds

    delta**-1 * sum(R_i)  <=  N_delta  <=  2 * 2**k + delta**-1 * sum(R_i),

where ``R_i`` is the range of the function over the closed i-th column.
Dimension estimates are ordinary least-squares slopes of ``log2 N`` against
``k``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import funcgen
from .errors import FitError, ResolutionError, SandwichViolation

#: samples per column at the finest usable scale is 2**MIN_SAMPLES_EXP
MIN_SAMPLES_EXP = 4
#: slack on the [1, 2] range every graph estimate must respect
FIT_TOL = 0.1


@dataclass(frozen=True)
class ScaleRecord:
    k: int
    delta: float
    m_cols: int
    osc_sum: float
    grid_count: int
    lower_bound: float
    upper_bound: float

    @property
    def sandwich_ok(self) -> bool:
        return self.lower_bound <= self.grid_count <= self.upper_bound

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class DimensionEstimate:
    slope: float
    intercept: float
    r2: float
    local_slopes: tuple
    upper_proxy: float
    lower_proxy: float
    window: tuple
    degenerate: bool = False

    def in_graph_range(self, tol: float = FIT_TOL) -> bool:
        return 1.0 - tol <= self.slope <= 2.0 + tol

    def to_dict(self):
        d = asdict(self)
        d["local_slopes"] = list(self.local_slopes)
        d["window"] = list(self.window)
        return d


def _check_scale(f: funcgen.SampledFunction, k: int):
    if k < 0:
        raise ResolutionError(f"scale exponent must be non-negative, got {k}")
    if k > f.m - MIN_SAMPLES_EXP:
        raise ResolutionError(
            f"scale 2^-{k} needs m >= {k + MIN_SAMPLES_EXP} "
            f"({2**MIN_SAMPLES_EXP} samples per column), grid has m={f.m}")


def _column_extrema(values, k):
    """Half-open sample extrema per column plus each column's right endpoint.

    Column i holds the samples with x in [i d, (i+1) d); x = 1 joins the last
    column, whose right endpoint is then itself.
    """
    step = values[:-1].size >> k
    body = values[:-1].reshape(2**k, step)
    hi = body.max(axis=1)
    lo = body.min(axis=1)
    right = values[step::step]
    hi[-1] = max(hi[-1], right[-1])
    lo[-1] = min(lo[-1], right[-1])
    return hi, lo, right


def oscillation_scan(f: funcgen.SampledFunction, k: int):
    """Per-column ranges over closed columns and their (correctly rounded) sum."""
    _check_scale(f, k)
    hi, lo, right = _column_extrema(f.values, k)
    per_column = np.maximum(hi, right) - np.minimum(lo, right)
    return math.fsum(per_column), per_column


def column_counts(f: funcgen.SampledFunction, k: int) -> np.ndarray:
    """Mesh squares met in each column by the sampled graph.

    The graph is the piecewise-linear interpolant of the samples, so column i
    spans every row between its closed-column minimum and maximum.  Squares
    are half-open, ``[i d, (i+1) d) x [j d, (j+1) d)``: a maximum reached only
    at the column's right edge and lying on a mesh line does not claim the
    row above it, and the topmost row is closed when the graph's global
    maximum sits on a mesh line (unless the graph is flat).
    """
    _check_scale(f, k)
    v = f.values
    scale = 2.0**k
    hi, lo, right = _column_extrema(v, k)
    top_row = np.floor(np.maximum(hi, right) * scale)
    bottom_row = np.floor(np.minimum(lo, right) * scale)
    edge = right * scale
    approached = (right > hi) & (edge == np.floor(edge))
    top_row = np.where(approached, edge - 1, top_row)
    gmax, gmin = float(v.max()), float(v.min())
    if gmax > gmin and math.floor(gmax * scale) == gmax * scale:
        top_row = np.where(top_row == gmax * scale, top_row - 1, top_row)
        bottom_row = np.where(bottom_row == gmax * scale, bottom_row - 1, bottom_row)
    return (top_row - bottom_row + 1).astype(np.int64)


def grid_count(f: funcgen.SampledFunction, k: int) -> int:
    """Number of ``2**-k`` mesh squares met by the sampled graph."""
    return int(column_counts(f, k).sum())


def scale_record(f: funcgen.SampledFunction, k: int) -> ScaleRecord:
    osc_sum, _ = oscillation_scan(f, k)
    m_cols = 2**k
    scaled = osc_sum * 2.0**k
    return ScaleRecord(
        k=k,
        delta=2.0**-k,
        m_cols=m_cols,
        osc_sum=osc_sum,
        grid_count=grid_count(f, k),
        lower_bound=scaled,
        upper_bound=2.0 * m_cols + scaled,
    )


def scan(f: funcgen.SampledFunction, k_min: int, k_max: int, strict: bool = True):
    """One :class:`ScaleRecord` per ``k`` in ``[k_min, k_max]``.

    With ``strict`` a record outside its oscillation-sum bounds raises
    :class:`SandwichViolation`; otherwise callers inspect ``sandwich_ok``.
    """
    if k_min < 2 or k_max <= k_min:
        raise FitError(f"empty or invalid scale window [{k_min}, {k_max}]")
    if k_max > f.m - MIN_SAMPLES_EXP:
        raise ResolutionError(f"window top {k_max} exceeds m - {MIN_SAMPLES_EXP} = {f.m - MIN_SAMPLES_EXP}")
    records = [scale_record(f, k) for k in range(k_min, k_max + 1)]
    if strict:
        bad = [r for r in records if not r.sandwich_ok]
        if bad:
            r = bad[0]
            raise SandwichViolation(
                f"{f.describe()}: count {r.grid_count} outside "
                f"[{r.lower_bound!r}, {r.upper_bound!r}] at k={r.k}")
    return records


def fit_dimension(records: Sequence[ScaleRecord], window: Optional[tuple] = None) -> DimensionEstimate:
    """Least-squares slope of ``log2 N`` against ``k``.

    The lower/upper proxies are the smallest/largest local slope over the
    upper half of the window, widened if needed to contain the fitted slope.
    """
    if window is not None:
        records = [r for r in records if window[0] <= r.k <= window[1]]
    records = sorted(records, key=lambda r: r.k)
    if len(records) < 4:
        raise FitError(f"need at least 4 scales to fit, got {len(records)}")
    k = np.array([r.k for r in records], dtype=float)
    y = np.log2(np.array([r.grid_count for r in records], dtype=float))
    win = (int(k[0]), int(k[-1]))
    local = np.diff(y) / np.diff(k)

    kc = k - k.mean()
    ss_tot = float(np.dot(y - y.mean(), y - y.mean()))
    if ss_tot == 0.0:
        return DimensionEstimate(0.0, float(y[0]), 0.0, tuple(local.tolist()), 0.0, 0.0, win, degenerate=True)
    slope = float(np.dot(kc, y - y.mean()) / np.dot(kc, kc))
    intercept = float(y.mean() - slope * k.mean())
    resid = y - (intercept + slope * k)
    r2 = 1.0 - float(np.dot(resid, resid)) / ss_tot

    tail = local[len(local) // 2:]
    return DimensionEstimate(
        slope=slope,
        intercept=intercept,
        r2=r2,
        local_slopes=tuple(float(s) for s in local),
        upper_proxy=max(float(tail.max()), slope),
        lower_proxy=min(float(tail.min()), slope),
        window=win,
    )


@dataclass
class Estimate:
    """A scan together with its fit."""

    source: str
    m: int
    records: list
    fit: DimensionEstimate

    @property
    def slope(self) -> float:
        return self.fit.slope

    @property
    def sandwich_ok(self) -> bool:
        return all(r.sandwich_ok for r in self.records)


@dataclass
class Estimator:
    """Estimates graph dimensions at a fixed grid and window, memoised per expression."""

    m: int = 20
    window: tuple = (6, 16)
    strict: bool = True
    _memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.window = tuple(self.window)
        if self.window[1] > self.m - MIN_SAMPLES_EXP:
            raise ResolutionError(f"window {self.window} does not fit grid m={self.m}")

    def estimate(self, f) -> Estimate:
        if isinstance(f, funcgen.SampledFunction):
            return estimate_sampled(f, self.window, strict=self.strict)
        hit = self._memo.get(f)
        if hit is None:
            hit = self._memo[f] = estimate_sampled(funcgen.sample(f, self.m), self.window, strict=self.strict)
        return hit

    def __call__(self, f) -> DimensionEstimate:
        return self.estimate(f).fit


def estimate_sampled(f: funcgen.SampledFunction, window, strict: bool = True) -> Estimate:
    records = scan(f, window[0], window[1], strict=strict)
    return Estimate(f.describe(), f.m, records, fit_dimension(records))
