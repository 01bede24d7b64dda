"""Continuous functions on [0, 1]: generators, combinators and grid sampling.

A function is a small immutable expression tree.  Leaves are generators with
known graph dimension (Weierstrass and Takagi series, a Peano curve
coordinate, linear and constant functions); inner nodes form the algebra the
dimension rules quantify over (sum, product, reciprocal, integer power,
vertical shift, and the linear extension from a Cantor set).

Two evaluation paths share the same elementwise arithmetic, so a pointwise
:func:`evaluate` at a grid point reproduces :func:`sample` bit for bit.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import ZeroCrossingError

M_MIN = 4
M_MAX = 26
#: grid exponent whose truncation levels pointwise evaluation uses by default
EVAL_M = M_MAX
#: smallest |value| a reciprocal's argument may take on a sampling grid
ZERO_TOL = 1e-9

PEANO_MAX_DIGITS = 40
_LOG2_3 = math.log2(3.0)


def _fmt(v):
    return repr(float(v))


def as_expr(value):
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return Constant(float(value))
    raise TypeError(f"cannot use {type(value).__name__} as a function")


class Expr:
    """Base class of every expression node.

    Arithmetic operators build combinator nodes, so ``2 * f + 1`` and
    ``1 / f`` produce expression trees rather than numbers.
    """

    def __add__(self, other):
        return Sum(self, as_expr(other))

    def __radd__(self, other):
        return Sum(as_expr(other), self)

    def __sub__(self, other):
        return Sum(self, -as_expr(other))

    def __rsub__(self, other):
        return Sum(as_expr(other), -self)

    def __neg__(self):
        return Product(Constant(-1.0), self)

    def __mul__(self, other):
        return Product(self, as_expr(other))

    def __rmul__(self, other):
        return Product(as_expr(other), self)

    def __truediv__(self, other):
        return Product(self, Reciprocal(as_expr(other)))

    def __rtruediv__(self, other):
        return Product(as_expr(other), Reciprocal(self))

    def __pow__(self, n):
        return Power(self, n)

    def children(self):
        return ()

    def describe(self) -> str:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _values(self, x, m, child, on_grid):
        raise NotImplementedError


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True, eq=True)
class Weierstrass(Expr):
    """Truncated series ``sum_{n=0..N} a**n cos(2 pi b**n x)``.

    With ``N=None`` the term count follows the sampling grid: enough terms
    that the first omitted frequency exceeds ``2**(m + 6)``.
    """

    a: float
    b: int
    n_terms: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.a < 1.0:
            raise ValueError(f"Weierstrass amplitude ratio must lie in (0, 1), got {self.a}")
        if int(self.b) != self.b or self.b < 2:
            raise ValueError(f"Weierstrass frequency base must be an integer >= 2, got {self.b}")
        object.__setattr__(self, "b", int(self.b))
        if self.a * self.b <= 1.0:
            raise ValueError(f"Weierstrass needs a*b > 1, got a*b = {self.a * self.b}")
        if self.n_terms is not None and self.n_terms < 0:
            raise ValueError("n_terms must be non-negative")

    def terms(self, m: int) -> int:
        if self.n_terms is not None:
            return self.n_terms
        return math.ceil((m + 6) / math.log2(self.b))

    @property
    def dimension(self) -> float:
        """Box dimension of the untruncated graph, ``2 + log a / log b``."""
        return weierstrass_dimension(self.a, self.b)

    def describe(self):
        args = [_fmt(self.a), str(self.b)]
        if self.n_terms is not None:
            args.append(str(self.n_terms))
        return f"weier({','.join(args)})"

    def to_dict(self):
        return {"kind": "weierstrass", "a": self.a, "b": self.b, "n_terms": self.n_terms}

    def _values(self, x, m, child, on_grid):
        out = np.zeros_like(x)
        for n in range(self.terms(m) + 1):
            phase = np.mod(float(self.b**n) * x, 1.0)
            out += self.a**n * np.cos(2.0 * np.pi * phase)
        return out


@dataclass(frozen=True, eq=True)
class Takagi(Expr):
    """Takagi (blancmange) function ``sum 2**-n dist(2**n x, Z)``."""

    n_terms: Optional[int] = None

    def terms(self, m: int) -> int:
        if self.n_terms is not None:
            return self.n_terms
        return m + 6

    def describe(self):
        return "takagi()" if self.n_terms is None else f"takagi({self.n_terms})"

    def to_dict(self):
        return {"kind": "takagi", "n_terms": self.n_terms}

    def _values(self, x, m, child, on_grid):
        out = np.zeros_like(x)
        for n in range(self.terms(m) + 1):
            y = np.mod(2.0**n * x + 0.5, 1.0) - 0.5
            out += 2.0**-n * np.abs(y)
        return out


@dataclass(frozen=True, eq=True)
class PeanoX(Expr):
    """First coordinate of the classical base-3 Peano curve."""

    digits: Optional[int] = None

    def __post_init__(self):
        if self.digits is not None and not 1 <= self.digits <= PEANO_MAX_DIGITS:
            raise ValueError(f"digits must lie in [1, {PEANO_MAX_DIGITS}], got {self.digits}")

    def depth(self, m: int) -> int:
        if self.digits is not None:
            return self.digits
        return min(math.ceil(m / _LOG2_3) + 2, PEANO_MAX_DIGITS)

    def describe(self):
        return "peano_x()" if self.digits is None else f"peano_x({self.digits})"

    def to_dict(self):
        return {"kind": "peano_x", "digits": self.digits}

    def _values(self, x, m, child, on_grid):
        return _peano_values(x, self.depth(m))


@dataclass(frozen=True, eq=True)
class Linear(Expr):
    slope: float
    intercept: float = 0.0

    def describe(self):
        if self.slope == 1.0 and self.intercept == 0.0:
            return "x"
        return f"({_fmt(self.slope)}*x+{_fmt(self.intercept)})"

    def to_dict(self):
        return {"kind": "linear", "slope": self.slope, "intercept": self.intercept}

    def _values(self, x, m, child, on_grid):
        return self.slope * x + self.intercept


@dataclass(frozen=True, eq=True)
class Constant(Expr):
    c: float

    def describe(self):
        return _fmt(self.c)

    def to_dict(self):
        return {"kind": "constant", "c": self.c}

    def _values(self, x, m, child, on_grid):
        return np.full_like(x, float(self.c))


# ---------------------------------------------------------------------------
# combinators


@dataclass(frozen=True, eq=True)
class CantorExtension(Expr):
    """Linear extension of ``inner`` from a central Cantor set.

    Agrees with ``inner`` on the depth-limited Cantor set of ratio ``ratio``
    and is affine across every removed gap.  ``depth=None`` ties the depth
    to the sampling grid, ``floor(m log 2 / log 3)``.
    """

    inner: Expr
    ratio: float = 1.0 / 3.0
    depth: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.ratio < 0.5:
            raise ValueError(f"Cantor ratio must lie in (0, 1/2), got {self.ratio}")
        if self.depth is not None and self.depth < 0:
            raise ValueError("depth must be non-negative")

    def levels(self, m: int) -> int:
        if self.depth is not None:
            return self.depth
        return math.floor(m / _LOG2_3)

    def children(self):
        return (self.inner,)

    def describe(self):
        args = [self.inner.describe(), _fmt(self.ratio)]
        if self.depth is not None:
            args.append(str(self.depth))
        return f"cantor_ext({', '.join(args)})"

    def to_dict(self):
        return {"kind": "cantor_extension", "ratio": self.ratio, "depth": self.depth,
                "inner": self.inner.to_dict()}

    def _values(self, x, m, child, on_grid):
        r = self.ratio
        left = np.zeros_like(x)
        length = np.ones_like(x)
        active = np.ones(x.shape, dtype=bool)
        in_gap = np.zeros(x.shape, dtype=bool)
        lo = np.zeros_like(x)
        hi = np.zeros_like(x)
        for _ in range(self.levels(m)):
            left_end = left + r * length
            right_start = left + (1.0 - r) * length
            go_left = active & (x <= left_end)
            go_right = active & ~go_left & (x >= right_start)
            gap = active & ~go_left & ~go_right
            lo[gap] = left_end[gap]
            hi[gap] = right_start[gap]
            in_gap |= gap
            active &= ~gap
            left = np.where(go_right, right_start, left)
            length = np.where(active, length * r, length)

        out = np.array(child(self.inner), dtype=float, copy=True)
        if in_gap.any():
            g_lo, g_hi = lo[in_gap], hi[in_gap]
            ends = evaluate_many(self.inner, np.concatenate([g_lo, g_hi]), m=m)
            f_lo, f_hi = ends[: g_lo.size], ends[g_lo.size:]
            t = (x[in_gap] - g_lo) / (g_hi - g_lo)
            out[in_gap] = f_lo + (f_hi - f_lo) * t
        return out


@dataclass(frozen=True, eq=True)
class Sum(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)

    def describe(self):
        return f"({self.left.describe()} + {self.right.describe()})"

    def to_dict(self):
        return {"kind": "sum", "left": self.left.to_dict(), "right": self.right.to_dict()}

    def _values(self, x, m, child, on_grid):
        return child(self.left) + child(self.right)


@dataclass(frozen=True, eq=True)
class Product(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)

    def describe(self):
        return f"({self.left.describe()} * {self.right.describe()})"

    def to_dict(self):
        return {"kind": "product", "left": self.left.to_dict(), "right": self.right.to_dict()}

    def _values(self, x, m, child, on_grid):
        return child(self.left) * child(self.right)


@dataclass(frozen=True, eq=True)
class Reciprocal(Expr):
    inner: Expr

    def children(self):
        return (self.inner,)

    def describe(self):
        return f"1/{self.inner.describe()}"

    def to_dict(self):
        return {"kind": "reciprocal", "inner": self.inner.to_dict()}

    def _values(self, x, m, child, on_grid):
        v = child(self.inner)
        check_zero_free(self.inner, v, x, on_grid=on_grid)
        return 1.0 / v


@dataclass(frozen=True, eq=True)
class Power(Expr):
    inner: Expr
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"power exponent must be an integer >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    def children(self):
        return (self.inner,)

    def describe(self):
        return f"{self.inner.describe()}^{self.n}"

    def to_dict(self):
        return {"kind": "power", "n": self.n, "inner": self.inner.to_dict()}

    def _values(self, x, m, child, on_grid):
        return np.power(child(self.inner), self.n)


@dataclass(frozen=True, eq=True)
class Shift(Expr):
    """Vertical translation ``inner + c``."""

    inner: Expr
    c: float

    def children(self):
        return (self.inner,)

    def describe(self):
        return f"({self.inner.describe()} + {_fmt(self.c)})"

    def to_dict(self):
        return {"kind": "shift", "c": self.c, "inner": self.inner.to_dict()}

    def _values(self, x, m, child, on_grid):
        return child(self.inner) + self.c


# ---------------------------------------------------------------------------
# named constructions


def weierstrass_dimension(a: float, b: float) -> float:
    return 2.0 + math.log(a) / math.log(b)


def weierstrass_type(s: float, b: int = 3, floor: float = 1.0) -> Shift:
    """Positive Weierstrass-type function whose graph has box dimension ``s``.

    Uses ``a = b**(s - 2)`` and shifts by ``floor + 1/(1 - a)``, which bounds
    the function below by ``floor``.
    """
    if not 1.0 < s < 2.0:
        raise ValueError(f"Weierstrass-type dimension must lie in (1, 2), got {s}")
    a = float(b) ** (s - 2.0)
    return Shift(Weierstrass(a, b), floor + 1.0 / (1.0 - a))


# ---------------------------------------------------------------------------
# Peano coordinate

_PEANO_BITS = 61


def _peano_from_numerators(num, digits):
    """Exact digit automaton on numerators over ``2**61``."""
    parity = np.zeros(num.shape, dtype=np.int64)
    xdigits = []
    for j in range(digits):
        num = num * 3
        d = num >> _PEANO_BITS
        num = num - (d << _PEANO_BITS)
        if j % 2 == 0:
            xdigits.append(np.where(parity & 1, 2 - d, d))
        else:
            parity = parity + d
    out = np.zeros(num.shape, dtype=float)
    for d in reversed(xdigits):
        out = (out + d) / 3.0
    return out


def _peano_fraction(t: Fraction, digits: int) -> float:
    parity = 0
    xdigits = []
    for j in range(digits):
        t *= 3
        d = int(t)
        t -= d
        if j % 2 == 0:
            xdigits.append(2 - d if parity & 1 else d)
        else:
            parity += d
    out = 0.0
    for d in reversed(xdigits):
        out = (out + d) / 3.0
    return out


def _peano_values(t, digits):
    t = np.asarray(t, dtype=float)
    scaled = t * float(1 << _PEANO_BITS)
    exact = scaled == np.floor(scaled)
    out = np.empty_like(t)
    out[exact] = _peano_from_numerators(scaled[exact].astype(np.int64), digits)
    for i in np.flatnonzero(~exact):
        out[i] = _peano_fraction(Fraction(float(t[i])), digits)
    # t = 1 is 0.222... in base 3; the truncated expansion would miss the tail
    out[t == 1.0] = 1.0
    return out


def peano_x(t: float, digits: int) -> float:
    """First Peano-curve coordinate from the first ``digits`` ternary digits of ``t``.

    The n-th ternary digit of the output is ``t[2n-1]``, complemented
    (``d -> 2 - d``) when ``t[2] + t[4] + ... + t[2n-2]`` is odd.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if not 1 <= digits <= PEANO_MAX_DIGITS:
        raise ValueError(f"digits must lie in [1, {PEANO_MAX_DIGITS}], got {digits}")
    return float(_peano_values(np.array([float(t)]), digits)[0])


# ---------------------------------------------------------------------------
# evaluation


def check_zero_free(expr, values, x, on_grid=False, tol=ZERO_TOL):
    """Raise :class:`ZeroCrossingError` unless ``values`` stay away from zero.

    ``tol=0`` only demands strict non-vanishing.

    On a sorted grid a sign change between neighbouring samples also counts,
    since the continuous function must vanish in between.
    """
    values = np.asarray(values)
    if values.size == 0:
        return
    absv = np.abs(values)
    i = int(np.argmin(absv))
    if not absv[i] > tol:
        raise ZeroCrossingError(expr, float(x[i]), i if on_grid else None,
                                detail=f"|value| = {absv[i]:.3g} <= {tol:g}")
    if on_grid:
        neg = np.signbit(values)
        flips = np.flatnonzero(neg[1:] != neg[:-1])
        if flips.size:
            i = int(flips[0])
            raise ZeroCrossingError(expr, float(x[i]), i,
                                    detail=f"sign changes before x={float(x[i + 1])!r}")


def evaluate_many(expr: Expr, x, m: int = EVAL_M) -> np.ndarray:
    """Evaluate ``expr`` at arbitrary points (no grid caching)."""
    x = np.asarray(x, dtype=float)
    memo = {}

    def child(e):
        v = memo.get(e)
        if v is None:
            v = memo[e] = e._values(x, m, child, False)
        return v

    return np.asarray(child(expr), dtype=float)


def evaluate(expr: Expr, x: float, m: int = EVAL_M) -> float:
    """Value of ``expr`` at ``x``.

    ``m`` selects the truncation level of the series generators; pass the
    grid exponent to reproduce :func:`sample` exactly.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    return float(evaluate_many(expr, np.array([float(x)]), m=m)[0])


def grid(m: int) -> np.ndarray:
    return np.arange(2**m + 1, dtype=float) / 2.0**m


class _GridCache:
    """LRU over sampled arrays, bounded by total bytes."""

    def __init__(self, max_bytes=768 * 2**20):
        self.max_bytes = max_bytes
        self._items = OrderedDict()
        self._bytes = 0

    def get(self, key):
        v = self._items.get(key)
        if v is not None:
            self._items.move_to_end(key)
        return v

    def put(self, key, value):
        self._items[key] = value
        self._bytes += value.nbytes
        while self._bytes > self.max_bytes and len(self._items) > 1:
            _, old = self._items.popitem(last=False)
            self._bytes -= old.nbytes

    def clear(self):
        self._items.clear()
        self._bytes = 0


_cache = _GridCache()


def clear_cache():
    _cache.clear()


def _grid_values(expr: Expr, m: int) -> np.ndarray:
    key = (expr, m)
    v = _cache.get(key)
    if v is None:
        v = np.asarray(expr._values(grid(m), m, lambda e: _grid_values(e, m), True), dtype=float)
        v.setflags(write=False)
        _cache.put(key, v)
    return v


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values of a function at the ``2**m + 1`` points ``i / 2**m``."""

    m: int
    values: np.ndarray
    source: object = None

    def __post_init__(self):
        if self.values.shape != (2**self.m + 1,):
            raise ValueError(f"expected {2**self.m + 1} samples for m={self.m}, got {self.values.shape}")

    @property
    def x(self) -> np.ndarray:
        return grid(self.m)

    @property
    def spacing(self) -> float:
        return 2.0**-self.m

    def describe(self) -> str:
        if isinstance(self.source, Expr):
            return self.source.describe()
        return str(self.source) if self.source is not None else "<samples>"


def sample(expr: Expr, m: int) -> SampledFunction:
    if not M_MIN <= m <= M_MAX:
        raise ValueError(f"grid exponent m must lie in [{M_MIN}, {M_MAX}], got {m}")
    return SampledFunction(m, _grid_values(expr, m), expr)


def cantor_extension(inner: Expr, r: float = 1.0 / 3.0, m: int = 16) -> SampledFunction:
    """Sample the linear extension of ``inner`` off the ratio-``r`` Cantor set."""
    return sample(CantorExtension(inner, r), m)


def walk(expr: Expr):
    """Yield every node of the tree, root first."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))
