"""Delta, Nabla and Diamond-Alpha derivatives and integrals on hybrid time scales."""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from itertools import accumulate
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from tsmono import exprlang
from tsmono.errors import (
    EndpointsNotInScale,
    NotDifferentiableHere,
    PointNotInScale,
    PositivityViolated,
)
from tsmono.timescale import Interval, TimeScale

TOL_QUAD = 1e-10
MAX_DEPTH = 40
_EPS_FLOOR = 64 * 2.220446049250313e-16
MIN_DEPTH = 2
TOL_FD = 1e-4


def fd_step(t: float) -> float:
    return max(1e-6, 1e-6 * abs(t))


@dataclass(frozen=True)
class IntegralKind:
    tag: str
    alpha_weight: Optional[float] = None

    def __post_init__(self):
        if self.tag not in ("delta", "nabla", "diamond"):
            raise ValueError(f"unknown integral kind {self.tag!r}")
        if self.tag == "diamond":
            if self.alpha_weight is None or not 0.0 <= self.alpha_weight <= 1.0:
                raise ValueError("DiamondAlpha needs alpha_weight in [0, 1]")

    def __str__(self):
        if self.tag == "diamond":
            return f"DiamondAlpha({self.alpha_weight})"
        return self.tag.capitalize()


DELTA = IntegralKind("delta")
NABLA = IntegralKind("nabla")


def diamond(alpha_weight: float) -> IntegralKind:
    return IntegralKind("diamond", float(alpha_weight))


class GridFn:
    """A real function restricted to a time scale.

    ``fn`` is any callable of one float.  ``derivative``, when given, is the
    ordinary derivative used at dense points instead of finite differences.
    """

    def __init__(
        self,
        domain: TimeScale,
        fn: Callable[[float], float],
        *,
        derivative: Optional[Callable[[float], float]] = None,
        name: str = "f",
        source: Optional[str] = None,
    ):
        self.domain = domain
        self.fn = fn
        self.derivative = derivative
        self.name = name
        self.source = source

    def __call__(self, t: float) -> float:
        return self.fn(t)

    def __repr__(self):
        return f"GridFn({self.name}={self.source or self.fn!r} on {self.domain!r})"

    @classmethod
    def from_expression(cls, src, domain: TimeScale, var: str = "u", name: str = "f") -> "GridFn":
        node = exprlang.parse(src, (var,)) if isinstance(src, str) else src
        fn = exprlang.compile_expr(node, (var,))
        d = exprlang.derive_s(node, var)
        deriv = exprlang.compile_expr(d, (var,)) if d is not None else None
        text = src if isinstance(src, str) else exprlang.to_source(node)
        return cls(domain, fn, derivative=deriv, name=name, source=text)

    @classmethod
    def from_table(cls, domain: TimeScale, table: Mapping[float, float], name: str = "f") -> "GridFn":
        keys = np.array(sorted(float(k) for k in table))
        vals = np.array([float(table[k]) for k in sorted(table, key=float)])

        def fn(t):
            t = domain.snap(t)
            i = bisect_left(keys, t)
            if i < len(keys) and keys[i] == t:
                return float(vals[i])
            if i > 0 and i < len(keys) and abs(keys[i - 1] - t) < 1e-12 * max(1.0, abs(t)):
                return float(vals[i - 1])
            if 0 < i < len(keys):
                return float(np.interp(t, keys, vals))
            raise PointNotInScale(t)

        return cls(domain, fn, name=name, source="table")

    def check_positive(self, points: Sequence[float]) -> float:
        worst, where = math.inf, None
        for t in points:
            v = self.fn(t)
            if v < worst:
                worst, where = v, t
        if not worst > 0:
            raise PositivityViolated(self.name, where, worst)
        return worst


def _as_fn(f):
    return f.fn if isinstance(f, GridFn) else f


# -- quadrature --------------------------------------------------------------

def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: Optional[float] = None,
    max_depth: int = MAX_DEPTH,
) -> float:
    """Adaptive Simpson quadrature with Richardson correction."""
    tol = TOL_QUAD if tol is None else tol
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_step(f, a, fa, m, fm, b, fb, whole, tol, max_depth, 0)


def _simpson_step(f, a, fa, m, fm, b, fb, whole, tol, depth_left, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    # below this, delta is rounding noise and halving tol cannot help
    floor = _EPS_FLOOR * (b - a) * (abs(fa) + abs(flm) + abs(fm) + abs(frm) + abs(fb))
    if depth_left <= 0 or (depth >= MIN_DEPTH and abs(delta) <= 15.0 * max(tol, floor)):
        return left + right + delta / 15.0
    return _simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth_left - 1, depth + 1) + _simpson_step(
        f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth_left - 1, depth + 1
    )


# -- integrals ---------------------------------------------------------------

def _integral_pieces(kind_tag: str, fn, T: TimeScale, a: float, b: float, tol: float) -> list:
    ka, a = T.locate(a)
    kb, b = T.locate(b)
    segs = T.segments
    pieces = []
    for k in range(ka, kb + 1):
        seg = segs[k]
        if isinstance(seg, Interval):
            x, y = max(seg.lo, a), min(seg.hi, b)
            if y > x:
                pieces.append(adaptive_simpson(fn, x, y, tol))
        if kind_tag == "delta":
            r = seg.end
            if a <= r < b:
                pieces.append((segs[k + 1].start - r) * fn(r))
        else:
            left = seg.start
            if a < left <= b:
                pieces.append((left - segs[k - 1].end) * fn(left))
    return pieces


def _directed(kind_tag, fn, T, a, b, tol):
    return math.fsum(_integral_pieces(kind_tag, fn, T, a, b, tol))


def integral(
    kind: IntegralKind,
    f,
    a: float,
    b: float,
    *,
    scale: Optional[TimeScale] = None,
    tol: Optional[float] = None,
) -> float:
    """Integral of ``f`` from ``a`` to ``b`` over the time scale.

    Isolated stretches contribute ``mu(t) f(t)`` over ``[a, b)`` (Delta) or
    ``nu(t) f(t)`` over ``(a, b]`` (Nabla); intervals are integrated by
    adaptive Simpson to ``tol`` (module default ``TOL_QUAD``, read at call
    time so it can be overridden globally).  ``a > b`` returns the negated
    integral from ``b`` to ``a``.
    """
    T = scale if scale is not None else f.domain
    fn = _as_fn(f)
    tol = TOL_QUAD if tol is None else tol
    try:
        a = T.snap(a)
        b = T.snap(b)
    except PointNotInScale as exc:
        raise EndpointsNotInScale(exc.t, T) from None
    if a == b:
        return 0.0
    if a > b:
        return -integral(kind, fn, b, a, scale=T, tol=tol)
    if kind.tag == "diamond":
        w = kind.alpha_weight
        return w * _directed("delta", fn, T, a, b, tol) + (1.0 - w) * _directed("nabla", fn, T, a, b, tol)
    return _directed(kind.tag, fn, T, a, b, tol)


def cumulative_integral(
    kind: IntegralKind,
    f,
    points: Sequence[float],
    *,
    scale: Optional[TimeScale] = None,
    tol: Optional[float] = None,
) -> list[float]:
    """Integrals from ``points[0]`` to each entry of the increasing ``points``.

    Uses additivity: each step integrates only between consecutive points.
    """
    T = scale if scale is not None else f.domain
    fn = _as_fn(f)
    steps = [0.0] + [
        integral(kind, fn, p, q, scale=T, tol=tol) for p, q in zip(points, points[1:])
    ]
    return list(accumulate(steps))


# -- derivatives -------------------------------------------------------------

def _dense_derivative(f, T: TimeScale, t: float, side: str) -> float:
    if isinstance(f, GridFn) and f.derivative is not None:
        return f.derivative(t)
    fn = _as_fn(f)
    k, t = T.locate(t)
    seg = T.segments[k]
    h = min(fd_step(t), 0.25 * (seg.hi - seg.lo))
    if t - h >= seg.lo and t + h <= seg.hi:
        return (fn(t + h) - fn(t - h)) / (2.0 * h)
    if side == "right" and t + h <= seg.hi:
        return (fn(t + h) - fn(t)) / h
    return (fn(t) - fn(t - h)) / h


def _delta_derivative(f, T, t):
    cls = T.classify(t)
    t = T.snap(t)
    if cls.is_max:
        raise NotDifferentiableHere(f"Delta derivative undefined at max(T) = {t}")
    if not cls.right_dense:
        s = T.sigma(t)
        fn = _as_fn(f)
        return (fn(s) - fn(t)) / (s - t)
    return _dense_derivative(f, T, t, "right")


def _nabla_derivative(f, T, t):
    cls = T.classify(t)
    t = T.snap(t)
    if cls.is_min:
        raise NotDifferentiableHere(f"Nabla derivative undefined at min(T) = {t}")
    if not cls.left_dense:
        r = T.rho(t)
        fn = _as_fn(f)
        return (fn(t) - fn(r)) / (t - r)
    return _dense_derivative(f, T, t, "left")


def derivative(kind: IntegralKind, f, t: float, *, scale: Optional[TimeScale] = None) -> float:
    T = scale if scale is not None else f.domain
    if kind.tag == "delta":
        return _delta_derivative(f, T, t)
    if kind.tag == "nabla":
        return _nabla_derivative(f, T, t)
    w = kind.alpha_weight
    if w == 1.0:
        return _delta_derivative(f, T, t)
    if w == 0.0:
        return _nabla_derivative(f, T, t)
    return w * _delta_derivative(f, T, t) + (1.0 - w) * _nabla_derivative(f, T, t)
