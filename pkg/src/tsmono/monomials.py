"""Generalized monomials h_m(t, s0) on time scales and the log-concavity margin.

``h_0 = 1`` and ``h_m(t, s0)`` is the Delta integral of ``h_{m-1}(., s0)``
from ``s0`` to ``t``.  On every interval of a hybrid scale ``h_m`` is a
polynomial of degree ``m``, so the recursion is carried out bottom-up, one
order at a time, on per-segment data: exact polynomial antiderivatives on
intervals and ``mu * h_{m-1}`` jumps across gaps.  Purely discrete scales are
evaluated in exact rational arithmetic and rounded once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from tsmono.errors import (
    DegenerateDenominator,
    OrderExceedsContext,
    UnsupportedScaleTag,
)
from tsmono.timescale import Interval, ScaleLabel, TimeScale, member_tol

TAU_ZERO = 1e-12


class MonomialCtx:
    """Memoized table of h_0 .. h_M anchored at ``s0`` over a time scale."""

    def __init__(self, scale: TimeScale, s0: float, max_order: int, resolution: float = 0.1):
        if max_order < 0:
            raise ValueError("max_order must be non-negative")
        self.scale = scale
        self.s0 = scale.snap(s0)
        self.max_order = int(max_order)
        self.exact = scale.is_discrete
        self._segment_data = self._build()
        self.grid = scale.enumerate_grid(resolution)
        self.cache = np.array(
            [[self._value(m, t) for t in self.grid] for m in range(self.max_order + 1)]
        )

    def _point(self, x):
        return self.scale.exact_point(x) if self.exact else x

    def _build(self):
        segs = self.scale.segments
        k0, _ = self.scale.locate(self.s0)
        one = Fraction(1) if self.exact else 1.0
        zero = Fraction(0) if self.exact else 0.0
        # data[k][m] is a value (points) or a Polynomial in t - lo (intervals)
        data = [[] for _ in segs]
        for k, seg in enumerate(segs):
            data[k].append(Polynomial([1.0]) if isinstance(seg, Interval) else one)

        def at_end(k, m):
            seg = segs[k]
            if isinstance(seg, Interval):
                return data[k][m](seg.hi - seg.lo)
            return data[k][m]

        def at_start(k, m):
            seg = segs[k]
            if isinstance(seg, Interval):
                return data[k][m](0.0)
            return data[k][m]

        for m in range(1, self.max_order + 1):
            seg = segs[k0]
            if isinstance(seg, Interval):
                p = data[k0][m - 1].integ()
                data[k0].append(p - p(self.s0 - seg.lo))
            else:
                data[k0].append(zero)
            for k in range(k0 + 1, len(segs)):
                prev = segs[k - 1]
                gap = self._point(segs[k].start) - self._point(prev.end)
                entry = at_end(k - 1, m) + gap * at_end(k - 1, m - 1)
                if isinstance(segs[k], Interval):
                    data[k].append(data[k][m - 1].integ() + float(entry))
                else:
                    data[k].append(entry)
            for k in range(k0 - 1, -1, -1):
                nxt = segs[k + 1]
                gap = self._point(nxt.start) - self._point(segs[k].end)
                # h_{m-1}(end_k) is already known for this segment
                end_prev_order = at_end(k, m - 1)
                value = at_start(k + 1, m) - gap * end_prev_order
                if isinstance(segs[k], Interval):
                    p = data[k][m - 1].integ()
                    data[k].append(p + (float(value) - p(segs[k].hi - segs[k].lo)))
                else:
                    data[k].append(value)
        return data

    def _raw(self, m: int, t: float):
        k, t = self.scale.locate(t)
        seg = self.scale.segments[k]
        val = self._segment_data[k][m]
        if isinstance(seg, Interval):
            return float(val(t - seg.lo))
        return val

    def _value(self, m: int, t: float) -> float:
        return float(self._raw(m, t))

    def h(self, m: int, t: float) -> float:
        if m > self.max_order or m < 0:
            raise OrderExceedsContext(f"order {m} outside 0..{self.max_order}")
        return self._value(m, t)

    def h_exact(self, m: int, t: float):
        """Exact Fraction on discrete scales, float otherwise."""
        if m > self.max_order or m < 0:
            raise OrderExceedsContext(f"order {m} outside 0..{self.max_order}")
        return self._raw(m, t)


def h_recursive(ctx: MonomialCtx, m: int, t: float) -> float:
    return ctx.h(m, t)


def _snap_qpower(x: float, q: Fraction, qf: float) -> Fraction:
    if x > 0:
        k = round(math.log(x) / math.log(qf))
        if abs(qf**k - x) <= member_tol(x):
            return q**k
    return Fraction(x)


def h_closed_form(scale_tag, m: int, t: float, s0: float, q: Optional[float] = None) -> float:
    """Closed forms on R, Z and q^Z (q > 1)."""
    if isinstance(scale_tag, ScaleLabel):
        q = scale_tag.q if q is None else q
        scale_tag = scale_tag.kind
    tag = str(scale_tag).lower()
    if m < 0:
        raise ValueError("order must be non-negative")
    if tag == "reals":
        return (t - s0) ** m / math.factorial(m)
    if tag in ("integers", "naturals"):
        d = Fraction(t) - Fraction(s0)
        prod = Fraction(1)
        for i in range(m):
            prod *= d - i
        return float(prod / math.factorial(m))
    if tag == "qpowers":
        if q is None or not q > 1:
            raise ValueError("QPowers closed form needs q > 1")
        qf = float(q)
        qq = Fraction(qf)
        tt = _snap_qpower(t, qq, qf)
        ss = _snap_qpower(s0, qq, qf)
        prod = Fraction(1)
        denom = Fraction(0)
        for u in range(m):
            denom += qq**u
            prod *= (tt - qq**u * ss) / denom
        return float(prod)
    raise UnsupportedScaleTag(f"no closed form for scale tag {scale_tag!r}")


@dataclass(frozen=True)
class ConMargin:
    m: int
    t: float
    margin: float
    ratio_difference: float
    sign: str


def con_margin(ctx: MonomialCtx, m: int, t: float) -> ConMargin:
    """``h_{m+1}^2 - h_{m+2} h_m``; non-negative iff the ratio inequality holds
    at (m, t) when the monomials are positive."""
    if m + 2 > ctx.max_order:
        raise OrderExceedsContext(f"con_margin needs order {m + 2} > {ctx.max_order}")
    h0, h1, h2 = (ctx.h_exact(m + i, t) for i in range(3))
    if abs(float(h1)) <= TAU_ZERO or abs(float(h0)) <= TAU_ZERO:
        raise DegenerateDenominator(f"h_{m} or h_{m + 1} vanishes at t={t}")
    margin = h1 * h1 - h2 * h0
    ratio_diff = h2 / h1 - h1 / h0
    value = float(margin)
    if value < -TAU_ZERO:
        sign = "negative"
    else:
        sign = "zero" if value <= TAU_ZERO else "positive"
    return ConMargin(m, float(t), value, float(ratio_diff), sign)


@dataclass
class ConScan:
    min_margin: float = math.inf
    witness: Optional[tuple] = None
    evaluated: int = 0
    degenerate: int = 0
    violations: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations


def con_scan(
    ctx: MonomialCtx,
    orders: Iterable[int],
    points: Optional[Sequence[float]] = None,
    tol: float = TAU_ZERO,
) -> ConScan:
    """Evaluate con_margin over orders x points (default: grid points > s0)."""
    if points is None:
        points = [t for t in ctx.grid if t > ctx.s0]
    scan = ConScan()
    for m in orders:
        for t in points:
            try:
                cm = con_margin(ctx, m, t)
            except DegenerateDenominator:
                scan.degenerate += 1
                continue
            scan.evaluated += 1
            if cm.margin < scan.min_margin:
                scan.min_margin = cm.margin
                scan.witness = (m, float(t))
            if cm.margin < -tol:
                scan.violations.append((m, float(t), cm.margin))
    return scan
