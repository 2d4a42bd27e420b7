"""Generalized monomials: recursion vs closed forms, and the log-concavity margin."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsmono.errors import DegenerateDenominator, OrderExceedsContext, UnsupportedScaleTag
from tsmono.monomials import MonomialCtx, con_margin, con_scan, h_closed_form, h_recursive
from tsmono.timescale import TimeScale, hybrid


def brute_h(points, s0, m, t):
    """h_m by literal summation of mu * h_{m-1} over the isolated points in [s0, t)."""
    pts = [Fraction(p) for p in points]
    s0, t = Fraction(s0), Fraction(t)
    h = {p: Fraction(1) for p in pts}
    for _ in range(m):
        nxt, acc = {}, Fraction(0)
        below = [p for p in pts if p < s0]
        # accumulate forwards from s0, backwards below it
        fwd = [p for p in pts if p >= s0]
        for p, q in zip(fwd, fwd[1:] + [None]):
            nxt[p] = acc
            if q is not None:
                acc += (q - p) * h[p]
        acc = Fraction(0)
        back = [s0] + below[::-1]
        for q, p in zip(back, back[1:]):
            acc -= (q - p) * h[p]
            nxt[p] = acc
        h = nxt
    return h[t]


def test_examples():
    Z = MonomialCtx(TimeScale.integers(-2, 10), 0, 4)
    assert h_recursive(Z, 0, 7) == 1
    assert h_recursive(Z, 2, 3) == 3
    R = MonomialCtx(TimeScale.reals(0, 5), 0, 4)
    assert h_recursive(R, 2, 3) == pytest.approx(4.5, abs=1e-10)
    Q = MonomialCtx(TimeScale.qpowers(2, 6), 1, 3)
    assert h_recursive(Q, 1, 4) == 3


def test_closed_form_table():
    assert h_closed_form("reals", 3, 2, 0) == pytest.approx(8 / 6)
    assert h_closed_form("integers", 2, 3, 0) == 3
    assert h_closed_form("qpowers", 2, 4, 1, q=2) == 2
    with pytest.raises(UnsupportedScaleTag):
        h_closed_form("custom", 1, 1, 0)


def test_order_exceeds_context():
    ctx = MonomialCtx(TimeScale.naturals(5), 0, 2)
    with pytest.raises(OrderExceedsContext):
        ctx.h(3, 2)
    with pytest.raises(OrderExceedsContext):
        con_margin(ctx, 1, 2)


def test_con_margin_examples():
    R = MonomialCtx(TimeScale.reals(0, 5), 0, 5)
    assert con_margin(R, 1, 2).margin == pytest.approx(4 / 3, abs=1e-10)
    N = MonomialCtx(TimeScale.naturals(10), 0, 5)
    assert con_margin(N, 1, 5).margin > 0
    Q = MonomialCtx(TimeScale.qpowers(2, 6), 1, 4)
    assert con_margin(Q, 0, 4).margin > 0


def test_degenerate_denominator():
    N = MonomialCtx(TimeScale.naturals(10), 0, 5)
    with pytest.raises(DegenerateDenominator):
        con_margin(N, 1, 1)  # h_2(1, 0) = 0


def test_ratio_difference_matches_sign_derivations():
    # reals: h_{m+2}/h_{m+1} - h_{m+1}/h_m = (s - s0)(1/(m+2) - 1/(m+1))
    R = MonomialCtx(TimeScale.reals(0, 5), 0.5, 8)
    for m in range(6):
        for s in (1.0, 2.5, 4.0):
            expect = (s - 0.5) * (1 / (m + 2) - 1 / (m + 1))
            assert con_margin(R, m, s).ratio_difference == pytest.approx(expect, rel=1e-9)
    # integers: (-s + s0 - 1) / (m^2 + 3m + 2)
    Z = MonomialCtx(TimeScale.integers(0, 30), 2, 8)
    for m in range(6):
        for s in range(m + 4, 30, 5):
            expect = Fraction(-s + 2 - 1, m * m + 3 * m + 2)
            assert con_margin(Z, m, s).ratio_difference == float(expect)
    # q-powers: q^m (s0 - q s) / ([m+1]_q [m+2]_q) with [n]_q = sum_{l<n} q^l, never positive
    q, s0 = 2, 1
    Q = MonomialCtx(TimeScale.qpowers(q, 10), s0, 8)
    for m in range(6):
        for k in range(m + 2, 11):
            s = q**k
            num = Fraction(q) ** m * (s0 - q * s)
            den = sum(Fraction(q) ** l for l in range(m + 1)) * sum(Fraction(q) ** l for l in range(m + 2))
            diff = con_margin(Q, m, s).ratio_difference
            assert diff == pytest.approx(float(num / den), rel=1e-12)
            assert diff <= 0


@pytest.mark.parametrize("T,tag,q,s0", [
    (TimeScale.integers(-5, 60), "integers", None, 3),
    (TimeScale.qpowers(1.5, 60), "qpowers", 1.5, 1.5**4),
    (TimeScale.qpowers(2, 50), "qpowers", 2, 2.0**3),
    (TimeScale.qpowers(3, 50), "qpowers", 3, 3.0**2),
])
def test_discrete_recursion_equals_closed_form_exactly(T, tag, q, s0):
    ctx = MonomialCtx(T, s0, 6)
    grid = ctx.grid
    assert len(grid) >= 50
    for m in range(7):
        for t in grid:
            assert h_recursive(ctx, m, t) == h_closed_form(tag, m, t, s0, q=q)


def test_reals_recursion_equals_closed_form():
    ctx = MonomialCtx(TimeScale.reals(-1, 4), 0.5, 6, resolution=0.05)
    assert len(ctx.grid) >= 50
    for m in range(7):
        for t in ctx.grid:
            assert h_recursive(ctx, m, t) == pytest.approx(h_closed_form("reals", m, t, 0.5), abs=1e-8)


def test_discrete_recursion_matches_brute_sums():
    T = hybrid([0, 0.5, 1.25, 2, 4, 4.5, 7])
    ctx = MonomialCtx(T, 1.25, 5)
    pts = T.enumerate_grid(1.0)
    for m in range(6):
        for t in pts:
            assert ctx.h_exact(m, t) == brute_h(pts, 1.25, m, t)


def test_hybrid_recursion_matches_quadrature():
    from tsmono.calculus import DELTA, GridFn, integral

    T = hybrid([(0, 1), 1.5, 2, (3, 4)])
    ctx = MonomialCtx(T, 0, 3, resolution=0.25)
    for m in range(1, 4):
        prev = GridFn(T, lambda u, m=m: ctx.h(m - 1, u))
        for t in ctx.grid:
            assert ctx.h(m, t) == pytest.approx(integral(DELTA, prev, 0, t), abs=1e-8)


@pytest.mark.parametrize("T,s0", [
    (TimeScale.reals(0, 6), 0.0),
    (TimeScale.integers(0, 40), 0.0),
    (TimeScale.qpowers(1.5, 20), 1.0),
    (TimeScale.qpowers(2, 12), 1.0),
    (TimeScale.qpowers(3, 8), 1.0),
])
def test_con_holds_on_canonical_scales(T, s0):
    ctx = MonomialCtx(T, s0, 8)
    scan = con_scan(ctx, range(7))
    assert scan.evaluated > 0
    assert scan.min_margin >= -1e-12


# -- properties --------------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10), st.integers(1, 20), st.integers(1, 6))
def test_vanish_at_anchor_and_nonnegative(lo, span, m):
    T = TimeScale.integers(0, 40)
    ctx = MonomialCtx(T, lo, m)
    assert ctx.h(m, lo) == 0
    for t in range(lo, min(40, lo + span) + 1):
        assert ctx.h(m, t) >= 0


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2), st.floats(0.01, 3), st.integers(0, 6))
def test_reals_closed_form_property(s0, dt, m):
    ctx = MonomialCtx(TimeScale.reals(0, 6), s0, 6)
    t = min(6.0, s0 + dt)
    assert ctx.h(m, t) == pytest.approx((t - s0) ** m / math.factorial(m), abs=1e-9)
