"""Quotients of integrals with a variable upper limit, plain and damped."""

from __future__ import annotations

import math
from tsmono.calculus import (
    GridFn,
    IntegralKind,
    cumulative_integral,
    derivative,
    integral,
)
from tsmono.errors import EmptyRange, NotDifferentiableHere, PositivityViolated
from tsmono.monotonicity.verdict import (
    TOL_MONO,
    MonotoneVerdict,
    check_direction,
    conclude,
    margin,
    minimum,
    monotone_margin,
)

DEFAULT_RESOLUTION = 0.1


def _theorem_id(kind: IntegralKind, family: str) -> str:
    if kind.tag == "diamond":
        return "diamond" if family == "1" else f"diamond-{family}"
    return f"thm1-{family}" if kind.tag == "delta" else f"nabla1-{family}"


def _grid(f: GridFn, a: float, b: float, resolution: float):
    T = f.domain
    a, b = T.snap(a), T.snap(b)
    if not b > a:
        raise EmptyRange(f"need a < b, got a={a}, b={b}")
    sub = T.restrict(a, b)
    return sub, sub.enumerate_grid(resolution)


def _ratio_values(psi_v, phi_v):
    return [p / q if q != 0 else math.nan for p, q in zip(psi_v, phi_v)]


def _base_margins(grid, psi_v, phi_v, direction, tol):
    out = [margin("H1", "phi > 0 on the grid", *minimum(grid, phi_v), tol, strict_positive=True)]
    worst, where = monotone_margin(grid, _ratio_values(psi_v, phi_v), direction)
    out.append(margin("H2", f"psi/phi {direction} on the grid", worst, where, tol))
    return out


def quotient_variable_upper(
    kind: IntegralKind, psi: GridFn, phi: GridFn, a: float, s: float,
    resolution: float = DEFAULT_RESOLUTION,
) -> float:
    T = phi.domain
    a, s = T.snap(a), T.snap(s)
    if s == a:
        raise EmptyRange("quotient is 0/0 at s = a")
    lo, hi = min(a, s), max(a, s)
    phi.check_positive(T.restrict(lo, hi).enumerate_grid(resolution))
    return integral(kind, psi, a, s, scale=T) / integral(kind, phi, a, s, scale=T)


def quotient_damped(
    kind: IntegralKind, psi: GridFn, phi: GridFn, damper: GridFn, a: float, s: float
) -> float:
    T = phi.domain
    t_s = damper(s)
    if t_s < 0:
        raise PositivityViolated("T", s, t_s)
    den = t_s + integral(kind, phi, a, s, scale=T)
    if not den > 0:
        raise PositivityViolated("T + integral of phi", s, den)
    return (t_s + integral(kind, psi, a, s, scale=T)) / den


def _samples(grid, num, den):
    out = []
    for s, n, d in zip(grid[1:], num[1:], den[1:]):
        if d != 0 and math.isfinite(n) and math.isfinite(d):
            out.append((s, n / d))
    return out


def check_thm_variable_upper(
    kind: IntegralKind,
    psi: GridFn,
    phi: GridFn,
    a: float,
    b: float,
    direction: str,
    *,
    resolution: float = DEFAULT_RESOLUTION,
    strictness: str = "weak",
    tol: float = TOL_MONO,
    force_sample: bool = False,
) -> MonotoneVerdict:
    """Quotient of integrals from ``a`` to ``s`` sampled for ``s`` in ``(a, b]``.

    For DiamondAlpha with ``0 < alpha < 1`` the monotonicity of ``phi`` in the
    claimed direction is an extra hypothesis (H3); at ``alpha`` 0 or 1 the
    theorem reduces to the Nabla/Delta one and H3 is informational only.
    """
    check_direction(direction)
    sub, grid = _grid(phi, a, b, resolution)
    psi_v = [psi(t) for t in grid]
    phi_v = [phi(t) for t in grid]
    margins = _base_margins(grid, psi_v, phi_v, direction, tol)
    if kind.tag == "diamond":
        worst, where = monotone_margin(grid, phi_v, direction)
        hm = margin("H3", f"phi {direction} on the grid", worst, where, tol)
        if kind.alpha_weight in (0.0, 1.0):
            hm.description += " (informational at alpha 0 or 1)"
            hm.passed = True
        margins.append(hm)

    def sampler():
        num = cumulative_integral(kind, psi, grid, scale=sub)
        den = cumulative_integral(kind, phi, grid, scale=sub)
        return _samples(grid, num, den)

    return conclude(
        _theorem_id(kind, "1"), direction, strictness, margins, sampler,
        tol=tol, force_sample=force_sample, diagnostics={"kind": str(kind)},
    )


def check_thm_diamond(psi, phi, a, b, direction, alpha_weight, **kw) -> MonotoneVerdict:
    from tsmono.calculus import diamond

    return check_thm_variable_upper(diamond(alpha_weight), psi, phi, a, b, direction, **kw)


def _damper_slopes(kind, damper, grid, scale):
    slopes = []
    for t in grid:
        try:
            slopes.append((t, derivative(kind, damper, t, scale=scale)))
        except NotDifferentiableHere:
            continue
    return slopes


def check_thm_damped(
    kind: IntegralKind,
    psi: GridFn,
    phi: GridFn,
    damper: GridFn,
    a: float,
    b: float,
    direction: str,
    *,
    resolution: float = DEFAULT_RESOLUTION,
    strictness: str = "weak",
    tol: float = TOL_MONO,
    force_sample: bool = False,
) -> MonotoneVerdict:
    """(T(s) + int psi) / (T(s) + int phi) with a non-negative decreasing damper."""
    check_direction(direction)
    sub, grid = _grid(phi, a, b, resolution)
    psi_v = [psi(t) for t in grid]
    phi_v = [phi(t) for t in grid]
    margins = _base_margins(grid, psi_v, phi_v, direction, tol)
    r0 = psi_v[0] / phi_v[0] if phi_v[0] != 0 else math.nan
    start = (r0 - 1.0) if direction == "increasing" else (1.0 - r0)
    if math.isnan(start):
        start = -math.inf
    margins.append(margin("H3", "psi(a)/phi(a) - 1 has the direction sign", start, grid[0], tol))
    t_v = [damper(t) for t in grid]
    margins.append(margin("H4", "T >= 0 on the grid", *minimum(grid, t_v), tol))
    slopes = _damper_slopes(kind, damper, grid, phi.domain)
    worst, where = math.inf, None
    for t, d in slopes:
        if -d < worst:
            worst, where = -d, t
    margins.append(margin("H5", f"{kind} derivative of T <= 0", worst, where, tol))

    def sampler():
        num = cumulative_integral(kind, psi, grid, scale=sub)
        den = cumulative_integral(kind, phi, grid, scale=sub)
        return _samples(grid, [x + y for x, y in zip(t_v, num)], [x + y for x, y in zip(t_v, den)])

    return conclude(
        _theorem_id(kind, "2"), direction, strictness, margins, sampler,
        tol=tol, force_sample=force_sample, diagnostics={"kind": str(kind)},
    )


def check_thm_two_dampers(
    kind: IntegralKind,
    psi: GridFn,
    phi: GridFn,
    damper1: GridFn,
    damper2: GridFn,
    a: float,
    b: float,
    direction: str,
    *,
    resolution: float = DEFAULT_RESOLUTION,
    strictness: str = "weak",
    tol: float = TOL_MONO,
    force_sample: bool = False,
) -> MonotoneVerdict:
    """(T1(s) + int psi) / (T2(s) + int phi) under the three-link chain condition.

    The chain ratios divide by the integrals from ``a`` to ``s``, so the
    chain and the positivity of the dampers are checked on ``(a, b]``.
    """
    check_direction(direction)
    sub, grid = _grid(phi, a, b, resolution)
    psi_v = [psi(t) for t in grid]
    phi_v = [phi(t) for t in grid]
    margins = _base_margins(grid, psi_v, phi_v, direction, tol)
    inner = grid[1:]
    t1_v = [damper1(t) for t in grid]
    t2_v = [damper2(t) for t in grid]
    w1 = minimum(inner, t1_v[1:])
    w2 = minimum(inner, t2_v[1:])
    worst_t = w1 if w1[0] <= w2[0] else w2
    margins.append(margin("H-T", "T1, T2 > 0 on (a, b]", *worst_t, tol, strict_positive=True))

    num = cumulative_integral(kind, psi, grid, scale=sub)
    den = cumulative_integral(kind, phi, grid, scale=sub)
    sign = 1.0 if direction == "increasing" else -1.0
    links = [[math.inf, None] for _ in range(3)]
    for i, s in enumerate(grid):
        if i == 0:
            continue
        try:
            d1 = derivative(kind, damper1, s, scale=phi.domain)
            d2 = derivative(kind, damper2, s, scale=phi.domain)
        except NotDifferentiableHere:
            continue
        chain = [
            _safe_div(psi_v[i], num[i]),
            _safe_div(d1, t1_v[i]),
            _safe_div(d2, t2_v[i]),
            _safe_div(phi_v[i], den[i]),
        ]
        for j in range(3):
            m = sign * (chain[j] - chain[j + 1])
            if math.isnan(m):
                m = -math.inf
            if m < links[j][0]:
                links[j] = [m, s]
    names = (
        "psi/int(psi) vs T1'/T1",
        "T1'/T1 vs T2'/T2",
        "T2'/T2 vs phi/int(phi)",
    )
    for j in range(3):
        margins.append(margin(f"H-chain-{j + 1}", names[j], links[j][0], links[j][1], tol))

    def sampler():
        return _samples(
            grid, [x + y for x, y in zip(t1_v, num)], [x + y for x, y in zip(t2_v, den)]
        )

    return conclude(
        _theorem_id(kind, "3"), direction, strictness, margins, sampler,
        tol=tol, force_sample=force_sample, diagnostics={"kind": str(kind)},
    )


def _safe_div(x, y):
    if y == 0:
        return math.nan
    return x / y
