"""Quotients of integrals over a fixed range with a real parameter ``s``.

The integration variable is ``u`` (a point of the time scale) and the
parameter is ``s``.  Every integral here is a Delta integral in ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from tsmono import exprlang
from tsmono.calculus import DELTA, GridFn, derivative, fd_step, integral
from tsmono.errors import IndeterminateSign, PositivityViolated
from tsmono.monotonicity.upper_limit import DEFAULT_RESOLUTION
from tsmono.monotonicity.verdict import (
    HYPOTHESIS_FAILED,
    TOL_MONO,
    VERIFIED,
    MonotoneVerdict,
    check_direction,
    conclude,
    flip,
    margin,
    minimum,
    monotone_margin,
    verify_monotone,
)
from tsmono.timescale import TimeScale

ANALYTIC = "analytic"
FINITE_DIFFERENCE = "finite-difference"


class Kernel2:
    """A function K(s, u) of the parameter ``s`` and the point ``u``."""

    def __init__(
        self,
        fn: Callable[[float, float], float],
        partial: Optional[Callable[[float, float], float]] = None,
        *,
        name: str = "K",
        source: Optional[str] = None,
    ):
        self.fn = fn
        self.partial = partial
        self.name = name
        self.source = source

    @property
    def provenance(self) -> str:
        return ANALYTIC if self.partial is not None else FINITE_DIFFERENCE

    def eval(self, s: float, u: float) -> float:
        return self.fn(s, u)

    __call__ = eval

    def partial_s(self, s: float, u: float) -> float:
        if self.partial is not None:
            return self.partial(s, u)
        h = fd_step(s)
        return (self.fn(s + h, u) - self.fn(s - h, u)) / (2.0 * h)

    def __repr__(self):
        return f"Kernel2({self.name}={self.source or self.fn!r})"

    @classmethod
    def from_expression(cls, src, name: str = "K") -> "Kernel2":
        node = exprlang.parse(src) if isinstance(src, str) else src
        fn = exprlang.compile_expr(node, ("s", "u"))
        d = exprlang.derive_s(node, "s")
        partial = exprlang.compile_expr(d, ("s", "u")) if d is not None else None
        text = src if isinstance(src, str) else exprlang.to_source(node)
        return cls(fn, partial, name=name, source=text)

    @classmethod
    def power(cls) -> "Kernel2":
        """The kernel s^u."""
        return cls(lambda s, u: s**u, lambda s, u: u * s ** (u - 1), name="s^u", source="s^u")


def _u_grid(scale: TimeScale, a: float, b: float, resolution: float):
    a, b = scale.snap(a), scale.snap(b)
    sub = scale.restrict(a, b)
    return a, b, sub, sub.enumerate_grid(resolution)


def _int_u(g, scale, a, b):
    return integral(DELTA, g, a, b, scale=scale)


def _check_kernel_positive(K: Kernel2, s_values, grid):
    for s in s_values:
        for u in grid:
            v = K.fn(s, u)
            if not v > 0:
                raise PositivityViolated(K.name, (s, u), v)


def c1_margin(Psi: Kernel2, Phi: Kernel2, scale: TimeScale, a: float, b: float, s: float,
              *, check: bool = True, resolution: float = DEFAULT_RESOLUTION) -> float:
    """int dPsi/ds * int Phi - int Psi * int dPhi/ds, all over [a, b] in u.

    Antisymmetric in (Psi, Phi) bit-for-bit: the two products are formed in
    the same way whichever kernel comes first.
    """
    if check:
        a, b, sub, grid = _u_grid(scale, a, b, resolution)
        _check_kernel_positive(Psi, [s], grid)
        _check_kernel_positive(Phi, [s], grid)
    i_dpsi = _int_u(lambda u: Psi.partial_s(s, u), scale, a, b)
    i_phi = _int_u(lambda u: Phi.fn(s, u), scale, a, b)
    i_psi = _int_u(lambda u: Psi.fn(s, u), scale, a, b)
    i_dphi = _int_u(lambda u: Phi.partial_s(s, u), scale, a, b)
    return i_dpsi * i_phi - i_psi * i_dphi


def _damper_margins(damper: GridFn, s_grid, tol):
    t_vals = [damper(s) for s in s_grid]
    out = [margin("H-T", "T >= 0 on the s grid", *minimum(s_grid, t_vals), tol)]
    worst, where = math.inf, None
    for s in s_grid:
        d = derivative(DELTA, damper, s, scale=damper.domain) if s < damper.domain.max else None
        if d is None:
            continue
        if -d < worst:
            worst, where = -d, s
    out.append(margin("H-T'", "T' <= 0 on the s grid", worst, where, tol))
    return out


def _sorted_grid(s_grid):
    s_grid = sorted(float(s) for s in s_grid)
    if len(set(s_grid)) != len(s_grid):
        raise ValueError("s_grid contains duplicates")
    return s_grid


def check_parametric_quotient(
    Psi: Kernel2,
    Phi: Kernel2,
    scale: TimeScale,
    a: float,
    b: float,
    s_grid: Sequence[float],
    direction: str,
    damper: Optional[GridFn] = None,
    *,
    resolution: float = DEFAULT_RESOLUTION,
    strictness: str = "weak",
    tol: float = TOL_MONO,
    force_sample: bool = False,
) -> MonotoneVerdict:
    """(T(s) + int Psi(s,u)) / (T(s) + int Phi(s,u)) sampled over ``s_grid``.

    Without a damper the C1 sign is necessary and sufficient, so the sampled
    verdict is compared against it and the agreement is recorded in the
    diagnostics.  With a damper the pointwise dominance of Psi over Phi and
    of their s-derivatives are added as hypotheses.
    """
    check_direction(direction)
    s_grid = _sorted_grid(s_grid)
    a, b, sub, grid = _u_grid(scale, a, b, resolution)
    sign = 1.0 if direction == "increasing" else -1.0
    worst_pos, where_pos = math.inf, None
    worst_dom, where_dom = math.inf, None
    worst_ddom, where_ddom = math.inf, None
    for s in s_grid:
        for u in grid:
            p, q = Psi.fn(s, u), Phi.fn(s, u)
            lo = min(p, q)
            if lo < worst_pos or math.isnan(lo):
                worst_pos, where_pos = lo, (s, u)
            if damper is not None:
                dom = sign * (p - q)
                if dom < worst_dom:
                    worst_dom, where_dom = dom, (s, u)
                ddom = sign * (Psi.partial_s(s, u) - Phi.partial_s(s, u))
                if ddom < worst_ddom:
                    worst_ddom, where_ddom = ddom, (s, u)
    margins = [margin("H-pos", "Psi, Phi > 0", worst_pos, where_pos, tol, strict_positive=True)]
    c1 = []
    if margins[0].passed:
        c1 = [c1_margin(Psi, Phi, scale, a, b, s, check=False) for s in s_grid]
        worst_c1, where_c1 = minimum(s_grid, [sign * c for c in c1])
    else:
        worst_c1, where_c1 = -math.inf, None
    margins.append(margin("H-C1", f"C1 margin has the {direction} sign", worst_c1, where_c1, tol))
    if damper is not None:
        margins.append(margin("H-dom", "Psi vs Phi pointwise", worst_dom, where_dom, tol))
        margins.append(margin("H-dom-ds", "dPsi/ds vs dPhi/ds pointwise", worst_ddom, where_ddom, tol))
        margins.extend(_damper_margins(damper, s_grid, tol))

    def sampler():
        out = []
        for s in s_grid:
            t = damper(s) if damper is not None else 0.0
            num = t + _int_u(lambda u: Psi.fn(s, u), scale, a, b)
            den = t + _int_u(lambda u: Phi.fn(s, u), scale, a, b)
            if den != 0:
                out.append((s, num / den))
        return out

    diagnostics = {
        "partial_s": {"Psi": Psi.provenance, "Phi": Phi.provenance},
        "c1_margins": c1,
    }
    verdict = conclude(
        "prop-damped" if damper is not None else "prop-c1", direction, strictness, margins, sampler,
        tol=tol, force_sample=force_sample, diagnostics=diagnostics,
    )
    if damper is None and c1:
        sampled = verdict.sampled_outcome or verdict.outcome
        if sampled.status != HYPOTHESIS_FAILED:
            c1_ok = margins[1].passed
            verdict.diagnostics["c1_iff_consistent"] = c1_ok == (sampled.status == VERIFIED)
    return verdict


def check_power_kernel(
    psi: GridFn,
    phi: GridFn,
    scale: TimeScale,
    a: float,
    b: float,
    s_grid: Sequence[float],
    direction: str,
    damper: Optional[GridFn] = None,
    *,
    resolution: float = DEFAULT_RESOLUTION,
    strictness: str = "weak",
    tol: float = TOL_MONO,
    force_sample: bool = False,
    c1_diagnostics: bool = True,
) -> MonotoneVerdict:
    """int psi(u) s^u / int phi(u) s^u, optionally with a damper T(s) added.

    On N with a = 0 this is the ratio of two truncated power series; on
    q-powers the Delta integral supplies the (q - 1) q^k weights.
    """
    check_direction(direction)
    s_grid = _sorted_grid(s_grid)
    if not s_grid or s_grid[0] <= 0:
        raise ValueError("the power kernel needs s_grid inside (0, inf)")
    a, b, sub, grid = _u_grid(scale, a, b, resolution)
    psi_v = [psi(u) for u in grid]
    phi_v = [phi(u) for u in grid]
    margins = [margin("H1", "phi > 0 on the grid", *minimum(grid, phi_v), tol, strict_positive=True)]
    ratio = [p / q if q != 0 else math.nan for p, q in zip(psi_v, phi_v)]
    margins.append(margin("H2", f"psi/phi {direction} on the grid", *monotone_margin(grid, ratio, direction), tol))
    if damper is not None:
        r0 = ratio[0] - 1.0 if direction == "increasing" else 1.0 - ratio[0]
        margins.append(margin("H3", "psi(a)/phi(a) - 1 has the direction sign",
                              -math.inf if math.isnan(r0) else r0, grid[0], tol))
        margins.append(margin("H-u", "u >= 0 on the range", grid[0], grid[0], tol))
        margins.extend(_damper_margins(damper, s_grid, tol))

    K = Kernel2.power()
    Psi = Kernel2(lambda s, u: psi(u) * s**u, lambda s, u: psi(u) * u * s ** (u - 1), name="Psi")
    Phi = Kernel2(lambda s, u: phi(u) * s**u, lambda s, u: phi(u) * u * s ** (u - 1), name="Phi")

    def sampler():
        out = []
        for s in s_grid:
            t = damper(s) if damper is not None else 0.0
            num = t + _int_u(lambda u: Psi.fn(s, u), scale, a, b)
            den = t + _int_u(lambda u: Phi.fn(s, u), scale, a, b)
            if den != 0:
                out.append((s, num / den))
        return out

    diagnostics = {"kernel": K.source}
    if c1_diagnostics and all(m.passed for m in margins[:1]):
        diagnostics["c1_margins"] = [c1_margin(Psi, Phi, scale, a, b, s, check=False) for s in s_grid]
    return conclude(
        "thm2-1-damped" if damper is not None else "thm2-1", direction, strictness, margins, sampler,
        tol=tol, force_sample=force_sample, diagnostics=diagnostics,
    )


def kernel_logds_monotone_margin(
    kernel: Kernel2,
    scale: TimeScale,
    s: float,
    direction: str = "increasing",
    *,
    a: Optional[float] = None,
    b: Optional[float] = None,
    resolution: float = DEFAULT_RESOLUTION,
):
    """Worst consecutive difference of g(u) = dK/ds / K in the given direction."""
    a = scale.min if a is None else a
    b = scale.max if b is None else b
    _, _, _, grid = _u_grid(scale, a, b, resolution)
    g = []
    for u in grid:
        k = kernel.fn(s, u)
        if not k > 0:
            raise PositivityViolated(kernel.name, (s, u), k)
        g.append(kernel.partial_s(s, u) / k)
    return monotone_margin(grid, g, direction)


def _kernel_direction(kernel, scale, a, b, s_grid, resolution, tol):
    """+1 increasing, -1 decreasing, 0 constant in u, None if the sign changes."""
    inc = min(kernel_logds_monotone_margin(kernel, scale, s, "increasing", a=a, b=b,
                                           resolution=resolution)[0] for s in s_grid)
    dec = min(kernel_logds_monotone_margin(kernel, scale, s, "decreasing", a=a, b=b,
                                           resolution=resolution)[0] for s in s_grid)
    return _sign_from(inc, dec, tol), (inc, dec)


def _sign_from(inc, dec, tol):
    up, down = inc >= -tol, dec >= -tol
    if up and down:
        return 0
    if up:
        return 1
    if down:
        return -1
    return None


@dataclass
class Factor:
    """One integral pair of a product quotient, on its own time scale."""

    scale: TimeScale
    psi: GridFn
    phi: GridFn
    a: float
    b: float
    kernel: Optional[Kernel2] = None


def check_product_quotient(
    factors: Sequence[Factor],
    s_grid: Sequence[float],
    direction: str,
    *,
    resolution: float = DEFAULT_RESOLUTION,
    strictness: str = "weak",
    tol: float = TOL_MONO,
    force_sample: bool = False,
) -> MonotoneVerdict:
    """prod int psi_l K_l / prod int phi_l K_l with K_l = s^u by default.

    Each factor's ratio must be monotone in the claimed direction when its
    kernel's g = dK/ds / K increases in u, in the opposite direction when g
    decreases, and is unconstrained when g does not depend on u.
    """
    check_direction(direction)
    s_grid = _sorted_grid(s_grid)
    margins = []
    prepared = []
    general = any(f.kernel is not None for f in factors)
    for l, f in enumerate(factors, 1):
        a, b, sub, grid = _u_grid(f.scale, f.a, f.b, resolution)
        psi_v = [f.psi(u) for u in grid]
        phi_v = [f.phi(u) for u in grid]
        margins.append(margin(f"H-pos[{l}]", f"phi_{l} > 0", *minimum(grid, phi_v), tol, strict_positive=True))
        K = f.kernel if f.kernel is not None else Kernel2.power()
        if f.kernel is None:
            if s_grid[0] <= 0:
                raise ValueError("the power kernel needs s_grid inside (0, inf)")
            ksign, kmargins = 1, None
        else:
            ksign, kmargins = _kernel_direction(K, f.scale, a, b, s_grid, resolution, tol)
        ratio = [p / q if q != 0 else math.nan for p, q in zip(psi_v, phi_v)]
        if ksign is None:
            margins.append(margin(f"H-kernel[{l}]", f"g_{l} = dK/ds / K monotone in u",
                                  max(kmargins), None, tol))
        elif ksign == 0:
            margins.append(margin(f"H-ratio[{l}]", f"psi_{l}/phi_{l} (kernel constant in u)", 0.0, None, tol))
        else:
            need = direction if ksign > 0 else flip(direction)
            margins.append(margin(f"H-ratio[{l}]", f"psi_{l}/phi_{l} {need}",
                                  *monotone_margin(grid, ratio, need), tol))
        prepared.append((f, a, b, K))

    def sampler():
        out = []
        for s in s_grid:
            num = den = 1.0
            for f, a, b, K in prepared:
                num *= _int_u(lambda u: f.psi(u) * K.fn(s, u), f.scale, a, b)
                den *= _int_u(lambda u: f.phi(u) * K.fn(s, u), f.scale, a, b)
            if den != 0:
                out.append((s, num / den))
        return out

    return conclude(
        "thm2-5" if general else "thm2-3", direction, strictness, margins, sampler,
        tol=tol, force_sample=force_sample, diagnostics={"factors": len(factors)},
    )


def check_case2(
    psi: GridFn,
    phi: GridFn,
    kernel: Kernel2,
    scale: TimeScale,
    a: float,
    b: float,
    s_grid: Sequence[float],
    direction: Optional[str] = None,
    *,
    resolution: float = DEFAULT_RESOLUTION,
    strictness: str = "weak",
    tol: float = TOL_MONO,
    force_sample: bool = False,
) -> MonotoneVerdict:
    """int psi K / int phi K with the direction implied by the two signs.

    Same signs of the ratio and of g = dK/ds / K imply increasing, opposite
    signs decreasing.  If either is constant in u the quotient is constant in
    s and both directions are checked.  An optional claimed direction that
    disagrees with the implied one fails hypothesis H-pairing.  Raises
    IndeterminateSign when a sign changes across the grid.
    """
    if direction is not None:
        check_direction(direction)
    s_grid = _sorted_grid(s_grid)
    a, b, sub, grid = _u_grid(scale, a, b, resolution)
    psi_v = [psi(u) for u in grid]
    phi_v = [phi(u) for u in grid]
    margins = [margin("H1", "phi > 0 on the grid", *minimum(grid, phi_v), tol, strict_positive=True)]
    _check_kernel_positive(kernel, s_grid, grid)
    ratio = [p / q if q != 0 else math.nan for p, q in zip(psi_v, phi_v)]
    r_inc = monotone_margin(grid, ratio, "increasing")
    r_dec = monotone_margin(grid, ratio, "decreasing")
    rsign = _sign_from(r_inc[0], r_dec[0], tol)
    if rsign is None:
        raise IndeterminateSign("H-sign-ratio", "psi/phi is not monotone on the grid")
    ksign, (k_inc, k_dec) = _kernel_direction(kernel, scale, a, b, s_grid, resolution, tol)
    if ksign is None:
        raise IndeterminateSign("H-sign-kernel", "dK/ds / K is not monotone in u on the grid")
    constant = rsign == 0 or ksign == 0
    implied = None if constant else ("increasing" if rsign * ksign > 0 else "decreasing")
    claimed = direction or implied or "increasing"
    diagnostics = {
        "ratio_sign": rsign,
        "kernel_sign": ksign,
        "implied_direction": implied or "constant",
        "partial_s": kernel.provenance,
    }
    pair_ok = constant or direction is None or direction == implied
    margins.append(margin("H-pairing", f"implied direction {implied or 'constant'} vs claim {claimed}",
                          0.0 if pair_ok else -1.0, None, tol))

    def sampler():
        out = []
        for s in s_grid:
            num = _int_u(lambda u: psi(u) * kernel.fn(s, u), scale, a, b)
            den = _int_u(lambda u: phi(u) * kernel.fn(s, u), scale, a, b)
            if den != 0:
                out.append((s, num / den))
        return out

    verdict = conclude("thm2-4", claimed, strictness, margins, sampler,
                       tol=tol, force_sample=force_sample, diagnostics=diagnostics)
    if constant and verdict.outcome.status == VERIFIED:
        other = verify_monotone(verdict.samples, flip(claimed), strictness, tol)
        verdict.diagnostics["both_directions"] = other.status == VERIFIED
        if other.status != VERIFIED:
            verdict.outcome = other
    return verdict
