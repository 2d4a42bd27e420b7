"""Quotients of generalized power series built on time-scale monomials."""

from __future__ import annotations

import math
from typing import Optional, Sequence

from tsmono.errors import TruncationTooShort
from tsmono.monomials import TAU_ZERO, MonomialCtx, con_scan
from tsmono.monotonicity.verdict import (
    TOL_MONO,
    MonotoneVerdict,
    check_direction,
    conclude,
    margin,
    minimum,
    monotone_margin,
)


def series_value(coeffs: Sequence[float], ctx: MonomialCtx, u0: int, s: float) -> float:
    """sum over u >= u0 of c_u * u! * h_u(s, s0); ``coeffs[0]`` pairs with u0."""
    return math.fsum(
        c * math.factorial(u0 + i) * ctx.h(u0 + i, s) for i, c in enumerate(coeffs)
    )


def check_generalized_series(
    coeff_psi: Sequence[float],
    coeff_phi: Sequence[float],
    ctx: MonomialCtx,
    u0: int,
    s_grid: Optional[Sequence[float]],
    direction: str,
    *,
    strictness: str = "weak",
    tol: float = TOL_MONO,
    force_sample: bool = False,
) -> MonotoneVerdict:
    """Sum psi_u u! h_u(s, s0) / sum phi_u u! h_u(s, s0) for u = u0 .. u0 + n - 1.

    The log-concavity condition on the monomial ladder is checked for every
    order m in [max(0, u0 - 1), M - 2] at every grid point above s0, where M
    is the context's maximum order.  ``s_grid=None`` uses the context grid
    restricted to s >= s0.
    """
    check_direction(direction)
    if len(coeff_psi) != len(coeff_phi):
        raise ValueError("coefficient sequences must have equal length")
    n = len(coeff_phi)
    M = ctx.max_order
    if M < u0 + 2 or u0 + n - 1 > M:
        raise TruncationTooShort(
            f"context order {M} cannot hold orders {u0}..{u0 + n - 1} and the ladder check"
        )
    if s_grid is None:
        s_grid = [t for t in ctx.grid if t >= ctx.s0]
    s_grid = sorted(ctx.scale.snap(s) for s in s_grid)
    idx = list(range(u0, u0 + n))
    margins = [margin("H-pos", "phi_u > 0", *minimum(idx, list(coeff_phi)), tol, strict_positive=True)]
    ratio = [p / q if q != 0 else math.nan for p, q in zip(coeff_psi, coeff_phi)]
    margins.append(margin("H1", f"psi_u/phi_u {direction}", *monotone_margin(idx, ratio, direction), tol))
    scan = con_scan(ctx, range(max(0, u0 - 1), M - 1), [s for s in s_grid if s > ctx.s0])
    con_worst = scan.min_margin if scan.evaluated else 0.0
    hm = margin("H2", "h_{m+1}^2 - h_{m+2} h_m >= 0", con_worst, scan.witness, TAU_ZERO)
    margins.append(hm)

    def sampler():
        out = []
        for s in s_grid:
            den = series_value(coeff_phi, ctx, u0, s)
            if den != 0:
                out.append((s, series_value(coeff_psi, ctx, u0, s) / den))
        return out

    return conclude(
        "thm2-6", direction, strictness, margins, sampler, tol=tol, force_sample=force_sample,
        diagnostics={"con_evaluated": scan.evaluated, "con_degenerate": scan.degenerate},
    )
