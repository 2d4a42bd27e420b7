"""Dispatch a validated scenario to its checker."""

from __future__ import annotations

from typing import Optional

from tsmono import calculus
from tsmono.calculus import DELTA, NABLA, GridFn, cumulative_integral, diamond, integral
from tsmono.errors import IndeterminateSign
from tsmono.harness.config import ScenarioConfig
from tsmono.monomials import MonomialCtx
from tsmono.monotonicity import (
    Factor,
    Kernel2,
    check_case2,
    check_generalized_series,
    check_parametric_quotient,
    check_power_kernel,
    check_product_quotient,
    check_thm_damped,
    check_thm_two_dampers,
    check_thm_variable_upper,
)
from tsmono.monotonicity.verdict import HYPOTHESIS_FAILED, MonotoneVerdict, Outcome, margin
from tsmono.timescale import TimeScale


def _fn(src: str, scale: TimeScale, name: str, var: str = "u") -> GridFn:
    return GridFn.from_expression(src, scale, var=var, name=name)


def blend_damper(kind, psi: GridFn, phi: GridFn, a: float, grid, lam: float, coef: float) -> GridFn:
    """T(s) = coef * Psi(s)^lam * Phi(s)^(1 - lam) with Psi, Phi integrals from ``a``.

    Values on ``grid`` come from one cumulative pass; other points fall back
    to a direct integral.  At dense points the derivative is the analytic
    T * (lam psi/Psi + (1 - lam) phi/Phi).
    """
    T = phi.domain
    cache = {}
    num = cumulative_integral(kind, psi, grid, scale=T)
    den = cumulative_integral(kind, phi, grid, scale=T)
    for t, p, q in zip(grid, num, den):
        cache[t] = (p, q)

    def parts(t):
        t = T.snap(t)
        if t not in cache:
            cache[t] = (integral(kind, psi, a, t, scale=T), integral(kind, phi, a, t, scale=T))
        return cache[t]

    def fn(t):
        p, q = parts(t)
        return coef * p**lam * q ** (1.0 - lam)

    def deriv(t):
        p, q = parts(t)
        return fn(t) * (lam * psi(t) / p + (1.0 - lam) * phi(t) / q)

    return GridFn(T, fn, derivative=deriv, name="T", source=f"blend({lam}, {coef})")


def _parameter_damper(cfg: ScenarioConfig) -> GridFn:
    lo, hi = cfg.s_grid[0], cfg.s_grid[-1]
    pad = max(1.0, abs(hi)) * 1e-3
    return _fn(cfg.damper, TimeScale.reals(lo, hi + pad), "T", var="s")


def run_scenario(cfg: ScenarioConfig, tol_mono: Optional[float] = None) -> MonotoneVerdict:
    """Run the checker named by ``cfg.theorem``; ``tol_mono`` overrides the file."""
    tol = cfg.tol_mono if tol_mono is None else tol_mono
    common = dict(strictness=cfg.strictness, tol=tol, force_sample=cfg.force_sample)
    th = cfg.theorem
    old_quad = calculus.TOL_QUAD
    calculus.TOL_QUAD = cfg.tol_quad
    try:
        return _dispatch(cfg, th, common)
    except IndeterminateSign as exc:
        hm = margin(exc.condition, str(exc), float("-inf"), None, tol)
        return MonotoneVerdict(th, cfg.direction or "increasing", cfg.strictness, [hm], [],
                               Outcome(HYPOTHESIS_FAILED, condition=exc.condition), tol)
    finally:
        calculus.TOL_QUAD = old_quad


def _dispatch(cfg, th, common):
    T = cfg.scale
    res = dict(resolution=cfg.resolution)
    if th in ("thm1-1", "nabla1-1", "diamond", "thm1-2", "nabla1-2", "thm1-3", "nabla1-3"):
        kind = {"thm": DELTA, "nab": NABLA, "dia": None}[th[:3]]
        if kind is None:
            kind = diamond(cfg.alpha_weight)
        psi, phi = _fn(cfg.psi, T, "psi"), _fn(cfg.phi, T, "phi")
        if th in ("thm1-1", "nabla1-1", "diamond"):
            return check_thm_variable_upper(kind, psi, phi, cfg.a, cfg.b, cfg.direction, **res, **common)
        if th in ("thm1-2", "nabla1-2"):
            damper = _fn(cfg.damper, T, "T", var="s")
            return check_thm_damped(kind, psi, phi, damper, cfg.a, cfg.b, cfg.direction, **res, **common)
        grid = T.restrict(cfg.a, cfg.b).enumerate_grid(cfg.resolution)
        ds = []
        for i, d in enumerate(cfg.dampers, 1):
            if isinstance(d, dict):
                ds.append(blend_damper(kind, psi, phi, cfg.a, grid, d["blend"], d["coef"]))
            else:
                ds.append(_fn(d, T, f"T{i}", var="s"))
        return check_thm_two_dampers(kind, psi, phi, ds[0], ds[1], cfg.a, cfg.b, cfg.direction,
                                     **res, **common)
    if th in ("prop-c1", "prop-damped"):
        damper = _parameter_damper(cfg) if th == "prop-damped" else None
        Psi = Kernel2.from_expression(cfg.Psi, "Psi")
        Phi = Kernel2.from_expression(cfg.Phi, "Phi")
        return check_parametric_quotient(Psi, Phi, T, cfg.a, cfg.b, cfg.s_grid, cfg.direction,
                                         damper, **res, **common)
    if th in ("thm2-1", "thm2-1-damped"):
        damper = _parameter_damper(cfg) if th == "thm2-1-damped" else None
        return check_power_kernel(_fn(cfg.psi, T, "psi"), _fn(cfg.phi, T, "phi"), T, cfg.a, cfg.b,
                                  cfg.s_grid, cfg.direction, damper, **res, **common)
    if th in ("thm2-3", "thm2-5"):
        factors = [
            Factor(
                f["scale"], _fn(f["psi"], f["scale"], "psi"), _fn(f["phi"], f["scale"], "phi"),
                f["a"], f["b"],
                Kernel2.from_expression(f["kernel"]) if f["kernel"] is not None else None,
            )
            for f in cfg.factors
        ]
        return check_product_quotient(factors, cfg.s_grid, cfg.direction, **res, **common)
    if th == "thm2-4":
        return check_case2(_fn(cfg.psi, T, "psi"), _fn(cfg.phi, T, "phi"),
                           Kernel2.from_expression(cfg.kernel), T, cfg.a, cfg.b, cfg.s_grid,
                           cfg.direction, **res, **common)
    if th == "thm2-6":
        ctx = MonomialCtx(T, cfg.s0, cfg.max_order, resolution=cfg.resolution)
        return check_generalized_series(cfg.coeff_psi, cfg.coeff_phi, ctx, cfg.u0, cfg.s_grid,
                                        cfg.direction, **common)
    raise ValueError(f"no checker for theorem {th!r}")
