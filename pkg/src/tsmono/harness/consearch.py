"""Counterexample search for the log-concavity condition on the monomial ladder.

For each generated scale the condition h_{m+1}^2 - h_{m+2} h_m >= 0 is
evaluated for every order m in 0..orders and every grid point t > s0.  The
search reports; it never asserts that the condition holds.

Generator specs::

    reals                 random [0, L] with L in [1, 10], s0 = 0
    integers              {0, .., n} with n in [5, 30], s0 random in the lower half
    qpowers:1.5,2,3       q-power scales with q drawn from the list (or (1, 3] if omitted)
    hybrid                random hybrid scales, s0 a random point in the lower half
"""

from __future__ import annotations

import math

from tsmono.errors import DegenerateDenominator
from tsmono.harness.generators import random_scale
from tsmono.harness.sweep import trial_rng
from tsmono.monomials import TAU_ZERO, MonomialCtx, con_margin
from tsmono.timescale import TimeScale

GENERATORS = ("reals", "integers", "qpowers", "hybrid")

CONTROLS = (
    ("reals", {"canonical": "reals", "a": 0.0, "b": 5.0}, 0.0),
    ("integers", {"canonical": "integers", "lo": 0, "hi": 20}, 0.0),
    ("qpowers", {"canonical": "qpowers", "q": 2.0, "n_max": 8}, 1.0),
)


def parse_generator(spec: str):
    name, _, rest = spec.partition(":")
    if name not in GENERATORS:
        raise ValueError(f"unknown generator {name!r}; expected one of {', '.join(GENERATORS)}")
    qs = None
    if rest:
        if name != "qpowers":
            raise ValueError(f"generator {name!r} takes no parameters")
        qs = [float(x) for x in rest.split(",")]
        if any(not q > 1 for q in qs):
            raise ValueError("q values must exceed 1")
    return name, qs


def _draw(name, qs, rng):
    if name == "reals":
        return {"canonical": "reals", "a": 0.0, "b": round(float(rng.uniform(1.0, 10.0)), 2)}, 0.0
    if name == "integers":
        n = int(rng.integers(5, 31))
        return {"canonical": "integers", "lo": 0, "hi": n}, float(rng.integers(0, n // 2 + 1))
    if name == "qpowers":
        q = float(qs[int(rng.integers(len(qs)))]) if qs else round(float(rng.uniform(1.05, 3.0)), 3)
        n_max = int(min(12, max(3, math.floor(math.log(1e4) / math.log(q)))))
        k = int(rng.integers(0, n_max // 2 + 1))
        return {"canonical": "qpowers", "q": q, "n_max": n_max}, float(q**k)
    spec = random_scale(rng)
    pts = TimeScale.from_dict(spec).enumerate_grid(0.25)
    s0 = pts[int(rng.integers(0, max(1, len(pts) // 2)))]
    return spec, float(s0)


def scan_scale(spec: dict, s0: float, orders: int, resolution: float = 0.1) -> dict:
    """Minimum margin over (m, t) and every point that falls below -tau.

    The threshold is tau_zero scaled by max(1, h_{m+1}^2) so that rounding in
    the floating recursion on non-discrete scales is not mistaken for a
    violation; discrete scales are evaluated exactly.
    """
    scale = TimeScale.from_dict(spec)
    ctx = MonomialCtx(scale, s0, orders + 2, resolution=resolution)
    points = [t for t in ctx.grid if t > ctx.s0]
    worst, witness, evaluated, degenerate, violations = math.inf, None, 0, 0, []
    for m in range(orders + 1):
        for t in points:
            try:
                cm = con_margin(ctx, m, t)
            except DegenerateDenominator:
                degenerate += 1
                continue
            evaluated += 1
            if cm.margin < worst:
                worst, witness = cm.margin, [m, float(t)]
            thresh = TAU_ZERO * max(1.0, ctx.h(m + 1, t) ** 2)
            if cm.margin < -thresh:
                violations.append([m, float(t), cm.margin])
    return {
        "scale": spec,
        "s0": s0,
        "min_margin": worst if evaluated else None,
        "witness": witness,
        "evaluated": evaluated,
        "degenerate": degenerate,
        "violations": len(violations),
        "violation_points": violations[:20],
    }


def run_con_search(generator: str, trials: int, seed: int, orders: int = 6) -> dict:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    name, qs = parse_generator(generator)
    controls = []
    for label, spec, s0 in CONTROLS:
        row = scan_scale(spec, s0, orders)
        row["control"] = label
        controls.append(row)
    rows = []
    for i in range(trials):
        spec, s0 = _draw(name, qs, trial_rng(seed, i))
        row = scan_scale(spec, s0, orders)
        row["index"] = i
        rows.append(row)
    witnesses = [r for r in rows if r["violations"]]
    margins = [r["min_margin"] for r in rows if r["min_margin"] is not None]
    return {
        "generator": generator,
        "orders": orders,
        "trials": trials,
        "controls": controls,
        "controls_clean": all(r["violations"] == 0 for r in controls),
        "violating_scales": len(witnesses),
        "total_violations": sum(r["violations"] for r in rows),
        "min_margin": min(margins) if margins else None,
        "witness_scales": [{"index": r["index"], "scale": r["scale"], "s0": r["s0"],
                            "witness": r["witness"], "min_margin": r["min_margin"]} for r in witnesses],
        "rows": rows,
    }
