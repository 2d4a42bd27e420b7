"""Random scenario generators for the soundness and falsifiability sweeps.

Every generator takes a numpy ``Generator`` and returns a scenario document
(the same mapping a scenario file holds), so sweep trials are reported and
replayed exactly like hand-written scenarios.

Random time scales: 1 to 4 segments with endpoints drawn from [0, 10], each
segment an interval with probability 0.5 (else an isolated point); q-power
scales draw q from (1, 3].
"""

from __future__ import annotations

import math

import numpy as np

from tsmono import exprlang
from tsmono.monotonicity.verdict import flip
from tsmono.timescale import TimeScale

SWEEP_FAMILIES = (
    "thm1-1", "thm1-2", "thm1-3", "nabla1-1", "nabla1-2", "nabla1-3", "diamond",
    "thm2-1", "thm2-3", "thm2-4", "thm2-5", "thm2-6",
)

# positive on [0, 60] for the coefficient ranges drawn below
PHI_UP = ("{c0} + {c1}*u", "{c0} + {c1}*sqrt(u)", "{c0} + {c1}*log(u + 1)")
PHI_DOWN = ("{c0} + {c1}*exp(-{k}*u)", "{c0} + {c1}/(u + 1)")
RATIO_UP = ("{d0} + {d1}*u", "{d0} + {d1}*log(u + 1)", "{d0} + {d1}*(1 - exp(-{k}*u))", "{d0} + {d1}*sqrt(u)")
RATIO_DOWN = ("{d0} + {d1}*exp(-{k}*u)", "{d0} + {d1}/(u + 1)", "{d0} + {d1}/(u + 1)^2")
DAMPER_DOWN = ("{e0}*exp(-{k}*s)", "{e0}/(s + 1)", "{e0}", "{e0}*({B} - s)")
DAMPER_UP = ("{e0}*(1 + {k}*s)", "{e0}*exp({k}*s)")
# kernels K(s, u) > 0 with d/du (dK/ds / K) of known sign for s > 0
KERNEL_UP = ("exp(s*u)", "s^u", "(1 + s)^u", "exp(s*sqrt(u))")
KERNEL_DOWN = ("exp(-s*u)", "exp(-s*u^2)", "(1 + s)^(-u)", "1/(1 + s*u)")


def _r(x, nd=4):
    return round(float(x), nd)


def random_scale(rng, qpowers_prob: float = 0.0, min_points: int = 4) -> dict:
    """Draw a scale whose 0.25-resolution grid has at least ``min_points`` points."""
    while True:
        spec = _draw_scale(rng, qpowers_prob)
        if len(TimeScale.from_dict(spec).enumerate_grid(0.25)) >= min_points:
            return spec


def _draw_scale(rng, qpowers_prob):
    if rng.random() < qpowers_prob:
        q = _r(rng.uniform(1.05, 3.0), 3)
        n_max = int(min(10, math.floor(math.log(50.0) / math.log(q))))
        return {"canonical": "qpowers", "q": q, "n_max": max(n_max, 2)}
    k = int(rng.integers(1, 5))
    while True:
        xs = sorted(_r(v, 2) for v in rng.uniform(0.0, 10.0, 2 * k))
        if all(y - x >= 0.05 for x, y in zip(xs, xs[1:])):
            break
    segs = []
    for i in range(k):
        lo, hi = xs[2 * i], xs[2 * i + 1]
        if rng.random() < 0.5:
            segs.append({"interval": [lo, hi]})
        else:
            segs.append({"point": lo})
    return {"segments": segs}


def scale_bounds(spec: dict):
    if "canonical" in spec:
        if spec["canonical"] == "qpowers":
            return 1.0, spec["q"] ** spec["n_max"]
        if spec["canonical"] == "reals":
            return spec["a"], spec["b"]
        if spec["canonical"] == "integers":
            return float(spec["lo"]), float(spec["hi"])
        return float(spec.get("start", 0)), float(spec["n_max"])
    first, last = spec["segments"][0], spec["segments"][-1]
    lo = first["interval"][0] if "interval" in first else first["point"]
    hi = last["interval"][1] if "interval" in last else last["point"]
    return lo, hi


def _fill(rng, template, **fixed):
    vals = {
        "c0": _r(rng.uniform(0.5, 3.0)),
        "c1": _r(rng.uniform(0.2, 2.0)),
        "d0": _r(rng.uniform(0.3, 2.0)),
        "d1": _r(rng.uniform(0.2, 2.0)),
        "e0": _r(rng.uniform(0.1, 4.0)),
        "k": _r(rng.uniform(0.1, 1.0)),
    }
    vals.update(fixed)
    return template.format(**vals)


def random_phi(rng, direction=None) -> str:
    pool = PHI_UP + PHI_DOWN if direction is None else (PHI_UP if direction == "increasing" else PHI_DOWN)
    return _fill(rng, pool[rng.integers(len(pool))])


def random_ratio(rng, direction) -> str:
    pool = RATIO_UP if direction == "increasing" else RATIO_DOWN
    return _fill(rng, pool[rng.integers(len(pool))])


def _pair(rng, ratio_direction, phi_direction=None):
    phi = random_phi(rng, phi_direction)
    r = random_ratio(rng, ratio_direction)
    return f"({r})*({phi})", phi, r


def _direction(rng):
    return "increasing" if rng.random() < 0.5 else "decreasing"


def _s_grid(rng, lo=0.05, hi=1.5, n=8):
    while True:
        xs = sorted(_r(v, 3) for v in rng.uniform(lo, hi, n))
        if all(y - x >= 0.01 for x, y in zip(xs, xs[1:])):
            return xs


def _base(theorem, scale, direction, resolution=0.25):
    lo, hi = scale_bounds(scale)
    return {"theorem": theorem, "scale": scale, "a": lo, "b": hi, "direction": direction,
            "resolution": resolution}


# -- per-family generators -------------------------------------------------------

def gen_upper(theorem, rng, falsify=False):
    direction = _direction(rng)
    ratio_dir = flip(direction) if falsify else direction
    scale = random_scale(rng, qpowers_prob=0.2)
    doc = _base(theorem, scale, direction)
    if theorem == "diamond":
        u = rng.random()
        doc["alpha_weight"] = 0.0 if u < 0.15 else 1.0 if u < 0.3 else _r(rng.uniform(0.0, 1.0), 3)
        doc["psi"], doc["phi"], _ = _pair(rng, ratio_dir, direction)
    else:
        doc["psi"], doc["phi"], _ = _pair(rng, ratio_dir)
    return doc


def gen_damped(theorem, rng, falsify=False):
    direction = _direction(rng)
    scale = random_scale(rng, qpowers_prob=0.2)
    doc = _base(theorem, scale, direction)
    lo, hi = doc["a"], doc["b"]
    which = rng.choice(["H2", "H3", "H5"]) if falsify else None
    ratio_dir = flip(direction) if which == "H2" else direction
    phi = random_phi(rng)
    r = random_ratio(rng, ratio_dir)
    r_a = exprlang.evaluate(exprlang.parse(r), {"u": lo})
    if which == "H3":
        rho = rng.uniform(0.4, 0.9) if direction == "increasing" else rng.uniform(1.1, 2.0)
    else:
        rho = rng.uniform(1.0, 2.0) if direction == "increasing" else rng.uniform(0.5, 1.0)
    if which == "H2":
        # keep psi(a)/phi(a) on the correct side of 1 so only H2 is inverted
        rho = rng.uniform(1.0, 1.5) if direction == "increasing" else rng.uniform(0.6, 1.0)
    c = _r(rho / r_a, 6)
    doc["psi"] = f"{c}*({r})*({phi})"
    doc["phi"] = phi
    pool = DAMPER_UP if which == "H5" else DAMPER_DOWN
    doc["damper"] = _fill(rng, pool[rng.integers(len(pool))], B=_r(hi + rng.uniform(0.0, 2.0)))
    return doc


def gen_two_dampers(theorem, rng, falsify=False):
    direction = _direction(rng)
    scale = random_scale(rng, qpowers_prob=0.2)
    doc = _base(theorem, scale, direction)
    doc["psi"], doc["phi"], _ = _pair(rng, direction)
    while True:
        lams = sorted(_r(v, 3) for v in rng.uniform(0.0, 1.0, 2))
        if not falsify or lams[1] - lams[0] >= 0.2:
            break
    # T'/T moves from phi/Phi towards psi/Psi as the blend grows, so either
    # direction needs blend(T1) >= blend(T2); the inversion swaps them
    l1, l2 = (lams[0], lams[1]) if falsify else (lams[1], lams[0])
    doc["dampers"] = [
        {"blend": l1, "coef": _r(rng.uniform(0.2, 3.0))},
        {"blend": l2, "coef": _r(rng.uniform(0.2, 3.0))},
    ]
    return doc


def gen_power(theorem, rng, falsify=False):
    direction = _direction(rng)
    scale = random_scale(rng, qpowers_prob=0.25)
    doc = _base(theorem, scale, direction)
    doc["psi"], doc["phi"], _ = _pair(rng, flip(direction) if falsify else direction)
    doc["s_grid"] = _s_grid(rng)
    return doc


def _factor(rng, ratio_dir, kernel=None, qpowers_prob=0.25):
    scale = random_scale(rng, qpowers_prob=qpowers_prob)
    lo, hi = scale_bounds(scale)
    psi, phi, _ = _pair(rng, ratio_dir)
    f = {"scale": scale, "psi": psi, "phi": phi, "a": lo, "b": hi}
    if kernel is not None:
        f["kernel"] = kernel
    return f


def gen_product(theorem, rng, falsify=False):
    direction = _direction(rng)
    m = int(rng.integers(1, 4))
    bad = int(rng.integers(m)) if falsify else -1
    factors = []
    for l in range(m):
        if theorem == "thm2-5":
            up = rng.random() < 0.5
            pool = KERNEL_UP if up else KERNEL_DOWN
            kernel = pool[rng.integers(len(pool))]
            need = direction if up else flip(direction)
            factors.append(_factor(rng, flip(need) if l == bad else need, kernel, qpowers_prob=0.0))
        else:
            factors.append(_factor(rng, flip(direction) if l == bad else direction))
    return {"theorem": theorem, "factors": factors, "s_grid": _s_grid(rng), "direction": direction,
            "resolution": 0.25}


def gen_case2(theorem, rng, falsify=False):
    ratio_dir = _direction(rng)
    up = rng.random() < 0.5
    pool = KERNEL_UP if up else KERNEL_DOWN
    scale = random_scale(rng)
    implied = ratio_dir if up else flip(ratio_dir)
    doc = _base(theorem, scale, flip(implied) if falsify else implied)
    doc["psi"], doc["phi"], _ = _pair(rng, ratio_dir)
    doc["kernel"] = pool[rng.integers(len(pool))]
    doc["s_grid"] = _s_grid(rng)
    return doc


def gen_series(theorem, rng, falsify=False):
    direction = _direction(rng)
    kind = rng.choice(["reals", "integers", "qpowers"])
    n = int(rng.integers(3, 7))
    u0 = int(rng.integers(0, 3))
    phi = [_r(v) for v in rng.uniform(0.5, 3.0, n)]
    steps = np.cumsum(rng.uniform(0.1, 1.0, n))
    ratio = [_r(rng.uniform(0.2, 1.0) + v) for v in steps]
    if (direction == "decreasing") != falsify:
        ratio = ratio[::-1]
    psi = [_r(r * p, 6) for r, p in zip(ratio, phi)]
    if kind == "reals":
        L = _r(rng.uniform(1.0, 4.0), 2)
        s0 = _r(rng.uniform(0.0, L / 2), 2)
        scale = {"canonical": "reals", "a": 0.0, "b": L}
        res = 0.1
    elif kind == "integers":
        scale = {"canonical": "integers", "lo": 0, "hi": int(rng.integers(6, 16))}
        s0 = float(rng.integers(0, 4))
        res = 1.0
    else:
        q = _r(rng.uniform(1.2, 3.0), 3)
        n_max = int(min(10, math.floor(math.log(60.0) / math.log(q))))
        scale = {"canonical": "qpowers", "q": q, "n_max": n_max}
        s0 = float(q ** int(rng.integers(0, 2)))
        res = 1.0
    return {
        "theorem": theorem, "scale": scale, "s0": s0, "max_order": u0 + n - 1, "u0": u0,
        "coeff_psi": psi, "coeff_phi": phi, "direction": direction, "resolution": res,
    }


GENERATORS = {
    "thm1-1": gen_upper,
    "nabla1-1": gen_upper,
    "diamond": gen_upper,
    "thm1-2": gen_damped,
    "nabla1-2": gen_damped,
    "thm1-3": gen_two_dampers,
    "nabla1-3": gen_two_dampers,
    "thm2-1": gen_power,
    "thm2-3": gen_product,
    "thm2-5": gen_product,
    "thm2-4": gen_case2,
    "thm2-6": gen_series,
}


def generate(theorem: str, rng, falsify: bool = False) -> dict:
    try:
        gen = GENERATORS[theorem]
    except KeyError:
        raise ValueError(f"no random generator for theorem {theorem!r}") from None
    return gen(theorem, rng, falsify)
