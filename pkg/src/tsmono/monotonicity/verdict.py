"""Verdict records and the sampled monotonicity test shared by all checkers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from tsmono.errors import TooFewSamples

TOL_MONO = 1e-9

VERIFIED = "Verified"
VIOLATED = "ViolatedAt"
HYPOTHESIS_FAILED = "HypothesisFailed"

DIRECTIONS = ("increasing", "decreasing")


def flip(direction: str) -> str:
    return "decreasing" if direction == "increasing" else "increasing"


def check_direction(direction: str) -> str:
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    return direction


@dataclass
class HypothesisMargin:
    condition: str
    description: str
    worst_margin: float
    location: Any = None
    passed: bool = True

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "description": self.description,
            "worst_margin": _jsonable(self.worst_margin),
            "location": _jsonable(self.location),
            "passed": self.passed,
        }


@dataclass
class Outcome:
    status: str
    interval: Optional[tuple] = None
    condition: Optional[str] = None
    worst_step: Optional[float] = None

    def __str__(self):
        if self.status == VIOLATED:
            return f"{VIOLATED}({self.interval[0]!r}, {self.interval[1]!r})"
        if self.status == HYPOTHESIS_FAILED:
            return f"{HYPOTHESIS_FAILED}({self.condition})"
        return self.status

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "interval": _jsonable(self.interval),
            "condition": self.condition,
            "worst_step": _jsonable(self.worst_step),
        }


@dataclass
class MonotoneVerdict:
    theorem: str
    direction_claimed: str
    strictness: str
    hypothesis_margins: list
    samples: list
    outcome: Outcome
    tol_mono: float = TOL_MONO
    sampled_outcome: Optional[Outcome] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return self.outcome.status

    @property
    def failed_condition(self) -> Optional[str]:
        return self.outcome.condition

    def margin(self, condition: str) -> HypothesisMargin:
        for hm in self.hypothesis_margins:
            if hm.condition == condition:
                return hm
        raise KeyError(condition)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "direction_claimed": self.direction_claimed,
            "strictness": self.strictness,
            "tol_mono": self.tol_mono,
            "verdict": self.outcome.to_dict(),
            "sampled_verdict": self.sampled_outcome.to_dict() if self.sampled_outcome else None,
            "hypothesis_margins": [hm.to_dict() for hm in self.hypothesis_margins],
            "samples": [[_jsonable(s), _jsonable(v)] for s, v in self.samples],
            "diagnostics": _jsonable(self.diagnostics),
        }


def _jsonable(x):
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def verify_monotone(
    samples: Sequence[tuple],
    direction: str,
    strictness: str = "weak",
    tol: float = TOL_MONO,
) -> Outcome:
    """Sign test on consecutive sample differences.

    weak: every step >= -tol in the claimed direction.  strict: additionally
    at least one step > tol.  A violation is reported at the worst step
    (first one on ties).
    """
    check_direction(direction)
    if strictness not in ("weak", "strict"):
        raise ValueError("strictness must be 'weak' or 'strict'")
    if len(samples) < 2:
        raise TooFewSamples(f"need at least 2 samples, got {len(samples)}")
    sign = 1.0 if direction == "increasing" else -1.0
    worst, worst_i, best = math.inf, None, -math.inf
    for i in range(len(samples) - 1):
        (s0, v0), (s1, v1) = samples[i], samples[i + 1]
        if not s1 > s0:
            raise ValueError("sample abscissae must be strictly increasing")
        step = sign * (v1 - v0)
        if step < worst:
            worst, worst_i = step, i
        best = max(best, step)
    pair = (samples[worst_i][0], samples[worst_i + 1][0])
    if worst < -tol or math.isnan(worst):
        return Outcome(VIOLATED, pair, worst_step=worst)
    if strictness == "strict" and not best > tol:
        return Outcome(VIOLATED, pair, worst_step=worst)
    return Outcome(VERIFIED, worst_step=worst)


def monotone_margin(points: Sequence[float], values: Sequence[float], direction: str):
    """Worst signed consecutive difference and where it occurs."""
    sign = 1.0 if direction == "increasing" else -1.0
    worst, where = math.inf, None
    for i in range(len(values) - 1):
        step = sign * (values[i + 1] - values[i])
        if math.isnan(step):
            return -math.inf, (points[i], points[i + 1])
        if step < worst:
            worst, where = step, (points[i], points[i + 1])
    return worst, where


def minimum(points: Sequence[float], values: Sequence[float]):
    worst, where = math.inf, None
    for p, v in zip(points, values):
        if v < worst or math.isnan(v):
            worst, where = v, p
            if math.isnan(v):
                return -math.inf, p
    return worst, where


def conclude(
    theorem: str,
    direction: str,
    strictness: str,
    margins: list,
    sampler: Callable[[], list],
    *,
    tol: float = TOL_MONO,
    force_sample: bool = False,
    diagnostics: Optional[dict] = None,
) -> MonotoneVerdict:
    """Short-circuit on the first failed hypothesis unless sampling is forced."""
    failed = next((hm for hm in margins if not hm.passed), None)
    diagnostics = dict(diagnostics or {})
    samples: list = []
    sampled = None
    if failed is None or force_sample:
        samples = sampler()
        if len(samples) >= 2:
            sampled = verify_monotone(samples, direction, strictness, tol)
        elif failed is None:
            raise TooFewSamples(f"sampling plan produced {len(samples)} usable sample(s)")
    if failed is not None:
        outcome = Outcome(HYPOTHESIS_FAILED, condition=failed.condition)
        return MonotoneVerdict(
            theorem, direction, strictness, margins, samples, outcome, tol, sampled, diagnostics
        )
    return MonotoneVerdict(theorem, direction, strictness, margins, samples, sampled, tol, None, diagnostics)


def margin(condition, description, worst, location, tol=TOL_MONO, strict_positive=False):
    if strict_positive:
        passed = worst > 0
    else:
        passed = worst >= -tol
    return HypothesisMargin(condition, description, worst, location, bool(passed))
