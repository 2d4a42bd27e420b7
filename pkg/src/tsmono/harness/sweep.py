"""Randomized soundness and falsifiability sweeps over generated scenarios."""

from __future__ import annotations

import multiprocessing
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from tsmono.harness.config import ScenarioConfig
from tsmono.harness.generators import generate
from tsmono.harness.runner import run_scenario
from tsmono.monotonicity.verdict import HYPOTHESIS_FAILED, VERIFIED, VIOLATED

MAX_ATTEMPTS = 25


def trial_rng(seed: int, index: int):
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def run_trial(theorem: str, seed: int, index: int, falsify: bool = False,
              tol_mono=None) -> dict:
    """One sweep trial.

    Soundness trials redraw (up to MAX_ATTEMPTS times) until every hypothesis
    margin passes, so the verdict is expected to be Verified.  Falsify trials
    invert exactly one hypothesis and force sampling so that the sampled
    quotient can be inspected as well.
    """
    rng = trial_rng(seed, index)
    attempts = 0
    while True:
        attempts += 1
        doc = generate(theorem, rng, falsify)
        if falsify:
            doc["force_sample"] = True
        v = run_scenario(ScenarioConfig.from_dict(doc), tol_mono=tol_mono)
        if falsify or v.verdict != HYPOTHESIS_FAILED or attempts >= MAX_ATTEMPTS:
            break
    row = {
        "index": index,
        "attempts": attempts,
        "verdict": v.verdict,
        "condition": v.failed_condition,
        "sampled_verdict": v.sampled_outcome.status if v.sampled_outcome else None,
        "interval": list(v.outcome.interval) if v.outcome.interval else None,
        "scenario": doc,
    }
    return row


def _star(args):
    return run_trial(*args)


@dataclass
class SweepResult:
    theorem: str
    trials: int
    seed: int
    falsify: bool
    rows: list = field(default_factory=list)

    @property
    def counts(self) -> dict:
        return dict(sorted(Counter(r["verdict"] for r in self.rows).items()))

    @property
    def violations_when_forced(self) -> int:
        return sum(1 for r in self.rows if r["sampled_verdict"] == VIOLATED)

    @property
    def passed(self) -> bool:
        if self.falsify:
            return all(r["verdict"] == HYPOTHESIS_FAILED for r in self.rows)
        return all(r["verdict"] == VERIFIED for r in self.rows)

    def summary(self) -> dict:
        out = {
            "theorem": self.theorem,
            "trials": self.trials,
            "seed": self.seed,
            "mode": "falsify" if self.falsify else "soundness",
            "counts": self.counts,
            "passed": self.passed,
        }
        if self.falsify:
            out["detection_rate"] = sum(r["verdict"] == HYPOTHESIS_FAILED for r in self.rows) / self.trials
            out["forced_violation_rate"] = self.violations_when_forced / self.trials
        else:
            out["unsatisfied_after_redraws"] = sum(r["verdict"] == HYPOTHESIS_FAILED for r in self.rows)
            out["violated"] = sum(r["verdict"] == VIOLATED for r in self.rows)
        return out

    def to_dict(self) -> dict:
        return {"summary": self.summary(), "trials": self.rows}


def run_sweep(theorem: str, trials: int, seed: int, falsify: bool = False,
              workers: int = 1, tol_mono=None) -> SweepResult:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    jobs = [(theorem, seed, i, falsify, tol_mono) for i in range(trials)]
    if workers > 1:
        with multiprocessing.Pool(workers) as pool:
            rows = pool.map(_star, jobs, chunksize=max(1, trials // (4 * workers)))
    else:
        rows = [_star(j) for j in jobs]
    rows.sort(key=lambda r: r["index"])
    return SweepResult(theorem, trials, seed, falsify, rows)
