"""Command-line front end: ``tsmono verify | sweep | con-search``.

Exit status: 0 Verified (or a clean sweep), 2 ViolatedAt, 3 HypothesisFailed,
1 configuration or runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from tsmono import calculus
from tsmono.errors import ConfigInvalid, TimeScaleError
from tsmono.harness import report as rep
from tsmono.harness.config import load_config
from tsmono.harness.consearch import run_con_search
from tsmono.harness.generators import GENERATORS
from tsmono.harness.runner import run_scenario
from tsmono.harness.sweep import run_sweep
from tsmono.monotonicity.verdict import HYPOTHESIS_FAILED, VERIFIED, VIOLATED

EXIT_OK, EXIT_ERROR, EXIT_VIOLATED, EXIT_HYPOTHESIS = 0, 1, 2, 3
EXIT_FOR = {VERIFIED: EXIT_OK, VIOLATED: EXIT_VIOLATED, HYPOTHESIS_FAILED: EXIT_HYPOTHESIS}


def _tolerance_args(p, default):
    p.add_argument("--tol-mono", type=float, default=default,
                   help="override the monotonicity tolerance (default 1e-9)")
    p.add_argument("--tol-quad", type=float, default=default,
                   help="override the quadrature tolerance (default 1e-10)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsmono",
        description="Check monotonicity rules for quotients of integrals on time scales.",
    )
    _tolerance_args(parser, None)
    sub = parser.add_subparsers(dest="command", required=True)
    tol_parent = argparse.ArgumentParser(add_help=False)
    _tolerance_args(tol_parent, argparse.SUPPRESS)

    v = sub.add_parser("verify", parents=[tol_parent], help="run one scenario file")
    v.add_argument("config", help="scenario file (YAML)")
    v.add_argument("--out", help="write the JSON report here instead of stdout")
    v.add_argument("--csv", help="write the sampled quotient series here")

    s = sub.add_parser("sweep", parents=[tol_parent], help="randomized sweep for one theorem")
    s.add_argument("theorem", help=f"one of: {', '.join(GENERATORS)}")
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--falsify", action="store_true",
                   help="invert one hypothesis per trial and expect HypothesisFailed")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", help="write the JSON report here instead of stdout")

    c = sub.add_parser("con-search", parents=[tol_parent], help="search for ladder condition failures")
    c.add_argument("--generator", required=True, help="reals | integers | qpowers[:q1,q2,..] | hybrid")
    c.add_argument("--trials", type=int, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--orders", type=int, default=6, help="largest order m checked (default 6)")
    c.add_argument("--out", help="write the JSON report here instead of stdout")
    return parser


def _emit(report: dict, out) -> None:
    text = rep.dumps(report)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tolerances(tol_mono, tol_quad):
    return {"tol_mono": tol_mono, "tol_quad": tol_quad}


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    cfg = load_config(args.config)
    if args.tol_quad is not None:
        cfg.tol_quad = args.tol_quad
    if args.tol_mono is not None:
        cfg.tol_mono = args.tol_mono
    if cfg.theorem == "con-search":
        result = run_con_search(cfg.generator, cfg.trials, cfg.seed or 0, cfg.orders)
        report = rep.build_report("con-search", cfg.raw, result, seed=cfg.seed,
                                  wall_time=time.perf_counter() - t0,
                                  tolerances=_tolerances(cfg.tol_mono, cfg.tol_quad))
        _emit(report, args.out)
        return EXIT_OK
    verdict = run_scenario(cfg)
    report = rep.build_report("verify", cfg.raw, verdict.to_dict(), seed=cfg.seed,
                              wall_time=time.perf_counter() - t0,
                              tolerances=_tolerances(cfg.tol_mono, cfg.tol_quad))
    _emit(report, args.out)
    if args.csv:
        rep.write_csv(verdict.samples, args.csv)
    print(f"{cfg.theorem}: {verdict.outcome}", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_FOR[verdict.verdict]


def cmd_sweep(args) -> int:
    if args.trials < 1:
        raise ValueError("--trials must be >= 1")
    if args.theorem not in GENERATORS:
        raise ValueError(f"no sweep generator for {args.theorem!r}; expected one of {', '.join(GENERATORS)}")
    t0 = time.perf_counter()
    if args.tol_quad is not None:
        calculus.TOL_QUAD = args.tol_quad
    res = run_sweep(args.theorem, args.trials, args.seed, args.falsify, args.workers, args.tol_mono)
    scenario = {"theorem": args.theorem, "trials": args.trials, "falsify": args.falsify}
    report = rep.build_report("sweep", scenario, res.to_dict(), seed=args.seed,
                              wall_time=time.perf_counter() - t0,
                              tolerances=_tolerances(args.tol_mono, args.tol_quad))
    _emit(report, args.out)
    print(json.dumps(res.summary(), sort_keys=True), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK if res.passed else EXIT_VIOLATED


def cmd_con_search(args) -> int:
    t0 = time.perf_counter()
    result = run_con_search(args.generator, args.trials, args.seed, args.orders)
    scenario = {"generator": args.generator, "trials": args.trials, "orders": args.orders}
    report = rep.build_report("con-search", scenario, result, seed=args.seed,
                              wall_time=time.perf_counter() - t0,
                              tolerances=_tolerances(args.tol_mono, args.tol_quad))
    _emit(report, args.out)
    line = (f"con-search {args.generator}: {result['violating_scales']} of {args.trials} scales "
            f"with violations; controls clean: {result['controls_clean']}")
    print(line, file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "sweep": cmd_sweep, "con-search": cmd_con_search}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigInvalid as exc:
        print(f"error: invalid config field {exc}", file=sys.stderr)
    except (TimeScaleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
