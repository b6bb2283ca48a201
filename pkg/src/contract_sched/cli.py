"""Command-line interface.

Subcommands: `run` (execute a registered experiment to CSV), `list` (show the
registry), `eval` (one-off distributional consistency query), `mult` (one-off
prediction-set query), `emd` (distance between two described distributions).

Exit codes: 0 success, 2 bad arguments, 3 unknown experiment, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from .distributions import (
    AdviceDistribution,
    PointSet,
    TruncatedNormal,
    Uniform,
    adversarial_continuous,
    adversarial_discrete,
)
from .emd import emd
from .experiments import (
    ExperimentSpec,
    ParameterError,
    Range,
    UnknownExperimentError,
    describe_registry,
    format_cell,
    run_experiment,
)
from .multi import (
    PredictionSet,
    average_consistency,
    best_schedule_by_gaps,
    best_schedule_exact,
    prediction_consistency_bound,
)
from .schedule import GeometricSchedule
from .selection import best_in_portfolio, consistency, expected_profit

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNKNOWN_EXPERIMENT = 3
EXIT_IO = 4


def parse_distribution(text: str) -> AdviceDistribution:
    """Parse a distribution description.

    Grammar (lists use ';'):
      uniform:lo=L,hi=H
      normal:m=M,sigma=S            (normal truncated at zero)
      points:T@MASS;T@MASS;...      (MASS defaults to 1 for a single point)
      advcont:D=X
      advdisc:lambdas=L;L;...,eps=E
    """
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind in ("point", "points"):
        pts = []
        for item in filter(None, rest.split(";")):
            t, _, m = item.partition("@")
            pts.append((float(t), float(m) if m else 1.0))
        if not pts:
            raise ValueError(f"no points in distribution spec {text!r}")
        return PointSet(pts)
    params: dict[str, str] = {}
    for item in filter(None, rest.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"expected key=value in distribution spec, got {item!r}")
        params[key.strip()] = value.strip()
    try:
        if kind == "uniform":
            return Uniform(float(params["lo"]), float(params["hi"]))
        if kind == "normal":
            return TruncatedNormal(float(params["m"]), float(params["sigma"]))
        if kind == "advcont":
            return adversarial_continuous(float(params["D"]))
        if kind == "advdisc":
            lams = [float(x) for x in params["lambdas"].split(";")]
            return adversarial_discrete(lams, float(params.get("eps", "1e-9")))
    except KeyError as exc:
        raise ValueError(f"distribution spec {text!r} is missing parameter {exc}") from None
    raise ValueError(
        f"unknown distribution kind {kind!r} (use uniform/normal/points/advcont/advdisc)"
    )


def parse_param_value(raw: str):
    """Parse a --set value: 'lo:hi' integer grid, 'lo:hi:steps[:spacing]'
    range, comma-separated list, or a scalar (number or token)."""
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) == 2:
            lo, hi = float(parts[0]), float(parts[1])
            if lo != int(lo) or hi != int(hi):
                raise ParameterError(f"'lo:hi' means an integer grid; got {raw!r}")
            return Range.integer_grid(int(lo), int(hi))
        if len(parts) == 3:
            return Range(float(parts[0]), float(parts[1]), int(parts[2]))
        if len(parts) == 4:
            return Range(float(parts[0]), float(parts[1]), int(parts[2]), parts[3])
        raise ParameterError(f"bad range syntax {raw!r}")
    if "," in raw:
        return [parse_param_value(item) for item in raw.split(",") if item]
    try:
        return float(raw)
    except ValueError:
        return raw


def parse_assignment(text: str) -> tuple[str, object]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ParameterError(f"expected key=value, got {text!r}")
    return key.strip(), parse_param_value(raw.strip())


def read_config(path: str) -> dict[str, object]:
    """Plain key=value config file; '#' starts a comment."""
    out: dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, value = parse_assignment(line)
            out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contract-sched",
        description="Learning-augmented contract scheduling experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a registered experiment and write CSV")
    p_run.add_argument("--experiment", help="registered experiment name")
    p_run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a parameter (repeatable)")
    p_run.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p_run.add_argument("--trials", type=int, default=None)
    p_run.add_argument("--out", help="output CSV path")
    p_run.add_argument("--config", help="key=value config file; flags override it")
    p_run.add_argument("--workers", type=int, default=None,
                       help="worker pool size (default: CONTRACT_SCHED_THREADS or all cores)")

    sub.add_parser("list", help="list registered experiments and their parameters")

    p_eval = sub.add_parser("eval", help="consistency of a schedule or portfolio under advice")
    p_eval.add_argument("--dist", required=True, help="distribution spec (see README)")
    group = p_eval.add_mutually_exclusive_group(required=True)
    group.add_argument("--phase", type=float, help="evaluate the schedule with this phase")
    group.add_argument("--n", type=int, help="pick the best schedule among n phases")

    p_mult = sub.add_parser("mult", help="best schedule for a finite prediction set")
    p_mult.add_argument("--times", required=True, help="comma-separated interruption times")
    p_mult.add_argument("--method", choices=("exact", "gap"), default="exact")

    p_emd = sub.add_parser("emd", help="transport distance between two distributions")
    p_emd.add_argument("--a", required=True, help="first distribution spec")
    p_emd.add_argument("--b", required=True, help="second distribution spec")
    return parser


def _print_kv(pairs) -> None:
    for key, value in pairs:
        print(f"{key}={format_cell(value)}")


def _cmd_run(args) -> int:
    config = read_config(args.config) if args.config else {}
    experiment = args.experiment or config.get("experiment")
    if not experiment:
        raise ParameterError("no experiment given (use --experiment or a config file)")
    out = args.out or config.get("out")
    if not out:
        raise ParameterError("no output path given (use --out or a config file)")
    reserved = {"experiment", "out", "seed", "trials", "workers"}
    params = {k: v for k, v in config.items() if k not in reserved}
    for item in args.set:
        key, value = parse_assignment(item)
        params[key] = value
    seed = args.seed if args.seed is not None else int(float(config.get("seed", 0)))
    trials = args.trials
    if trials is None and "trials" in config:
        trials = int(float(config["trials"]))
    workers = args.workers
    if workers is None and "workers" in config:
        workers = int(float(config["workers"]))
    spec = ExperimentSpec(name=str(experiment), output_path=str(out),
                          parameters=params, seed=seed, trials=trials)
    rows = run_experiment(spec, workers=workers)
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    mu = parse_distribution(args.dist)
    if args.phase is not None:
        schedule = GeometricSchedule(args.phase)
        _print_kv([
            ("lambda", schedule.phase),
            ("consistency", consistency(mu, schedule)),
            ("expected_value", mu.mean()),
            ("expected_profit", expected_profit(mu, schedule)),
        ])
    else:
        report = best_in_portfolio(mu, args.n)
        _print_kv([
            ("lambda", report.phase),
            ("consistency", report.consistency),
            ("guarantee", report.guarantee),
            ("n", report.n),
            ("expected_value", report.expected_value),
            ("expected_profit", report.expected_profit),
        ])
    return EXIT_OK


def _cmd_mult(args) -> int:
    times = [float(t) for t in args.times.split(",") if t]
    preds = PredictionSet(times)
    solver = best_schedule_exact if args.method == "exact" else best_schedule_by_gaps
    schedule, worst = solver(preds)
    _print_kv([
        ("k", len(preds)),
        ("lambda", schedule.phase),
        ("consistency", worst),
        ("average_consistency", average_consistency(schedule, preds)),
        ("bound", prediction_consistency_bound(len(preds))),
    ])
    return EXIT_OK


def _cmd_emd(args) -> int:
    _print_kv([("emd", emd(parse_distribution(args.a), parse_distribution(args.b)))])
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            print(describe_registry())
            return EXIT_OK
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "mult":
            return _cmd_mult(args)
        if args.command == "emd":
            return _cmd_emd(args)
        raise ParameterError(f"unknown command {args.command!r}")
    except UnknownExperimentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_EXPERIMENT
    except (ParameterError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
