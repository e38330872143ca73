"""Command line entry points.

Four subcommands: `run` executes an experiment described by a JSON config,
`simulate` builds one from flags, `evaluate` scores a clustering file
against a truth file, and `serve` starts the HTTP task service.

Exit codes: 0 success, 1 configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys

from .engine import (
    MODES,
    SEQUENTIAL,
    ExperimentConfig,
    load_config,
    metrics,
    run_experiment,
)
from .errors import ConfigError, DataError
from .files import read_clustering, read_truth, write_trace
from .strategies import DISCIPLINES, FER, HS, STRATEGIES, DisciplineConfig


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crowdpath",
        description="Crowdsourced entity resolution over noisy pairwise votes.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run an experiment from a JSON config")
    run.add_argument("--config", required=True, help="experiment config file")
    run.set_defaults(handler=cmd_run)

    sim = commands.add_parser("simulate", help="run a synthetic experiment from flags")
    sim.add_argument("--records", type=int, default=40, metavar="N")
    shape = sim.add_mutually_exclusive_group()
    shape.add_argument(
        "--entities",
        type=int,
        metavar="K",
        help="spread records uniformly over K entities",
    )
    shape.add_argument(
        "--zipf",
        action="store_true",
        help="draw entity sizes from a Zipf law (the default)",
    )
    sim.add_argument("--fp", type=float, default=0.0, metavar="X",
                     help="false-positive rate of the synthetic crowd")
    sim.add_argument("--fn", type=float, default=0.0, metavar="Y",
                     help="false-negative rate of the synthetic crowd")
    sim.add_argument("--strategy", choices=sorted(STRATEGIES), default=HS)
    sim.add_argument("--discipline", choices=sorted(DISCIPLINES), default=FER)
    sim.add_argument("--mode", choices=sorted(MODES), default=SEQUENTIAL)
    sim.add_argument("--seed", type=int, default=0, metavar="S")
    sim.add_argument("--reps", type=int, default=1, metavar="R")
    sim.add_argument("--out", metavar="trace.tsv", help="write the mean trace here")
    sim.set_defaults(handler=cmd_simulate)

    ev = commands.add_parser("evaluate", help="score a clustering against a truth file")
    ev.add_argument("--clustering", required=True, help="record_id,cluster_id CSV")
    ev.add_argument("--truth", required=True, help="record_id,entity_id CSV")
    ev.set_defaults(handler=cmd_evaluate)

    serve = commands.add_parser("serve", help="start the HTTP task service")
    serve.add_argument("--config", required=True, help="experiment config file")
    serve.add_argument("--port", type=int, default=8000, metavar="P")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--max-outstanding", type=int, default=8,
                       help="open tasks allowed at once")
    serve.add_argument("--task-ttl-secs", type=float, default=300.0,
                       help="reclaim unanswered tasks after this long")
    serve.set_defaults(handler=cmd_serve)

    return parser


def _report(result, out) -> None:
    trace = result.mean_trace
    if out:
        write_trace(out, trace.points)
    last = trace.points[-1] if trace.points else None
    print(f"runs: {len(result.run_traces)}")
    print(f"cost: {trace.total_cost}")
    if last is not None:
        print(f"precision: {last.precision:.4f}")
        print(f"recall: {last.recall:.4f}")
        print(f"f: {last.f_measure:.4f}")
    if out:
        print(f"trace: {out}")


def cmd_run(args) -> int:
    config = load_config(args.config)
    result = run_experiment(config)
    _report(result, config.trace_out)
    return 0


def cmd_simulate(args) -> int:
    try:
        discipline = DisciplineConfig(mode=args.discipline)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    config = ExperimentConfig(
        records=args.records,
        entities=args.entities,
        false_positive=args.fp,
        false_negative=args.fn,
        discipline=discipline,
        strategy=args.strategy,
        mode=args.mode,
        seed=args.seed,
        repetitions=args.reps,
    )
    result = run_experiment(config)
    _report(result, args.out)
    return 0


def cmd_evaluate(args) -> int:
    clustering = read_clustering(args.clustering)
    truth = read_truth(args.truth)
    missing = set(clustering.records) - set(truth.records)
    if missing:
        sample = sorted(missing, key=str)[:3]
        raise DataError(f"clustering references records absent from truth: {sample}")
    point = metrics(clustering, truth)
    print("precision\trecall\tf")
    print(f"{point.precision:.6f}\t{point.recall:.6f}\t{point.f_measure:.6f}")
    return 0


def cmd_serve(args) -> int:
    # imported lazily so the core CLI works without the service extras
    import uvicorn

    from .service import build_app

    config = load_config(args.config)
    app = build_app(
        config,
        max_outstanding=args.max_outstanding,
        task_ttl_secs=args.task_ttl_secs,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
