"""Command-line interface.

Subcommands: stats, split, discover, simulate, evaluate, experiment.
Exit codes: 0 success, 1 usage error, 2 data error, 3 pipeline error.
Set LOGSIM_LOG_LEVEL (debug/info/warning/error) to control verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__
from .errors import DataError, InvalidArgumentError, PipelineError
from .eventlog import (
    compute_statistics,
    parse_csv,
    parse_timestamp,
    temporal_split,
    write_csv,
)
from .experiment import ExperimentConfig, render_report, run_experiment, write_report_files

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PIPELINE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fmt_duration(seconds: float) -> str:
    days, rem = divmod(int(seconds), 86_400)
    hours, rem = divmod(rem, 3_600)
    minutes, secs = divmod(rem, 60)
    if days:
        return f"{days}d {hours:02d}h {minutes:02d}m"
    return f"{hours:02d}:{minutes:02d}:{secs:02d}"


def cmd_stats(args) -> int:
    stats = compute_statistics(parse_csv(args.log))
    d = stats.to_dict()
    width = max(len(k) for k in d)
    for key, value in d.items():
        if key.endswith("_s"):
            print(f"{key.ljust(width)}  {value:.1f}  ({_fmt_duration(value)})")
        elif isinstance(value, float):
            print(f"{key.ljust(width)}  {value:.2f}")
        else:
            print(f"{key.ljust(width)}  {value}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(d, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_split(args) -> int:
    log = parse_csv(args.log)
    train, test = temporal_split(log, args.ratio)
    write_csv(train, args.train)
    write_csv(test, args.test)
    print(f"train: {len(train.traces)} traces -> {args.train}")
    print(f"test:  {len(test.traces)} traces -> {args.test}")
    return EXIT_OK


def cmd_discover(args) -> int:
    from .optimizer import SearchSpace, optimize_dds

    log = parse_csv(args.log)
    space = None
    if args.space:
        with open(args.space, encoding="utf-8") as fh:
            space = SearchSpace.from_dict(json.load(fh))
    result = optimize_dds(
        log, space, trials=args.trials, runs_per_trial=args.runs, seed=args.seed
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(result.best.to_json() + "\n")
    print(
        f"best trial {result.best_trial.trial}: mean ELS "
        f"{result.best_trial.mean_els:.4f} -> {args.out}"
    )
    if args.history:
        history = {
            "trials": [t.summary() for t in result.history],
            "failures": [f.summary() for f in result.failures],
            "best_trial": result.best_trial.trial,
        }
        with open(args.history, "w", encoding="utf-8") as fh:
            json.dump(history, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.pools_out or args.interarrival_out:
        model = result.best
        if args.pools_out:
            with open(args.pools_out, "w", encoding="utf-8") as fh:
                json.dump(
                    {"pools": [p.to_dict() for p in model.pools],
                     "activity_pool": dict(sorted(model.activity_pool.items()))},
                    fh, indent=2, sort_keys=True,
                )
                fh.write("\n")
        if args.interarrival_out:
            with open(args.interarrival_out, "w", encoding="utf-8") as fh:
                json.dump(model.interarrival.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .bps_model import BpsModel
    from .simulator import SimConfig, simulate_detailed

    with open(args.model, encoding="utf-8") as fh:
        model = BpsModel.from_json(fh.read())
    start_ms = parse_timestamp(args.start) if args.start else 0
    run = simulate_detailed(
        model, SimConfig(num_cases=args.cases, seed=args.seed, start_instant_ms=start_ms)
    )
    write_csv(run.log, args.out)
    if args.audit:
        with open(args.audit, "w", encoding="utf-8") as fh:
            for record in run.audit:
                fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
    print(f"{len(run.log.traces)} traces -> {args.out}"
          + (f" ({len(run.aborted_case_ids)} aborted)" if run.aborted_case_ids else ""))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .metrics import evaluate_logs

    gen = parse_csv(args.generated)
    truth = parse_csv(args.truth)
    report = evaluate_logs(gen, truth, bins=args.bins, normalize_emd=args.normalize_emd)
    d = report.to_dict()
    names = {"els": "ELS", "cfls": "CFLS", "cycle_time_mae_s": "MAE (s)", "emd": "EMD"}
    width = max(len(v) for v in names.values())
    for key, label in names.items():
        print(f"{label.ljust(width)}  {d[key]:.4f}")
    payload = json.dumps(d, indent=2, sort_keys=True)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    return EXIT_OK


def cmd_experiment(args) -> int:
    overrides = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            overrides.update(json.load(fh))
    flags = {
        "log_path": args.log,
        "split_ratio": args.ratio,
        "trials": args.trials,
        "runs_per_trial": args.runs,
        "generated_logs": args.generated_logs,
        "seed": args.seed,
        "external_dir": args.external_dir,
        "bins": args.bins,
        "normalize_emd": args.normalize_emd or None,
    }
    for key, value in flags.items():
        if value is not None:
            overrides[key] = value
    generators = ["dds"]
    if args.no_dds:
        generators = []
    if overrides.get("external_dir"):
        generators.append("external")
    overrides.setdefault("generators", generators)
    overrides["generators"] = tuple(overrides["generators"])
    overrides.setdefault("normalize_emd", False)
    if not overrides.get("log_path"):
        raise InvalidArgumentError("experiment needs --log or a config file with log_path")
    config = ExperimentConfig(**overrides)
    output = run_experiment(config)
    paths = write_report_files(output, args.out_dir, figures=not args.no_figures)
    print(render_report(output.report), end="")
    print(f"report files in {args.out_dir}: " + ", ".join(sorted(
        p.name if hasattr(p, "name") else str(p)
        for key, p in paths.items() if key != "figures"
    )))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="logsim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"logsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="summarize an event log")
    p.add_argument("--log", required=True)
    p.add_argument("--json", help="also write the statistics as JSON")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", help="temporal train/test split")
    p.add_argument("--log", required=True)
    p.add_argument("--ratio", type=float, default=0.7)
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("discover", help="search for the best simulation scenario")
    p.add_argument("--log", required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="scenario JSON output")
    p.add_argument("--history", help="trial history JSON output")
    p.add_argument("--space", help="search-space JSON file")
    p.add_argument("--pools-out", help="write discovered pools as JSON")
    p.add_argument("--interarrival-out", help="write the inter-arrival distribution as JSON")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("simulate", help="run a scenario and emit a synthetic log")
    p.add_argument("--model", required=True, help="scenario JSON")
    p.add_argument("--cases", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", help="start instant (ISO-8601); default epoch")
    p.add_argument("--out", required=True)
    p.add_argument("--audit", help="write a JSON-lines audit trail (debug)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="compare a generated log against ground truth")
    p.add_argument("--generated", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--normalize-emd", action="store_true")
    p.add_argument("--json", help="write the metric report to this file")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", help="full pipeline with report and figures")
    p.add_argument("--log")
    p.add_argument("--config", help="JSON config file (flags override it)")
    p.add_argument("--ratio", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--generated-logs", type=int, dest="generated_logs")
    p.add_argument("--seed", type=int)
    p.add_argument("--external-dir", help="directory of externally generated CSV logs")
    p.add_argument("--no-dds", action="store_true", help="score only external logs")
    p.add_argument("--bins", type=int)
    p.add_argument("--normalize-emd", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("LOGSIM_LOG_LEVEL", "warning").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidArgumentError as exc:
        print(f"logsim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"logsim: {exc}", file=sys.stderr)
        return EXIT_DATA
    except PipelineError as exc:
        print(f"logsim: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
