"""End-to-end experiment: split, optimize, generate, score, report.

The input log is split 70/30 by trace start time; the training fold feeds
the hyperparameter search; the retained scenario generates a batch of logs
sized like the test fold (seeds derived from the master seed); each
generated log is scored against the test fold on all four metrics and the
report carries per-log values and their means. Pre-generated logs from an
external generator can be scored through the same path by pointing the
experiment at a directory of CSV files.

Everything in the report is a pure function of (input log, config, seed):
re-running reproduces it byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .errors import DataError, InvalidArgumentError
from .eventlog import (
    EventLog,
    compute_statistics,
    discover_concurrency,
    parse_csv,
    temporal_split,
)
from .metrics import evaluate_logs
from .optimizer import OptimizationResult, SearchSpace, optimize_dds
from .rng import Rng
from .simulator import SimConfig, simulate

log = logging.getLogger(__name__)

_OPT_STREAM = 1
_GEN_STREAM_BASE = 100


@dataclass(frozen=True)
class ExperimentConfig:
    log_path: str
    split_ratio: float = 0.7
    trials: int = 50
    runs_per_trial: int = 5
    generated_logs: int = 10
    seed: int = 0
    generators: tuple[str, ...] = ("dds",)
    external_dir: str | None = None
    bins: int = 100
    normalize_emd: bool = False
    search_space: dict | None = None

    def __post_init__(self):
        if self.generated_logs < 1:
            raise InvalidArgumentError("generated_logs must be >= 1")
        for g in self.generators:
            if g not in ("dds", "external"):
                raise InvalidArgumentError(f"unknown generator {g!r}")
        if "external" in self.generators and not self.external_dir:
            raise InvalidArgumentError("external generator needs external_dir")

    def to_dict(self) -> dict:
        return {
            "log_path": self.log_path,
            "split_ratio": self.split_ratio,
            "trials": self.trials,
            "runs_per_trial": self.runs_per_trial,
            "generated_logs": self.generated_logs,
            "seed": self.seed,
            "generators": list(self.generators),
            "external_dir": self.external_dir,
            "bins": self.bins,
            "normalize_emd": self.normalize_emd,
            "search_space": self.search_space,
        }

    def hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class ExperimentOutput:
    report: dict
    optimization: OptimizationResult | None


def _score_logs(logs, test: EventLog, config: ExperimentConfig) -> list[dict]:
    conc = discover_concurrency(test)
    return [
        evaluate_logs(g, test, config.bins, config.normalize_emd, conc).to_dict()
        for g in logs
    ]


def _mean_of(per_log: list[dict]) -> dict:
    keys = ("els", "cfls", "cycle_time_mae_s", "emd")
    return {k: sum(r[k] for r in per_log) / len(per_log) for k in keys}


def _external_logs(config: ExperimentConfig, expected_size: int):
    """Load the external generator's CSVs, excluding wrong-sized ones."""
    directory = Path(config.external_dir)
    paths = sorted(directory.glob("*.csv"))
    usable, warnings = [], []
    for path in paths:
        try:
            ext_log = parse_csv(path)
        except (DataError, OSError) as exc:
            warnings.append(f"{path.name}: unreadable ({exc})")
            continue
        if len(ext_log.traces) != expected_size:
            warnings.append(
                f"{path.name}: {len(ext_log.traces)} traces, expected {expected_size}; excluded"
            )
            continue
        usable.append(ext_log)
    return usable, warnings


def run_experiment(config: ExperimentConfig) -> ExperimentOutput:
    """Execute the full pipeline and assemble the report dictionary."""
    full = parse_csv(config.log_path)
    train, test = temporal_split(full, config.split_ratio)
    stats = compute_statistics(full)
    master = Rng(config.seed)

    report: dict = {
        "config": config.to_dict(),
        "provenance": {
            "seed": config.seed,
            "config_hash": config.hash(),
            "version": __version__,
        },
        "log_statistics": stats.to_dict(),
        "split": {"train_traces": len(train.traces), "test_traces": len(test.traces)},
        "generators": {},
    }

    optimization: OptimizationResult | None = None
    if "dds" in config.generators:
        space = SearchSpace.from_dict(config.search_space) if config.search_space else None
        optimization = optimize_dds(
            train,
            space,
            trials=config.trials,
            runs_per_trial=config.runs_per_trial,
            seed=master.spawn(_OPT_STREAM).seed,
        )
        generated = [
            simulate(
                optimization.best,
                SimConfig(
                    num_cases=len(test.traces),
                    seed=master.spawn(_GEN_STREAM_BASE + i).seed,
                    start_instant_ms=test.traces[0].start_ms,
                ),
            )
            for i in range(config.generated_logs)
        ]
        per_log = _score_logs(generated, test, config)
        report["generators"]["dds"] = {
            "per_log": per_log,
            "mean": _mean_of(per_log),
            "best_trial": optimization.best_trial.summary(),
            "failed_trials": len(optimization.failures),
        }

    if "external" in config.generators:
        usable, warnings = _external_logs(config, len(test.traces))
        entry: dict = {"warnings": warnings}
        if usable:
            per_log = _score_logs(usable, test, config)
            entry.update({"per_log": per_log, "mean": _mean_of(per_log)})
        else:
            entry["error"] = "no usable external logs"
        report["generators"]["external"] = entry

    return ExperimentOutput(report, optimization)


def render_report(report: dict) -> str:
    """Fixed-width table, one row per generator, best ELS row marked."""
    headers = ("Generator", "ELS", "CFLS", "MAE", "EMD")
    rows = []
    best_els = None
    for name, entry in report["generators"].items():
        if "mean" not in entry:
            rows.append((name, "-", "-", "-", "-"))
            continue
        m = entry["mean"]
        rows.append(
            (name, f"{m['els']:.2f}", f"{m['cfls']:.2f}",
             f"{m['cycle_time_mae_s']:.2f}", f"{m['emd']:.2f}")
        )
        if best_els is None or m["els"] > best_els[1]:
            best_els = (name, m["els"])
    widths = [max(len(h), max((len(r[i]) for r in rows), default=0)) + 2 for i, h in enumerate(headers)]
    lines = ["".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("-" * (sum(widths)))
    for r in rows:
        mark = " *" if best_els is not None and r[0] == best_els[0] else ""
        lines.append("".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + mark)
    return "\n".join(lines) + "\n"


def report_csv(report: dict) -> str:
    """Per-log metric rows plus a mean row per generator, comma-delimited."""
    lines = ["generator,log_index,els,cfls,cycle_time_mae_s,emd"]
    for name, entry in report["generators"].items():
        for i, row in enumerate(entry.get("per_log", [])):
            lines.append(
                f"{name},{i},{row['els']!r},{row['cfls']!r},"
                f"{row['cycle_time_mae_s']!r},{row['emd']!r}"
            )
        if "mean" in entry:
            m = entry["mean"]
            lines.append(
                f"{name},mean,{m['els']!r},{m['cfls']!r},"
                f"{m['cycle_time_mae_s']!r},{m['emd']!r}"
            )
    return "\n".join(lines) + "\n"


def write_report_files(output: ExperimentOutput, out_dir, figures: bool = True) -> dict:
    """Materialize report.json, report.txt, report.csv, and figures."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    report = output.report
    (out_dir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    paths["json"] = out_dir / "report.json"
    (out_dir / "report.txt").write_text(render_report(report), encoding="utf-8")
    paths["txt"] = out_dir / "report.txt"
    (out_dir / "report.csv").write_text(report_csv(report), encoding="utf-8")
    paths["csv"] = out_dir / "report.csv"
    if output.optimization is not None:
        history = {
            "trials": [t.summary() for t in output.optimization.history],
            "failures": [f.summary() for f in output.optimization.failures],
            "best_trial": output.optimization.best_trial.trial,
        }
        (out_dir / "history.json").write_text(
            json.dumps(history, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        paths["history"] = out_dir / "history.json"
        (out_dir / "model.json").write_text(
            output.optimization.best.to_json() + "\n", encoding="utf-8"
        )
        paths["model"] = out_dir / "model.json"
    if figures:
        from .plotting import render_metric_figures

        for fig_path in render_metric_figures(report, out_dir / "figures"):
            paths.setdefault("figures", []).append(fig_path)
    return paths
