"""Seeded random search over the discovery pipeline's hyperparameters.

Each trial samples a configuration, builds a candidate scenario on the
first 80% of the training log (temporal split), simulates several logs
sized like the remaining 20%, and scores them by event-log similarity
against that validation fold. The trial with the highest mean similarity
wins; ties go to the earliest trial.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .bps_model import (
    BpsModel,
    assemble_bps_model,
    discover_resource_pools,
    extract_activity_durations,
    extract_interarrival,
)
from .errors import InvalidArgumentError, LogsimError, OptimizationError
from .eventlog import EventLog, discover_concurrency, temporal_split
from .metrics import TimeScale, els
from .process_model import (
    compute_branching_probabilities,
    discover_model,
    enforce_conformance,
)
from .rng import Rng
from .simulator import SimConfig, simulate

log = logging.getLogger(__name__)

_CONFIG_STREAM = 1
_RUN_STREAM_BASE = 10_000


@dataclass(frozen=True)
class SearchSpace:
    """Named continuous intervals and categorical choices."""

    continuous: dict[str, tuple[float, float]] = field(default_factory=dict)
    categorical: dict[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        if not self.continuous and not self.categorical:
            raise InvalidArgumentError("search space must not be empty")
        for name, (lo, hi) in self.continuous.items():
            if lo > hi:
                raise InvalidArgumentError(f"dimension {name!r} has lo > hi")
        for name, values in self.categorical.items():
            if not values:
                raise InvalidArgumentError(f"dimension {name!r} has no values")

    @staticmethod
    def default() -> "SearchSpace":
        return SearchSpace(
            continuous={
                "eta": (0.0, 1.0),
                "epsilon": (0.0, 1.0),
                "pool_threshold": (0.5, 0.95),
            },
            categorical={
                "branching": ("equiprobable", "replay"),
                "conformance": ("remove", "replace"),
            },
        )

    @staticmethod
    def from_dict(d: dict) -> "SearchSpace":
        return SearchSpace(
            continuous={k: (float(lo), float(hi)) for k, (lo, hi) in d.get("continuous", {}).items()},
            categorical={k: tuple(v) for k, v in d.get("categorical", {}).items()},
        )

    def sample(self, rng: Rng) -> dict:
        """One random point; dimensions are drawn in sorted-name order."""
        point = {}
        for name in sorted(self.continuous):
            lo, hi = self.continuous[name]
            point[name] = lo + (hi - lo) * rng.uniform()
        for name in sorted(self.categorical):
            values = self.categorical[name]
            point[name] = values[int(rng.uniform() * len(values)) % len(values)]
        return point


@dataclass(frozen=True)
class TrialResult:
    trial: int
    config: dict
    per_run_els: tuple[float, ...]
    mean_els: float
    model: BpsModel

    def summary(self) -> dict:
        return {
            "trial": self.trial,
            "config": dict(self.config),
            "per_run_els": list(self.per_run_els),
            "mean_els": self.mean_els,
        }


@dataclass(frozen=True)
class TrialFailure:
    trial: int
    config: dict
    error: str

    def summary(self) -> dict:
        return {"trial": self.trial, "config": dict(self.config), "error": self.error}


@dataclass(frozen=True)
class OptimizationResult:
    best: BpsModel
    best_trial: TrialResult
    history: tuple[TrialResult, ...]
    failures: tuple[TrialFailure, ...]


def build_candidate(train: EventLog, config: dict) -> BpsModel:
    """Run the discovery pipeline with one hyperparameter configuration."""
    model = discover_model(train, eta=config["eta"], epsilon=config["epsilon"])
    conformant = enforce_conformance(model, train, config["conformance"])
    branching = compute_branching_probabilities(model, conformant, config["branching"])
    interarrival = extract_interarrival(conformant)
    durations = extract_activity_durations(conformant)
    pools, activity_pool = discover_resource_pools(conformant, config["pool_threshold"])
    return assemble_bps_model(model, branching, interarrival, durations, pools, activity_pool)


def optimize_dds(
    train: EventLog,
    space: SearchSpace | None = None,
    trials: int = 50,
    runs_per_trial: int = 5,
    seed: int = 0,
    inner_ratio: float = 0.8,
) -> OptimizationResult:
    """Random-search the pipeline and keep the best validation similarity.

    Individual trial failures are recorded and skipped; if every trial
    fails, an OptimizationError carries the diagnostics.
    """
    if trials < 1 or runs_per_trial < 1:
        raise InvalidArgumentError("trials and runs_per_trial must be >= 1")
    space = space or SearchSpace.default()
    fit_fold, val_fold = temporal_split(train, inner_ratio)
    conc = discover_concurrency(val_fold)
    root = Rng(seed)
    config_rng = root.spawn(_CONFIG_STREAM)

    history: list[TrialResult] = []
    failures: list[TrialFailure] = []
    best: TrialResult | None = None
    for trial in range(trials):
        config = space.sample(config_rng)
        try:
            candidate = build_candidate(fit_fold, config)
            scores = []
            for run in range(runs_per_trial):
                sim_seed = root.spawn(_RUN_STREAM_BASE + trial * 1000 + run).seed
                gen = simulate(
                    candidate,
                    SimConfig(
                        num_cases=len(val_fold.traces),
                        seed=sim_seed,
                        start_instant_ms=val_fold.traces[0].start_ms,
                    ),
                )
                scale = TimeScale.from_logs(gen, val_fold)
                scores.append(els(gen, val_fold, conc, scale))
            result = TrialResult(
                trial, config, tuple(scores), sum(scores) / len(scores), candidate
            )
            history.append(result)
            if best is None or result.mean_els > best.mean_els:
                best = result
            log.info("trial %d: mean ELS %.4f (%s)", trial, result.mean_els, config)
        except LogsimError as exc:
            failures.append(TrialFailure(trial, config, f"{type(exc).__name__}: {exc}"))
            log.warning("trial %d failed: %s", trial, exc)
    if best is None:
        raise OptimizationError(
            f"all {trials} trials failed", [f.summary() for f in failures]
        )
    return OptimizationResult(best.model, best, tuple(history), tuple(failures))
