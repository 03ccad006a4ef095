"""Simulation-scenario assembly: pools, fitted parameters, and the BpsModel.

A BpsModel bundles a process model with everything the simulator needs:
inter-arrival distribution, per-activity duration distributions, branching
probabilities, and resource pools with an activity-to-pool assignment.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

from .distributions import DistributionSpec, fit_distribution
from .errors import AssemblyError, InsufficientDataError
from .eventlog import EventLog
from .process_model import BranchingProbabilities, ProcessModel

log = logging.getLogger(__name__)

SYSTEM_POOL = "SYSTEM"


@dataclass(frozen=True, slots=True)
class ResourcePool:
    id: str
    resource_names: frozenset[str]

    @property
    def size(self) -> int:
        return len(self.resource_names)

    def to_dict(self) -> dict:
        return {"id": self.id, "resources": sorted(self.resource_names)}


@dataclass(frozen=True, slots=True)
class BpsModel:
    """Complete, simulatable scenario."""

    process_model: ProcessModel
    branching: BranchingProbabilities
    interarrival: DistributionSpec
    activity_durations: dict[str, DistributionSpec]
    pools: tuple[ResourcePool, ...]
    activity_pool: dict[str, str]

    def __post_init__(self):
        pool_ids = {p.id for p in self.pools}
        missing = []
        dangling = []
        for label in self.process_model.task_labels:
            if label not in self.activity_durations:
                missing.append(label)
            pool = self.activity_pool.get(label)
            if pool is None:
                missing.append(label)
            elif pool not in pool_ids:
                dangling.append(label)
        if missing or dangling:
            raise AssemblyError(
                f"tasks without duration or pool: {sorted(set(missing))}; "
                f"tasks referencing unknown pools: {sorted(dangling)}"
            )

    def pool(self, pool_id: str) -> ResourcePool:
        return next(p for p in self.pools if p.id == pool_id)

    def to_dict(self) -> dict:
        return {
            "process_model": self.process_model.to_dict(),
            "branching": self.branching.to_dict(),
            "interarrival": self.interarrival.to_dict(),
            "activity_durations": {a: s.to_dict() for a, s in sorted(self.activity_durations.items())},
            "pools": [p.to_dict() for p in self.pools],
            "activity_pool": dict(sorted(self.activity_pool.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @staticmethod
    def from_dict(d: dict) -> "BpsModel":
        return BpsModel(
            process_model=ProcessModel.from_dict(d["process_model"]),
            branching=BranchingProbabilities.from_dict(d["branching"]),
            interarrival=DistributionSpec.from_dict(d["interarrival"]),
            activity_durations={
                a: DistributionSpec.from_dict(s) for a, s in d["activity_durations"].items()
            },
            pools=tuple(
                ResourcePool(p["id"], frozenset(p["resources"])) for p in d["pools"]
            ),
            activity_pool=dict(d["activity_pool"]),
        )

    @staticmethod
    def from_json(text: str) -> "BpsModel":
        return BpsModel.from_dict(json.loads(text))


# --- parameter extraction ---------------------------------------------------------


def extract_interarrival(log_: EventLog) -> DistributionSpec:
    """Fit the gaps between successive case arrivals (first event starts)."""
    if len(log_.traces) < 2:
        raise InsufficientDataError("inter-arrival extraction needs at least 2 traces")
    arrivals = sorted(t.start_ms for t in log_.traces)
    gaps = [(b - a) / 1000.0 for a, b in zip(arrivals, arrivals[1:])]
    return fit_distribution(gaps)


def extract_activity_durations(log_: EventLog) -> dict[str, DistributionSpec]:
    """Fit each activity's processing-time samples."""
    samples: dict[str, list[float]] = {}
    for trace in log_.traces:
        for e in trace.events:
            samples.setdefault(e.activity, []).append(e.duration_s)
    return {a: fit_distribution(xs) for a, xs in sorted(samples.items())}


def _pearson(x: list[int], y: list[int]) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sx = math.sqrt(sum((v - mx) ** 2 for v in x))
    sy = math.sqrt(sum((v - my) ** 2 for v in y))
    if sx == 0.0 or sy == 0.0:
        return 1.0 if x == y else 0.0
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return cov / (sx * sy)


def discover_resource_pools(
    log_: EventLog, similarity_threshold: float = 0.7
) -> tuple[tuple[ResourcePool, ...], dict[str, str]]:
    """Cluster resources by correlated activity profiles into pools.

    Average-linkage agglomerative merging of resource rows of the
    resource-by-activity count matrix, while pairwise correlation stays at
    or above the threshold. Activities map to the pool that executed them
    most often; events without a resource fall to a synthetic SYSTEM pool.
    """
    activities = sorted(log_.activity_alphabet)
    act_index = {a: i for i, a in enumerate(activities)}
    profiles: dict[str, list[int]] = {}
    unassigned_events = False
    exec_counts: dict[tuple[str, str], int] = {}
    for trace in log_.traces:
        for e in trace.events:
            if e.resource:
                row = profiles.setdefault(e.resource, [0] * len(activities))
                row[act_index[e.activity]] += 1
                exec_counts[(e.resource, e.activity)] = (
                    exec_counts.get((e.resource, e.activity), 0) + 1
                )
            else:
                unassigned_events = True

    clusters: list[list[str]] = [[r] for r in sorted(profiles)]
    corr: dict[tuple[str, str], float] = {}
    names = sorted(profiles)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            corr[(a, b)] = _pearson(profiles[a], profiles[b])

    def cluster_corr(ca: list[str], cb: list[str]) -> float:
        vals = [corr[(x, y)] if (x, y) in corr else corr[(y, x)] for x in ca for y in cb]
        return sum(vals) / len(vals)

    while len(clusters) > 1:
        best = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                c = cluster_corr(clusters[i], clusters[j])
                key = (-c, clusters[i][0], clusters[j][0])
                if c >= similarity_threshold and (best is None or key < best[0]):
                    best = (key, i, j)
        if best is None:
            break
        _, i, j = best
        merged = sorted(clusters[i] + clusters[j])
        clusters = [c for k, c in enumerate(clusters) if k not in (i, j)] + [merged]
        clusters.sort(key=lambda c: c[0])

    clusters.sort(key=lambda c: c[0])
    pools = [
        ResourcePool(f"POOL_{i:02d}", frozenset(members))
        for i, members in enumerate(clusters)
    ]
    pool_of_resource = {r: p.id for p in pools for r in p.resource_names}

    activity_pool: dict[str, str] = {}
    need_system = unassigned_events
    for a in activities:
        totals: dict[str, int] = {}
        for (resource, act), count in exec_counts.items():
            if act == a:
                pid = pool_of_resource[resource]
                totals[pid] = totals.get(pid, 0) + count
        if totals:
            top = max(totals.values())
            activity_pool[a] = min(pid for pid, c in totals.items() if c == top)
        else:
            activity_pool[a] = SYSTEM_POOL
            need_system = True
    if need_system:
        pools.append(ResourcePool(SYSTEM_POOL, frozenset({SYSTEM_POOL})))
    return tuple(pools), activity_pool


def assemble_bps_model(
    model: ProcessModel,
    branching: BranchingProbabilities,
    interarrival: DistributionSpec,
    durations: dict[str, DistributionSpec],
    pools: tuple[ResourcePool, ...],
    activity_pool: dict[str, str],
) -> BpsModel:
    """Combine the pieces, filling documented fallbacks.

    Tasks without a fitted duration get fixed(0); tasks without a pool
    assignment get the SYSTEM pool (created if needed). Assignments that
    reference a pool id that does not exist are an assembly error.
    """
    durations = dict(durations)
    activity_pool = dict(activity_pool)
    pools = tuple(pools)
    pool_ids = {p.id for p in pools}
    dangling = sorted(
        a for a, pid in activity_pool.items() if pid not in pool_ids and pid != SYSTEM_POOL
    )
    if dangling:
        raise AssemblyError(f"activity_pool references unknown pools for: {dangling}")
    need_system = False
    for label in model.task_labels:
        if label not in durations:
            log.warning("task %r has no duration samples; using fixed(0)", label)
            durations[label] = DistributionSpec.fixed(0.0)
        if label not in activity_pool:
            log.warning("task %r has no pool assignment; using %s", label, SYSTEM_POOL)
            activity_pool[label] = SYSTEM_POOL
            need_system = True
    if (need_system or SYSTEM_POOL in activity_pool.values()) and SYSTEM_POOL not in pool_ids:
        pools = pools + (ResourcePool(SYSTEM_POOL, frozenset({SYSTEM_POOL})),)
    return BpsModel(model, branching, interarrival, durations, pools, activity_pool)
