"""Discrete-event execution of a BpsModel with eager resource semantics.

Cases arrive at cumulative inter-arrival gaps from the configured start
instant (the first case arrives exactly at it). Tokens flow through the
process model; an enabled task joins a FIFO queue on its pool, and starts
the moment a pool resource is free (ties resolved to the lexicographically
smallest resource name). Waiting is caused solely by resource contention.

Event processing is fully deterministic: the queue orders pending entries
by (time, kind, case, node) with completions before arrivals at equal
times, dispatch happens after draining each instant, and every stochastic
draw comes from a per-case (or arrivals) substream of the portable counter
RNG, so the same model and config reproduce the same log bit for bit.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

from .bps_model import BpsModel
from .distributions import sample
from .errors import InvalidArgumentError, SimulationError
from .eventlog import EventLog, log_from_rows
from .process_model import AND_JOIN, AND_SPLIT, END, TASK, XOR_JOIN, XOR_SPLIT
from .rng import Rng

log = logging.getLogger(__name__)

_KIND_END = 0
_KIND_ARRIVAL = 1

_ARRIVAL_STREAM = 0
_CASE_STREAM_BASE = 1000


@dataclass(frozen=True, slots=True)
class SimConfig:
    num_cases: int
    seed: int
    start_instant_ms: int = 0

    def __post_init__(self):
        if self.num_cases < 1:
            raise InvalidArgumentError("num_cases must be >= 1")


@dataclass(frozen=True, slots=True)
class AuditRecord:
    """Lifecycle of one activity instance, for eagerness checks."""

    case_id: str
    activity: str
    node_id: str
    pool_id: str
    resource: str
    enabled_ms: int
    start_ms: int
    end_ms: int

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "activity": self.activity,
            "node_id": self.node_id,
            "pool_id": self.pool_id,
            "resource": self.resource,
            "enabled_ms": self.enabled_ms,
            "start_ms": self.start_ms,
            "end_ms": self.end_ms,
        }


@dataclass(frozen=True, slots=True)
class SimulationRun:
    log: EventLog
    aborted_case_ids: tuple[str, ...]
    audit: tuple[AuditRecord, ...]


class _Case:
    __slots__ = ("index", "case_id", "rng", "join_tokens", "tasks_enqueued", "rows",
                 "audit", "completed", "aborted")

    def __init__(self, index: int, case_id: str, rng: Rng):
        self.index = index
        self.case_id = case_id
        self.rng = rng
        self.join_tokens: dict[str, dict[str, int]] = {}
        self.tasks_enqueued = 0
        self.rows: list = []
        self.audit: list[AuditRecord] = []
        self.completed = False
        self.aborted = False


def simulate(model: BpsModel, config: SimConfig) -> EventLog:
    """Generate a synthetic log; see simulate_detailed for the audit trail."""
    return simulate_detailed(model, config).log


def simulate_detailed(model: BpsModel, config: SimConfig) -> SimulationRun:
    """Run the engine and return the log plus abort list and audit trail.

    Cases that exceed the model's replay-length cap (runaway loops) or
    stall before reaching the end node are excluded; more than 10% of them
    is a SimulationError.
    """
    engine = _Engine(model, config)
    engine.run()
    cases = engine.cases
    aborted = tuple(c.case_id for c in cases if c.aborted or not c.completed)
    if len(aborted) > 0.10 * config.num_cases:
        raise SimulationError(
            f"{len(aborted)} of {config.num_cases} cases aborted or stalled"
        )
    if aborted:
        log.warning("excluded %d aborted/stalled case(s): %s", len(aborted), aborted[:10])
    rows = []
    audit = []
    for c in cases:
        if c.completed and not c.aborted:
            rows.extend(c.rows)
            audit.extend(c.audit)
    return SimulationRun(log_from_rows(rows), aborted, tuple(audit))


class _Engine:
    def __init__(self, model: BpsModel, config: SimConfig):
        self.model = model
        self.pm = model.process_model
        self.config = config
        self.cases: list[_Case] = []
        self.heap: list = []
        self.seq = 0
        root = Rng(config.seed)
        self.arrival_rng = root.spawn(_ARRIVAL_STREAM)
        self.case_root = root
        # pool state
        self.free: dict[str, list[str]] = {
            p.id: sorted(p.resource_names) for p in model.pools
        }
        self.queues: dict[str, list] = {p.id: [] for p in model.pools}
        self.queue_heads: dict[str, int] = {p.id: 0 for p in model.pools}
        width = max(6, len(str(config.num_cases)))
        self.case_fmt = f"C{{:0{width}d}}"
        cap = self.pm.max_replay_length
        self.cap = cap if cap is not None else max(50, 10 * len(self.pm.task_labels))

    def push(self, time_ms: int, kind: int, case_index: int, node_id: str, payload):
        # tie order at equal times: completions, then arrivals, then case, node
        self.seq += 1
        heapq.heappush(self.heap, (time_ms, kind, case_index, node_id, self.seq, payload))

    def run(self):
        t = self.config.start_instant_ms
        for i in range(self.config.num_cases):
            if i > 0:
                t += round(sample(self.model.interarrival, self.arrival_rng) * 1000.0)
            self.push(t, _KIND_ARRIVAL, i, self.pm.start_id, i)
        while self.heap:
            now = self.heap[0][0]
            while self.heap and self.heap[0][0] == now:
                _, kind, _, _, _, payload = heapq.heappop(self.heap)
                if kind == _KIND_ARRIVAL:
                    self.handle_arrival(payload, now)
                else:
                    self.handle_end(payload, now)
            self.dispatch(now)

    # --- event handlers -----------------------------------------------------

    def handle_arrival(self, index: int, now: int):
        case = _Case(
            index, self.case_fmt.format(index), self.case_root.spawn(_CASE_STREAM_BASE + index)
        )
        self.cases.append(case)
        start = self.pm.start_id
        self.propagate(case, (start, self.pm.successors(start)[0]), now)

    def handle_end(self, payload, now: int):
        case, node_id, pool_id, resource, enabled_ms, start_ms = payload
        # free the resource first so same-instant dispatch can reuse it
        free = self.free[pool_id]
        free.insert(self._bisect(free, resource), resource)
        if case.aborted:
            return
        node = self.pm.node(node_id)
        case.rows.append((case.case_id, node.label, resource, start_ms, now))
        case.audit.append(
            AuditRecord(case.case_id, node.label, node_id, pool_id, resource,
                        enabled_ms, start_ms, now)
        )
        self.propagate(case, (node_id, self.pm.successors(node_id)[0]), now)

    @staticmethod
    def _bisect(names: list[str], name: str) -> int:
        lo, hi = 0, len(names)
        while lo < hi:
            mid = (lo + hi) // 2
            if names[mid] < name:
                lo = mid + 1
            else:
                hi = mid
        return lo

    # --- token propagation ----------------------------------------------------

    def propagate(self, case: _Case, edge: tuple[str, str], now: int):
        """Advance one token along an edge, firing gateways transparently."""
        stack = [edge]
        while stack:
            src, dst = stack.pop()
            if case.aborted:
                return
            kind = self.pm.node(dst).kind
            if kind == TASK:
                self.enqueue_task(case, dst, now)
            elif kind == XOR_SPLIT:
                branches = self.model.branching.probabilities.get(dst)
                targets = sorted(self.pm.successors(dst))
                if branches:
                    weights = [branches.get(x, 0.0) for x in targets]
                else:
                    weights = [1.0] * len(targets)
                choice = targets[case.rng.choice_index(weights)]
                stack.append((dst, choice))
            elif kind == AND_SPLIT:
                for nxt in sorted(self.pm.successors(dst), reverse=True):
                    stack.append((dst, nxt))
            elif kind == XOR_JOIN:
                stack.append((dst, self.pm.successors(dst)[0]))
            elif kind == AND_JOIN:
                counts = case.join_tokens.setdefault(dst, {})
                counts[src] = counts.get(src, 0) + 1
                needed = self.pm.predecessors(dst)
                if all(counts.get(p, 0) > 0 for p in needed):
                    for p in needed:
                        counts[p] -= 1
                    stack.append((dst, self.pm.successors(dst)[0]))
            elif kind == END:
                case.completed = True

    def enqueue_task(self, case: _Case, node_id: str, now: int):
        case.tasks_enqueued += 1
        if case.tasks_enqueued > self.cap:
            case.aborted = True
            return
        label = self.pm.node(node_id).label
        pool_id = self.model.activity_pool[label]
        duration_ms = round(sample(self.model.activity_durations[label], case.rng) * 1000.0)
        self.queues[pool_id].append((case, node_id, now, duration_ms, case.index))

    def dispatch(self, now: int):
        """Start queued tasks on free resources; FIFO per pool, eager."""
        for pool_id in sorted(self.queues):
            queue = self.queues[pool_id]
            head = self.queue_heads[pool_id]
            free = self.free[pool_id]
            while head < len(queue) and free:
                case, node_id, enabled_ms, duration_ms, case_index = queue[head]
                head += 1
                if case.aborted:
                    continue
                resource = free.pop(0)
                self.push(
                    now + duration_ms,
                    _KIND_END,
                    case_index,
                    node_id,
                    (case, node_id, pool_id, resource, enabled_ms, now),
                )
            if head > 4096 and head * 2 > len(queue):
                del queue[:head]
                head = 0
            self.queue_heads[pool_id] = head
