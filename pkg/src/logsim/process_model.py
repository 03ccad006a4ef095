"""Control-flow model: discovery from a log, token replay, conformance.

The model is a BPMN subset: one start, one end, task nodes, and exclusive
(xor) / parallel (and) split and join gateways. Discovery builds a
directly-follows graph, filters arcs by an eta-quantile frequency
threshold (re-adding arcs as needed to keep every node on a start-to-end
path), detects concurrent activity pairs gated by epsilon, removes the
direct arcs between concurrent pairs, and infers gateways locally from
the fan-in/fan-out of the surviving graph.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import (
    EmptyModelError,
    InvalidArgumentError,
    NonConformantLogError,
)
from .eventlog import Event, EventLog, Trace, build_log

START = "start"
END = "end"

TASK = "task"
XOR_SPLIT = "xor_split"
XOR_JOIN = "xor_join"
AND_SPLIT = "and_split"
AND_JOIN = "and_join"


@dataclass(frozen=True, slots=True)
class Node:
    id: str
    kind: str
    label: Optional[str] = None  # task nodes only


@dataclass(frozen=True)
class ProcessModel:
    """Validated gateway graph with token-game semantics."""

    nodes: tuple[Node, ...]
    edges: tuple[tuple[str, str], ...]
    max_replay_length: Optional[int] = None

    def __post_init__(self):
        by_id = {n.id: n for n in self.nodes}
        if len(by_id) != len(self.nodes):
            raise InvalidArgumentError("duplicate node ids")
        if len(set(self.edges)) != len(self.edges):
            raise InvalidArgumentError("duplicate edges")
        outgoing: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        incoming: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for src, dst in self.edges:
            if src not in by_id or dst not in by_id:
                raise InvalidArgumentError(f"edge ({src}, {dst}) references unknown node")
            outgoing[src].append(dst)
            incoming[dst].append(src)
        starts = [n for n in self.nodes if n.kind == START]
        ends = [n for n in self.nodes if n.kind == END]
        if len(starts) != 1 or len(ends) != 1:
            raise InvalidArgumentError("model needs exactly one start and one end")
        if incoming[starts[0].id] or outgoing[ends[0].id]:
            raise InvalidArgumentError("start must have no incoming, end no outgoing edges")
        for n in self.nodes:
            ins, outs = len(incoming[n.id]), len(outgoing[n.id])
            if n.kind == TASK and (ins != 1 or outs != 1):
                raise InvalidArgumentError(f"task {n.id} must have exactly one in and out edge")
            if n.kind in (XOR_SPLIT, AND_SPLIT) and (ins != 1 or outs < 2):
                raise InvalidArgumentError(f"split {n.id} must have one in and >= 2 out edges")
            if n.kind in (XOR_JOIN, AND_JOIN) and (outs != 1 or ins < 2):
                raise InvalidArgumentError(f"join {n.id} must have one out and >= 2 in edges")
        reach = _closure(starts[0].id, outgoing)
        coreach = _closure(ends[0].id, incoming)
        off_path = sorted(set(by_id) - (reach & coreach))
        if off_path:
            raise InvalidArgumentError(f"nodes not on a start-end path: {off_path}")
        object.__setattr__(self, "_outgoing", {k: tuple(v) for k, v in outgoing.items()})
        object.__setattr__(self, "_incoming", {k: tuple(v) for k, v in incoming.items()})
        object.__setattr__(self, "_by_id", by_id)

    # --- structure accessors -------------------------------------------------

    @property
    def start_id(self) -> str:
        return next(n.id for n in self.nodes if n.kind == START)

    @property
    def end_id(self) -> str:
        return next(n.id for n in self.nodes if n.kind == END)

    def node(self, node_id: str) -> Node:
        return self._by_id[node_id]

    def successors(self, node_id: str) -> tuple[str, ...]:
        return self._outgoing[node_id]

    def predecessors(self, node_id: str) -> tuple[str, ...]:
        return self._incoming[node_id]

    @property
    def task_labels(self) -> tuple[str, ...]:
        return tuple(sorted(n.label for n in self.nodes if n.kind == TASK))

    def task_id(self, label: str) -> str:
        return f"t:{label}"

    def xor_split_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if n.kind == XOR_SPLIT)

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {"id": n.id, "kind": n.kind, **({"label": n.label} if n.label else {})}
                for n in self.nodes
            ],
            "edges": [list(e) for e in self.edges],
            "max_replay_length": self.max_replay_length,
        }

    @staticmethod
    def from_dict(d: dict) -> "ProcessModel":
        nodes = tuple(Node(n["id"], n["kind"], n.get("label")) for n in d["nodes"])
        edges = tuple((src, dst) for src, dst in d["edges"])
        return ProcessModel(nodes, edges, d.get("max_replay_length"))


def _closure(root: str, adjacency: dict[str, list[str]]) -> set[str]:
    seen = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for node in frontier:
            for other in adjacency[node]:
                if other not in seen:
                    seen.add(other)
                    nxt.append(other)
        frontier = nxt
    return seen


# --- directly-follows graph ---------------------------------------------------


@dataclass(frozen=True, slots=True)
class DirectlyFollowsGraph:
    """Arc counts between activities plus the start/end pseudo-nodes."""

    arc_counts: dict[tuple[str, str], int]

    @staticmethod
    def from_log(log: EventLog) -> "DirectlyFollowsGraph":
        counts: Counter = Counter()
        for trace in log.traces:
            acts = trace.activities
            counts[(START, acts[0])] += 1
            for i in range(len(acts) - 1):
                counts[(acts[i], acts[i + 1])] += 1
            counts[(acts[-1], END)] += 1
        return DirectlyFollowsGraph(dict(counts))


@dataclass(frozen=True, slots=True)
class BranchingProbabilities:
    """Per xor-split probabilities over outgoing edges, keyed by target node."""

    probabilities: dict[str, dict[str, float]]
    fallback_splits: frozenset[str] = frozenset()

    def __post_init__(self):
        for split, branches in self.probabilities.items():
            total = sum(branches.values())
            if any(p < 0 for p in branches.values()) or abs(total - 1.0) > 1e-9:
                raise InvalidArgumentError(
                    f"probabilities of split {split} must be >= 0 and sum to 1 (got {total})"
                )

    def to_dict(self) -> dict:
        return {
            "probabilities": {s: dict(b) for s, b in self.probabilities.items()},
            "fallback_splits": sorted(self.fallback_splits),
        }

    @staticmethod
    def from_dict(d: dict) -> "BranchingProbabilities":
        return BranchingProbabilities(
            {s: dict(b) for s, b in d["probabilities"].items()},
            frozenset(d.get("fallback_splits", ())),
        )


# --- discovery -----------------------------------------------------------------


def discover_model(log: EventLog, eta: float = 0.0, epsilon: float = 0.0) -> ProcessModel:
    """Discover a gateway model from a log.

    eta in [0,1] filters low-frequency arcs (quantile threshold over arc
    counts); epsilon in [0,1] tightens the concurrency criterion: a pair
    observed in both orders counts as concurrent only while
    |c(ab)-c(ba)| / (c(ab)+c(ba)) < 1 - epsilon.
    """
    if not (0.0 <= eta <= 1.0) or not (0.0 <= epsilon <= 1.0):
        raise InvalidArgumentError("eta and epsilon must lie in [0, 1]")
    if not log.activity_alphabet:
        raise EmptyModelError("log contains no activities")
    dfg = DirectlyFollowsGraph.from_log(log)
    arcs = dict(dfg.arc_counts)

    concurrent = _concurrent_pairs(arcs, epsilon, _short_loop_pairs(log))

    counts = sorted(arcs.values())
    threshold = counts[min(int(eta * len(counts)), len(counts) - 1)]
    kept = {a: c for a, c in arcs.items() if c >= threshold}
    for a, b in concurrent:
        kept.pop((a, b), None)
        kept.pop((b, a), None)

    kept, demoted = _repair_connectivity(kept, arcs, concurrent)
    max_len = max(len(t) for t in log.traces)
    return _build_from_dfg(kept, concurrent - demoted, max_replay_length=5 * max_len)


def _short_loop_pairs(log: EventLog) -> set[tuple[str, str]]:
    """Pairs seen as an x-y-x triple in some trace: loops, not concurrency."""
    pairs = set()
    for trace in log.traces:
        acts = trace.activities
        for i in range(len(acts) - 2):
            if acts[i] == acts[i + 2] and acts[i] != acts[i + 1]:
                pairs.add((min(acts[i], acts[i + 1]), max(acts[i], acts[i + 1])))
    return pairs


def _concurrent_pairs(
    arcs: dict[tuple[str, str], int],
    epsilon: float,
    loop_pairs: set[tuple[str, str]] = frozenset(),
) -> set[tuple[str, str]]:
    pairs = set()
    for (a, b), c_ab in arcs.items():
        if a in (START, END) or b in (START, END) or a >= b:
            continue
        if (a, b) in loop_pairs:
            continue
        c_ba = arcs.get((b, a), 0)
        if c_ba == 0:
            continue
        balance = abs(c_ab - c_ba) / (c_ab + c_ba)
        if balance < 1.0 - epsilon:
            pairs.add((a, b))
    return pairs


def _repair_connectivity(
    kept: dict[tuple[str, str], int],
    all_arcs: dict[tuple[str, str], int],
    concurrent: set[tuple[str, str]],
) -> tuple[dict[tuple[str, str], int], set[tuple[str, str]]]:
    """Re-add dropped arcs (highest count first) until every node is on a
    start-to-end path. Arcs inside a concurrent pair are a last resort:
    re-admitting one demotes the pair back to ordered flow."""
    nodes = {n for arc in all_arcs for n in arc}
    banned = {(a, b) for a, b in concurrent} | {(b, a) for a, b in concurrent}
    candidates = sorted(
        (arc for arc in all_arcs if arc not in kept and arc not in banned),
        key=lambda arc: (-all_arcs[arc], arc),
    )
    last_resort = sorted(
        (arc for arc in banned if arc in all_arcs), key=lambda arc: (-all_arcs[arc], arc)
    )
    demoted: set[tuple[str, str]] = set()

    def admit(arc) -> None:
        kept[arc] = all_arcs[arc]
        a, b = arc
        if (min(a, b), max(a, b)) in concurrent:
            demoted.add((min(a, b), max(a, b)))

    while True:
        fwd: dict[str, list[str]] = {n: [] for n in nodes}
        bwd: dict[str, list[str]] = {n: [] for n in nodes}
        for src, dst in kept:
            fwd[src].append(dst)
            bwd[dst].append(src)
        reach = _closure(START, fwd)
        coreach = _closure(END, bwd)
        bad = nodes - (reach & coreach)
        if not bad:
            return kept, demoted
        progressed = False
        for tier in (candidates, last_resort):
            for arc in tier:
                if arc in kept:
                    continue
                src, dst = arc
                helps = (src in reach and dst not in reach) or (
                    dst in coreach and src not in coreach
                )
                if helps:
                    admit(arc)
                    progressed = True
                    break
            if progressed:
                break
        if not progressed:
            # disconnected island: pull in its best arc and iterate
            for tier in (candidates, last_resort):
                for arc in tier:
                    if arc not in kept and (arc[0] in bad or arc[1] in bad):
                        admit(arc)
                        progressed = True
                        break
                if progressed:
                    break
        if not progressed:
            raise EmptyModelError("cannot restore a connected model from the filtered graph")


def _build_from_dfg(
    kept: dict[tuple[str, str], int],
    concurrent: set[tuple[str, str]],
    max_replay_length: Optional[int],
) -> ProcessModel:
    succ: dict[str, list[str]] = {}
    pred: dict[str, list[str]] = {}
    for src, dst in sorted(kept):
        succ.setdefault(src, []).append(dst)
        pred.setdefault(dst, []).append(src)
    activities = sorted({n for arc in kept for n in arc} - {START, END})
    if not activities:
        raise EmptyModelError("filtering removed every activity")

    conc = concurrent | {(b, a) for a, b in concurrent}

    def all_concurrent(group: list[str]) -> bool:
        group = [g for g in group if g not in (START, END)]
        if len(group) < 2:
            return False
        return all(
            (x, y) in conc for i, x in enumerate(group) for y in group[i + 1 :]
        )

    nodes: list[Node] = [Node(START, START), Node(END, END)]
    nodes.extend(Node(f"t:{a}", TASK, a) for a in activities)
    edges: list[tuple[str, str]] = []

    def node_id(dfg_node: str) -> str:
        return dfg_node if dfg_node in (START, END) else f"t:{dfg_node}"

    exit_point: dict[str, str] = {}
    for u, outs in succ.items():
        uid = node_id(u)
        if len(outs) <= 1:
            exit_point[u] = uid
        else:
            kind = AND_SPLIT if all_concurrent(outs) else XOR_SPLIT
            gid = f"{'ps' if kind == AND_SPLIT else 'xs'}:{u}"
            nodes.append(Node(gid, kind))
            edges.append((uid, gid))
            exit_point[u] = gid
    entry_point: dict[str, str] = {}
    for v, ins in pred.items():
        vid = node_id(v)
        if len(ins) <= 1:
            entry_point[v] = vid
        else:
            kind = AND_JOIN if all_concurrent(ins) else XOR_JOIN
            gid = f"{'pj' if kind == AND_JOIN else 'xj'}:{v}"
            nodes.append(Node(gid, kind))
            edges.append((gid, vid))
            entry_point[v] = gid
    for src, dst in sorted(kept):
        edges.append((exit_point[src], entry_point[dst]))
    return ProcessModel(tuple(nodes), tuple(edges), max_replay_length)


def sequential_model(labels: Iterable[str], max_replay_length: Optional[int] = None) -> ProcessModel:
    """start -> t1 -> ... -> tn -> end convenience constructor."""
    labels = list(labels)
    nodes = [Node(START, START), Node(END, END)]
    nodes.extend(Node(f"t:{a}", TASK, a) for a in labels)
    chain = [START] + [f"t:{a}" for a in labels] + [END]
    edges = tuple(zip(chain, chain[1:]))
    return ProcessModel(tuple(nodes), edges, max_replay_length)


# --- token replay ----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ReplayResult:
    fits: bool
    traversed_edges: Counter


def replay_trace(model: ProcessModel, trace: Trace | Iterable[str]) -> ReplayResult:
    """Token-game replay of an activity sequence on the model.

    start emits one token; tasks fire in trace order consuming a token on
    their input edge (xor gateways route tokens on demand; and gateways
    fire eagerly); the trace fits iff every activity fires and exactly one
    token ends on the end node's input edge with none stranded.
    """
    acts = trace.activities if isinstance(trace, Trace) else tuple(trace)
    game = _TokenGame(model)
    for label in acts:
        if not game.fire_task(label):
            return ReplayResult(False, game.traversed)
    ok = game.finish()
    return ReplayResult(ok, game.traversed)


class _TokenGame:
    """Marking over edges with deterministic gateway semantics."""

    def __init__(self, model: ProcessModel):
        self.model = model
        self.marking: Counter = Counter()
        self.traversed: Counter = Counter()
        out = model.successors(model.start_id)
        self._move(None, (model.start_id, out[0]))
        self.propagate()

    def _move(self, consumed, produced):
        if consumed is not None:
            self.marking[consumed] -= 1
            if self.marking[consumed] <= 0:
                del self.marking[consumed]
        if produced is not None:
            self.marking[produced] += 1
            self.traversed[produced] += 1

    def propagate(self):
        """Fire and-splits, and-joins, and xor-joins until quiescent."""
        model = self.model
        changed = True
        while changed:
            changed = False
            for edge in sorted(self.marking):
                _, node_id = edge
                kind = model.node(node_id).kind if node_id in model._by_id else None
                if kind == AND_SPLIT:
                    self._move(edge, None)
                    for dst in model.successors(node_id):
                        self._move(None, (node_id, dst))
                    changed = True
                    break
                if kind == XOR_JOIN:
                    self._move(edge, (node_id, model.successors(node_id)[0]))
                    changed = True
                    break
                if kind == AND_JOIN:
                    ins = [(src, node_id) for src in model.predecessors(node_id)]
                    if all(self.marking.get(e, 0) > 0 for e in ins):
                        for e in ins:
                            self._move(e, None)
                        self._move(None, (node_id, model.successors(node_id)[0]))
                        changed = True
                        break

    def _route_to(self, target_edge) -> bool:
        """Pull one token to target_edge across xor gateways (shortest pull)."""
        if self.marking.get(target_edge, 0) > 0:
            return True
        model = self.model
        # backward BFS: an edge (u, v) can receive a token from in-edges of u
        # when u is an xor gateway
        parents: dict[tuple, tuple] = {}
        queue = deque([target_edge])
        found = None
        seen = {target_edge}
        while queue and found is None:
            edge = queue.popleft()
            src = edge[0]
            if src not in model._by_id:
                continue
            kind = model.node(src).kind
            if kind not in (XOR_SPLIT, XOR_JOIN):
                continue
            for prev_src in sorted(model.predecessors(src)):
                prev_edge = (prev_src, src)
                if prev_edge in seen:
                    continue
                seen.add(prev_edge)
                parents[prev_edge] = edge
                if self.marking.get(prev_edge, 0) > 0:
                    found = prev_edge
                    break
                queue.append(prev_edge)
        if found is None:
            return False
        # replay the pull forward
        edge = found
        while edge != target_edge:
            nxt = parents[edge]
            self._move(edge, nxt)
            edge = nxt
        return True

    def fire_task(self, label: str) -> bool:
        model = self.model
        tid = model.task_id(label)
        if tid not in model._by_id or model.node(tid).kind != TASK:
            return False
        in_edge = (model.predecessors(tid)[0], tid)
        if not self._route_to(in_edge):
            return False
        out_edge = (tid, model.successors(tid)[0])
        self._move(in_edge, out_edge)
        self.propagate()
        return True

    def finish(self) -> bool:
        model = self.model
        end_in = (model.predecessors(model.end_id)[0], model.end_id)
        self._route_to(end_in)
        self.propagate()
        self._route_to(end_in)
        return dict(self.marking) == {end_in: 1}


# --- conformance ----------------------------------------------------------------


def enforce_conformance(model: ProcessModel, log: EventLog, mode: str = "remove") -> EventLog:
    """Drop or rewrite non-fitting traces so the whole log replays.

    remove: keep only fitting traces. replace: substitute each non-fitting
    trace's activity sequence with the closest fitting sequence from the
    same log (concurrency-aware edit distance), transplanting the original
    timestamps positionally.
    """
    if mode not in ("remove", "replace"):
        raise InvalidArgumentError(f"unknown conformance mode {mode!r}")
    fits = {t.case_id: replay_trace(model, t).fits for t in log.traces}
    fitting = [t for t in log.traces if fits[t.case_id]]
    if not fitting:
        raise NonConformantLogError("no trace of the log fits the model")
    if mode == "remove":
        return build_log(fitting)

    from .eventlog import discover_concurrency
    from .metrics import cf_distance  # local import: metrics depends on eventlog only

    conc = discover_concurrency(log)
    donor_seqs: list[tuple[str, ...]] = []
    seen = set()
    for t in fitting:
        if t.activities not in seen:
            seen.add(t.activities)
            donor_seqs.append(t.activities)
    cache: dict[tuple[str, ...], tuple[str, ...]] = {}

    def closest(seq: tuple[str, ...]) -> tuple[str, ...]:
        if seq not in cache:
            best, best_d = donor_seqs[0], cf_distance(seq, donor_seqs[0], conc)
            for d in donor_seqs[1:]:
                dist = cf_distance(seq, d, conc)
                if dist < best_d:
                    best, best_d = d, dist
            cache[seq] = best
        return cache[seq]

    out = []
    for t in log.traces:
        if fits[t.case_id]:
            out.append(t)
        else:
            out.append(_transplant(t, closest(t.activities)))
    return build_log(out)


def _transplant(trace: Trace, donor: tuple[str, ...]) -> Trace:
    """Rebuild a trace with the donor's activities over the original times.

    Positions beyond the original length become zero-duration events placed
    1 ms after the previous event's end so the ordering invariant keeps the
    donor sequence intact.
    """
    events = []
    prev_end = trace.events[-1].end_ms
    for i, label in enumerate(donor):
        if i < len(trace.events):
            src = trace.events[i]
            events.append(Event(trace.case_id, label, src.resource, src.start_ms, src.end_ms))
            prev_end = src.end_ms
        else:
            at = prev_end + 1
            events.append(Event(trace.case_id, label, None, at, at))
            prev_end = at
    return Trace(trace.case_id, tuple(events))


# --- branching probabilities -------------------------------------------------------


def compute_branching_probabilities(
    model: ProcessModel, log: EventLog, mode: str = "replay"
) -> BranchingProbabilities:
    """Per-xor-split branch probabilities, equiprobable or replay-derived.

    Requires a fully conformant log. Splits never reached during replay
    fall back to equal probabilities and are flagged.
    """
    if mode not in ("equiprobable", "replay"):
        raise InvalidArgumentError(f"unknown branching mode {mode!r}")
    splits = model.xor_split_ids()
    if mode == "equiprobable":
        probs = {
            s: {dst: 1.0 / len(model.successors(s)) for dst in model.successors(s)}
            for s in splits
        }
        return BranchingProbabilities(probs)
    traversals: Counter = Counter()
    for trace in log.traces:
        result = replay_trace(model, trace)
        if not result.fits:
            raise NonConformantLogError(
                f"trace {trace.case_id!r} does not fit; enforce conformance first"
            )
        traversals.update(result.traversed_edges)
    probs = {}
    fallbacks = set()
    for s in splits:
        outs = model.successors(s)
        total = sum(traversals.get((s, dst), 0) for dst in outs)
        if total == 0:
            probs[s] = {dst: 1.0 / len(outs) for dst in outs}
            fallbacks.add(s)
        else:
            probs[s] = {dst: traversals.get((s, dst), 0) / total for dst in outs}
    return BranchingProbabilities(probs, frozenset(fallbacks))
