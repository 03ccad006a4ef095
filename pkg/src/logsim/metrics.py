"""Similarity metrics between a generated log and a ground-truth log.

Four measures: control-flow log similarity (CFLS) from a concurrency-aware
Damerau-Levenshtein distance over activity sequences; event-log similarity
(ELS) from the same dynamic program with time penalties on label matches;
mean absolute error of paired cycle times; and the 1-D earth mover's
distance between histograms of per-activity mean durations. Trace pairing
is an optimal rectangular assignment.

Edit operations cost 1 (insert, delete, substitute); transposing an
adjacent pair costs 0 when the two activities are concurrent and 1
otherwise. Distances are normalized by the longer sequence length. The
timed variant adds, on every label match (including within transposed
pairs), 0.5*|dproc|/max_proc + 0.5*|dwait|/max_wait; waiting times below
zero (overlapping events) are clamped to 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InsufficientDataError, InvalidArgumentError
from .eventlog import ConcurrencyRelation, EventLog, Trace, discover_concurrency


@dataclass(frozen=True, slots=True)
class MetricReport:
    els: float
    cfls: float
    cycle_time_mae_s: float
    emd: float

    def __post_init__(self):
        if not (0.0 <= self.els <= 1.0 and 0.0 <= self.cfls <= 1.0):
            raise InvalidArgumentError("ELS and CFLS must lie in [0, 1]")
        if self.cycle_time_mae_s < 0 or self.emd < 0:
            raise InvalidArgumentError("MAE and EMD must be >= 0")

    def to_dict(self) -> dict:
        return {
            "els": self.els,
            "cfls": self.cfls,
            "cycle_time_mae_s": self.cycle_time_mae_s,
            "emd": self.emd,
        }


@dataclass(frozen=True, slots=True)
class Pairing:
    """Injective trace pairing (generated index, truth index) with its cost."""

    pairs: tuple[tuple[int, int], ...]
    total_cost: float
    excluded_generated: tuple[int, ...] = ()
    excluded_truth: tuple[int, ...] = ()


@dataclass(frozen=True, slots=True)
class TimeScale:
    """Largest processing and waiting times observed across both logs."""

    max_proc_s: float
    max_wait_s: float

    @staticmethod
    def from_logs(*logs: EventLog) -> "TimeScale":
        max_proc = 0.0
        max_wait = 0.0
        for log in logs:
            for trace in log.traces:
                prev_end = None
                for e in trace.events:
                    max_proc = max(max_proc, e.duration_s)
                    if prev_end is not None:
                        max_wait = max(max_wait, max(0.0, (e.start_ms - prev_end) / 1000.0))
                    prev_end = e.end_ms
        return TimeScale(max_proc, max_wait)


def _trace_times(trace: Trace) -> tuple[np.ndarray, np.ndarray]:
    """Per-event processing and (clamped) waiting times in seconds."""
    proc = np.array([e.duration_s for e in trace.events], dtype=np.float64)
    starts = np.array([e.start_ms for e in trace.events], dtype=np.float64)
    ends = np.array([e.end_ms for e in trace.events], dtype=np.float64)
    wait = np.zeros(len(trace.events), dtype=np.float64)
    if len(trace.events) > 1:
        wait[1:] = np.maximum(0.0, (starts[1:] - ends[:-1]) / 1000.0)
    return proc, wait


# --- pairwise dynamic program ---------------------------------------------------


def _edit_distance(
    a: tuple[str, ...],
    b: tuple[str, ...],
    conc: ConcurrencyRelation,
    a_proc=None,
    a_wait=None,
    b_proc=None,
    b_wait=None,
    max_proc: float = 0.0,
    max_wait: float = 0.0,
    w_proc: float = 0.5,
    w_wait: float = 0.5,
) -> float:
    """Normalized concurrency-aware Damerau-Levenshtein distance.

    With time arrays supplied, a label match costs the weighted normalized
    time difference instead of 0 (the BPTD variant).
    """
    n, m = len(a), len(b)
    if n == 0 and m == 0:
        return 0.0
    if n == 0 or m == 0:
        return 1.0
    timed = a_proc is not None

    def pen(i: int, j: int) -> float:
        if not timed:
            return 0.0
        cost = 0.0
        if max_proc > 0:
            cost += w_proc * abs(a_proc[i] - b_proc[j]) / max_proc
        if max_wait > 0:
            cost += w_wait * abs(a_wait[i] - b_wait[j]) / max_wait
        return cost

    prev2: list[float] = []
    prev = [float(j) for j in range(m + 1)]
    for i in range(1, n + 1):
        cur = [float(i)] + [0.0] * m
        for j in range(1, m + 1):
            best = min(prev[j] + 1.0, cur[j - 1] + 1.0)
            sub = prev[j - 1] + (pen(i - 1, j - 1) if a[i - 1] == b[j - 1] else 1.0)
            if sub < best:
                best = sub
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                swap = 0.0 if (a[i - 1], a[i - 2]) in conc else 1.0
                trans = prev2[j - 2] + swap + pen(i - 2, j - 1) + pen(i - 1, j - 2)
                if trans < best:
                    best = trans
            cur[j] = best
        prev2, prev = prev, cur
    return prev[m] / max(n, m)


def cf_distance(t1, t2, conc: ConcurrencyRelation = ConcurrencyRelation.empty()) -> float:
    """Normalized edit distance between two activity sequences."""
    a = t1.activities if isinstance(t1, Trace) else tuple(t1)
    b = t2.activities if isinstance(t2, Trace) else tuple(t2)
    return _edit_distance(a, b, conc)


def bptd(t1: Trace, t2: Trace, conc: ConcurrencyRelation, time_scale: TimeScale) -> float:
    """Timed trace distance: label matches pay for time differences."""
    a_proc, a_wait = _trace_times(t1)
    b_proc, b_wait = _trace_times(t2)
    return _edit_distance(
        t1.activities,
        t2.activities,
        conc,
        a_proc,
        a_wait,
        b_proc,
        b_wait,
        time_scale.max_proc_s,
        time_scale.max_wait_s,
    )


# --- batched cost matrices -------------------------------------------------------


def _encode_log(log: EventLog, vocab: dict[str, int]):
    encoded = []
    for trace in log.traces:
        acts = np.array([vocab[a] for a in trace.activities], dtype=np.int32)
        proc, wait = _trace_times(trace)
        encoded.append((acts, proc, wait))
    return encoded


def _distance_matrix(
    gen: EventLog,
    truth: EventLog,
    conc: ConcurrencyRelation,
    time_scale: TimeScale | None,
) -> np.ndarray:
    """All-pairs normalized distances; the DP runs vectorized over pairs
    grouped by (len, len). With time_scale None this is the control-flow
    distance."""
    vocab: dict[str, int] = {}
    for log in (gen, truth):
        for a in sorted(log.activity_alphabet):
            vocab.setdefault(a, len(vocab))
    g = _encode_log(gen, vocab)
    t = _encode_log(truth, vocab)
    conc_mat = np.zeros((len(vocab), len(vocab)), dtype=bool)
    for a, b in conc.pairs:
        if a in vocab and b in vocab:
            conc_mat[vocab[a], vocab[b]] = True

    timed = time_scale is not None
    mp = time_scale.max_proc_s if timed else 0.0
    mw = time_scale.max_wait_s if timed else 0.0

    groups: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for gi, (ga, _, _) in enumerate(g):
        for ti, (ta, _, _) in enumerate(t):
            groups.setdefault((len(ga), len(ta)), []).append((gi, ti))

    out = np.zeros((len(g), len(t)), dtype=np.float64)
    for (n, m), pairs in groups.items():
        idx_g = np.array([p[0] for p in pairs])
        idx_t = np.array([p[1] for p in pairs])
        a = np.stack([g[i][0] for i in idx_g])
        b = np.stack([t[i][0] for i in idx_t])
        if timed:
            ap = np.stack([g[i][1] for i in idx_g])
            aw = np.stack([g[i][2] for i in idx_g])
            bp = np.stack([t[i][1] for i in idx_t])
            bw = np.stack([t[i][2] for i in idx_t])

        def penalty(i, j):
            if not timed:
                return 0.0
            cost = np.zeros(len(pairs))
            if mp > 0:
                cost += 0.5 * np.abs(ap[:, i] - bp[:, j]) / mp
            if mw > 0:
                cost += 0.5 * np.abs(aw[:, i] - bw[:, j]) / mw
            return cost

        rows = [np.full(len(pairs), float(j)) for j in range(m + 1)]
        prev2 = None
        prev = rows
        for i in range(1, n + 1):
            cur = [np.full(len(pairs), float(i))]
            for j in range(1, m + 1):
                match = a[:, i - 1] == b[:, j - 1]
                sub_cost = np.where(match, penalty(i - 1, j - 1), 1.0)
                best = np.minimum(prev[j] + 1.0, cur[j - 1] + 1.0)
                best = np.minimum(best, prev[j - 1] + sub_cost)
                if i > 1 and j > 1:
                    cross = (a[:, i - 1] == b[:, j - 2]) & (a[:, i - 2] == b[:, j - 1])
                    if cross.any():
                        swap = np.where(conc_mat[a[:, i - 1], a[:, i - 2]], 0.0, 1.0)
                        trans = prev2[j - 2] + swap + penalty(i - 2, j - 1) + penalty(i - 1, j - 2)
                        best = np.where(cross, np.minimum(best, trans), best)
                cur.append(best)
            prev2, prev = prev, cur
        out[idx_g, idx_t] = prev[m] / max(n, m)
    return out


def pair_traces(gen: EventLog, truth: EventLog, cost_matrix: np.ndarray) -> Pairing:
    """Minimal-cost injective pairing (optimal rectangular assignment)."""
    if cost_matrix.size == 0:
        raise InsufficientDataError("cannot pair empty logs")
    rows, cols = linear_sum_assignment(cost_matrix)
    pairs = tuple(zip(rows.tolist(), cols.tolist()))
    total = float(cost_matrix[rows, cols].sum())
    excluded_g = tuple(sorted(set(range(len(gen.traces))) - set(rows.tolist())))
    excluded_t = tuple(sorted(set(range(len(truth.traces))) - set(cols.tolist())))
    return Pairing(pairs, total, excluded_g, excluded_t)


def _mean_paired(matrix: np.ndarray, gen: EventLog, truth: EventLog) -> float:
    pairing = pair_traces(gen, truth, matrix)
    return pairing.total_cost / len(pairing.pairs)


def cfls(gen: EventLog, truth: EventLog, conc: ConcurrencyRelation | None = None) -> float:
    """1 - mean control-flow distance over optimally paired traces."""
    conc = discover_concurrency(truth) if conc is None else conc
    return 1.0 - _mean_paired(_distance_matrix(gen, truth, conc, None), gen, truth)


def els(
    gen: EventLog,
    truth: EventLog,
    conc: ConcurrencyRelation | None = None,
    time_scale: TimeScale | None = None,
) -> float:
    """1 - mean timed trace distance over optimally paired traces."""
    conc = discover_concurrency(truth) if conc is None else conc
    scale = time_scale or TimeScale.from_logs(gen, truth)
    return 1.0 - _mean_paired(_distance_matrix(gen, truth, conc, scale), gen, truth)


def cycle_time_mae(gen: EventLog, truth: EventLog) -> float:
    """Mean absolute cycle-time difference over an optimal pairing (seconds)."""
    g = np.array([tr.cycle_time_s for tr in gen.traces])
    t = np.array([tr.cycle_time_s for tr in truth.traces])
    matrix = np.abs(g[:, None] - t[None, :])
    return _mean_paired(matrix, gen, truth)


# --- earth mover's distance -------------------------------------------------------


def emd_1d(h1: np.ndarray, h2: np.ndarray) -> float:
    """1-D EMD between equal-mass histograms with unit inter-bin distance:
    the sum of absolute cumulative differences."""
    if len(h1) != len(h2):
        raise InvalidArgumentError("histograms must have the same bin count")
    return float(np.abs(np.cumsum(np.asarray(h1, dtype=np.float64) - np.asarray(h2, dtype=np.float64))).sum())


def _activity_mean_durations(log: EventLog) -> dict[str, float]:
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for trace in log.traces:
        for e in trace.events:
            sums[e.activity] = sums.get(e.activity, 0.0) + e.duration_s
            counts[e.activity] = counts.get(e.activity, 0) + 1
    return {a: sums[a] / counts[a] for a in sums}


def activity_duration_emd(
    gen: EventLog, truth: EventLog, bins: int = 100, normalize: bool = False
) -> float:
    """EMD between histograms of per-activity mean durations.

    Ground distance is the bin-index difference, so values scale with the
    bin count; normalize=True divides by (bins - 1) to map into [0, 1].
    """
    if bins < 2:
        raise InvalidArgumentError("bins must be >= 2")
    means_g = list(_activity_mean_durations(gen).values())
    means_t = list(_activity_mean_durations(truth).values())
    lo = min(means_g + means_t)
    hi = max(means_g + means_t)
    if hi == lo:
        return 0.0
    h_g, _ = np.histogram(means_g, bins=bins, range=(lo, hi))
    h_t, _ = np.histogram(means_t, bins=bins, range=(lo, hi))
    value = emd_1d(h_g / h_g.sum(), h_t / h_t.sum())
    return value / (bins - 1) if normalize else value


# --- combined report ----------------------------------------------------------------


def evaluate_logs(
    gen: EventLog,
    truth: EventLog,
    bins: int = 100,
    normalize_emd: bool = False,
    conc: ConcurrencyRelation | None = None,
    time_scale: TimeScale | None = None,
) -> MetricReport:
    """All four metrics of one generated-vs-truth comparison.

    The concurrency relation defaults to the one observed in the truth log.
    """
    if not gen.traces or not truth.traces:
        raise InsufficientDataError("both logs must be non-empty")
    conc = discover_concurrency(truth) if conc is None else conc
    scale = time_scale or TimeScale.from_logs(gen, truth)
    return MetricReport(
        els=els(gen, truth, conc, scale),
        cfls=cfls(gen, truth, conc),
        cycle_time_mae_s=cycle_time_mae(gen, truth),
        emd=activity_duration_emd(gen, truth, bins, normalize_emd),
    )
