"""Shared builders for synthetic logs and hand-built scenarios."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # expose oracles.py

from logsim.bps_model import BpsModel, ResourcePool
from logsim.distributions import DistributionSpec
from logsim.eventlog import EventLog, log_from_rows
from logsim.process_model import (
    AND_JOIN,
    AND_SPLIT,
    END,
    START,
    TASK,
    XOR_JOIN,
    XOR_SPLIT,
    BranchingProbabilities,
    Node,
    ProcessModel,
)
from logsim.rng import Rng

HOUR = 3_600_000  # ms


def log_of(sequences, gap_ms=HOUR, step_ms=60_000, resource=None) -> EventLog:
    """Log with one trace per activity sequence; trace i starts at i*gap_ms."""
    rows = []
    for i, seq in enumerate(sequences):
        t = i * gap_ms
        for act in seq:
            rows.append((f"case{i:04d}", act, resource, t, t + step_ms))
            t += step_ms
    return log_from_rows(rows)


def random_log(seed: int, n_traces=20, alphabet="ABCDE", max_len=6) -> EventLog:
    """Random activity sequences with random (valid) timestamps."""
    rng = Rng(seed)
    rows = []
    t0 = 0
    for i in range(n_traces):
        t0 += int(rng.uniform() * 4 * HOUR)
        t = t0
        length = 1 + int(rng.uniform() * max_len)
        for _ in range(length):
            act = alphabet[int(rng.uniform() * len(alphabet)) % len(alphabet)]
            dur = int(rng.uniform() * 2 * HOUR)
            res = f"r{int(rng.uniform() * 3)}"
            rows.append((f"case{i:04d}", act, res, t, t + dur))
            t += dur + int(rng.uniform() * HOUR)
    return log_from_rows(rows)


def xor_and_model(p_b=0.3, pool_sizes=(2, 3), max_replay_length=40) -> BpsModel:
    """A -> xor(B | C) -> and(D, E): the standard 5-task test scenario."""
    nodes = (
        Node(START, START), Node(END, END),
        Node("t:A", TASK, "A"), Node("t:B", TASK, "B"), Node("t:C", TASK, "C"),
        Node("t:D", TASK, "D"), Node("t:E", TASK, "E"),
        Node("xs", XOR_SPLIT), Node("xj", XOR_JOIN),
        Node("ps", AND_SPLIT), Node("pj", AND_JOIN),
    )
    edges = (
        (START, "t:A"), ("t:A", "xs"), ("xs", "t:B"), ("xs", "t:C"),
        ("t:B", "xj"), ("t:C", "xj"), ("xj", "ps"), ("ps", "t:D"), ("ps", "t:E"),
        ("t:D", "pj"), ("t:E", "pj"), ("pj", END),
    )
    pm = ProcessModel(nodes, edges, max_replay_length=max_replay_length)
    front = ResourcePool("P0", frozenset(f"fr{i}" for i in range(pool_sizes[0])))
    back = ResourcePool("P1", frozenset(f"bk{i}" for i in range(pool_sizes[1])))
    return BpsModel(
        process_model=pm,
        branching=BranchingProbabilities({"xs": {"t:B": p_b, "t:C": 1.0 - p_b}}),
        interarrival=DistributionSpec.exponential(120.0),
        activity_durations={
            "A": DistributionSpec.exponential(60.0),
            "B": DistributionSpec.exponential(200.0),
            "C": DistributionSpec.exponential(100.0),
            "D": DistributionSpec.exponential(90.0),
            "E": DistributionSpec.exponential(90.0),
        },
        pools=(front, back),
        activity_pool={"A": "P0", "B": "P0", "C": "P0", "D": "P1", "E": "P1"},
    )


@pytest.fixture
def tmp_csv(tmp_path):
    def write(text: str, name="log.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
