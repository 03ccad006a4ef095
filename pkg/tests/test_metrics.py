"""Edit distances, trace pairing, cycle-time MAE, and histogram EMD."""

import numpy as np
import pytest

from conftest import log_of, random_log
from oracles import brute_force_assignment, brute_force_edit_distance, transport_lp_emd
from logsim.eventlog import ConcurrencyRelation, log_from_rows
from logsim.metrics import (
    TimeScale,
    activity_duration_emd,
    bptd,
    cf_distance,
    cfls,
    cycle_time_mae,
    els,
    emd_1d,
    evaluate_logs,
    pair_traces,
)
from logsim.metrics import _distance_matrix  # internal consistency check
from logsim.rng import Rng

NO_CONC = ConcurrencyRelation.empty()
BC = ConcurrencyRelation(frozenset({("B", "C")}))


class TestCfDistance:
    def test_identity(self):
        assert cf_distance("ABC", "ABC", NO_CONC) == 0.0

    def test_free_transposition_when_concurrent(self):
        assert cf_distance("ABC", "ACB", BC) == 0.0

    def test_paid_transposition_otherwise(self):
        assert cf_distance("ABC", "ACB", NO_CONC) == pytest.approx(1 / 3)

    def test_two_insertions(self):
        assert cf_distance("AB", "ABCD", NO_CONC) == 0.5

    def test_empty_cases(self):
        assert cf_distance("", "", NO_CONC) == 0.0
        assert cf_distance("", "AB", NO_CONC) == 1.0

    def test_symmetry_and_identity_axiom(self):
        rng = Rng(11)
        for _ in range(200):
            a = tuple("ABC"[int(rng.uniform() * 3)] for _ in range(int(rng.uniform() * 5)))
            b = tuple("ABC"[int(rng.uniform() * 3)] for _ in range(int(rng.uniform() * 5)))
            assert cf_distance(a, a, BC) == 0.0
            assert cf_distance(a, b, BC) == cf_distance(b, a, BC)

    def test_matches_brute_force_sample(self):
        rng = Rng(17)
        for _ in range(300):
            a = tuple("ABC"[int(rng.uniform() * 3)] for _ in range(int(rng.uniform() * 6)))
            b = tuple("ABC"[int(rng.uniform() * 3)] for _ in range(int(rng.uniform() * 6)))
            if not a and not b:
                continue
            expected = brute_force_edit_distance(a, b) / max(len(a), len(b))
            assert cf_distance(a, b, NO_CONC) == expected


def timed_trace(case, acts, procs, gaps, t0=0):
    """Trace with given per-event durations and inter-event gaps (seconds)."""
    rows = []
    t = t0
    for act, proc, gap in zip(acts, procs, [0] + list(gaps)):
        t += int(gap * 1000)
        rows.append((case, act, None, t, t + int(proc * 1000)))
        t += int(proc * 1000)
    return log_from_rows(rows).traces[0]


class TestBptd:
    def test_identity(self):
        t = timed_trace("c", "ABC", [10, 20, 30], [5, 5])
        assert bptd(t, t, NO_CONC, TimeScale(30.0, 5.0)) == 0.0

    def test_processing_shift_costs_half(self):
        # t1 zero-duration events, t2 all at the max processing time
        t1 = timed_trace("c1", "ABC", [0, 0, 0], [10, 10])
        t2 = timed_trace("c2", "ABC", [50, 50, 50], [10, 10])
        scale = TimeScale.from_logs(
            log_from_rows([(e.case_id, e.activity, None, e.start_ms, e.end_ms) for e in t1.events]),
            log_from_rows([(e.case_id, e.activity, None, e.start_ms, e.end_ms) for e in t2.events]),
        )
        assert scale.max_proc_s == 50.0
        assert bptd(t1, t2, NO_CONC, scale) == pytest.approx(0.5)

    def test_label_disjoint_is_one(self):
        t1 = timed_trace("c1", "ABC", [1, 1, 1], [1, 1])
        t2 = timed_trace("c2", "XYZ", [1, 1, 1], [1, 1])
        assert bptd(t1, t2, NO_CONC, TimeScale(1.0, 1.0)) == 1.0

    def test_zero_scale_terms_are_free(self):
        t1 = timed_trace("c1", "AB", [5, 5], [0])
        t2 = timed_trace("c2", "AB", [9, 9], [0])
        # max_proc 0 would be inconsistent, but max_wait 0 must null that term
        assert bptd(t1, t2, NO_CONC, TimeScale(9.0, 0.0)) == pytest.approx(
            (0.5 * 4 / 9 + 0.5 * 4 / 9) / 2
        )

    def test_symmetric(self):
        t1 = timed_trace("c1", "ABCA", [3, 1, 4, 1], [2, 0, 7])
        t2 = timed_trace("c2", "ACB", [2, 7, 1], [8, 2])
        scale = TimeScale(7.0, 8.0)
        assert bptd(t1, t2, BC, scale) == bptd(t2, t1, BC, scale)


class TestPairing:
    def test_two_by_two(self):
        matrix = np.array([[0.1, 0.9], [0.8, 0.2]])
        log2 = log_of(["A", "A"])
        pairing = pair_traces(log2, log2, matrix)
        assert set(pairing.pairs) == {(0, 0), (1, 1)}
        assert pairing.total_cost == pytest.approx(0.3)

    def test_rectangular_matches_brute_force(self):
        rng = Rng(23)
        for trial in range(30):
            n = 2 + int(rng.uniform() * 3)
            m = 2 + int(rng.uniform() * 5)
            matrix = np.array([[rng.uniform() for _ in range(m)] for _ in range(n)])
            gen = log_of(["A"] * n)
            truth = log_of(["A"] * m)
            pairing = pair_traces(gen, truth, matrix)
            assert len(pairing.pairs) == min(n, m)
            assert pairing.total_cost == pytest.approx(brute_force_assignment(matrix))
            assert len(pairing.excluded_truth) == max(0, m - n)

    def test_identical_logs_pair_at_zero(self):
        log = random_log(3, n_traces=8)
        matrix = _distance_matrix(log, log, NO_CONC, None)
        pairing = pair_traces(log, log, matrix)
        assert pairing.total_cost == 0.0


class TestLogSimilarities:
    def test_identity_is_one(self):
        log = random_log(5, n_traces=10)
        assert cfls(log, log) == 1.0
        assert els(log, log) == 1.0

    def test_two_trace_hand_instance(self):
        gen = log_of(["AB", "AC"])
        truth = log_of(["AB", "AB"])
        # optimal pairing: AB<->AB (0), AC<->AB (substitution, 1/2)
        assert cfls(gen, truth, NO_CONC) == pytest.approx(1.0 - 0.25)

    def test_batched_matrix_agrees_with_scalar_dp(self):
        gen = random_log(7, n_traces=12)
        truth = random_log(8, n_traces=9)
        from logsim.eventlog import discover_concurrency

        conc = discover_concurrency(truth)
        scale = TimeScale.from_logs(gen, truth)
        timed = _distance_matrix(gen, truth, conc, scale)
        plain = _distance_matrix(gen, truth, conc, None)
        for i, tg in enumerate(gen.traces):
            for j, tt in enumerate(truth.traces):
                assert timed[i, j] == pytest.approx(bptd(tg, tt, conc, scale), abs=1e-12)
                assert plain[i, j] == pytest.approx(cf_distance(tg, tt, conc), abs=1e-12)


class TestCycleTimeMae:
    def test_identity_zero(self):
        log = random_log(2, n_traces=6)
        assert cycle_time_mae(log, log) == 0.0

    def test_optimal_pairing_of_cycle_times(self):
        # cycle times {10, 20} vs {12, 18}: best pairing gives MAE 2
        gen = log_from_rows(
            [("g1", "A", None, 0, 10_000), ("g2", "A", None, 100_000, 120_000)]
        )
        truth = log_from_rows(
            [("t1", "A", None, 0, 12_000), ("t2", "A", None, 100_000, 118_000)]
        )
        assert cycle_time_mae(gen, truth) == pytest.approx(2.0)


class TestEmd:
    def test_identical_histograms(self):
        assert emd_1d([0.5, 0.5], [0.5, 0.5]) == 0.0

    def test_unit_move(self):
        assert emd_1d([1.0, 0.0], [0.0, 1.0]) == 1.0

    def test_split_mass(self):
        # 0.5 moves one bin from each side: total work 1.0 (LP-oracle checked)
        assert emd_1d([0.5, 0.0, 0.5], [0.0, 1.0, 0.0]) == pytest.approx(1.0)
        assert transport_lp_emd([0.5, 0.0, 0.5], [0.0, 1.0, 0.0]) == pytest.approx(1.0)

    def test_closed_form_matches_lp(self):
        rng = Rng(31)
        for _ in range(20):
            n = 2 + int(rng.uniform() * 9)
            h1 = np.array([rng.uniform() for _ in range(n)])
            h2 = np.array([rng.uniform() for _ in range(n)])
            h1 /= h1.sum()
            h2 /= h2.sum()
            assert emd_1d(h1, h2) == pytest.approx(transport_lp_emd(h1, h2), abs=1e-9)

    def test_identical_logs_give_zero(self):
        log = random_log(9)
        assert activity_duration_emd(log, log) == 0.0

    def test_normalization_flag(self):
        gen = log_of(["A"], step_ms=1_000)
        truth = log_of(["A"], step_ms=601_000)
        raw = activity_duration_emd(gen, truth, bins=100)
        norm = activity_duration_emd(gen, truth, bins=100, normalize=True)
        assert raw == pytest.approx(99.0)  # all mass moves across all bins
        assert norm == pytest.approx(1.0)


class TestEvaluate:
    def test_identity_report(self):
        log = random_log(13, n_traces=12)
        report = evaluate_logs(log, log)
        assert report.els == 1.0
        assert report.cfls == 1.0
        assert report.cycle_time_mae_s == 0.0
        assert report.emd == 0.0

    def test_report_fields_in_range(self):
        gen = random_log(1, n_traces=10)
        truth = random_log(2, n_traces=10)
        report = evaluate_logs(gen, truth)
        assert 0.0 <= report.els <= 1.0
        assert 0.0 <= report.cfls <= 1.0
        assert report.cycle_time_mae_s >= 0.0
        assert report.emd >= 0.0
