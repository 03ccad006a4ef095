"""Experiment harness and command-line surface."""

import json

import pytest

from conftest import xor_and_model
from logsim.cli import main
from logsim.eventlog import parse_csv, temporal_split, write_csv
from logsim.experiment import (
    ExperimentConfig,
    render_report,
    report_csv,
    run_experiment,
    write_report_files,
)
from logsim.simulator import SimConfig, simulate


@pytest.fixture(scope="module")
def log_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "source.csv"
    log = simulate(xor_and_model(), SimConfig(num_cases=120, seed=31))
    write_csv(log, path)
    return path


def quick_config(log_csv, **kw):
    defaults = dict(
        log_path=str(log_csv),
        split_ratio=0.7,
        trials=2,
        runs_per_trial=1,
        generated_logs=3,
        seed=9,
    )
    defaults.update(kw)
    return ExperimentConfig(**defaults)


class TestRunExperiment:
    def test_structure_and_means(self, log_csv):
        output = run_experiment(quick_config(log_csv))
        entry = output.report["generators"]["dds"]
        assert len(entry["per_log"]) == 3
        for key in ("els", "cfls", "cycle_time_mae_s", "emd"):
            recomputed = sum(r[key] for r in entry["per_log"]) / 3
            assert entry["mean"][key] == recomputed
        assert output.report["split"]["test_traces"] == 36  # 120 - ceil(0.7*120)

    def test_generated_logs_match_test_fold_size(self, log_csv):
        output = run_experiment(quick_config(log_csv))
        # all scored logs were simulated with num_cases == |test|; the ELS
        # pairing therefore leaves nothing excluded, so identity scoring of
        # per-log reports is structurally complete
        assert output.report["config"]["generated_logs"] == 3

    def test_injected_truth_scores_perfectly(self, log_csv, tmp_path):
        full = parse_csv(log_csv)
        _, test = temporal_split(full, 0.7)
        ext_dir = tmp_path / "ext"
        ext_dir.mkdir()
        for i in range(2):
            write_csv(test, ext_dir / f"copy{i}.csv")
        config = quick_config(
            log_csv, generators=("external",), external_dir=str(ext_dir)
        )
        output = run_experiment(config)
        mean = output.report["generators"]["external"]["mean"]
        assert mean["els"] == 1.0
        assert mean["cfls"] == 1.0
        assert mean["cycle_time_mae_s"] == 0.0
        assert mean["emd"] == 0.0

    def test_wrong_size_external_logs_excluded(self, log_csv, tmp_path):
        full = parse_csv(log_csv)
        _, test = temporal_split(full, 0.7)
        ext_dir = tmp_path / "ext"
        ext_dir.mkdir()
        write_csv(test, ext_dir / "good.csv")
        short = simulate(xor_and_model(), SimConfig(num_cases=5, seed=1))
        write_csv(short, ext_dir / "short.csv")
        config = quick_config(log_csv, generators=("external",), external_dir=str(ext_dir))
        output = run_experiment(config)
        entry = output.report["generators"]["external"]
        assert len(entry["per_log"]) == 1
        assert any("short.csv" in w for w in entry["warnings"])

    def test_no_usable_external_logs_reported_not_raised(self, log_csv, tmp_path):
        ext_dir = tmp_path / "empty"
        ext_dir.mkdir()
        config = quick_config(log_csv, generators=("external",), external_dir=str(ext_dir))
        output = run_experiment(config)
        assert "error" in output.report["generators"]["external"]

    def test_dds_rows_reproduce_byte_identically(self, log_csv):
        config = quick_config(log_csv)
        first = run_experiment(config)
        second = run_experiment(config)
        assert json.dumps(first.report, sort_keys=True) == json.dumps(
            second.report, sort_keys=True
        )
        assert render_report(first.report) == render_report(second.report)


class TestRendering:
    REPORT = {
        "generators": {
            "dds": {
                "per_log": [
                    {"els": 0.44, "cfls": 0.42, "cycle_time_mae_s": 488158.75, "emd": 2.10}
                ],
                "mean": {"els": 0.44, "cfls": 0.42, "cycle_time_mae_s": 488158.75, "emd": 2.10},
            },
            "external": {
                "per_log": [
                    {"els": 0.35, "cfls": 0.36, "cycle_time_mae_s": 447143.67, "emd": 2.98}
                ],
                "mean": {"els": 0.35, "cfls": 0.36, "cycle_time_mae_s": 447143.67, "emd": 2.98},
            },
        }
    }

    def test_best_els_row_marked(self):
        table = render_report(self.REPORT)
        lines = table.splitlines()
        dds_line = next(l for l in lines if l.startswith("dds"))
        ext_line = next(l for l in lines if l.startswith("external"))
        assert dds_line.endswith("*")
        assert not ext_line.endswith("*")
        assert "0.44" in dds_line and "488158.75" in dds_line

    def test_single_generator_single_row(self):
        report = {"generators": {"dds": self.REPORT["generators"]["dds"]}}
        body = [l for l in render_report(report).splitlines() if l and not l.startswith(("Generator", "-"))]
        assert len(body) == 1

    def test_rendering_is_deterministic(self):
        assert render_report(self.REPORT) == render_report(self.REPORT)
        assert report_csv(self.REPORT) == report_csv(self.REPORT)


class TestCli:
    def test_stats(self, log_csv, capsys):
        assert main(["stats", "--log", str(log_csv)]) == 0
        out = capsys.readouterr().out
        assert "num_traces" in out and "120" in out

    def test_split_round_trip(self, log_csv, tmp_path):
        train = tmp_path / "train.csv"
        test = tmp_path / "test.csv"
        assert main(["split", "--log", str(log_csv), "--ratio", "0.7",
                     "--train", str(train), "--test", str(test)]) == 0
        assert len(parse_csv(train).traces) == 84
        assert len(parse_csv(test).traces) == 36

    def test_discover_simulate_evaluate_pipeline(self, log_csv, tmp_path, capsys):
        model_path = tmp_path / "model.json"
        history_path = tmp_path / "history.json"
        pools_path = tmp_path / "pools.json"
        ia_path = tmp_path / "interarrival.json"
        rc = main([
            "discover", "--log", str(log_csv), "--trials", "2", "--runs", "1",
            "--seed", "4", "--out", str(model_path), "--history", str(history_path),
            "--pools-out", str(pools_path), "--interarrival-out", str(ia_path),
        ])
        assert rc == 0
        history = json.loads(history_path.read_text())
        assert {"trials", "failures", "best_trial"} <= set(history)
        assert json.loads(pools_path.read_text())["pools"]
        assert json.loads(ia_path.read_text())["family"]

        gen_path = tmp_path / "gen.csv"
        audit_path = tmp_path / "audit.jsonl"
        rc = main(["simulate", "--model", str(model_path), "--cases", "25",
                   "--seed", "2", "--out", str(gen_path), "--audit", str(audit_path)])
        assert rc == 0
        assert len(parse_csv(gen_path).traces) == 25
        first_audit = json.loads(audit_path.read_text().splitlines()[0])
        assert {"case_id", "enabled_ms", "start_ms", "end_ms"} <= set(first_audit)

        report_path = tmp_path / "metrics.json"
        rc = main(["evaluate", "--generated", str(gen_path), "--truth", str(log_csv),
                   "--json", str(report_path)])
        assert rc == 0
        report = json.loads(report_path.read_text())
        assert set(report) == {"els", "cfls", "cycle_time_mae_s", "emd"}

    def test_experiment_writes_all_outputs(self, log_csv, tmp_path, capsys):
        out_dir = tmp_path / "exp"
        rc = main([
            "experiment", "--log", str(log_csv), "--trials", "1", "--runs", "1",
            "--generated-logs", "2", "--seed", "3", "--out-dir", str(out_dir),
        ])
        assert rc == 0
        assert (out_dir / "report.json").exists()
        assert (out_dir / "report.txt").exists()
        assert (out_dir / "report.csv").exists()
        assert (out_dir / "history.json").exists()
        assert (out_dir / "model.json").exists()
        assert (out_dir / "figures" / "metrics_by_generator.png").exists()
        table = capsys.readouterr().out
        assert "Generator" in table and "dds" in table
        csv_text = (out_dir / "report.csv").read_text()
        assert csv_text.startswith("generator,log_index,els")
        assert ",mean," in csv_text

    def test_exit_codes(self, tmp_path, log_csv):
        with pytest.raises(SystemExit) as exit_info:
            main(["stats"])  # missing required --log
        assert exit_info.value.code == 1
        assert main(["stats", "--log", str(tmp_path / "missing.csv")]) == 2
        bad = tmp_path / "bad.csv"
        bad.write_text("case_id,activity\nx,y\n")
        assert main(["stats", "--log", str(bad)]) == 2
        assert main(["split", "--log", str(log_csv), "--ratio", "2.0",
                     "--train", str(tmp_path / "a.csv"), "--test", str(tmp_path / "b.csv")]) == 1

    def test_pipeline_failure_exits_three(self, tmp_path, capsys):
        # runaway loop scenario: every simulated case exceeds the cap
        from logsim.bps_model import BpsModel, ResourcePool
        from logsim.distributions import DistributionSpec
        from logsim.process_model import (
            END, START, TASK, XOR_JOIN, XOR_SPLIT, BranchingProbabilities, Node, ProcessModel,
        )

        pm = ProcessModel(
            (Node(START, START), Node(END, END), Node("t:A", TASK, "A"),
             Node("xj", XOR_JOIN), Node("xs", XOR_SPLIT)),
            ((START, "xj"), ("xj", "t:A"), ("t:A", "xs"), ("xs", "xj"), ("xs", END)),
            max_replay_length=5,
        )
        model = BpsModel(
            pm, BranchingProbabilities({"xs": {"xj": 1.0, END: 0.0}}),
            DistributionSpec.fixed(10.0), {"A": DistributionSpec.fixed(1.0)},
            (ResourcePool("P", frozenset({"r"})),), {"A": "P"},
        )
        path = tmp_path / "loop.json"
        path.write_text(model.to_json())
        rc = main(["simulate", "--model", str(path), "--cases", "4",
                   "--seed", "1", "--out", str(tmp_path / "out.csv")])
        assert rc == 3
        assert "aborted" in capsys.readouterr().err
