"""Tests for the command-line interface: exit codes, files, determinism."""

import dataclasses
import filecmp
import os

import numpy as np
import pytest

from sigmamax import cli
from test_classify import max_enumeration, sigma_enumeration

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")
TRACKING = os.path.join(CONFIGS, "tracking.toml")
CLASSIFIER = os.path.join(CONFIGS, "classifier.toml")


def run_cli(*argv):
    return cli.main(list(argv))


class TestValidate:
    def test_shipped_tracking_config_is_valid(self):
        assert run_cli("validate", "--config", TRACKING) == 0

    def test_shipped_classifier_config_is_valid(self):
        assert run_cli("validate", "--config", CLASSIFIER) == 0

    def test_row_sum_violation_reported_with_location(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text("[model]\ntransition_probability = [[0.94, 0.05], [0.05, 0.95]]\n")
        assert run_cli("validate", "--config", str(bad)) == 2
        err = capsys.readouterr().err
        assert "model.transition_probability" in err
        assert "row 0" in err

    def test_possibility_max_violation(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text("[model]\ntransition_possibility = [[1.0, 0.5], [0.5, 0.9]]\n")
        assert run_cli("validate", "--config", str(bad)) == 2
        assert "row 1" in capsys.readouterr().err

    def test_empty_file_is_rejected(self, tmp_path):
        empty = tmp_path / "empty.toml"
        empty.write_text("")
        assert run_cli("validate", "--config", str(empty)) == 2

    def test_malformed_file_is_a_parse_error(self, tmp_path, capsys):
        broken = tmp_path / "broken.toml"
        broken.write_text("[model\n")
        assert run_cli("validate", "--config", str(broken)) == 2
        assert "cannot parse" in capsys.readouterr().err

    def test_missing_file(self):
        assert run_cli("validate", "--config", "/nonexistent.toml") == 2


class TestRun:
    def test_small_run_writes_all_outputs(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = run_cli("run", "--config", TRACKING, "--out", str(out),
                       "--scenario", "1", "--group", "1", "--mc-runs", "2")
        assert code == 0
        for name in ("s1g1_rmse.csv", "s1g1_mode_beliefs.csv", "summary.csv", "summary.txt"):
            assert (out / name).exists()
        summary = (out / "summary.csv").read_text()
        assert "imm" in summary and "himm" in summary
        assert "mean_cross_time" in summary
        beliefs = (out / "s1g1_mode_beliefs.csv").read_text().splitlines()
        assert beliefs[0] == "sample,run,method,mode,belief,selected"
        himm_rows = [b for b in beliefs[1:] if b.split(",")[2] == "himm"]
        assert all(row.rsplit(",", 1)[1] in ("0", "1") for row in himm_rows)
        rmse = (out / "s1g1_rmse.csv").read_text().splitlines()
        assert rmse[0] == "sample,axis,method,rmse,measurement_rmse"
        # 200 samples x 3 axes x 2 methods data rows
        assert len(rmse) == 1 + 200 * 3 * 2

    def test_seeded_runs_are_identical(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            code = run_cli("run", "--config", TRACKING, "--out", str(out),
                           "--scenario", "1", "--group", "1",
                           "--mc-runs", "2", "--seed", "7")
            assert code == 0
        for name in ("s1g1_rmse.csv", "s1g1_mode_beliefs.csv", "summary.csv", "summary.txt"):
            assert filecmp.cmp(out_a / name, out_b / name, shallow=False)

    def test_unknown_method_is_a_config_error(self, tmp_path, capsys):
        code = run_cli("run", "--config", TRACKING, "--out", str(tmp_path / "x"),
                       "--method", "gpb2")
        assert code == 2
        assert "gpb2" in capsys.readouterr().err

    def test_unknown_scenario_and_group(self, tmp_path, capsys):
        assert run_cli("run", "--config", TRACKING, "--out", str(tmp_path / "x"),
                       "--scenario", "9") == 2
        assert "scenario '9'" in capsys.readouterr().err
        assert run_cli("run", "--config", TRACKING, "--out", str(tmp_path / "x"),
                       "--group", "7") == 2

    def test_exclusion_threshold_maps_to_exit_3(self, tmp_path, monkeypatch):
        real = cli.run_monte_carlo

        def failing(config, group, tracker, methods):
            report = real(config, group, tracker, methods)
            return dataclasses.replace(report, excluded_runs=1, completed_runs=2)

        monkeypatch.setattr(cli, "run_monte_carlo", failing)
        code = run_cli("run", "--config", TRACKING, "--out", str(tmp_path / "x"),
                       "--scenario", "1", "--group", "1", "--mc-runs", "3")
        assert code == 3

    def test_baseline_methods_run(self, tmp_path):
        out = tmp_path / "out"
        code = run_cli("run", "--config", TRACKING, "--out", str(out),
                       "--scenario", "2", "--group", "1", "--mc-runs", "2",
                       "--method", "kalman-baseline", "--method", "imm-maxout-baseline")
        assert code == 0
        assert "kalman-baseline" in (out / "summary.csv").read_text()


class TestClassify:
    def test_stream_decisions_match_enumeration(self, tmp_path):
        stream = tmp_path / "stream.txt"
        stream.write_text("s0 s2 s1 s0 s3\n")
        out = tmp_path / "out"
        assert run_cli("classify", "--config", CLASSIFIER, "--input", str(stream),
                       "--out", str(out)) == 0
        decisions = dict(
            line.split(",") for line in
            (out / "decisions.csv").read_text().splitlines()[1:])

        prob_rows = np.array([[0.8, 0.2], [0.3, 0.7]])
        lik_rows = np.array([[0.6, 0.2, 0.1, 0.1], [0.1, 0.3, 0.3, 0.3]])
        symbols = ["s0", "s1", "s2", "s3"]
        zs = "s0 s2 s1 s0 s3".split()
        patterns = ["friendly", "hostile"]

        def lik(z, f):
            return lik_rows[f if isinstance(f, int) else 0, symbols.index(z)]

        sig = sigma_enumeration([0.5, 0.5], prob_rows,
                                lambda z, f: lik_rows[f, symbols.index(z)],
                                [np.array([0.5, 0.5])] * 5, zs)
        poss_rows = prob_rows / prob_rows.max(axis=1, keepdims=True)
        mx = max_enumeration([1.0, 1.0], poss_rows,
                             lambda z, f: lik_rows[f, symbols.index(z)],
                             [np.array([1.0, 1.0])] * 5, zs)
        assert decisions["sigma"] == patterns[int(np.argmax(sig))]
        assert decisions["max"] == patterns[int(np.argmax(mx))]

    def test_belief_trace_structure(self, tmp_path):
        stream = tmp_path / "stream.txt"
        stream.write_text("s0\n")
        out = tmp_path / "out"
        run_cli("classify", "--config", CLASSIFIER, "--input", str(stream),
                "--out", str(out))
        lines = (out / "beliefs.csv").read_text().splitlines()
        assert lines[0] == "step,method,pattern,belief"
        # two methods x two steps (prior + one update) x two patterns
        assert len(lines) == 1 + 2 * 2 * 2

    def test_empty_stream_echoes_prior(self, tmp_path, capsys):
        stream = tmp_path / "stream.txt"
        stream.write_text("")
        out = tmp_path / "out"
        assert run_cli("classify", "--config", CLASSIFIER, "--input", str(stream),
                       "--out", str(out)) == 0
        lines = (out / "beliefs.csv").read_text().splitlines()[1:]
        assert all(line.startswith("0,") for line in lines)
        sigma_rows = [line.split(",") for line in lines if line.split(",")[1] == "sigma"]
        assert [float(r[3]) for r in sigma_rows] == [0.5, 0.5]

    def test_single_feature_gives_identical_map_sequences(self, tmp_path):
        config = tmp_path / "single.toml"
        config.write_text(
            '[classifier]\nkind = "both"\npatterns = ["a", "b"]\n'
            'features = ["only"]\nsymbols = ["s0", "s1"]\n'
            "prior = [0.4, 0.6]\n"
            "pattern_given_feature = [[0.5, 0.5]]\n"
            "measurement_likelihood = [[0.9, 0.1]]\n")
        stream = tmp_path / "stream.txt"
        stream.write_text("s0 s1 s0\n")
        out = tmp_path / "out"
        assert run_cli("classify", "--config", str(config), "--input", str(stream),
                       "--out", str(out)) == 0
        decisions = dict(
            line.split(",") for line in
            (out / "decisions.csv").read_text().splitlines()[1:])
        assert decisions["sigma"] == decisions["max"] == "b"

    def test_unknown_symbol_rejected(self, tmp_path, capsys):
        stream = tmp_path / "stream.txt"
        stream.write_text("nope\n")
        assert run_cli("classify", "--config", CLASSIFIER, "--input", str(stream),
                       "--out", str(tmp_path / "out")) == 2
        assert "unknown symbols" in capsys.readouterr().err

    def test_table_kind_mismatch_is_config_error(self, tmp_path):
        config = tmp_path / "bad.toml"
        config.write_text(
            '[classifier]\nkind = "sigma"\npatterns = ["a", "b"]\n'
            'features = ["f"]\nsymbols = ["s0"]\n'
            "pattern_given_feature = [[0.9, 0.2]]\n"
            "measurement_likelihood = [[1.0]]\n")
        stream = tmp_path / "stream.txt"
        stream.write_text("s0\n")
        assert run_cli("classify", "--config", str(config), "--input", str(stream),
                       "--out", str(tmp_path / "out")) == 2
