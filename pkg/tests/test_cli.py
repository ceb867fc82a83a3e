import json

import pytest

from wise.cli import main
from wise.norm import LayerId, load_norm
from wise.log_io import parse_xes
from wise.scoring import SCORE_CSV_COLUMNS
from wise.synthlog import oracle_score


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestScoreCommand:
    def test_conforming_fixture_mean_one(self, fixtures_dir, tmp_path, capsys):
        code, out, _ = run(
            capsys,
            "score",
            "--log", str(fixtures_dir / "conforming_20.xes"),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--out", str(tmp_path),
        )
        assert code == 0
        assert "mean=1.0000" in out
        assert (tmp_path / "scores_standardization.csv").exists()
        assert (tmp_path / "scores_standardization.json").exists()

    def test_missing_norm_file(self, fixtures_dir, tmp_path, capsys):
        code, _, err = run(
            capsys,
            "score",
            "--log", str(fixtures_dir / "conforming_20.xes"),
            "--norm", str(tmp_path / "nope.json"),
            "--out", str(tmp_path),
        )
        assert code == 1
        assert "error:" in err

    def test_strict_mode_warnings_exit_2(self, fixtures_dir, tmp_path, capsys):
        # example norm references "Change Vendor", absent from the fixture
        code, _, err = run(
            capsys,
            "score",
            "--log", str(fixtures_dir / "sample_50.xes"),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--out", str(tmp_path),
            "--strict",
        )
        assert code == 2
        assert "Change Vendor" in err

    def test_emitted_csv_matches_oracle(self, fixtures_dir, tmp_path, capsys):
        code, _, _ = run(
            capsys,
            "score",
            "--log", str(fixtures_dir / "sample_50.xes"),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--out", str(tmp_path),
        )
        assert code == 0
        emitted = (tmp_path / "scores_standardization.csv").read_text()

        view = load_norm((fixtures_dir / "example_norm.json").read_bytes()).views[0]
        log = parse_xes((fixtures_dir / "sample_50.xes").read_bytes())
        lines = [",".join(SCORE_CSV_COLUMNS)]
        for tr in log.traces:
            fs, penalty, score, normalized = oracle_score(view, tr)
            cells = [tr.case_id, view.name]
            cells += [repr(f) for f in fs]
            cells += [repr(view.weights[layer] * f) for layer, f in zip(LayerId, fs)]
            cells += [repr(penalty), repr(score), repr(normalized)]
            lines.append(",".join(cells))
        assert emitted == "\n".join(lines) + "\n"

    def test_rerun_is_byte_identical(self, fixtures_dir, tmp_path, capsys):
        args = (
            "score",
            "--log", str(fixtures_dir / "sample_50.xes"),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--out", str(tmp_path),
        )
        run(capsys, *args)
        first = (tmp_path / "scores_standardization.csv").read_bytes()
        run(capsys, *args)
        assert (tmp_path / "scores_standardization.csv").read_bytes() == first

    def test_view_selector(self, fixtures_dir, tmp_path, capsys):
        code, out, _ = run(
            capsys,
            "score",
            "--log", str(fixtures_dir / "conforming_20.xes"),
            "--norm", str(fixtures_dir / "two_view_norm.json"),
            "--view", "costs",
            "--out", str(tmp_path),
        )
        assert code == 0
        assert "view=costs" in out
        assert not (tmp_path / "scores_standardization.csv").exists()

    def test_unknown_view(self, fixtures_dir, tmp_path, capsys):
        code, _, err = run(
            capsys,
            "score",
            "--log", str(fixtures_dir / "conforming_20.xes"),
            "--norm", str(fixtures_dir / "two_view_norm.json"),
            "--view", "nope",
            "--out", str(tmp_path),
        )
        assert code == 1
        assert "no view named" in err


class TestHeatmapCommand:
    def test_writes_matrix_and_long_csv(self, fixtures_dir, tmp_path, capsys):
        code, out, _ = run(
            capsys,
            "heatmap",
            "--log", str(fixtures_dir / "sample_50.xes"),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--feature", "Category",
            "--feature", "Vendor",
            "--out", str(tmp_path),
        )
        assert code == 0
        matrix = json.loads((tmp_path / "heatmap_standardization_Category.json").read_text())
        assert matrix["columns"][-1] == "overall"
        assert (tmp_path / "aggregate_standardization_Vendor.csv").exists()

    def test_unknown_feature_exit_1(self, fixtures_dir, tmp_path, capsys):
        code, _, err = run(
            capsys,
            "heatmap",
            "--log", str(fixtures_dir / "sample_50.xes"),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--feature", "Nope",
            "--out", str(tmp_path),
        )
        assert code == 1
        assert "Nope" in err

    def test_filter_drilldown_in_one_command(self, fixtures_dir, tmp_path, capsys):
        code, _, _ = run(
            capsys,
            "heatmap",
            "--log", str(fixtures_dir / "sample_50.xes"),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--feature", "Vendor",
            "--filter", "Category=Logistic",
            "--low-quantile", "0.5",
            "--out", str(tmp_path),
        )
        assert code == 0
        matrix = json.loads((tmp_path / "heatmap_standardization_Vendor.json").read_text())
        # drill-down restricts the population: volumes shrink below the full 50
        assert sum(r["n_cases"] for r in matrix["rows"]) < 50


class TestSynthCommand:
    def test_generates_log_and_truth(self, fixtures_dir, tmp_path, capsys):
        code, out, _ = run(
            capsys,
            "synth",
            "--spec", str(fixtures_dir / "gen_spec_sample.json"),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--out", str(tmp_path),
        )
        assert code == 0
        assert (tmp_path / "log.xes").exists()
        assert (tmp_path / "log.csv").exists()
        truth = json.loads((tmp_path / "truth.json").read_text())
        assert truth["n_cases"] == 50
        assert "cases=50" in out

    def test_matches_shipped_fixture(self, fixtures_dir, tmp_path, capsys):
        run(
            capsys,
            "synth",
            "--spec", str(fixtures_dir / "gen_spec_sample.json"),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--out", str(tmp_path),
        )
        assert (tmp_path / "log.xes").read_bytes() == (fixtures_dir / "sample_50.xes").read_bytes()

    def test_non_conforming_template_exit_1(self, fixtures_dir, tmp_path, capsys):
        spec = json.loads((fixtures_dir / "gen_spec_sample.json").read_text())
        spec["base_sequence"] = ["Change Price"]  # excluded activity in the template
        bad = tmp_path / "bad_spec.json"
        bad.write_text(json.dumps(spec))
        code, _, err = run(
            capsys,
            "synth",
            "--spec", str(bad),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--out", str(tmp_path),
        )
        assert code == 1
        assert "violates" in err


class TestServeCommand:
    def test_bind_failure_exit_1(self, fixtures_dir, capsys):
        import socket

        blocker = socket.socket()
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            code, _, err = run(
                capsys,
                "serve",
                "--port", str(port),
                "--allow-dir", str(fixtures_dir),
            )
            assert code == 1
            assert "failed to start" in err or "cannot bind" in err
        finally:
            blocker.close()


class TestConfigFile:
    def test_env_config_supplies_defaults(self, fixtures_dir, tmp_path, capsys, monkeypatch):
        config = {
            "log": str(fixtures_dir / "conforming_20.xes"),
            "norm": str(fixtures_dir / "example_norm.json"),
            "out": str(tmp_path / "from-config"),
        }
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(config))
        monkeypatch.setenv("WISE_CONFIG", str(config_path))
        code, out, _ = run(capsys, "score")
        assert code == 0
        assert (tmp_path / "from-config" / "scores_standardization.csv").exists()

    def test_flags_override_config(self, fixtures_dir, tmp_path, capsys, monkeypatch):
        config = {
            "log": str(fixtures_dir / "conforming_20.xes"),
            "norm": str(fixtures_dir / "example_norm.json"),
            "out": str(tmp_path / "a"),
        }
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(config))
        monkeypatch.setenv("WISE_CONFIG", str(config_path))
        code, _, _ = run(capsys, "score", "--out", str(tmp_path / "b"))
        assert code == 0
        assert (tmp_path / "b" / "scores_standardization.csv").exists()
        assert not (tmp_path / "a").exists()

    def test_inputs_never_mutated(self, fixtures_dir, tmp_path, capsys):
        log_path = fixtures_dir / "sample_50.xes"
        before = log_path.read_bytes()
        run(
            capsys,
            "score",
            "--log", str(log_path),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--out", str(tmp_path),
        )
        assert log_path.read_bytes() == before


class TestEmptyDrilldown:
    def test_heatmap_on_empty_filter_result_writes_empty_matrix(
        self, fixtures_dir, tmp_path, capsys
    ):
        code, _, _ = run(
            capsys,
            "heatmap",
            "--log", str(fixtures_dir / "sample_50.xes"),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--feature", "Vendor",
            "--filter", "Category=Ghost",
            "--out", str(tmp_path),
        )
        assert code == 0
        matrix = json.loads((tmp_path / "heatmap_standardization_Vendor.json").read_text())
        assert matrix["rows"] == []

    def test_broken_generator_spec_exit_1(self, fixtures_dir, tmp_path, capsys):
        bad = tmp_path / "spec.json"
        bad.write_text('{"n_cases": 3, "base_sequence": ["A"]}')  # no seed
        code, _, err = run(
            capsys,
            "synth",
            "--spec", str(bad),
            "--norm", str(fixtures_dir / "example_norm.json"),
            "--out", str(tmp_path),
        )
        assert code == 1
        assert "seed" in err
