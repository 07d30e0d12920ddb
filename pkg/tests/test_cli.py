from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from nishpaksh.cli import main
from nishpaksh.fixtures import SyntheticSpec, biased_spec, generate_csv, parity_spec
from nishpaksh.risk import load_question_bank

SCHEMA = {
    "feature_columns": ["x1", "x2"],
    "sensitive_columns": ["group_a", "group_b"],
    "label_column": "label",
    "prediction_column": "prediction",
}


@pytest.fixture()
def runner():
    return CliRunner()


def write_inputs(tmp_path: Path, spec: SyntheticSpec, rating: int, config: dict):
    (tmp_path / "data.csv").write_bytes(generate_csv(spec))
    (tmp_path / "schema.json").write_text(json.dumps(SCHEMA))
    responses = [
        {"item_id": item.id, "rating": rating} for item in load_question_bank()
    ]
    (tmp_path / "survey.json").write_text(json.dumps(responses))
    (tmp_path / "config.json").write_text(json.dumps(config))


def audit_args(tmp_path: Path, out: str, extra: list[str] | None = None):
    args = [
        "audit", "run",
        "--data", str(tmp_path / "data.csv"),
        "--schema", str(tmp_path / "schema.json"),
        "--survey", str(tmp_path / "survey.json"),
        "--config", str(tmp_path / "config.json"),
        "--seed", "42",
        "--replicates", "120",
        "--out", str(tmp_path / out),
    ]
    return args + (extra or [])


GENERIC_CONFIG = {
    "model_profile": {
        "model_type": "machine-learning",
        "task": "binary-classification",
        "version": "demo",
    },
    "sector_policy": {"sector": "generic"},
}


class TestScoreCommands:
    def test_fs_perfectly_fair(self, runner):
        result = runner.invoke(main, ["score", "fs", "--bi", "[0]"])
        assert result.exit_code == 0
        assert json.loads(result.output)["fairness_score"] == 1.0

    def test_fs_pair_fixture(self, runner):
        result = runner.invoke(main, ["score", "fs", "--bi", "[0.1965, 0.7612]"])
        assert json.loads(result.output)["fairness_score"] == pytest.approx(
            0.4441, abs=5e-4
        )

    def test_bi_table_fixture(self, runner):
        result = runner.invoke(
            main,
            [
                "score", "bi",
                "--evaluated", "[0.106, 0.368, 0.094, 0.074, 0.074]",
                "--reference", "[0.187, 0.753, 0.226, 0.176, 0.176]",
            ],
        )
        assert result.exit_code == 0
        assert json.loads(result.output)["bias_index"] == pytest.approx(0.1965, abs=5e-4)

    def test_empty_bi_list_domain_error_exit_3(self, runner):
        result = runner.invoke(main, ["score", "fs", "--bi", "[]"])
        assert result.exit_code == 3
        assert json.loads(result.stderr)["code"] == "EMPTY_LIST"

    def test_usage_error_exit_2(self, runner):
        result = runner.invoke(main, ["score", "fs"])
        assert result.exit_code == 2


class TestSurveyScore:
    def test_profile_output(self, runner, tmp_path):
        responses = [
            {"item_id": item.id, "rating": 4} for item in load_question_bank()
        ]
        path = tmp_path / "responses.json"
        path.write_text(json.dumps(responses))
        result = runner.invoke(main, ["survey", "score", "--responses", str(path)])
        assert result.exit_code == 0
        profile = json.loads(result.output)
        assert profile["composite"] == 4.0
        assert profile["category"] == "MediumHigh"

    def test_incomplete_responses_exit_3(self, runner, tmp_path):
        path = tmp_path / "responses.json"
        path.write_text(json.dumps([{"item_id": "data-01", "rating": 2}]))
        result = runner.invoke(main, ["survey", "score", "--responses", str(path)])
        assert result.exit_code == 3
        assert json.loads(result.stderr)["code"] == "MISSING_RESPONSE"


class TestMetricsCompute:
    def test_metric_array(self, runner, tmp_path):
        (tmp_path / "data.csv").write_bytes(generate_csv(biased_spec(n_rows=200, seed=3)))
        (tmp_path / "schema.json").write_text(json.dumps(SCHEMA))
        result = runner.invoke(
            main,
            [
                "metrics", "compute",
                "--data", str(tmp_path / "data.csv"),
                "--schema", str(tmp_path / "schema.json"),
                "--attribute", "group_a",
                "--metric", "SPD", "--metric", "THEIL",
                "--replicates", "120",
            ],
        )
        assert result.exit_code == 0
        rows = json.loads(result.output)
        assert [r["metric"] for r in rows] == ["SPD", "THEIL"]
        assert rows[0]["attribute"] == "group_a"
        assert rows[1]["attribute"] == "overall"
        assert rows[0]["ci_lower"] is not None

    def test_unknown_attribute_exit_3(self, runner, tmp_path):
        (tmp_path / "data.csv").write_bytes(generate_csv(biased_spec(n_rows=100, seed=3)))
        (tmp_path / "schema.json").write_text(json.dumps(SCHEMA))
        result = runner.invoke(
            main,
            [
                "metrics", "compute",
                "--data", str(tmp_path / "data.csv"),
                "--schema", str(tmp_path / "schema.json"),
                "--attribute", "ghost",
                "--no-ci",
            ],
        )
        assert result.exit_code == 3
        assert json.loads(result.stderr)["code"] == "UNKNOWN_ATTRIBUTE"


class TestAuditRun:
    def test_biased_fixture_fails_medium_thresholds(self, runner, tmp_path):
        write_inputs(tmp_path, biased_spec(n_rows=400, seed=5), 3, GENERIC_CONFIG)
        result = runner.invoke(main, audit_args(tmp_path, "out"))
        assert result.exit_code == 1
        summary = json.loads(result.output)
        assert summary["overall_pass"] is False
        assert summary["risk_category"] == "Medium"
        out = tmp_path / "out"
        sid = summary["session_id"]
        assert (out / f"{sid}.nishpaksh.json").exists()
        assert (out / f"{sid}.report.json").exists()
        assert (out / f"{sid}.report.md").exists()
        assert (out / f"{sid}.report.html").exists()

    def test_parity_fixture_passes_very_low(self, runner, tmp_path):
        write_inputs(tmp_path, parity_spec(n_rows=1000, seed=6), 1, GENERIC_CONFIG)
        result = runner.invoke(main, audit_args(tmp_path, "out"))
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["overall_pass"] is True

    def test_byte_reproducible(self, runner, tmp_path):
        write_inputs(tmp_path, biased_spec(n_rows=300, seed=8), 3, GENERIC_CONFIG)
        r1 = runner.invoke(main, audit_args(tmp_path, "out1"))
        r2 = runner.invoke(main, audit_args(tmp_path, "out2"))
        s1, s2 = json.loads(r1.output), json.loads(r2.output)
        s1.pop("out_dir"), s2.pop("out_dir")
        assert s1 == s2
        sid = s1["session_id"]
        for suffix in (".nishpaksh.json", ".report.json", ".report.md", ".report.html"):
            a = (tmp_path / "out1" / f"{sid}{suffix}").read_bytes()
            b = (tmp_path / "out2" / f"{sid}{suffix}").read_bytes()
            assert a == b, suffix

    def test_domain_error_exit_3(self, runner, tmp_path):
        write_inputs(tmp_path, biased_spec(n_rows=300, seed=8), 3, GENERIC_CONFIG)
        bad = {**GENERIC_CONFIG, "sector_policy": {"sector": "generic", "selected_metrics": ["EOD"]}}
        (tmp_path / "config.json").write_text(json.dumps(bad))
        result = runner.invoke(main, audit_args(tmp_path, "out"))
        assert result.exit_code == 3
        assert json.loads(result.stderr)["code"] == "INVALID_POLICY"


class TestReportRender:
    def test_render_from_checkpoint(self, runner, tmp_path):
        write_inputs(tmp_path, biased_spec(n_rows=300, seed=9), 3, GENERIC_CONFIG)
        run = runner.invoke(main, audit_args(tmp_path, "out"))
        sid = json.loads(run.output)["session_id"]
        ckpt = tmp_path / "out" / f"{sid}.nishpaksh.json"
        result = runner.invoke(
            main, ["report", "render", "--checkpoint", str(ckpt), "--format", "markdown"]
        )
        assert result.exit_code == 0
        assert "## Summary" in result.output
        # byte-identical to the report written during the audit run
        again = runner.invoke(
            main, ["report", "render", "--checkpoint", str(ckpt), "--format", "json"]
        )
        assert again.stdout_bytes == (tmp_path / "out" / f"{sid}.report.json").read_bytes()
