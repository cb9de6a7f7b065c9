import json

import pytest

from dce import cli, harness

from conftest import FIXTURES


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestPatterns:
    def test_prints_catalog(self, capsys):
        code, out, _ = run_cli(capsys, "patterns")
        assert code == 0
        entries = json.loads(out)
        assert len(entries) >= 16

    def test_writes_forge_json(self, capsys, tmp_path):
        target = tmp_path / "forge.json"
        code, _, _ = run_cli(capsys, "patterns", "--out", str(target))
        assert code == 0
        assert json.loads(target.read_text(encoding="utf-8"))


class TestSynth:
    def test_writes_dataset_and_summary(self, capsys, tmp_path):
        out = tmp_path / "data.jsonl"
        code, stdout, _ = run_cli(
            capsys,
            "synth",
            "--corpus", str(FIXTURES / "corpus"),
            "--out", str(out),
            "--seed", "7",
            "--ratios", "4:1:1",
        )
        assert code == 0
        assert "wrote" in stdout
        records = harness.read_dataset(out)
        assert records

    def test_rerun_is_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for target in (a, b):
            run_cli(
                capsys, "synth", "--corpus", str(FIXTURES / "corpus"),
                "--out", str(target), "--seed", "7",
            )
        assert a.read_bytes() == b.read_bytes()


class TestAnalyze:
    def test_oracle_only_jsonl(self, capsys):
        code, out, _ = run_cli(
            capsys, "analyze", str(FIXTURES / "pad_fields.py"), "--oracle-only"
        )
        assert code == 0
        findings = [json.loads(line) for line in out.splitlines()]
        assert {"id": "pad_fields.py", "index": 4, "type": "unused",
                "reason": "never_read"} in findings

    def test_replay_analysis_to_stdout(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "analyze",
            "--data", str(FIXTURES / "analyze_records.jsonl"),
            "--classifier", "fixture",
            "--replay", str(FIXTURES / "replay"),
            "--deterministic",
        )
        assert code == 0
        reports = [json.loads(line) for line in out.splitlines()]
        assert len(reports) == 12
        assert all(r["error"] is None for r in reports)

    def test_strict_mode_fails_on_missing_transport(self, capsys):
        code, _, _ = run_cli(
            capsys,
            "--strict",
            "analyze",
            "--data", str(FIXTURES / "analyze_records.jsonl"),
            "--classifier", "fixture",
        )
        assert code == 1

    def test_nothing_to_analyze_errors(self, capsys):
        code, _, err = run_cli(capsys, "analyze")
        assert code == 1
        assert "nothing to analyze" in err

    def test_usage_error_exits_2(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["synth"])  # missing required flags
        assert excinfo.value.code == 2


class TestAttribute:
    def test_per_line_jsonl(self, capsys, tmp_path):
        # a file with a heuristic-visible unused line
        target = tmp_path / "sample.py"
        target.write_text("waste = 1\nprint('x')\n", encoding="utf-8")
        code, out, _ = run_cli(
            capsys, "attribute", str(target), "--classifier", "heuristic"
        )
        assert code == 0
        rows = [json.loads(line) for line in out.splitlines()]
        assert [r["index"] for r in rows] == [1, 2]
        assert set(rows[0]) == {"index", "a_unused", "a_unreachable", "selected"}
        assert rows[0]["a_unused"] > 0
        assert rows[0]["selected"] == ["unused"]


class TestEval:
    def test_metrics_table_and_json(self, capsys, tmp_path):
        metrics_path = tmp_path / "metrics.json"
        code, out, _ = run_cli(
            capsys,
            "eval",
            "--data", str(FIXTURES / "analyze_records.jsonl"),
            "--split", "test",
            "--mode", "no_llm",
            "--classifier", "fixture",
            "--metrics-out", str(metrics_path),
            "--csv", str(tmp_path / "metrics.csv"),
        )
        assert code == 0
        assert "accuracy" in out
        payload = json.loads(metrics_path.read_text(encoding="utf-8"))
        assert set(payload) == {
            "per_class", "accuracy", "localization", "support", "n_records",
        }
        csv_lines = (tmp_path / "metrics.csv").read_text().splitlines()
        assert csv_lines[0] == harness.CSV_HEADER


class TestAudit:
    def test_audit_report_json(self, capsys, tmp_path):
        fixed = tmp_path / "fixed.py"
        source = (FIXTURES / "pad_fields.py").read_text(encoding="utf-8")
        fixed.write_text(
            source.replace("    s3 = s1 + '<EOS>'  # Unused Variable\n", ""),
            encoding="utf-8",
        )
        gold = tmp_path / "gold.json"
        gold.write_text('[[4, "unused"]]', encoding="utf-8")
        code, out, _ = run_cli(
            capsys,
            "audit",
            "--original", str(FIXTURES / "pad_fields.py"),
            "--fixed", str(fixed),
            "--gold", str(gold),
        )
        assert code == 0
        report = json.loads(out)
        assert report["removed_all_gold"] is True
        assert report["diff_confinement"] == 1.0


class TestConfigPrecedence:
    def test_flag_beats_env_beats_config(self, capsys, tmp_path, monkeypatch):
        config = tmp_path / "conf.json"
        config.write_text('{"tau": 4.0}', encoding="utf-8")
        target = tmp_path / "sample.py"
        target.write_text("waste = 1\nprint('x')\n", encoding="utf-8")

        captured = {}
        import dce.cli as cli_mod

        original = cli_mod._pipeline_config

        def spy(args, cfg):
            result = original(args, cfg)
            captured["tau"] = result.tau
            return result

        monkeypatch.setattr(cli_mod, "_pipeline_config", spy)

        run_cli(capsys, "--config", str(config), "attribute", str(target))
        assert captured["tau"] == 4.0

        monkeypatch.setenv("DCE_TAU", "3.0")
        run_cli(capsys, "--config", str(config), "attribute", str(target))
        assert captured["tau"] == 3.0

        run_cli(
            capsys, "--config", str(config), "attribute", str(target), "--tau", "2.5"
        )
        assert captured["tau"] == 2.5
