import json

import pytest
from click.testing import CliRunner

from memepipe import fixtures
from memepipe.cli import main
from memepipe.records import Stage
from memepipe.store import RecordStore


@pytest.fixture
def runner():
    return CliRunner()


class TestStageCommands:
    def test_ingest_extract_clean(self, runner, tmp_path, fixture_raw):
        store_dir = tmp_path / "store"
        for platform in ("4chan", "x", "weibo"):
            result = runner.invoke(main, ["ingest", "--store", str(store_dir),
                                          "--source", str(fixture_raw / platform),
                                          "--platform", platform])
            assert result.exit_code == 0, result.output
            assert "accepted" in result.output
        result = runner.invoke(main, ["extract", "--store", str(store_dir)])
        assert result.exit_code == 0, result.output
        result = runner.invoke(main, ["clean", "--store", str(store_dir)])
        assert result.exit_code == 0, result.output
        store = RecordStore(store_dir)
        counts = store.stage_counts()
        assert counts["cleaned"] == 40
        assert counts["rejected"] == 8

    def test_ingest_missing_source(self, runner, tmp_path):
        result = runner.invoke(main, ["ingest", "--store", str(tmp_path / "s"),
                                      "--source", str(tmp_path / "missing")])
        assert result.exit_code == 2

    def test_annotate_arbitrate_with_mock_ensemble(self, runner, tmp_path, fixture_raw):
        store_dir = tmp_path / "store"
        for platform in ("4chan", "x", "weibo"):
            runner.invoke(main, ["ingest", "--store", str(store_dir),
                                 "--source", str(fixture_raw / platform),
                                 "--platform", platform])
        runner.invoke(main, ["extract", "--store", str(store_dir)])
        runner.invoke(main, ["clean", "--store", str(store_dir)])
        result = runner.invoke(main, ["annotate", "--store", str(store_dir)])
        assert result.exit_code == 0, result.output
        result = runner.invoke(main, ["arbitrate", "--store", str(store_dir)])
        assert result.exit_code == 0, result.output
        assert "queue depth" in result.output


class TestPipelineRun:
    def test_full_run_matches_fixture_funnel(self, runner, tmp_path, fixture_raw):
        # The generic mock ensemble differs from the scripted fixture
        # ensemble, so only the pre-annotation funnel is fixed here.
        store_dir = tmp_path / "store"
        result = runner.invoke(main, ["pipeline", "run", "--store", str(store_dir),
                                      "--source", str(fixture_raw), "--auto-finalize"])
        assert result.exit_code == 0, result.output
        counts = RecordStore(store_dir).stage_counts()
        assert counts["rejected"] == 8
        assert counts["collected"] == 2
        assert sum(counts.values()) == 50


class TestFixtureCommand:
    def test_writes_and_runs(self, runner, tmp_path):
        result = runner.invoke(main, ["fixture", "--out", str(tmp_path / "raw"),
                                      "--run-store", str(tmp_path / "store")])
        assert result.exit_code == 0, result.output
        counts = RecordStore(tmp_path / "store").stage_counts()
        assert counts == fixtures.EXPECTED_STAGE_COUNTS


class TestValidateCommand:
    def test_votes_applied(self, runner, tmp_path, fixture_raw):
        store = fixtures.run_fixture_pipeline(tmp_path / "store", fixture_raw)
        explicated = [r.img_id for r in store if r.stage is Stage.EXPLICATED]
        lines = []
        for img_id in explicated:
            for validator in ("v1", "v2", "v3"):
                lines.append(json.dumps({"img_id": img_id, "validator_id": validator,
                                         "vote": 1}))
        (store.logs_dir / "votes.jsonl").write_text("\n".join(lines) + "\n")
        result = runner.invoke(main, ["validate", "--store", str(store.root)])
        assert result.exit_code == 0, result.output
        assert f"accepted {len(explicated)}" in result.output
        assert RecordStore(store.root).stage_counts()["validated"] == len(explicated)

    def test_missing_ballots(self, runner, tmp_path):
        RecordStore(tmp_path / "store")
        result = runner.invoke(main, ["validate", "--store", str(tmp_path / "store")])
        assert result.exit_code == 2


class TestEvalCommand:
    def test_eval_renders_report(self, runner, tmp_path, fixture_raw):
        store = fixtures.run_fixture_pipeline(tmp_path / "store", fixture_raw)
        preds = []
        for record in store:
            if record.stage is Stage.EXPLICATED and record.annotation:
                ann = record.annotation
                preds.append({"img_id": record.img_id, "label": ann.label,
                              "categories": list(ann.categories),
                              "rationale": ", ".join(ann.rationales)})
        pred_path = tmp_path / "preds.json"
        pred_path.write_text(json.dumps(preds))
        out_dir = tmp_path / "report"
        result = runner.invoke(main, ["eval", "--store", str(store.root),
                                      "--predictions", str(pred_path),
                                      "--out", str(out_dir),
                                      "--gold-stage", "explicated"])
        assert result.exit_code == 0, result.output
        assert (out_dir / "metrics.json").exists()
        assert (out_dir / "metrics.png").exists()
        doc = json.loads((out_dir / "metrics.json").read_text())
        assert doc["binary"]["accuracy"] == 100.0

    def test_no_gold_records(self, runner, tmp_path):
        RecordStore(tmp_path / "store")
        pred_path = tmp_path / "preds.json"
        pred_path.write_text("[]")
        result = runner.invoke(main, ["eval", "--store", str(tmp_path / "store"),
                                      "--predictions", str(pred_path),
                                      "--out", str(tmp_path / "out")])
        assert result.exit_code == 2


class TestStatsCommand:
    def test_stats_renders_report(self, runner, tmp_path, fixture_raw):
        store = fixtures.run_fixture_pipeline(tmp_path / "store", fixture_raw)
        out_dir = tmp_path / "report"
        result = runner.invoke(main, ["stats", "--store", str(store.root),
                                      "--out", str(out_dir)])
        assert result.exit_code == 0, result.output
        for name in ("stats.json", "stats.csv", "language_table.txt", "platforms.png"):
            assert (out_dir / name).exists(), name
        doc = json.loads((out_dir / "stats.json").read_text())
        assert doc["total"] == 26


class TestConfigCommand:
    def test_valid(self, runner, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("quorum: 3\n")
        result = runner.invoke(main, ["config", "validate", str(path)])
        assert result.exit_code == 0
        assert result.output.startswith("ok:")

    def test_invalid_exit_2(self, runner, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("quorum: 0\ntau: 9\n")
        result = runner.invoke(main, ["config", "validate", str(path)])
        assert result.exit_code == 2
