import csv
import json

from memepipe.evaluation import (
    GoldRecord,
    PredictionRecord,
    evaluate,
)
from memepipe.records import FinalAnnotation, MemeRecord, Stage
from memepipe.report import write_metric_report, write_stats_report
from memepipe.stats import alignment_stats, summarize


def _metric_report():
    golds = [GoldRecord("a", "x", "hate", ("race",), ("mock a group",)),
             GoldRecord("b", "x", "normal")]
    preds = [PredictionRecord("a", "hate", ("race",), "mock a group"),
             PredictionRecord("b", "normal")]
    return evaluate(golds, preds)


class TestMetricReport:
    def test_writes_all_artifacts(self, tmp_path):
        out = write_metric_report(_metric_report(), tmp_path / "out")
        for name in ("metrics.json", "metrics.csv", "metrics.txt", "metrics.png"):
            assert (out / name).exists(), name

    def test_csv_and_json_agree(self, tmp_path):
        report = _metric_report()
        out = write_metric_report(report, tmp_path / "out")
        doc = json.loads((out / "metrics.json").read_text())
        with (out / "metrics.csv").open() as fh:
            rows = list(csv.reader(fh))
        header, values = rows
        by_label = dict(zip(header, values))
        assert float(by_label["Overall"]) == round(doc["overall"], 2)
        assert float(by_label["Acc"]) == round(doc["binary"]["accuracy"], 2)
        assert float(by_label["BLEU"]) == round(doc["rationale"]["bleu"], 2)

    def test_png_is_real_image(self, tmp_path):
        out = write_metric_report(_metric_report(), tmp_path / "out")
        assert (out / "metrics.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def _corpus():
    return [
        MemeRecord(img_id="a", platform="x", post_text="hello there", img_text="top text",
                   stage=Stage.VALIDATED,
                   annotation=FinalAnnotation(img_id="a", label="hate",
                                              categories=("race", "violence"),
                                              rationales=("mock a group",))),
        MemeRecord(img_id="b", platform="weibo", post_text="你好世界", img_text="图片文字",
                   stage=Stage.VALIDATED,
                   annotation=FinalAnnotation(img_id="b", label="normal")),
    ]


class TestStatsReport:
    def test_writes_all_artifacts(self, tmp_path):
        records = _corpus()
        out = write_stats_report(summarize(records), alignment_stats(records),
                                 tmp_path / "out")
        for name in ("stats.json", "stats.csv", "language_table.txt",
                     "platforms.png", "categories.png"):
            assert (out / name).exists(), name

    def test_json_content(self, tmp_path):
        records = _corpus()
        out = write_stats_report(summarize(records), alignment_stats(records),
                                 tmp_path / "out")
        doc = json.loads((out / "stats.json").read_text())
        assert doc["total"] == 2
        assert doc["per_platform"] == {"x": 1, "weibo": 1}
        assert doc["alignment"]["aligned"] == 2

    def test_alignment_optional(self, tmp_path):
        out = write_stats_report(summarize(_corpus()), None, tmp_path / "out")
        doc = json.loads((out / "stats.json").read_text())
        assert "alignment" not in doc
