"""Report rendering: delimited output plus matplotlib figures.

Every report path writes machine-readable files (JSON + CSV) alongside
PNG figures into the chosen output directory.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .evaluation import MetricReport
from .stats import AlignmentStats, CorpusSummary

METRIC_COLUMNS = [
    ("overall", "Overall"),
    ("binary.accuracy", "Acc"),
    ("binary.precision", "P"),
    ("binary.recall", "R"),
    ("binary.f1", "F1"),
    ("multilabel.macro_p", "Macro-P"),
    ("multilabel.macro_r", "Macro-R"),
    ("multilabel.macro_f1", "Macro-F1"),
    ("multilabel.hamming_loss", "HL"),
    ("multilabel.subset_accuracy", "Subset Acc"),
    ("rationale.bleu", "BLEU"),
    ("rationale.rouge_l", "ROUGE"),
    ("rationale.bert_score_f1", "BERTScore"),
]


def _flatten(report: MetricReport) -> dict[str, float]:
    doc = report.to_doc()
    flat = {"overall": doc["overall"]}
    for group in ("binary", "multilabel", "rationale"):
        for key, value in doc[group].items():
            flat[f"{group}.{key}"] = value
    return flat


def write_metric_report(report: MetricReport, out_dir: str | Path, name: str = "metrics") -> Path:
    """Emit metrics.json, metrics.csv, an aligned text table, and a bar
    figure. Returns the output directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    flat = _flatten(report)

    (out / f"{name}.json").write_text(
        json.dumps(report.to_doc(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    with (out / f"{name}.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([label for _, label in METRIC_COLUMNS])
        writer.writerow([f"{flat[key]:.2f}" for key, _ in METRIC_COLUMNS])

    header = "  ".join(f"{label:>10}" for _, label in METRIC_COLUMNS)
    values = "  ".join(f"{flat[key]:>10.2f}" for key, _ in METRIC_COLUMNS)
    title = f"slice={report.slice_platform or 'all'}  n={report.n_records}"
    (out / f"{name}.txt").write_text(f"{title}\n{header}\n{values}\n", encoding="utf-8")

    fig, ax = plt.subplots(figsize=(10, 4))
    labels = [label for _, label in METRIC_COLUMNS]
    ax.bar(labels, [flat[key] for key, _ in METRIC_COLUMNS], color="steelblue")
    ax.set_ylabel("percent")
    ax.set_title(f"Metric report ({title})")
    ax.tick_params(axis="x", rotation=45)
    fig.tight_layout()
    fig.savefig(out / f"{name}.png", dpi=120)
    plt.close(fig)
    return out


def write_stats_report(summary: CorpusSummary, alignment: Optional[AlignmentStats],
                       out_dir: str | Path) -> Path:
    """Emit stats.json, stats.csv, the language table, and distribution
    figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    doc = {
        "total": summary.total,
        "per_platform": summary.per_platform,
        "per_label": summary.per_label,
        "per_category": summary.per_category,
        "multi_label_fraction": summary.multi_label_fraction,
        "pair_cooccurrence": {" + ".join(k): v for k, v in summary.pair_cooccurrence.items()},
        "post_length": vars(summary.post_length),
        "rationale_length": vars(summary.rationale_length),
        "language": summary.language,
    }
    if alignment is not None:
        doc["alignment"] = {"aligned": alignment.aligned, "misaligned": alignment.misaligned,
                            "ratio": alignment.ratio}
    (out / "stats.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    with (out / "stats.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["statistic", "value"])
        writer.writerow(["total", summary.total])
        for platform, count in sorted(summary.per_platform.items()):
            writer.writerow([f"platform:{platform}", count])
        for label, count in sorted(summary.per_label.items()):
            writer.writerow([f"label:{label}", count])
        for category, count in sorted(summary.per_category.items()):
            writer.writerow([f"category:{category}", count])
        writer.writerow(["multi_label_fraction", f"{summary.multi_label_fraction:.4f}"])
        writer.writerow(["post_length_mean", f"{summary.post_length.mean:.2f}"])
        writer.writerow(["rationale_length_mean", f"{summary.rationale_length.mean:.2f}"])
        if alignment is not None:
            writer.writerow(["aligned_pairs", alignment.aligned])
            writer.writerow(["misaligned_pairs", alignment.misaligned])
            writer.writerow(["alignment_ratio", f"{alignment.ratio:.3f}"])

    lines = ["Language statistics", ""]
    for side in ("post", "image"):
        lines.append(f"{side.capitalize()} text language distribution")
        for key, count in sorted(summary.language.get(side, {}).items()):
            lines.append(f"  {key}: {count}")
        lines.append("")
    if alignment is not None:
        lines.append(f"Language-aligned pairs: {alignment.aligned}")
        lines.append(f"Language-misaligned pairs: {alignment.misaligned}")
        lines.append(f"Alignment ratio: {alignment.ratio * 100:.1f}%")
    (out / "language_table.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    if summary.per_platform:
        fig, ax = plt.subplots(figsize=(6, 4))
        items = sorted(summary.per_platform.items())
        ax.bar([k for k, _ in items], [v for _, v in items], color="darkseagreen")
        ax.set_title("Records per platform")
        fig.tight_layout()
        fig.savefig(out / "platforms.png", dpi=120)
        plt.close(fig)
    if summary.per_category:
        fig, ax = plt.subplots(figsize=(8, 4))
        items = sorted(summary.per_category.items(), key=lambda kv: -kv[1])
        ax.bar([k for k, _ in items], [v for _, v in items], color="indianred")
        ax.set_title("Hate category distribution")
        ax.tick_params(axis="x", rotation=45)
        fig.tight_layout()
        fig.savefig(out / "categories.png", dpi=120)
        plt.close(fig)
    return out
