"""Command-line entry point: one subcommand per pipeline stage plus
serve, eval, stats, and a full fixture pipeline runner.

Exit codes: 0 success, 1 operational failure, 2 bad usage or bad config.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import consensus, fixtures
from .fixtures import DigestAnnotator
from .annotate import HttpAnnotator, SubprocessAnnotator, annotate_corpus
from .cleaning import clean_corpus
from .config import PipelineConfig, load_config
from .consensus import VoteRecord, agreement_stats, arbitrate_corpus, validate_corpus
from .evaluation import (
    EmptySlice,
    GoldRecord,
    LengthMismatch,
    evaluate,
    load_predictions,
)
from .explication import explicate_corpus
from .extraction import MockOcr, ProviderUnavailable, SubprocessOcr, extract_corpus
from .ingestion import (
    CredentialError,
    DirectoryCollector,
    PaginatedHttpCollector,
    SourceUnreachable,
    collect,
)
from .queue import ReviewQueue, TASK_RATIONALE_EDIT
from .records import HateLabel, Stage
from .report import write_metric_report, write_stats_report
from .stats import alignment_stats, summarize
from .store import RecordStore


def _fail(message: str, code: int = 1) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_pipeline_config(path: str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        return load_config(path)
    except Exception as exc:
        _fail(f"bad config: {exc}", code=2)
    raise AssertionError("unreachable")


def _open_store(path: str) -> RecordStore:
    return RecordStore(path)


def _open_queue(store: RecordStore, config: PipelineConfig) -> ReviewQueue:
    return ReviewQueue(store.root / "queue.json", lease_seconds=config.lease_seconds)


def _build_provider(doc) -> object:
    if doc.kind == "mock":
        return DigestAnnotator(doc.provider_id)
    if doc.kind == "http":
        provider = HttpAnnotator(doc.provider_id, doc.endpoint, timeout=doc.timeout)
        return provider
    return SubprocessAnnotator(doc.provider_id, doc.command, timeout=doc.timeout)


def _build_ensemble(config: PipelineConfig) -> list:
    if not config.ensemble:
        return [DigestAnnotator(f"mock-{i}") for i in ("a", "b", "c")]
    return [_build_provider(p) for p in config.ensemble]


def _build_explicator(config: PipelineConfig):
    if config.explicator is None:
        return DigestAnnotator("mock-explicator")
    return _build_provider(config.explicator)


def _build_ocr(config: PipelineConfig):
    if config.ocr_kind == "subprocess":
        return SubprocessOcr(config.ocr_command)
    return MockOcr()


@click.group()
def main():
    """Meme corpus pipeline: collect, extract, clean, annotate, arbitrate,
    explicate, validate, and evaluate."""


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--source", required=True,
              help="Local directory of raw dumps, or a paginated JSON API URL.")
@click.option("--platform", default="4chan", show_default=True)
@click.option("--token", default=None, help="Bearer token for HTTP sources.")
@click.option("--fetch-images", is_flag=True, default=False)
def ingest(store_path, source, platform, token, fetch_images):
    """Pull raw image+post pairs from a source into the store."""
    store = _open_store(store_path)
    if source.startswith(("http://", "https://")):
        collector = PaginatedHttpCollector(source, platform=platform, token=token,
                                           fetch_images=fetch_images)
    else:
        directory = Path(source)
        if not directory.is_dir():
            _fail(f"source directory {source} not found", code=2)
        collector = DirectoryCollector(directory, platform=platform)
    try:
        report = collect(collector, store)
    except CredentialError as exc:
        _fail(f"credentials rejected: {exc}")
    except SourceUnreachable as exc:
        partial = exc.report
        if partial is not None:
            click.echo(f"partial: accepted {partial.accepted} of {partial.attempted} before failure")
        _fail(f"source unreachable: {exc}")
    click.echo(f"attempted {report.attempted}  accepted {report.accepted}  "
               f"duplicates {report.duplicates}  failures {report.failures}")


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--workers", default=None, type=int)
def extract(store_path, config_path, workers):
    """OCR every collected record (incremental; failures logged)."""
    config = _load_pipeline_config(config_path)
    store = _open_store(store_path)
    try:
        ocr = _build_ocr(config)
        report = extract_corpus(store, ocr, workers=workers or config.workers)
    except ProviderUnavailable as exc:
        _fail(f"OCR provider unavailable: {exc}")
    click.echo(f"processed {report.processed}  skipped {report.skipped_existing}  "
               f"failed {report.failed}")
    if report.failed:
        click.echo(f"failures logged to {report.failure_log_path}")


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", default=None, type=click.Path())
def clean(store_path, config_path):
    """Normalize text and length-gate every extracted record."""
    config = _load_pipeline_config(config_path)
    store = _open_store(store_path)
    report = clean_corpus(store, rules=config.rules, gates=config.gates)
    click.echo(f"cleaned {report.cleaned}  rejected {report.rejected}")
    for reason, count in sorted(report.rejects_by_reason.items()):
        click.echo(f"  {reason}: {count}")


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", default=None, type=click.Path())
def annotate(store_path, config_path):
    """Run the annotator ensemble over every cleaned record."""
    config = _load_pipeline_config(config_path)
    store = _open_store(store_path)
    ensemble = _build_ensemble(config)
    report = annotate_corpus(store, ensemble, include_post=config.include_post)
    click.echo(f"annotated {report.annotated}  skipped {report.skipped}")


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", default=None, type=click.Path())
def arbitrate(store_path, config_path):
    """Aggregate annotator responses; queue disagreements for review."""
    config = _load_pipeline_config(config_path)
    store = _open_store(store_path)
    queue = _open_queue(store, config)
    report = arbitrate_corpus(store, queue, quorum=config.quorum, tau=config.tau)
    click.echo(f"auto-accepted {report.auto_accepted}  queued {report.queued}")
    depth = queue.depth()
    click.echo("queue depth: " + "  ".join(f"{k}={v}" for k, v in sorted(depth.items())))


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--auto-finalize", is_flag=True, default=False,
              help="Finalize structurally valid model drafts without a human edit.")
def explicate(store_path, config_path, auto_finalize):
    """Draft rationales for arbitrated hate records; flagged drafts go to
    the rationale review queue."""
    config = _load_pipeline_config(config_path)
    store = _open_store(store_path)
    queue = _open_queue(store, config)
    provider = _build_explicator(config)
    report = explicate_corpus(store, provider, auto_finalize=auto_finalize)
    for record in store:
        if record.stage is Stage.ARBITRATED and record.draft is not None:
            queue.enqueue(record.img_id, TASK_RATIONALE_EDIT, record.draft)
    click.echo(f"drafted {report.drafted}  finalized {report.finalized}  "
               f"flagged {report.flagged}  passed through {report.passed_through}")


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--votes", "votes_path", default=None, type=click.Path(),
              help="Ballot file (JSONL); defaults to <store>/logs/votes.jsonl.")
@click.option("--threshold", default=2, show_default=True)
def validate(store_path, votes_path, threshold):
    """Apply validator ballots: accept or reject explicated records."""
    store = _open_store(store_path)
    path = Path(votes_path) if votes_path else store.logs_dir / "votes.jsonl"
    if not path.exists():
        _fail(f"no ballot file at {path}", code=2)
    by_img: dict[str, list[tuple[str, int]]] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        by_img.setdefault(doc["img_id"], []).append((doc["validator_id"], int(doc["vote"])))
    votes = [VoteRecord(img_id=k, votes=tuple(v)) for k, v in sorted(by_img.items())]
    try:
        report = validate_corpus(store, votes, accept_threshold=threshold)
        stats = agreement_stats(votes, accept_threshold=threshold)
    except (consensus.IncompleteBallot, ValueError) as exc:
        _fail(str(exc))
    click.echo(f"accepted {report.accepted}  rejected {report.rejected}")
    click.echo("per-rater agreement: "
               + "  ".join(f"{a * 100:.1f}%" for a in stats.per_rater_agreement))
    click.echo(f"unanimous {stats.unanimous_fraction * 100:.1f}%  "
               f"accepted {stats.accepted_fraction * 100:.1f}%")


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=None, type=int)
def serve(store_path, config_path, host, port):
    """Serve the review API over the store."""
    import uvicorn

    from .service import create_app

    config = _load_pipeline_config(config_path)
    store = _open_store(store_path)
    queue = _open_queue(store, config)
    app = create_app(store, queue)
    uvicorn.run(app, host=host, port=port or config.service_port)


def _gold_records(store: RecordStore, stages: tuple[Stage, ...]) -> list[GoldRecord]:
    golds = []
    for record in store:
        if record.stage not in stages or record.annotation is None:
            continue
        ann = record.annotation
        if ann.label is None:
            continue
        golds.append(GoldRecord(
            img_id=record.img_id,
            platform=record.platform,
            label=ann.label,
            categories=ann.categories,
            rationales=ann.rationales,
        ))
    return golds


@main.command("eval")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--predictions", "pred_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--platform", default=None, help="Restrict to one platform slice.")
@click.option("--gold-stage", default="validated", show_default=True,
              type=click.Choice(["validated", "explicated"]),
              help="Minimum stage a record needs to count as gold.")
def eval_cmd(store_path, pred_path, out_dir, platform, gold_stage):
    """Score a prediction file against the store's gold annotations and
    render the metric report (tables plus figures)."""
    store = _open_store(store_path)
    stages = (Stage.VALIDATED,) if gold_stage == "validated" else (Stage.VALIDATED, Stage.EXPLICATED)
    golds = _gold_records(store, stages)
    if not golds:
        _fail("no gold records at the requested stage", code=2)
    preds = load_predictions(pred_path)
    try:
        report = evaluate(golds, preds, platform=platform)
    except (EmptySlice, LengthMismatch) as exc:
        _fail(str(exc))
    write_metric_report(report, out_dir)
    click.echo(f"n={report.n_records}  overall={report.overall:.2f}  "
               f"acc={report.binary.accuracy:.2f}  f1={report.binary.f1:.2f}")
    click.echo(f"report written to {out_dir}")


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--stage", "min_stage", default="explicated", show_default=True,
              type=click.Choice(["cleaned", "arbitrated", "explicated", "validated"]))
def stats(store_path, out_dir, min_stage):
    """Summarize the corpus and render the statistics report."""
    from .records import stage_rank

    store = _open_store(store_path)
    threshold = stage_rank(Stage(min_stage))
    records = [r for r in store
               if r.stage is not Stage.REJECTED and stage_rank(r.stage) >= threshold]
    if not records:
        _fail("no records at the requested stage", code=2)
    summary = summarize(records)
    alignment = alignment_stats(records)
    write_stats_report(summary, alignment, out_dir)
    click.echo(f"total={summary.total}  "
               f"hate={summary.per_label.get(HateLabel.HATE.value, 0)}  "
               f"aligned={alignment.ratio * 100:.1f}%")
    click.echo(f"report written to {out_dir}")


@main.group()
def pipeline():
    """Multi-stage pipeline operations."""


@pipeline.command("run")
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--source", required=True, type=click.Path(exists=True),
              help="Directory holding one raw-dump subdirectory per platform.")
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--auto-finalize", is_flag=True, default=False)
def pipeline_run(store_path, source, config_path, auto_finalize):
    """Run collect through explicate in one go over a local source tree."""
    config = _load_pipeline_config(config_path)
    store = _open_store(store_path)
    queue = _open_queue(store, config)
    source_dir = Path(source)
    platforms = sorted(p.name for p in source_dir.iterdir() if p.is_dir())
    if not platforms:
        _fail(f"no platform subdirectories under {source}", code=2)
    for platform in platforms:
        report = collect(DirectoryCollector(source_dir / platform, platform=platform), store)
        click.echo(f"[ingest:{platform}] accepted {report.accepted}  "
                   f"duplicates {report.duplicates}")
    ex = extract_corpus(store, _build_ocr(config), workers=config.workers)
    click.echo(f"[extract] processed {ex.processed}  failed {ex.failed}")
    cl = clean_corpus(store, rules=config.rules, gates=config.gates)
    click.echo(f"[clean] cleaned {cl.cleaned}  rejected {cl.rejected}")
    an = annotate_corpus(store, _build_ensemble(config), include_post=config.include_post)
    click.echo(f"[annotate] annotated {an.annotated}")
    ar = arbitrate_corpus(store, queue, quorum=config.quorum, tau=config.tau)
    click.echo(f"[arbitrate] auto-accepted {ar.auto_accepted}  queued {ar.queued}")
    exp = explicate_corpus(store, _build_explicator(config), auto_finalize=auto_finalize)
    for record in store:
        if record.stage is Stage.ARBITRATED and record.draft is not None:
            queue.enqueue(record.img_id, TASK_RATIONALE_EDIT, record.draft)
    click.echo(f"[explicate] drafted {exp.drafted}  finalized {exp.finalized}  "
               f"flagged {exp.flagged}")
    counts = store.stage_counts()
    click.echo("stages: " + "  ".join(f"{k}={v}" for k, v in sorted(counts.items())))


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Directory to write the raw fixture dumps into.")
@click.option("--run-store", default=None, type=click.Path(),
              help="Also run the full scripted pipeline into this store.")
@click.option("--workers", default=4, show_default=True)
def fixture(out_dir, run_store, workers):
    """Write the bundled deterministic 50-record fixture (and optionally
    run the scripted pipeline over it)."""
    fixtures.write_fixture_raw(out_dir)
    click.echo(f"fixture written to {out_dir}")
    if run_store:
        store = fixtures.run_fixture_pipeline(run_store, out_dir, workers=workers)
        counts = store.stage_counts()
        click.echo("stages: " + "  ".join(f"{k}={v}" for k, v in sorted(counts.items())))


@main.group()
def config():
    """Configuration helpers."""


@config.command("validate")
@click.argument("path", type=click.Path())
def config_validate(path):
    """Validate a config file, reporting every violation found."""
    from .config import validate_config

    parsed, errors = validate_config(path)
    if errors:
        for error in errors:
            click.echo(f"invalid: {error}", err=True)
        sys.exit(2)
    click.echo(f"ok: store={parsed.store}  providers={len(parsed.ensemble)}")


if __name__ == "__main__":
    main()
