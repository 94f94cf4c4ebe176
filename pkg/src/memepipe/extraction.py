"""Extractor: OCR over collected images, parallel with incremental skip.

The OCR engine is a provider contract (image bytes in, lines out); shipped
providers are a subprocess adapter for an external OCR command and a
deterministic text-passthrough mock for tests and fixtures.
"""

from __future__ import annotations

import subprocess
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Protocol

from .records import MemeRecord, Stage
from .store import RecordStore

FAILURE_LOG = "extract_failures.log"
DEFAULT_SEPARATOR = " [SEP] "


class OcrError(Exception):
    """Per-image OCR failure; logged and non-fatal."""


class ProviderUnavailable(Exception):
    """The OCR provider cannot run at all; fatal for the stage."""


@dataclass
class OcrResult:
    lines: list[str]
    provider_id: str
    elapsed_ms: float = 0.0


@dataclass
class ExtractionReport:
    processed: int = 0
    skipped_existing: int = 0
    failed: int = 0
    failure_log_path: str = ""

    def total(self) -> int:
        return self.processed + self.skipped_existing + self.failed


class OcrProvider(Protocol):
    provider_id: str

    def recognize(self, image: bytes) -> OcrResult: ...


class MockOcr:
    """Reads the 'image' bytes as UTF-8 text and returns its lines.

    Fixture images are plain text files; a file whose first line is
    ``FAIL`` simulates an OCR failure. Deterministic by construction.
    """

    provider_id = "mock-ocr"

    def recognize(self, image: bytes) -> OcrResult:
        text = image.decode("utf-8", errors="replace")
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if lines and lines[0].strip() == "FAIL":
            raise OcrError("scripted failure")
        return OcrResult(lines=lines, provider_id=self.provider_id)


class SubprocessOcr:
    """Adapter for an external OCR command.

    Protocol: the image path is appended to the command line; the tool
    prints one recognized line per stdout line (UTF-8) and exits non-zero
    on failure.
    """

    def __init__(self, command: list[str], timeout: float = 120.0):
        if not command:
            raise ProviderUnavailable("empty OCR command")
        self.command = command
        self.timeout = timeout
        self.provider_id = Path(command[0]).name

    def recognize(self, image: bytes) -> OcrResult:
        import tempfile

        start = time.monotonic()
        with tempfile.NamedTemporaryFile(suffix=".png") as tmp:
            tmp.write(image)
            tmp.flush()
            try:
                proc = subprocess.run(
                    self.command + [tmp.name],
                    capture_output=True,
                    timeout=self.timeout,
                )
            except FileNotFoundError as exc:
                raise ProviderUnavailable(str(exc)) from exc
            except subprocess.TimeoutExpired as exc:
                raise OcrError(f"timeout after {self.timeout}s") from exc
        if proc.returncode != 0:
            raise OcrError(proc.stderr.decode("utf-8", errors="replace").strip())
        lines = [
            ln for ln in proc.stdout.decode("utf-8", errors="replace").splitlines() if ln.strip()
        ]
        return OcrResult(lines=lines, provider_id=self.provider_id, elapsed_ms=(time.monotonic() - start) * 1000)


def extract_corpus(store: RecordStore, ocr: OcrProvider, workers: int = 4) -> ExtractionReport:
    """Run OCR over every COLLECTED record; skip records with img_text.

    Failures are appended to the failure log and leave the record at
    COLLECTED for later reprocessing. Results are worker-count independent:
    each record is handled exactly once and writes are per-record.
    """
    if workers < 1:
        raise ValueError("workers must be positive")
    report = ExtractionReport(failure_log_path=str(store.logs_dir / FAILURE_LOG))
    report_lock = threading.Lock()
    ids = store.ids()

    def handle(img_id: str) -> None:
        record = store.get(img_id)
        if record is None:
            return
        if record.img_text is not None:
            with report_lock:
                report.skipped_existing += 1
            return
        if record.stage is not Stage.COLLECTED:
            with report_lock:
                report.skipped_existing += 1
            return
        try:
            image = b""
            if record.img_path:
                path = Path(record.img_path)
                if not path.is_absolute():
                    path = store.root / path
                image = path.read_bytes()
            result = ocr.recognize(image)
        except ProviderUnavailable:
            raise
        except Exception as exc:
            stamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
            store.append_log(FAILURE_LOG, f"{img_id}\t{stamp}\t{exc}")
            with report_lock:
                report.failed += 1
            return
        updated = replace(record.with_stage(Stage.EXTRACTED), img_text="\n".join(result.lines))
        store.put(updated)
        with report_lock:
            report.processed += 1

    if workers == 1:
        for img_id in ids:
            handle(img_id)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(handle, img_id) for img_id in ids]
            for fut in futures:
                fut.result()
    return report


def combined_text(record: MemeRecord, separator: str = DEFAULT_SEPARATOR) -> str:
    """Join post text and image text into one textual representation."""
    if record.img_text is None:
        raise ValueError(f"record {record.img_id} has no img_text yet")
    if not record.img_text:
        return record.post_text
    if not record.post_text:
        return record.img_text
    return record.post_text + separator + record.img_text
