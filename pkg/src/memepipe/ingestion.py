"""Collector: pulls image+metadata pairs from a source into the store.

Platform clients hide behind one pull-based contract; the repository ships
a local-directory fixture collector and a generic paginated-HTTP collector
rather than live platform clients.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Iterator, Optional, Protocol

from .records import ALLOWED_RAW_FIELDS, MemeRecord, Platform, Stage
from .store import RecordStore


class MissingRequiredField(Exception):
    pass


class SourceUnreachable(Exception):
    """Network-level failure; the partial report so far rides along."""

    def __init__(self, message: str, report: "IngestionReport | None" = None):
        super().__init__(message)
        self.report = report


class CredentialError(Exception):
    pass


@dataclass
class IngestionReport:
    attempted: int = 0
    accepted: int = 0
    duplicates: int = 0
    privacy_stripped: int = 0
    failures: int = 0

    def check(self) -> None:
        assert self.attempted == self.accepted + self.duplicates + self.failures


@dataclass(frozen=True)
class RawItem:
    """One raw document plus its image bytes, as pulled from a platform."""

    doc: dict[str, Any]
    image: bytes = b""


class Collector(Protocol):
    platform: str

    def items(self) -> Iterator[RawItem]: ...


def strip_identifiers(raw: dict[str, Any]) -> dict[str, Any]:
    """Keep exactly the allowed metadata fields; drop everything else.

    The output never carries personal identifiers regardless of what the
    platform returned.
    """
    if "img_id" not in raw or not raw.get("img_id"):
        raise MissingRequiredField("img_id")
    if not raw.get("img_url") and not raw.get("img_path"):
        raise MissingRequiredField("img_url or img_path")
    return {k: raw[k] for k in ALLOWED_RAW_FIELDS if k in raw}


def collect(collector: Collector, store: RecordStore) -> IngestionReport:
    """Drain a collector into the store. Idempotent over img_id.

    Image bytes land under ``<store>/images/`` and records carry the
    store-relative path, keeping documents location-independent.
    """
    report = IngestionReport()
    images_dir = store.root / "images"
    images_dir.mkdir(parents=True, exist_ok=True)
    try:
        iterator = collector.items()
    except ConnectionError as exc:
        raise SourceUnreachable(str(exc), report) from exc
    while True:
        try:
            item = next(iterator)
        except StopIteration:
            break
        except ConnectionError as exc:
            raise SourceUnreachable(str(exc), report) from exc
        report.attempted += 1
        try:
            fields = strip_identifiers(item.doc)
        except MissingRequiredField:
            report.failures += 1
            continue
        if len(fields) < len(item.doc):
            report.privacy_stripped += 1
        img_id = str(fields["img_id"])
        img_path = ""
        if item.image:
            img_path = f"images/{img_id}.png"
        record = MemeRecord(
            img_id=img_id,
            platform=Platform.parse(getattr(collector, "platform", "")),
            post_id=str(fields.get("post_id", "")),
            post_time=int(fields.get("post_time", 0)),
            img_url=str(fields.get("img_url", "")),
            img_path=img_path or str(item.doc.get("img_path", "")),
            post_text=str(fields.get("post_text", "")),
            stage=Stage.COLLECTED,
        )
        if not store.add_new(record):
            report.duplicates += 1
            continue
        if item.image:
            (store.root / img_path).write_bytes(item.image)
        report.accepted += 1
    report.check()
    return report


class DirectoryCollector:
    """Fixture collector over a local directory of ``<id>.json`` + image files.

    The sidecar image shares the JSON file's stem and may carry any
    extension; missing images are allowed (URL-only records).
    """

    def __init__(self, directory: str | Path, platform: str = "4chan"):
        self.directory = Path(directory)
        self.platform = platform

    def items(self) -> Iterator[RawItem]:
        for doc_path in sorted(self.directory.glob("*.json")):
            doc = json.loads(doc_path.read_text(encoding="utf-8"))
            image = b""
            for ext in (".png", ".jpg", ".jpeg", ".gif", ".webp"):
                candidate = doc_path.with_suffix(ext)
                if candidate.exists():
                    image = candidate.read_bytes()
                    break
            yield RawItem(doc=doc, image=image)


class PaginatedHttpCollector:
    """Generic paginated JSON API collector.

    Expects each page to be ``{"items": [...], "next": url-or-null}`` where
    every item is a raw metadata document; images are fetched from each
    item's ``img_url`` when present.
    """

    def __init__(self, endpoint: str, platform: str, token: Optional[str] = None,
                 fetch_images: bool = False, client=None):
        import httpx

        self.endpoint = endpoint
        self.platform = platform
        self.token = token
        self.fetch_images = fetch_images
        self.client = client or httpx.Client(timeout=30.0)

    def items(self) -> Iterator[RawItem]:
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        url: Optional[str] = self.endpoint
        while url:
            try:
                resp = self.client.get(url, headers=headers)
            except Exception as exc:  # httpx transport errors
                raise ConnectionError(str(exc)) from exc
            if resp.status_code in (401, 403):
                raise CredentialError(f"{resp.status_code} from {url}")
            if resp.status_code >= 400:
                raise ConnectionError(f"{resp.status_code} from {url}")
            page = resp.json()
            for doc in page.get("items", []):
                image = b""
                if self.fetch_images and doc.get("img_url"):
                    img_resp = self.client.get(doc["img_url"])
                    if img_resp.status_code < 400:
                        image = img_resp.content
                yield RawItem(doc=doc, image=image)
            url = page.get("next")
