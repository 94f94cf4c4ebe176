"""File-backed record store: one JSON document per record plus a manifest.

Layout under the store root:

    records/<img_id>.json   one document per record
    manifest.json           sorted list of member img_ids
    queue.json              review queue state (owned by the queue module)
    logs/                   append-only operational logs
    final_annotations.jsonl append-ordered human decisions

Writes are serialized per store through a single lock; records themselves
are immutable values, so readers never see torn state.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Iterator, Optional

from .records import MemeRecord, deserialize_record, serialize_record


class DuplicateRecord(Exception):
    pass


class RecordStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.records_dir = self.root / "records"
        self.logs_dir = self.root / "logs"
        self.records_dir.mkdir(parents=True, exist_ok=True)
        self.logs_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    # -- paths -------------------------------------------------------------

    def _record_path(self, img_id: str) -> Path:
        if "/" in img_id or img_id.startswith("."):
            raise ValueError(f"unsafe img_id {img_id!r}")
        return self.records_dir / f"{img_id}.json"

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    @property
    def decisions_path(self) -> Path:
        return self.root / "final_annotations.jsonl"

    # -- record access -----------------------------------------------------

    def exists(self, img_id: str) -> bool:
        return self._record_path(img_id).exists()

    def get(self, img_id: str) -> Optional[MemeRecord]:
        path = self._record_path(img_id)
        if not path.exists():
            return None
        return deserialize_record(path.read_bytes())

    def put(self, record: MemeRecord) -> None:
        """Insert or replace a record and refresh the manifest."""
        data = serialize_record(record)
        with self._lock:
            self._record_path(record.img_id).write_bytes(data)
            self._write_manifest()

    def add_new(self, record: MemeRecord) -> bool:
        """Insert only if absent (first writer wins). Returns False on dup."""
        data = serialize_record(record)
        with self._lock:
            path = self._record_path(record.img_id)
            if path.exists():
                return False
            path.write_bytes(data)
            self._write_manifest()
            return True

    def ids(self) -> list[str]:
        return sorted(p.stem for p in self.records_dir.glob("*.json"))

    def __iter__(self) -> Iterator[MemeRecord]:
        for img_id in self.ids():
            rec = self.get(img_id)
            if rec is not None:
                yield rec

    def __len__(self) -> int:
        return len(self.ids())

    def _write_manifest(self) -> None:
        ids = sorted(p.stem for p in self.records_dir.glob("*.json"))
        text = json.dumps({"records": ids}, indent=2) + "\n"
        self.manifest_path.write_text(text, encoding="utf-8")

    # -- logs --------------------------------------------------------------

    def append_log(self, name: str, line: str) -> None:
        with self._lock:
            with (self.logs_dir / name).open("a", encoding="utf-8") as fh:
                fh.write(line.rstrip("\n") + "\n")

    # -- decisions file ----------------------------------------------------

    def append_decision(self, doc: dict) -> None:
        """Durably append one decision document (fsync before returning)."""
        line = json.dumps(doc, ensure_ascii=False, sort_keys=True) + "\n"
        with self._lock:
            with self.decisions_path.open("a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())

    def decisions(self) -> list[dict]:
        if not self.decisions_path.exists():
            return []
        out = []
        for line in self.decisions_path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                out.append(json.loads(line))
        return out

    def stage_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for rec in self:
            counts[rec.stage.value] = counts.get(rec.stage.value, 0) + 1
        return counts
