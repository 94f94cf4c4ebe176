"""File-backed review queue with per-item leases.

Items are keyed ``<img_id>:<task>`` so enqueueing the same work twice is
idempotent. An item may be leased to exactly one reviewer at a time; an
expired lease makes the item available again.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

TASK_BINARY_LABEL = "binary"
TASK_CATEGORIES = "categories"
TASK_RATIONALE_EDIT = "rationale"
TASK_VALIDATION_VOTE = "vote"

VALID_TASKS = (TASK_BINARY_LABEL, TASK_CATEGORIES, TASK_RATIONALE_EDIT, TASK_VALIDATION_VOTE)

DEFAULT_LEASE_SECONDS = 600


@dataclass
class QueueItem:
    item_id: str
    img_id: str
    task: str
    suggestions: Any = None
    order: int = 0
    status: str = "pending"  # pending | done
    lease_reviewer: Optional[str] = None
    lease_expires_at: Optional[float] = None

    def to_doc(self) -> dict:
        doc = {
            "item_id": self.item_id,
            "img_id": self.img_id,
            "task": self.task,
            "suggestions": self.suggestions,
            "order": self.order,
            "status": self.status,
        }
        if self.lease_reviewer is not None:
            doc["lease"] = {"reviewer_id": self.lease_reviewer, "expires_at": self.lease_expires_at}
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "QueueItem":
        lease = doc.get("lease") or {}
        return cls(
            item_id=doc["item_id"],
            img_id=doc["img_id"],
            task=doc["task"],
            suggestions=doc.get("suggestions"),
            order=doc.get("order", 0),
            status=doc.get("status", "pending"),
            lease_reviewer=lease.get("reviewer_id"),
            lease_expires_at=lease.get("expires_at"),
        )


class ReviewQueue:
    def __init__(self, path: str | Path, lease_seconds: float = DEFAULT_LEASE_SECONDS,
                 clock=time.time):
        self.path = Path(path)
        self.lease_seconds = lease_seconds
        self.clock = clock
        self._lock = threading.Lock()
        self._items: dict[str, QueueItem] = {}
        self._next_order = 0
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        docs = json.loads(self.path.read_text(encoding="utf-8"))
        for doc in docs.get("items", []):
            item = QueueItem.from_doc(doc)
            self._items[item.item_id] = item
            self._next_order = max(self._next_order, item.order + 1)

    def _save(self) -> None:
        docs = {"items": [it.to_doc() for it in sorted(self._items.values(), key=lambda i: i.order)]}
        self.path.write_text(json.dumps(docs, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
                             encoding="utf-8")

    @staticmethod
    def item_id_for(img_id: str, task: str) -> str:
        return f"{img_id}:{task}"

    def enqueue(self, img_id: str, task: str, suggestions: Any = None) -> bool:
        """Add an item; a duplicate (same img_id+task) is ignored."""
        if task not in VALID_TASKS:
            raise ValueError(f"unknown task {task!r}")
        item_id = self.item_id_for(img_id, task)
        with self._lock:
            if item_id in self._items:
                return False
            self._items[item_id] = QueueItem(
                item_id=item_id, img_id=img_id, task=task,
                suggestions=suggestions, order=self._next_order,
            )
            self._next_order += 1
            self._save()
            return True

    def next_item(self, task: str, reviewer_id: str) -> Optional[QueueItem]:
        """Lease the oldest unleased pending item of the task, or None."""
        if not reviewer_id:
            raise ValueError("reviewer_id must be non-empty")
        now = self.clock()
        with self._lock:
            for item in sorted(self._items.values(), key=lambda i: i.order):
                if item.status != "pending" or item.task != task:
                    continue
                leased = (
                    item.lease_reviewer is not None
                    and item.lease_expires_at is not None
                    and item.lease_expires_at > now
                )
                if leased and item.lease_reviewer != reviewer_id:
                    continue
                item.lease_reviewer = reviewer_id
                item.lease_expires_at = now + self.lease_seconds
                self._save()
                return item
            return None

    def holds_lease(self, item_id: str, reviewer_id: str) -> bool:
        item = self._items.get(item_id)
        if item is None or item.status != "pending":
            return False
        return (
            item.lease_reviewer == reviewer_id
            and item.lease_expires_at is not None
            and item.lease_expires_at > self.clock()
        )

    def get(self, item_id: str) -> Optional[QueueItem]:
        return self._items.get(item_id)

    def complete(self, item_id: str) -> None:
        with self._lock:
            item = self._items.get(item_id)
            if item is None:
                return
            item.status = "done"
            item.lease_reviewer = None
            item.lease_expires_at = None
            self._save()

    def pending(self, task: Optional[str] = None) -> list[QueueItem]:
        return [
            it for it in sorted(self._items.values(), key=lambda i: i.order)
            if it.status == "pending" and (task is None or it.task == task)
        ]

    def depth(self) -> dict[str, int]:
        out = {t: 0 for t in VALID_TASKS}
        for item in self._items.values():
            if item.status == "pending":
                out[item.task] += 1
        return out
