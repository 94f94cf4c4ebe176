"""HTTP service: review queue, record access, and pipeline progress.

Single-process FastAPI app over the file-backed store. Store mutations
run through the store/queue locks; decision writes are durable (fsynced)
before the response is sent.
"""

from __future__ import annotations

import json
import time
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import Response
from pydantic import BaseModel

from . import consensus, explication
from .queue import (
    DEFAULT_LEASE_SECONDS,
    TASK_BINARY_LABEL,
    TASK_CATEGORIES,
    TASK_RATIONALE_EDIT,
    TASK_VALIDATION_VOTE,
    VALID_TASKS,
    ReviewQueue,
)
from .records import serialize_record
from .store import RecordStore

VOTES_LOG = "votes.jsonl"


class DecisionIn(BaseModel):
    item_id: str
    reviewer_id: str
    payload: dict


def create_app(store: RecordStore, queue: Optional[ReviewQueue] = None,
               lease_seconds: float = DEFAULT_LEASE_SECONDS) -> FastAPI:
    queue = queue or ReviewQueue(store.root / "queue.json", lease_seconds=lease_seconds)
    app = FastAPI(title="memepipe review service")
    app.state.store = store
    app.state.queue = queue

    @app.get("/queue/next")
    def queue_next(task: str, reviewer: str):
        if task not in VALID_TASKS:
            raise HTTPException(400, f"unknown task {task!r}")
        if not reviewer:
            raise HTTPException(400, "reviewer required")
        item = queue.next_item(task, reviewer)
        if item is None:
            return {"empty": True}
        doc = item.to_doc()
        record = store.get(item.img_id)
        if record is not None:
            doc["record"] = {
                "img_id": record.img_id,
                "platform": record.platform,
                "post_text": record.post_text,
                "img_text": record.img_text,
                "draft": record.draft,
            }
        return doc

    @app.post("/decisions")
    def submit_decision(decision: DecisionIn):
        item = queue.get(decision.item_id)
        if item is None:
            raise HTTPException(404, "unknown item")
        if item.status != "pending":
            raise HTTPException(409, "item already decided")
        if not queue.holds_lease(decision.item_id, decision.reviewer_id):
            if item.lease_reviewer == decision.reviewer_id:
                raise HTTPException(410, "lease expired")
            raise HTTPException(409, "not the lease holder")

        payload = decision.payload
        outcome: dict = {}
        try:
            if item.task == TASK_BINARY_LABEL:
                result = consensus.apply_human_decision(
                    store, queue, item.img_id, TASK_BINARY_LABEL, payload.get("label"))
                outcome = {"label": result.label_outcome.label}
            elif item.task == TASK_CATEGORIES:
                result = consensus.apply_human_decision(
                    store, queue, item.img_id, TASK_CATEGORIES, payload.get("categories", []))
                outcome = {
                    "categories": list(result.category_outcome.categories),
                    "rejected": result.rule_trace == "human categories: reject all",
                }
            elif item.task == TASK_RATIONALE_EDIT:
                final = explication.finalize_rationale(
                    store, item.img_id, payload.get("phrases", []))
                queue.complete(item.item_id)
                outcome = {"phrases": list(final.phrases)}
            elif item.task == TASK_VALIDATION_VOTE:
                vote = int(payload.get("vote", -1))
                if vote not in (0, 1):
                    raise HTTPException(422, "vote must be 0 or 1")
                store.append_log(VOTES_LOG, _vote_line(item.img_id, decision.reviewer_id, vote))
                queue.complete(item.item_id)
                outcome = {"vote": vote}
            else:  # pragma: no cover - VALID_TASKS guard in enqueue
                raise HTTPException(400, f"unroutable task {item.task!r}")
        except explication.StructuralViolation as exc:
            raise HTTPException(422, f"structural violation: {exc}") from exc
        except consensus.NotPending as exc:
            raise HTTPException(409, str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from exc

        store.append_decision({
            "img_id": item.img_id,
            "task": item.task,
            "outcome": outcome,
            "decided_by": decision.reviewer_id,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        })
        return {"acknowledged": True, "item_id": item.item_id, "outcome": outcome}

    @app.get("/progress")
    def progress():
        return {"stages": store.stage_counts(), "queue": queue.depth(),
                "total": len(store)}

    @app.get("/records/{img_id}")
    def get_record(img_id: str):
        record = store.get(img_id)
        if record is None:
            raise HTTPException(404, "no such record")
        return Response(content=serialize_record(record), media_type="application/json")

    @app.get("/static/images/{img_id}")
    def get_image(img_id: str):
        record = store.get(img_id)
        if record is None or not record.img_path:
            raise HTTPException(404, "no image")
        path = Path(record.img_path)
        if not path.is_absolute():
            path = store.root / path
        if not path.exists():
            raise HTTPException(404, "image file missing")
        return Response(content=path.read_bytes(), media_type="image/png")

    return app


def _vote_line(img_id: str, validator_id: str, vote: int) -> str:
    return json.dumps({"img_id": img_id, "validator_id": validator_id, "vote": vote},
                      sort_keys=True)
