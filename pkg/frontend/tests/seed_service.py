"""Seed a store with a 20-item mixed review queue and serve it.

Usage: python3 seed_service.py <store_dir> <port>

Layout of the queue (FIFO per task):
  8 binary items   - three-way label disagreement, clear category majority
  5 category items - unanimous hate label, three-way category dispute
  4 rationale items - arbitrated hate records with drafts (first draft is
                      flagged over the 30-word limit)
  3 vote items     - explicated records awaiting validator ballots
"""

import sys

import uvicorn

from memepipe.annotate import TASK_BINARY, TASK_CATEGORIES, AnnotatorResponse
from memepipe.consensus import decide_record, enqueue_review
from memepipe.queue import ReviewQueue
from memepipe.records import FinalAnnotation, MemeRecord, Stage
from memepipe.service import create_app
from memepipe.store import RecordStore

OVER_LIMIT_DRAFT = " ".join(f"word{i}" for i in range(31))


def binary_docs(labels):
    return [
        AnnotatorResponse(provider_id=f"ann{i + 1}", task=TASK_BINARY,
                          label=label, label_confidence=0.9).to_doc()
        for i, label in enumerate(labels)
    ]


def category_docs(sets):
    return [
        AnnotatorResponse(provider_id=f"ann{i + 1}", task=TASK_CATEGORIES,
                          categories=tuple(cats),
                          category_confidences=tuple(0.9 for _ in cats)).to_doc()
        for i, cats in enumerate(sets)
    ]


def seed(store, queue):
    for i in range(8):
        record = MemeRecord(
            img_id=f"b{i + 1}", platform="x", post_text=f"ambiguous post {i + 1}",
            img_text=f"caption {i + 1}", stage=Stage.ANNOTATED,
            responses=tuple(binary_docs(["hate", "hate", "normal"])
                            + category_docs([["race"], ["race"], ["race"]])),
        )
        store.put(record)
        enqueue_review(decide_record(record), record, queue)

    for i in range(5):
        record = MemeRecord(
            img_id=f"c{i + 1}", platform="weibo", post_text=f"contested post {i + 1}",
            img_text=f"caption {i + 1}", stage=Stage.ANNOTATED,
            responses=tuple(binary_docs(["hate", "hate", "hate"])
                            + category_docs([["religion"], ["politics"], ["violence"]])),
        )
        store.put(record)
        enqueue_review(decide_record(record), record, queue)

    for i in range(4):
        phrases = [OVER_LIMIT_DRAFT] if i == 0 else ["mocks the target group"]
        flags = ["WordLimitExceeded"] if i == 0 else []
        record = MemeRecord(
            img_id=f"r{i + 1}", platform="4chan", post_text=f"hateful post {i + 1}",
            img_text=f"caption {i + 1}", stage=Stage.ARBITRATED,
            annotation=FinalAnnotation(img_id=f"r{i + 1}", label="hate",
                                       categories=("race",), decided_by="auto_consensus"),
            draft={"phrases": phrases, "origin": "model_draft", "flags": flags},
        )
        store.put(record)
        queue.enqueue(record.img_id, "rationale")

    for i in range(3):
        record = MemeRecord(
            img_id=f"v{i + 1}", platform="x", post_text=f"finished post {i + 1}",
            img_text=f"caption {i + 1}", stage=Stage.EXPLICATED,
            annotation=FinalAnnotation(img_id=f"v{i + 1}", label="hate",
                                       categories=("politics",),
                                       rationales=("ridicules the politician",),
                                       decided_by="auto_consensus"),
        )
        store.put(record)
        queue.enqueue(record.img_id, "vote")


def main():
    store_dir, port = sys.argv[1], int(sys.argv[2])
    store = RecordStore(store_dir)
    queue = ReviewQueue(store.root / "queue.json")
    seed(store, queue)
    app = create_app(store, queue)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


if __name__ == "__main__":
    main()
