"""Canonical record model shared by every pipeline stage.

A record is one image+post unit. It moves monotonically through the stage
chain and is persisted as one UTF-8 JSON document keyed by ``img_id``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Optional


class Platform(str, Enum):
    X = "x"
    WEIBO = "weibo"
    FOURCHAN = "4chan"

    @classmethod
    def parse(cls, value: str) -> str:
        """Normalize a platform string; unknown platforms pass through as-is."""
        v = value.strip().lower()
        aliases = {"twitter": "x", "fourchan": "4chan", "pol": "4chan"}
        v = aliases.get(v, v)
        for member in cls:
            if member.value == v:
                return member.value
        return v


class Stage(str, Enum):
    COLLECTED = "collected"
    EXTRACTED = "extracted"
    CLEANED = "cleaned"
    ANNOTATED = "annotated"
    ARBITRATED = "arbitrated"
    EXPLICATED = "explicated"
    VALIDATED = "validated"
    REJECTED = "rejected"


# Ordered progression; REJECTED sits outside the chain as an absorbing sink.
STAGE_ORDER = [
    Stage.COLLECTED,
    Stage.EXTRACTED,
    Stage.CLEANED,
    Stage.ANNOTATED,
    Stage.ARBITRATED,
    Stage.EXPLICATED,
    Stage.VALIDATED,
]

_STAGE_RANK = {s: i for i, s in enumerate(STAGE_ORDER)}


def stage_rank(stage: Stage) -> int:
    """Position in the forward chain; REJECTED has no rank (-1)."""
    return _STAGE_RANK.get(stage, -1)


def validate_stage_transition(from_stage: Stage, to_stage: Stage) -> bool:
    """True iff ``to_stage`` is the immediate successor of ``from_stage``,
    or ``to_stage`` is REJECTED (allowed from anywhere except the two
    terminal stages: VALIDATED is terminal-accepting, REJECTED absorbing)."""
    if from_stage in (Stage.VALIDATED, Stage.REJECTED):
        return False
    if to_stage is Stage.REJECTED:
        return True
    return stage_rank(to_stage) == stage_rank(from_stage) + 1


class HateLabel(str, Enum):
    HATE = "hate"
    NORMAL = "normal"


class Category(str, Enum):
    RELIGION = "religion"
    POLITICS = "politics"
    RACE = "race"
    GENDER = "gender"
    HEALTH_STATUS = "health status"
    VIOLENCE = "violence"
    PUBLIC_HEALTH = "public health"
    INTERNATIONAL_RELATIONS = "international relations"


CATEGORY_UNIVERSE = [c.value for c in Category]


def normalize_category(name: str) -> Optional[str]:
    """Map a free-form category name onto the 8-name universe, or None."""
    v = re.sub(r"[\s_]+", " ", name.strip().lower())
    return v if v in CATEGORY_UNIVERSE else None


def category_key(categories) -> list[str]:
    """Canonical sorted list form of a category set."""
    return sorted(set(categories), key=CATEGORY_UNIVERSE.index)


class InvariantViolation(ValueError):
    """A record breaks a model invariant; the offending write is refused."""


# Fields the collector is allowed to persist (privacy allow-list).
ALLOWED_RAW_FIELDS = ("post_id", "post_time", "img_id", "img_url", "post_text")

# Noise tokens that must not survive cleaning.
_URL_RE = re.compile(r"https?://\S+|www\.\S+", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#\S+")
_QUOTE_REF_RE = re.compile(r">>\d+")


def cleaned_text_violations(text: str) -> list[str]:
    out = []
    if _URL_RE.search(text):
        out.append("url")
    if _MENTION_RE.search(text):
        out.append("mention")
    if _HASHTAG_RE.search(text):
        out.append("hashtag")
    if _QUOTE_REF_RE.search(text):
        out.append("quote_ref")
    return out


@dataclass(frozen=True)
class FinalAnnotation:
    """Accepted label/categories (and, for hate, rationales) for one record."""

    img_id: str
    label: Optional[str] = None          # HateLabel value
    categories: tuple[str, ...] = ()     # canonical category names
    rationales: tuple[str, ...] = ()     # verb-object phrases, ordered
    decided_by: Optional[str] = None     # "auto_consensus" | "human_arbiter"
    vote_count: Optional[int] = None     # present once validated

    def to_doc(self) -> dict[str, Any]:
        doc: dict[str, Any] = {}
        if self.label is not None:
            doc["label"] = self.label
        if self.categories:
            doc["categories"] = list(self.categories)
        if self.rationales:
            doc["rationales"] = list(self.rationales)
        if self.decided_by is not None:
            doc["decided_by"] = self.decided_by
        if self.vote_count is not None:
            doc["vote_count"] = self.vote_count
        return doc

    @classmethod
    def from_doc(cls, img_id: str, doc: dict[str, Any]) -> "FinalAnnotation":
        return cls(
            img_id=img_id,
            label=doc.get("label"),
            categories=tuple(doc.get("categories", [])),
            rationales=tuple(doc.get("rationales", [])),
            decided_by=doc.get("decided_by"),
            vote_count=doc.get("vote_count"),
        )


@dataclass(frozen=True)
class MemeRecord:
    img_id: str
    platform: str
    post_id: str = ""
    post_time: int = 0
    img_url: str = ""
    img_path: str = ""
    post_text: str = ""
    img_text: Optional[str] = None
    stage: Stage = Stage.COLLECTED
    rejection_reason: Optional[str] = None
    annotation: Optional[FinalAnnotation] = None
    # Raw per-provider annotator responses, kept for arbitration/audit.
    responses: tuple[dict, ...] = ()
    # Model/human rationale draft prior to finalization.
    draft: Optional[dict] = None

    def with_stage(self, stage: Stage, reason: Optional[str] = None) -> "MemeRecord":
        if not validate_stage_transition(self.stage, stage):
            raise InvariantViolation(
                f"illegal stage transition {self.stage.value} -> {stage.value} "
                f"for {self.img_id}"
            )
        return replace(self, stage=stage, rejection_reason=reason)

    def check_invariants(self) -> None:
        if not self.img_id:
            raise InvariantViolation("img_id must be non-empty")
        if self.stage is not Stage.REJECTED and stage_rank(self.stage) >= stage_rank(Stage.CLEANED):
            bad = cleaned_text_violations(self.post_text)
            if bad:
                raise InvariantViolation(
                    f"post_text of {self.img_id} contains {','.join(bad)} at "
                    f"stage {self.stage.value}"
                )
        ann = self.annotation
        if ann is not None:
            if ann.label == HateLabel.NORMAL.value and ann.categories:
                raise InvariantViolation("normal record must have empty categories")
            if ann.label == HateLabel.HATE.value and stage_rank(self.stage) >= stage_rank(Stage.EXPLICATED) and not ann.rationales:
                raise InvariantViolation("hate record past explication must carry rationales")


def serialize_record(record: MemeRecord) -> bytes:
    """Serialize one record to its UTF-8 JSON document.

    Refuses records violating model invariants. Optional fields are
    omitted rather than written as null so documents stay minimal.
    """
    record.check_invariants()
    doc: dict[str, Any] = {
        "post_id": record.post_id,
        "post_time": record.post_time,
        "img_id": record.img_id,
        "img_url": record.img_url,
        "post_text": record.post_text,
        "platform": record.platform,
        "stage": record.stage.value,
    }
    if record.img_path:
        doc["img_path"] = record.img_path
    if record.img_text is not None:
        doc["img_text"] = record.img_text
    if record.rejection_reason is not None:
        doc["rejection_reason"] = record.rejection_reason
    if record.annotation is not None:
        doc["annotation"] = record.annotation.to_doc()
    if record.responses:
        doc["responses"] = list(record.responses)
    if record.draft is not None:
        doc["draft"] = record.draft
    text = json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n"
    return text.encode("utf-8")


def deserialize_record(data: bytes) -> MemeRecord:
    doc = json.loads(data.decode("utf-8"))
    ann = None
    if "annotation" in doc:
        ann = FinalAnnotation.from_doc(doc["img_id"], doc["annotation"])
    return MemeRecord(
        img_id=doc["img_id"],
        platform=doc.get("platform", ""),
        post_id=doc.get("post_id", ""),
        post_time=int(doc.get("post_time", 0)),
        img_url=doc.get("img_url", ""),
        img_path=doc.get("img_path", ""),
        post_text=doc.get("post_text", ""),
        img_text=doc.get("img_text"),
        stage=Stage(doc.get("stage", "collected")),
        rejection_reason=doc.get("rejection_reason"),
        annotation=ann,
        responses=tuple(doc.get("responses", [])),
        draft=doc.get("draft"),
    )
