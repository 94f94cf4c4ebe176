"""Explicator: drafts verb-object rationales for accepted hate records
and validates the human-edited final phrasing.

Validation is purely structural: each phrase is comma-free with at least
two whitespace tokens, and the full set stays within the 30-word budget.
Verb part-of-speech checking is left to the human editor.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .annotate import E1_EXPLICATOR, AnnotatorProvider, ProviderCallFailed, load_template
from .records import FinalAnnotation, HateLabel, MemeRecord, Stage
from .store import RecordStore

WORD_LIMIT = 30

ORIGIN_MODEL = "model_draft"
ORIGIN_HUMAN = "human_edited"

EMPTY_RATIONALE = "EmptyRationale"
EMPTY_PHRASE = "EmptyPhrase"
PHRASE_HAS_COMMA = "PhraseHasComma"
PHRASE_TOO_SHORT = "PhraseTooShort"
WORD_LIMIT_EXCEEDED = "WordLimitExceeded"

ATTACK_TARGETS = ("individual", "group", "society", "nation")
ATTACK_TYPES = ("abuse", "discriminate", "ridicule", "dehumanize", "incite violence")


class ProviderFailed(Exception):
    pass


class StructuralViolation(Exception):
    def __init__(self, violations: list[str]):
        super().__init__(", ".join(violations))
        self.violations = violations


def word_count(phrases: Sequence[str]) -> int:
    """Whitespace-token count over all phrases. Unspaced CJK text counts
    one token per contiguous run; see char_count for the alternative."""
    return sum(len(p.split()) for p in phrases)


def char_count(phrases: Sequence[str]) -> int:
    """Scalar-value count, the natural budget for unspaced CJK rationales."""
    return sum(len(p) for p in phrases)


def validate_rationale(phrases: Sequence[str]) -> list[str]:
    """Structural checks in documented order; empty list means valid."""
    violations: list[str] = []
    if not phrases:
        violations.append(EMPTY_RATIONALE)
        return violations
    for phrase in phrases:
        trimmed = phrase.strip()
        if not trimmed:
            violations.append(EMPTY_PHRASE)
            continue
        if "," in trimmed:
            violations.append(PHRASE_HAS_COMMA)
        if len(trimmed.split()) < 2:
            violations.append(PHRASE_TOO_SHORT)
    if word_count([p.strip() for p in phrases]) > WORD_LIMIT:
        violations.append(WORD_LIMIT_EXCEEDED)
    return violations


def split_phrases(text: str) -> list[str]:
    return [p.strip() for p in text.replace("\n", " ").split(",") if p.strip()]


@dataclass(frozen=True)
class RationaleDraft:
    img_id: str
    phrases: tuple[str, ...]
    origin: str
    flags: tuple[str, ...] = ()
    attack_target: Optional[str] = None
    attack_type: Optional[str] = None

    def to_doc(self) -> dict:
        doc: dict = {"phrases": list(self.phrases), "origin": self.origin}
        if self.flags:
            doc["flags"] = list(self.flags)
        if self.attack_target:
            doc["attack_target"] = self.attack_target
        if self.attack_type:
            doc["attack_type"] = self.attack_type
        return doc

    @classmethod
    def from_doc(cls, img_id: str, doc: dict) -> "RationaleDraft":
        return cls(
            img_id=img_id,
            phrases=tuple(doc.get("phrases", [])),
            origin=doc.get("origin", ORIGIN_MODEL),
            flags=tuple(doc.get("flags", [])),
            attack_target=doc.get("attack_target"),
            attack_type=doc.get("attack_type"),
        )


def draft_rationale(record: MemeRecord, provider: AnnotatorProvider) -> RationaleDraft:
    """Ask the provider for a comma-separated verb-object rationale.

    Structurally invalid drafts are kept but flagged; the human edit pass
    is the enforcement point.
    """
    if record.annotation is None or record.annotation.label != HateLabel.HATE.value:
        raise ValueError(f"record {record.img_id} has no accepted hate label")
    template = load_template(E1_EXPLICATOR)
    prompt = template.render(
        post_content=record.post_text,
        category=", ".join(record.annotation.categories),
    )
    try:
        raw = provider.complete(record.img_path or record.img_id, prompt)
    except ProviderCallFailed as exc:
        raise ProviderFailed(str(exc)) from exc
    phrases = tuple(split_phrases(raw))
    return RationaleDraft(
        img_id=record.img_id,
        phrases=phrases,
        origin=ORIGIN_MODEL,
        flags=tuple(validate_rationale(phrases)),
    )


def finalize_rationale(store: RecordStore, img_id: str, edited: Sequence[str]) -> RationaleDraft:
    """Accept a human-edited rationale and advance the record.

    Refuses structurally invalid phrasing; this is the single write point
    guaranteeing every stored rationale satisfies the model invariants.
    """
    record = store.get(img_id)
    if record is None or record.draft is None:
        raise ValueError(f"no draft pending for {img_id}")
    phrases = [p.strip() for p in edited]
    violations = validate_rationale(phrases)
    if violations:
        raise StructuralViolation(violations)
    final = RationaleDraft(img_id=img_id, phrases=tuple(phrases), origin=ORIGIN_HUMAN)
    annotation = record.annotation or FinalAnnotation(img_id=img_id)
    updated = replace(
        record.with_stage(Stage.EXPLICATED),
        draft=final.to_doc(),
        annotation=replace(annotation, rationales=tuple(phrases)),
    )
    store.put(updated)
    return final


@dataclass
class ExplicationReport:
    drafted: int = 0
    finalized: int = 0
    flagged: int = 0
    passed_through: int = 0
    skipped: int = 0


def explicate_corpus(
    store: RecordStore,
    provider: AnnotatorProvider,
    auto_finalize: bool = False,
) -> ExplicationReport:
    """Draft rationales for ARBITRATED hate records; normal records pass
    straight through to EXPLICATED.

    With auto_finalize, structurally valid drafts are finalized unedited
    (an identity edit); flagged drafts always wait for a human.
    """
    report = ExplicationReport()
    for record in store:
        if record.stage is not Stage.ARBITRATED:
            report.skipped += 1
            continue
        ann = record.annotation
        if ann is None or ann.label is None:
            report.skipped += 1
            continue
        if ann.label == HateLabel.NORMAL.value:
            store.put(record.with_stage(Stage.EXPLICATED))
            report.passed_through += 1
            continue
        if record.draft is None:
            draft = draft_rationale(record, provider)
            record = replace(record, draft=draft.to_doc())
            store.put(record)
            report.drafted += 1
            if draft.flags:
                report.flagged += 1
                continue
        else:
            draft = RationaleDraft.from_doc(record.img_id, record.draft)
            if draft.flags:
                report.flagged += 1
                continue
        if auto_finalize and draft.origin == ORIGIN_MODEL:
            finalize_rationale(store, record.img_id, list(draft.phrases))
            report.finalized += 1
    return report
