"""Arbiter and Validator: consensus aggregation, human review routing,
and k-of-n vote acceptance.

Auto-acceptance requires unanimity on the binary label (quorum 3 by
default) and, for hate records, a majority-membership category set whose
mean pairwise Jaccard similarity clears the threshold tau. Everything
else goes to the human review queue.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .annotate import STATUS_OK, TASK_BINARY, TASK_CATEGORIES, AnnotatorResponse
from .queue import ReviewQueue, TASK_BINARY_LABEL
from .queue import TASK_CATEGORIES as QUEUE_CATEGORIES
from .records import FinalAnnotation, HateLabel, MemeRecord, Stage, category_key
from .store import RecordStore

ACCEPTED = "accepted"
NEEDS_REVIEW = "needs_review"
NOT_APPLICABLE = "not_applicable"

DECIDED_AUTO = "auto_consensus"
DECIDED_HUMAN = "human_arbiter"

DEFAULT_QUORUM = 3
DEFAULT_TAU = 0.5


class NoUsableResponses(Exception):
    pass


class NotPending(Exception):
    pass


class IncompleteBallot(Exception):
    pass


@dataclass(frozen=True)
class LabelOutcome:
    status: str
    label: Optional[str] = None


@dataclass(frozen=True)
class CategoryOutcome:
    status: str
    categories: tuple[str, ...] = ()


@dataclass(frozen=True)
class ConsensusDecision:
    img_id: str
    label_outcome: LabelOutcome
    category_outcome: CategoryOutcome
    rule_trace: str = ""


def arbitrate_label(responses: Sequence[AnnotatorResponse], quorum: int = DEFAULT_QUORUM) -> LabelOutcome:
    """Unanimity rule: accept iff every usable response agrees and the
    usable count meets the quorum."""
    usable = [r for r in responses if r.status == STATUS_OK and r.label is not None]
    if not usable:
        raise NoUsableResponses("no usable binary responses")
    labels = {r.label for r in usable}
    if len(labels) == 1 and len(usable) >= quorum:
        return LabelOutcome(ACCEPTED, usable[0].label)
    return LabelOutcome(NEEDS_REVIEW)


def jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 1.0
    union = a | b
    return len(a & b) / len(union)


def mean_pairwise_jaccard(sets: Sequence[set]) -> float:
    pairs = list(combinations(sets, 2))
    if not pairs:
        return 1.0
    return sum(jaccard(a, b) for a, b in pairs) / len(pairs)


def arbitrate_categories(responses: Sequence[AnnotatorResponse], tau: float = DEFAULT_TAU) -> CategoryOutcome:
    """Majority-membership rule: accept the set of categories named by at
    least two providers, provided the providers' sets are mutually similar
    enough (mean pairwise Jaccard >= tau)."""
    usable = [r for r in responses if r.status == STATUS_OK and r.task == TASK_CATEGORIES]
    sets = [set(r.categories) for r in usable]
    counts: dict[str, int] = {}
    for s in sets:
        for c in s:
            counts[c] = counts.get(c, 0) + 1
    majority = {c for c, n in counts.items() if n >= 2}
    if majority and mean_pairwise_jaccard(sets) >= tau:
        return CategoryOutcome(ACCEPTED, tuple(category_key(majority)))
    return CategoryOutcome(NEEDS_REVIEW)


def decide_record(record: MemeRecord, quorum: int = DEFAULT_QUORUM, tau: float = DEFAULT_TAU) -> ConsensusDecision:
    """Aggregate a record's stored annotator responses into a decision."""
    responses = [AnnotatorResponse.from_doc(d) for d in record.responses]
    binary = [r for r in responses if r.task == TASK_BINARY]
    categories = [r for r in responses if r.task == TASK_CATEGORIES]
    trace = []
    try:
        label_outcome = arbitrate_label(binary, quorum)
        trace.append(f"label:{label_outcome.status}")
    except NoUsableResponses:
        label_outcome = LabelOutcome(NEEDS_REVIEW)
        trace.append("label:needs_review(no usable responses)")
    if label_outcome.status == ACCEPTED and label_outcome.label == HateLabel.NORMAL.value:
        category_outcome = CategoryOutcome(NOT_APPLICABLE)
    else:
        category_outcome = arbitrate_categories(categories, tau)
    trace.append(f"categories:{category_outcome.status}")
    return ConsensusDecision(
        img_id=record.img_id,
        label_outcome=label_outcome,
        category_outcome=category_outcome,
        rule_trace="; ".join(trace),
    )


def _binary_suggestions(record: MemeRecord) -> list[dict]:
    return [
        {"provider_id": d.get("provider_id"), "label": d.get("label"),
         "confidence": d.get("label_confidence")}
        for d in record.responses if d.get("task") == TASK_BINARY
    ]


def _category_suggestions(record: MemeRecord) -> list[dict]:
    return [
        {"provider_id": d.get("provider_id"), "categories": d.get("categories", []),
         "confidences": d.get("category_confidences", [])}
        for d in record.responses if d.get("task") == TASK_CATEGORIES
    ]


def enqueue_review(decision: ConsensusDecision, record: MemeRecord, queue: ReviewQueue) -> int:
    """Queue one item per unresolved task; duplicates are ignored."""
    added = 0
    if decision.label_outcome.status == NEEDS_REVIEW:
        if queue.enqueue(decision.img_id, TASK_BINARY_LABEL, _binary_suggestions(record)):
            added += 1
    if decision.category_outcome.status == NEEDS_REVIEW:
        if queue.enqueue(decision.img_id, QUEUE_CATEGORIES, _category_suggestions(record)):
            added += 1
    return added


@dataclass
class ArbitrationReport:
    auto_accepted: int = 0
    queued: int = 0
    skipped: int = 0


def arbitrate_corpus(
    store: RecordStore,
    queue: ReviewQueue,
    quorum: int = DEFAULT_QUORUM,
    tau: float = DEFAULT_TAU,
) -> ArbitrationReport:
    """Decide every ANNOTATED record; fully resolved records advance to
    ARBITRATED, the rest gain review-queue items and stay put."""
    report = ArbitrationReport()
    for record in store:
        if record.stage is not Stage.ANNOTATED:
            report.skipped += 1
            continue
        decision = decide_record(record, quorum, tau)
        label, cats = decision.label_outcome, decision.category_outcome
        if label.status == ACCEPTED and cats.status in (ACCEPTED, NOT_APPLICABLE):
            annotation = FinalAnnotation(
                img_id=record.img_id,
                label=label.label,
                categories=cats.categories,
                decided_by=DECIDED_AUTO,
            )
            store.put(replace(record.with_stage(Stage.ARBITRATED), annotation=annotation))
            report.auto_accepted += 1
        else:
            enqueue_review(decision, record, queue)
            report.queued += 1
    return report


def apply_human_decision(
    store: RecordStore,
    queue: ReviewQueue,
    img_id: str,
    task: str,
    choice,
    quorum: int = DEFAULT_QUORUM,
    tau: float = DEFAULT_TAU,
) -> ConsensusDecision:
    """Resolve a pending review item with the human's choice.

    Binary choice is a label string; category choice is an iterable of
    category names, where an empty choice rejects the whole record.
    """
    item = queue.get(ReviewQueue.item_id_for(img_id, task))
    if item is None or item.status != "pending":
        raise NotPending(f"{img_id}:{task} is not pending")
    record = store.get(img_id)
    if record is None:
        raise NotPending(f"record {img_id} not found")

    if task == TASK_BINARY_LABEL:
        label = str(choice).strip().lower()
        if label not in (HateLabel.HATE.value, HateLabel.NORMAL.value):
            raise ValueError(f"invalid label {choice!r}")
        queue.complete(item.item_id)
        if label == HateLabel.NORMAL.value:
            # Category review is moot for a normal record.
            cat_item = queue.get(ReviewQueue.item_id_for(img_id, QUEUE_CATEGORIES))
            if cat_item is not None and cat_item.status == "pending":
                queue.complete(cat_item.item_id)
            annotation = FinalAnnotation(img_id=img_id, label=label, decided_by=DECIDED_HUMAN)
            store.put(replace(record.with_stage(Stage.ARBITRATED), annotation=annotation))
            return ConsensusDecision(img_id, LabelOutcome(ACCEPTED, label), CategoryOutcome(NOT_APPLICABLE),
                                     "human binary: normal")
        # Hate: category consensus may already hold; otherwise queue it.
        if record.annotation is not None and record.annotation.categories:
            # Categories were human-decided before the label.
            annotation = replace(record.annotation, label=label, decided_by=DECIDED_HUMAN)
            store.put(replace(record.with_stage(Stage.ARBITRATED), annotation=annotation))
            return ConsensusDecision(img_id, LabelOutcome(ACCEPTED, label),
                                     CategoryOutcome(ACCEPTED, annotation.categories),
                                     "human binary: hate; categories held")
        responses = [AnnotatorResponse.from_doc(d) for d in record.responses]
        cat_outcome = arbitrate_categories([r for r in responses if r.task == TASK_CATEGORIES], tau)
        if cat_outcome.status == ACCEPTED:
            annotation = FinalAnnotation(img_id=img_id, label=label,
                                         categories=cat_outcome.categories, decided_by=DECIDED_HUMAN)
            store.put(replace(record.with_stage(Stage.ARBITRATED), annotation=annotation))
            return ConsensusDecision(img_id, LabelOutcome(ACCEPTED, label), cat_outcome,
                                     "human binary: hate; categories auto")
        queue.enqueue(img_id, QUEUE_CATEGORIES, _category_suggestions(record))
        annotation = FinalAnnotation(img_id=img_id, label=label, decided_by=DECIDED_HUMAN)
        store.put(replace(record, annotation=annotation))
        return ConsensusDecision(img_id, LabelOutcome(ACCEPTED, label), CategoryOutcome(NEEDS_REVIEW),
                                 "human binary: hate; categories pending")

    if task == QUEUE_CATEGORIES:
        chosen = category_key(str(c).strip().lower() for c in choice)
        queue.complete(item.item_id)
        if not chosen:
            # Reject-all leaves the label blank: the record is excluded.
            store.put(replace(record.with_stage(Stage.REJECTED, reason="category review rejected"),
                              annotation=None))
            return ConsensusDecision(img_id, LabelOutcome(NEEDS_REVIEW), CategoryOutcome(NEEDS_REVIEW),
                                     "human categories: reject all")
        label = record.annotation.label if record.annotation else None
        if label is None:
            # No human label yet; the auto consensus may already be accepted
            # (hate unanimous, only the categories were disputed).
            responses = [AnnotatorResponse.from_doc(d) for d in record.responses]
            try:
                auto = arbitrate_label([r for r in responses if r.task == TASK_BINARY], quorum)
            except NoUsableResponses:
                auto = LabelOutcome(NEEDS_REVIEW)
            if auto.status == ACCEPTED:
                label = auto.label
        if label is None:
            # Categories resolved before the binary item; hold the result.
            annotation = FinalAnnotation(img_id=img_id, categories=tuple(chosen), decided_by=DECIDED_HUMAN)
            store.put(replace(record, annotation=annotation))
            return ConsensusDecision(img_id, LabelOutcome(NEEDS_REVIEW),
                                     CategoryOutcome(ACCEPTED, tuple(chosen)), "human categories; label pending")
        annotation = FinalAnnotation(img_id=img_id, label=label, categories=tuple(chosen),
                                     rationales=record.annotation.rationales if record.annotation else (),
                                     decided_by=DECIDED_HUMAN)
        store.put(replace(record.with_stage(Stage.ARBITRATED), annotation=annotation))
        return ConsensusDecision(img_id, LabelOutcome(ACCEPTED, label),
                                 CategoryOutcome(ACCEPTED, tuple(chosen)), "human categories")

    raise ValueError(f"unknown arbitration task {task!r}")


# -- validator ------------------------------------------------------------


@dataclass(frozen=True)
class VoteRecord:
    img_id: str
    votes: tuple[tuple[str, int], ...]  # (validator_id, 0|1)

    def __post_init__(self):
        ids = [v for v, _ in self.votes]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate validator in ballot")
        if any(vote not in (0, 1) for _, vote in self.votes):
            raise ValueError("votes must be 0 or 1")

    def favor(self) -> int:
        return sum(vote for _, vote in self.votes)


@dataclass(frozen=True)
class AgreementStats:
    per_rater_agreement: tuple[float, ...]
    mean_rater_agreement: float
    unanimous_fraction: float
    accepted_fraction: float


def _check_complete(votes: Sequence[VoteRecord]) -> list[str]:
    if not votes:
        raise IncompleteBallot("no ballots")
    validators = sorted(v for v, _ in votes[0].votes)
    for record in votes:
        if sorted(v for v, _ in record.votes) != validators:
            raise IncompleteBallot(f"ballot for {record.img_id} incomplete")
    return validators


def validate_votes(votes: Sequence[VoteRecord], accept_threshold: int = 2) -> tuple[list[str], list[str]]:
    """Accept records whose favor count meets the threshold."""
    if accept_threshold < 1:
        raise ValueError("threshold must be >= 1")
    _check_complete(votes)
    accepted = [v.img_id for v in votes if v.favor() >= accept_threshold]
    rejected = [v.img_id for v in votes if v.favor() < accept_threshold]
    return accepted, rejected


def agreement_stats(votes: Sequence[VoteRecord], accept_threshold: int = 2) -> AgreementStats:
    validators = _check_complete(votes)
    n = len(votes)
    per_rater = []
    for validator in validators:
        ones = sum(dict(v.votes)[validator] for v in votes)
        per_rater.append(ones / n)
    unanimous = sum(1 for v in votes if v.favor() == len(validators)) / n
    accepted = sum(1 for v in votes if v.favor() >= accept_threshold) / n
    return AgreementStats(
        per_rater_agreement=tuple(per_rater),
        mean_rater_agreement=sum(per_rater) / len(per_rater),
        unanimous_fraction=unanimous,
        accepted_fraction=accepted,
    )


@dataclass
class ValidationReport:
    accepted: int = 0
    rejected: int = 0


def validate_corpus(store: RecordStore, votes: Sequence[VoteRecord], accept_threshold: int = 2) -> ValidationReport:
    """Apply ballots: accepted EXPLICATED records become VALIDATED with
    their vote count; rejected ones become REJECTED."""
    accepted, rejected = validate_votes(votes, accept_threshold)
    favor = {v.img_id: v.favor() for v in votes}
    report = ValidationReport()
    for img_id in accepted:
        record = store.get(img_id)
        if record is None or record.stage is not Stage.EXPLICATED:
            continue
        annotation = record.annotation or FinalAnnotation(img_id=img_id)
        store.put(replace(record.with_stage(Stage.VALIDATED),
                          annotation=replace(annotation, vote_count=favor[img_id])))
        report.accepted += 1
    for img_id in rejected:
        record = store.get(img_id)
        if record is None or record.stage in (Stage.VALIDATED, Stage.REJECTED):
            continue
        store.put(record.with_stage(Stage.REJECTED, reason="validator vote below threshold"))
        report.rejected += 1
    return report
