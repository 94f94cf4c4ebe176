"""Cleaner: platform-specific text normalization and length gating.

Normalization strips URLs, user mentions, hashtag spans, and quote
references, then collapses whitespace; it is idempotent. The length gate
routes records to accept/reject without touching their text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from .records import MemeRecord, Stage
from .store import RecordStore


class WhitespacePolicy(str, Enum):
    COLLAPSE_TO_SPACE = "space"
    COLLAPSE_TO_COMMA = "comma"


@dataclass(frozen=True)
class CleaningRuleSet:
    platform: str
    strip_urls: bool = True
    mention_pattern: str = r"@\S+"
    hashtag_patterns: tuple[str, ...] = (r"#\S+",)
    quote_ref_pattern: Optional[str] = None
    whitespace_policy: WhitespacePolicy = WhitespacePolicy.COLLAPSE_TO_SPACE

    def __post_init__(self):
        re.compile(self.mention_pattern)
        for p in self.hashtag_patterns:
            re.compile(p)
        if self.quote_ref_pattern:
            re.compile(self.quote_ref_pattern)


@dataclass(frozen=True)
class LengthGate:
    post_min: int = 20
    post_max: int = 789
    img_min: int = 10
    img_max: int = 100

    def __post_init__(self):
        if self.post_min >= self.post_max or self.img_min >= self.img_max:
            raise ValueError("gate minima must be below maxima")


_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)

# Bracketed form first so the brackets go with the tag.
WEIBO_HASHTAG_PATTERNS = (r"\[#[^#\[\]]*#\]", r"#[^#]*#", r"#\S+")

DEFAULT_RULES = {
    "4chan": CleaningRuleSet(
        platform="4chan",
        mention_pattern=r"@\w+",
        hashtag_patterns=(r"#\S+",),
        quote_ref_pattern=r">>\d+",
    ),
    "x": CleaningRuleSet(platform="x"),
    "weibo": CleaningRuleSet(platform="weibo", hashtag_patterns=WEIBO_HASHTAG_PATTERNS),
}

DEFAULT_GATES = {
    "4chan": LengthGate(post_min=20, post_max=500, img_min=10, img_max=100),
    "x": LengthGate(post_min=20, post_max=789, img_min=10, img_max=100),
    "weibo": LengthGate(post_min=20, post_max=789, img_min=10, img_max=100),
}


def rules_for(platform: str) -> CleaningRuleSet:
    return DEFAULT_RULES.get(platform, CleaningRuleSet(platform=platform))


def gate_for(platform: str) -> LengthGate:
    return DEFAULT_GATES.get(platform, LengthGate())


def normalize_text(text: str, rules: CleaningRuleSet) -> str:
    """Strip platform noise and collapse whitespace. Idempotent."""
    out = text
    if rules.strip_urls:
        out = _URL_RE.sub(" ", out)
    if rules.quote_ref_pattern:
        out = re.sub(rules.quote_ref_pattern, " ", out)
    out = re.sub(rules.mention_pattern, " ", out)
    for pattern in rules.hashtag_patterns:
        out = re.sub(pattern, " ", out)
    if rules.whitespace_policy is WhitespacePolicy.COLLAPSE_TO_COMMA:
        out = re.sub(r"\s*\n\s*", ", ", out)
    out = re.sub(r"\s+", " ", out)
    return out.strip()


@dataclass(frozen=True)
class GateDecision:
    accepted: bool
    reason: Optional[str] = None


TOO_SHORT_POST = "TooShortPost"
TOO_LONG_POST = "TooLongPost"
SHORT_IMG_TEXT = "ShortImgText"
LONG_IMG_TEXT = "LongImgText"


def gate_record(record: MemeRecord, gate: LengthGate) -> GateDecision:
    """Length-route a normalized record; boundaries accept-inclusive.

    Lengths are Unicode scalar-value counts, so CJK and Latin text are
    measured identically.
    """
    post_len = len(record.post_text)
    img_len = len(record.img_text or "")
    if post_len < gate.post_min:
        return GateDecision(False, TOO_SHORT_POST)
    if post_len > gate.post_max:
        return GateDecision(False, TOO_LONG_POST)
    if img_len < gate.img_min:
        return GateDecision(False, SHORT_IMG_TEXT)
    if img_len > gate.img_max:
        return GateDecision(False, LONG_IMG_TEXT)
    return GateDecision(True)


@dataclass
class CleaningReport:
    cleaned: int = 0
    rejected: int = 0
    skipped: int = 0
    rejects_by_reason: dict = field(default_factory=dict)


def clean_corpus(
    store: RecordStore,
    rules: Optional[dict[str, CleaningRuleSet]] = None,
    gates: Optional[dict[str, LengthGate]] = None,
) -> CleaningReport:
    """Normalize and gate every EXTRACTED record.

    Accepted records advance to CLEANED; gated-out records move to
    REJECTED with their reason retained (never deleted).
    """
    report = CleaningReport()
    for record in store:
        if record.stage is not Stage.EXTRACTED:
            report.skipped += 1
            continue
        rule = (rules or DEFAULT_RULES).get(record.platform) or rules_for(record.platform)
        gate = (gates or DEFAULT_GATES).get(record.platform) or gate_for(record.platform)
        normalized = replace(
            record,
            post_text=normalize_text(record.post_text, rule),
            img_text=normalize_text(record.img_text or "", rule),
        )
        decision = gate_record(normalized, gate)
        if decision.accepted:
            store.put(normalized.with_stage(Stage.CLEANED))
            report.cleaned += 1
        else:
            store.put(normalized.with_stage(Stage.REJECTED, reason=decision.reason))
            report.rejected += 1
            report.rejects_by_reason[decision.reason] = (
                report.rejects_by_reason.get(decision.reason, 0) + 1
            )
    return report
