"""Descriptive corpus statistics: label/category distributions, multi-label
co-occurrence, rationale lengths, and Unicode-script language profiling
with post-image alignment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .records import HateLabel, MemeRecord

MONOLINGUAL = "monolingual"
MULTILINGUAL = "multilingual"
NONE = "none"

# Unicode block ranges per bucket. Hiragana and Katakana collapse into one
# Japanese bucket; Han stays its own bucket, so pure-kanji Japanese is
# indistinguishable from Chinese (documented approximation). Everything
# outside these ranges (digits, punctuation, whitespace, symbols) is
# ignored.
_SCRIPT_RANGES: dict[str, tuple[tuple[int, int], ...]] = {
    "latin": (
        (0x0041, 0x005A), (0x0061, 0x007A), (0x00C0, 0x00D6), (0x00D8, 0x00F6),
        (0x00F8, 0x024F), (0x1E00, 0x1EFF), (0x2C60, 0x2C7F), (0xA720, 0xA7FF),
    ),
    "han": (
        (0x3400, 0x4DBF), (0x4E00, 0x9FFF), (0xF900, 0xFAFF), (0x20000, 0x2A6DF),
    ),
    "japanese": (
        (0x3041, 0x3096), (0x309D, 0x309F), (0x30A1, 0x30FA), (0x30FC, 0x30FF),
        (0x31F0, 0x31FF),
    ),
    "korean": (
        (0x1100, 0x11FF), (0x3131, 0x318E), (0xAC00, 0xD7AF),
    ),
    "arabic": (
        (0x0600, 0x06FF), (0x0750, 0x077F), (0x08A0, 0x08FF), (0xFB50, 0xFDFF),
        (0xFE70, 0xFEFF),
    ),
    "hebrew": ((0x0591, 0x05F4),),
    "cyrillic": ((0x0400, 0x04FF), (0x0500, 0x052F)),
}

# Appendix-table display names.
SCRIPT_DISPLAY = {
    "latin": "Latin", "han": "Chinese", "japanese": "Japanese", "korean": "Korean",
    "arabic": "Arabic", "hebrew": "Hebrew", "cyrillic": "Cyrillic",
}


def _script_of(char: str) -> Optional[str]:
    cp = ord(char)
    for name, ranges in _SCRIPT_RANGES.items():
        for lo, hi in ranges:
            if lo <= cp <= hi:
                return name
    return None


@dataclass(frozen=True)
class ScriptProfile:
    scripts: frozenset[str]
    classification: str

    @property
    def sorted_scripts(self) -> tuple[str, ...]:
        return tuple(sorted(self.scripts))


def classify_scripts(text: str) -> ScriptProfile:
    """Profile the Unicode scripts present in a text.

    All Latin-script letters share one bucket; ignorable characters
    (digits, punctuation, whitespace, anything unassigned to a bucket)
    never affect the profile.
    """
    scripts = set()
    for char in text:
        name = _script_of(char)
        if name is not None:
            scripts.add(name)
    if not scripts:
        classification = NONE
    elif len(scripts) == 1:
        classification = MONOLINGUAL
    else:
        classification = MULTILINGUAL
    return ScriptProfile(scripts=frozenset(scripts), classification=classification)


@dataclass(frozen=True)
class AlignmentStats:
    aligned: int
    misaligned: int

    @property
    def total(self) -> int:
        return self.aligned + self.misaligned

    @property
    def ratio(self) -> float:
        return self.aligned / self.total if self.total else 0.0


def alignment_stats(records: Iterable[MemeRecord], subset_alignment: bool = False) -> AlignmentStats:
    """A pair is aligned iff post and image text share the same script set
    (or, with subset_alignment, one side's set contains the other's)."""
    aligned = misaligned = 0
    for record in records:
        post = classify_scripts(record.post_text).scripts
        img = classify_scripts(record.img_text or "").scripts
        if subset_alignment:
            ok = post <= img or img <= post
        else:
            ok = post == img
        if ok:
            aligned += 1
        else:
            misaligned += 1
    return AlignmentStats(aligned=aligned, misaligned=misaligned)


@dataclass(frozen=True)
class LengthStats:
    mean: float
    min: int
    max: int


def _length_stats(values: Sequence[int]) -> LengthStats:
    if not values:
        return LengthStats(0.0, 0, 0)
    return LengthStats(sum(values) / len(values), min(values), max(values))


class EmptyCorpus(Exception):
    pass


@dataclass
class CorpusSummary:
    total: int
    per_platform: dict[str, int]
    per_label: dict[str, int]
    per_category: dict[str, int]
    multi_label_fraction: float
    pair_cooccurrence: dict[tuple[str, str], int]
    post_length: LengthStats
    rationale_length: LengthStats
    language: dict[str, dict[str, int]] = field(default_factory=dict)


def summarize(records: Sequence[MemeRecord]) -> CorpusSummary:
    """Compute the full descriptive summary of a finished corpus."""
    if not records:
        raise EmptyCorpus("cannot summarize an empty corpus")
    per_platform: dict[str, int] = {}
    per_label: dict[str, int] = {}
    per_category: dict[str, int] = {}
    cooccurrence: dict[tuple[str, str], int] = {}
    hate = multi = 0
    post_lengths: list[int] = []
    rationale_lengths: list[int] = []
    post_lang: dict[str, int] = {}
    img_lang: dict[str, int] = {}
    for record in records:
        per_platform[record.platform] = per_platform.get(record.platform, 0) + 1
        post_lengths.append(len(record.post_text))
        label = record.annotation.label if record.annotation else None
        if label:
            per_label[label] = per_label.get(label, 0) + 1
        if label == HateLabel.HATE.value:
            hate += 1
            categories = sorted(record.annotation.categories)
            for c in categories:
                per_category[c] = per_category.get(c, 0) + 1
            if len(categories) > 1:
                multi += 1
                for pair in combinations(categories, 2):
                    cooccurrence[pair] = cooccurrence.get(pair, 0) + 1
            for phrase in record.annotation.rationales:
                rationale_lengths.append(len(phrase))
        post_key = _lang_key(classify_scripts(record.post_text))
        img_key = _lang_key(classify_scripts(record.img_text or ""))
        post_lang[post_key] = post_lang.get(post_key, 0) + 1
        img_lang[img_key] = img_lang.get(img_key, 0) + 1
    return CorpusSummary(
        total=len(records),
        per_platform=per_platform,
        per_label=per_label,
        per_category=per_category,
        multi_label_fraction=multi / hate if hate else 0.0,
        pair_cooccurrence=cooccurrence,
        post_length=_length_stats(post_lengths),
        rationale_length=_length_stats(rationale_lengths),
        language={"post": post_lang, "image": img_lang},
    )


def _lang_key(profile: ScriptProfile) -> str:
    if profile.classification == NONE:
        return "none"
    names = sorted(SCRIPT_DISPLAY[s] for s in profile.scripts)
    prefix = "Monolingual" if profile.classification == MONOLINGUAL else "Multilingual"
    return f"{prefix} - {' + '.join(names)}"
