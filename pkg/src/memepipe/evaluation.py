"""Benchmark harness: binary, multi-label, and rationale metrics with
per-platform slicing and a normalized overall composite.

All metric functions are pure and return percentages; rounding happens
only at display time. Zero-division convention: precision/recall are 0
when their denominator is 0.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Protocol, Sequence

import numpy as np

from .records import CATEGORY_UNIVERSE, HateLabel

BLEU_EPSILON = 1e-9


class LengthMismatch(Exception):
    pass


class EmptyReferenceSet(Exception):
    pass


class EmptySlice(Exception):
    pass


class MissingTask(Exception):
    pass


class EmbedderUnavailable(Exception):
    pass


# -- binary ---------------------------------------------------------------


@dataclass(frozen=True)
class BinaryMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def to_doc(self) -> dict:
        return {"accuracy": self.accuracy, "precision": self.precision,
                "recall": self.recall, "f1": self.f1}


def binary_metrics(preds: Sequence[str], golds: Sequence[str]) -> BinaryMetrics:
    """Confusion-matrix metrics with hate as the positive class."""
    if len(preds) != len(golds) or not golds:
        raise LengthMismatch(f"{len(preds)} predictions vs {len(golds)} golds")
    hate = HateLabel.HATE.value
    tp = sum(1 for p, g in zip(preds, golds) if p == hate and g == hate)
    fp = sum(1 for p, g in zip(preds, golds) if p == hate and g != hate)
    fn = sum(1 for p, g in zip(preds, golds) if p != hate and g == hate)
    tn = len(golds) - tp - fp - fn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return BinaryMetrics(
        accuracy=100.0 * (tp + tn) / len(golds),
        precision=100.0 * precision,
        recall=100.0 * recall,
        f1=100.0 * f1,
        tp=tp, fp=fp, fn=fn, tn=tn,
    )


# -- multi-label ----------------------------------------------------------


@dataclass(frozen=True)
class MultiLabelMetrics:
    macro_p: float
    macro_r: float
    macro_f1: float
    hamming_loss: float
    subset_accuracy: float

    def to_doc(self) -> dict:
        return {"macro_p": self.macro_p, "macro_r": self.macro_r, "macro_f1": self.macro_f1,
                "hamming_loss": self.hamming_loss, "subset_accuracy": self.subset_accuracy}


def multilabel_metrics(
    preds: Sequence[Iterable[str]],
    golds: Sequence[Iterable[str]],
    skip_absent: bool = False,
) -> MultiLabelMetrics:
    """Macro P/R/F1 over the 8 categories plus Hamming loss and subset
    accuracy. Categories absent from both sides contribute 0 to the macro
    averages unless skip_absent is set."""
    if len(preds) != len(golds) or not golds:
        raise LengthMismatch(f"{len(preds)} predictions vs {len(golds)} golds")
    pred_sets = [set(p) for p in preds]
    gold_sets = [set(g) for g in golds]
    precisions, recalls, f1s = [], [], []
    for category in CATEGORY_UNIVERSE:
        tp = sum(1 for p, g in zip(pred_sets, gold_sets) if category in p and category in g)
        fp = sum(1 for p, g in zip(pred_sets, gold_sets) if category in p and category not in g)
        fn = sum(1 for p, g in zip(pred_sets, gold_sets) if category not in p and category in g)
        if skip_absent and tp + fp + fn == 0:
            continue
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        precisions.append(p)
        recalls.append(r)
        f1s.append(f)
    denom = len(precisions) or 1
    hamming = sum(len(p ^ g) for p, g in zip(pred_sets, gold_sets)) / (len(golds) * len(CATEGORY_UNIVERSE))
    subset = sum(1 for p, g in zip(pred_sets, gold_sets) if p == g) / len(golds)
    return MultiLabelMetrics(
        macro_p=100.0 * sum(precisions) / denom,
        macro_r=100.0 * sum(recalls) / denom,
        macro_f1=100.0 * sum(f1s) / denom,
        hamming_loss=100.0 * hamming,
        subset_accuracy=100.0 * subset,
    )


# -- rationale ------------------------------------------------------------


_PUNCT_RE = re.compile(r"[^\w\s]", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase, strip punctuation glyphs, split on whitespace."""
    return _PUNCT_RE.sub(" ", text.lower()).split()


def _ngrams(tokens: Sequence[str], n: int) -> dict[tuple, int]:
    counts: dict[tuple, int] = {}
    for i in range(len(tokens) - n + 1):
        key = tuple(tokens[i : i + n])
        counts[key] = counts.get(key, 0) + 1
    return counts


def bleu(candidate: str, references: Sequence[str]) -> float:
    """Sentence-level BLEU-4 percentage with brevity penalty.

    Zero unigram overlap scores exactly 0; zero counts at higher orders
    are smoothed with a small epsilon (short verb-object phrases make
    BLEU-4 degenerate otherwise).
    """
    if not references:
        raise EmptyReferenceSet("at least one reference required")
    cand = tokenize(candidate)
    refs = [tokenize(r) for r in references]
    if not cand:
        return 0.0
    log_sum = 0.0
    for n in range(1, 5):
        cand_ngrams = _ngrams(cand, n)
        total = sum(cand_ngrams.values())
        clipped = 0
        for gram, count in cand_ngrams.items():
            max_ref = max(_ngrams(r, n).get(gram, 0) for r in refs)
            clipped += min(count, max_ref)
        if n == 1 and clipped == 0:
            return 0.0
        p_n = clipped / total if total else BLEU_EPSILON
        if p_n == 0.0:
            p_n = BLEU_EPSILON
        log_sum += 0.25 * math.log(p_n)
    closest_ref_len = min((len(r) for r in refs), key=lambda L: (abs(L - len(cand)), L))
    bp = 1.0 if len(cand) >= closest_ref_len else math.exp(1 - closest_ref_len / len(cand))
    return 100.0 * bp * math.exp(log_sum)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: str, reference: str) -> float:
    """LCS-based F-measure (beta = 1) on whitespace tokens, percentage."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return 0.0
    lcs = _lcs_length(cand, ref)
    if lcs == 0:
        return 0.0
    p = lcs / len(cand)
    r = lcs / len(ref)
    return 100.0 * 2 * p * r / (p + r)


class Embedder(Protocol):
    def embed(self, token: str) -> np.ndarray: ...


class HashNgramEmbedder:
    """Deterministic character-n-gram hashing embedder for tests and
    offline runs; every token maps to a non-zero fixed-dimension vector."""

    def __init__(self, dim: int = 64, n: int = 3):
        self.dim = dim
        self.n = n

    def embed(self, token: str) -> np.ndarray:
        vec = np.zeros(self.dim)
        padded = f"<{token}>"
        grams = [padded[i : i + self.n] for i in range(max(1, len(padded) - self.n + 1))]
        for gram in grams:
            digest = hashlib.md5(gram.encode("utf-8")).digest()
            vec[int.from_bytes(digest[:4], "big") % self.dim] += 1.0
        return vec


class HttpEmbedder:
    """POSTs {"tokens": [...]} to an embedding service returning
    {"vectors": [[...], ...]}."""

    def __init__(self, endpoint: str, timeout: float = 30.0, client=None):
        import httpx

        self.endpoint = endpoint
        self.client = client or httpx.Client(timeout=timeout)

    def embed(self, token: str) -> np.ndarray:
        try:
            resp = self.client.post(self.endpoint, json={"tokens": [token]})
        except Exception as exc:
            raise EmbedderUnavailable(str(exc)) from exc
        if resp.status_code >= 400:
            raise EmbedderUnavailable(f"{resp.status_code} from {self.endpoint}")
        return np.asarray(resp.json()["vectors"][0], dtype=float)


def _cosine_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a_norm = a / np.maximum(np.linalg.norm(a, axis=1, keepdims=True), 1e-12)
    b_norm = b / np.maximum(np.linalg.norm(b, axis=1, keepdims=True), 1e-12)
    return a_norm @ b_norm.T


def bert_score(candidate: str, reference: str, embedder: Embedder) -> float:
    """Greedy-matching token-embedding F1, percentage. No idf weighting,
    no baseline rescaling."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand and not ref:
        return 100.0
    if not cand or not ref:
        return 0.0
    cand_vecs = np.stack([embedder.embed(t) for t in cand])
    ref_vecs = np.stack([embedder.embed(t) for t in ref])
    sims = _cosine_matrix(ref_vecs, cand_vecs)  # ref x cand
    recall = float(sims.max(axis=1).mean())
    precision = float(sims.max(axis=0).mean())
    if precision + recall == 0:
        return 0.0
    return 100.0 * 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class RationaleMetrics:
    bleu: float
    rouge_l: float
    bert_score_f1: float

    def to_doc(self) -> dict:
        return {"bleu": self.bleu, "rouge_l": self.rouge_l, "bert_score_f1": self.bert_score_f1}


def rationale_metrics(candidates: Sequence[str], references: Sequence[str],
                      embedder: Optional[Embedder] = None) -> RationaleMetrics:
    """Corpus scores: mean of per-pair sentence scores."""
    if len(candidates) != len(references) or not candidates:
        raise LengthMismatch(f"{len(candidates)} candidates vs {len(references)} references")
    embedder = embedder or HashNgramEmbedder()
    bleus = [bleu(c, [r]) for c, r in zip(candidates, references)]
    rouges = [rouge_l(c, r) for c, r in zip(candidates, references)]
    berts = [bert_score(c, r, embedder) for c, r in zip(candidates, references)]
    return RationaleMetrics(
        bleu=sum(bleus) / len(bleus),
        rouge_l=sum(rouges) / len(rouges),
        bert_score_f1=sum(berts) / len(berts),
    )


# -- composite ------------------------------------------------------------


def overall_score(
    binary: BinaryMetrics,
    multilabel: MultiLabelMetrics,
    rationale: RationaleMetrics,
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0),
) -> float:
    """Equal-weight (by default) mean of per-task means after mapping every
    metric to [0,1], inverting Hamming loss.

    The composition is configurable; no setting claims to reproduce any
    externally published composite.
    """
    if binary is None or multilabel is None or rationale is None:
        raise MissingTask("all three task metric groups are required")
    binary_part = (binary.accuracy + binary.precision + binary.recall + binary.f1) / 4 / 100
    multi_part = (
        multilabel.macro_p + multilabel.macro_r + multilabel.macro_f1
        + (100.0 - multilabel.hamming_loss) + multilabel.subset_accuracy
    ) / 5 / 100
    rationale_part = (rationale.bleu + rationale.rouge_l + rationale.bert_score_f1) / 3 / 100
    total = sum(weights)
    return 100.0 * (
        weights[0] * binary_part + weights[1] * multi_part + weights[2] * rationale_part
    ) / total


# -- report assembly ------------------------------------------------------


@dataclass(frozen=True)
class GoldRecord:
    img_id: str
    platform: str
    label: str
    categories: tuple[str, ...] = ()
    rationales: tuple[str, ...] = ()


@dataclass(frozen=True)
class PredictionRecord:
    img_id: str
    label: str
    categories: tuple[str, ...] = ()
    rationale: str = ""
    setting: str = "meme+post"

    @classmethod
    def from_doc(cls, doc: dict) -> "PredictionRecord":
        return cls(
            img_id=doc["img_id"],
            label=str(doc.get("label", "")).lower(),
            categories=tuple(str(c).lower() for c in doc.get("categories", [])),
            rationale=doc.get("rationale", ""),
            setting=doc.get("setting", "meme+post"),
        )


@dataclass(frozen=True)
class MetricReport:
    binary: BinaryMetrics
    multilabel: MultiLabelMetrics
    rationale: RationaleMetrics
    overall: float
    slice_platform: Optional[str] = None
    n_records: int = 0

    def to_doc(self) -> dict:
        doc = {
            "overall": self.overall,
            "binary": self.binary.to_doc(),
            "multilabel": self.multilabel.to_doc(),
            "rationale": self.rationale.to_doc(),
            "n_records": self.n_records,
        }
        if self.slice_platform:
            doc["slice_platform"] = self.slice_platform
        return doc


def evaluate(
    golds: Sequence[GoldRecord],
    preds: Sequence[PredictionRecord],
    platform: Optional[str] = None,
    eval_population: str = "gold-hate",
    embedder: Optional[Embedder] = None,
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0),
) -> MetricReport:
    """Score a prediction set against gold annotations.

    Multi-label and rationale metrics are computed over gold-hate records
    by default (eval_population="all" includes everything, empty gold sets
    and all)."""
    if platform is not None:
        golds = [g for g in golds if g.platform == platform]
        if not golds:
            raise EmptySlice(f"no gold records for platform {platform!r}")
    by_id = {p.img_id: p for p in preds}
    missing = [g.img_id for g in golds if g.img_id not in by_id]
    if missing:
        raise LengthMismatch(f"{len(missing)} gold records without predictions, e.g. {missing[:3]}")
    aligned = [(g, by_id[g.img_id]) for g in golds]

    binary = binary_metrics([p.label for _, p in aligned], [g.label for g, _ in aligned])

    if eval_population == "gold-hate":
        multi_pairs = [(g, p) for g, p in aligned if g.label == HateLabel.HATE.value]
    else:
        multi_pairs = aligned
    if multi_pairs:
        multi = multilabel_metrics([p.categories for _, p in multi_pairs],
                                   [g.categories for g, _ in multi_pairs])
    else:
        multi = MultiLabelMetrics(0.0, 0.0, 0.0, 0.0, 0.0)

    rationale_pairs = [(g, p) for g, p in aligned
                       if g.label == HateLabel.HATE.value and g.rationales]
    if rationale_pairs:
        rationale = rationale_metrics(
            [p.rationale for _, p in rationale_pairs],
            [", ".join(g.rationales) for g, _ in rationale_pairs],
            embedder=embedder,
        )
    else:
        rationale = RationaleMetrics(0.0, 0.0, 0.0)

    return MetricReport(
        binary=binary,
        multilabel=multi,
        rationale=rationale,
        overall=overall_score(binary, multi, rationale, weights),
        slice_platform=platform,
        n_records=len(aligned),
    )


def load_predictions(path) -> list[PredictionRecord]:
    """Prediction file: JSON list or JSONL, one document per record."""
    from pathlib import Path

    text = Path(path).read_text(encoding="utf-8").strip()
    if text.startswith("["):
        docs = json.loads(text)
    else:
        docs = [json.loads(line) for line in text.splitlines() if line.strip()]
    return [PredictionRecord.from_doc(d) for d in docs]
