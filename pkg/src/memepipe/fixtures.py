"""Deterministic 50-record fixture: raw platform dumps, scripted OCR and
annotator behavior, and the designed end-of-pipeline funnel.

The fixture is fully scripted, so repeated pipeline runs (at any worker
count) produce byte-identical record stores and the stage funnel below.
"""

from __future__ import annotations

import json
from pathlib import Path

from .annotate import ScriptedAnnotator, annotate_corpus
from .cleaning import clean_corpus
from .consensus import arbitrate_corpus
from .explication import explicate_corpus
from .extraction import MockOcr, extract_corpus
from .ingestion import DirectoryCollector, collect
from .queue import ReviewQueue
from .store import RecordStore

# Designed funnel for the 50-record fixture after a full mock pipeline run.
EXPECTED_STAGE_COUNTS = {
    "collected": 2,    # OCR failures, left for reprocessing
    "rejected": 8,     # length-gated (5 short posts, 3 short image texts)
    "annotated": 13,   # 10 binary disagreements + 3 category disagreements
    "arbitrated": 1,   # hate record whose draft rationale breaks the word limit
    "explicated": 26,  # 12 normal pass-throughs + 14 finalized hate records
}
EXPECTED_QUEUE_DEPTH = {"binary": 10, "categories": 3, "rationale": 0, "vote": 0}

_PLATFORM_OF = {}
for _i in range(0, 20):
    _PLATFORM_OF[f"img{_i:03d}"] = "4chan"
for _i in range(20, 35):
    _PLATFORM_OF[f"img{_i:03d}"] = "x"
for _i in range(35, 50):
    _PLATFORM_OF[f"img{_i:03d}"] = "weibo"

OCR_FAIL = {"img000", "img020"}
SHORT_POST = {"img001", "img002", "img021", "img035", "img036"}
SHORT_IMG = {"img003", "img022", "img037"}

HATE_UNANIMOUS = (
    [f"img{i:03d}" for i in range(4, 12)]
    + [f"img{i:03d}" for i in range(23, 27)]
    + [f"img{i:03d}" for i in range(38, 41)]
)  # 15 records, unanimous label and categories
HATE_CAT_DISAGREE = ["img012", "img027", "img041"]
NORMAL_UNANIMOUS = (
    [f"img{i:03d}" for i in range(13, 17)]
    + [f"img{i:03d}" for i in range(28, 32)]
    + [f"img{i:03d}" for i in range(42, 46)]
)
BINARY_DISAGREE = (
    [f"img{i:03d}" for i in range(17, 20)]
    + [f"img{i:03d}" for i in range(32, 35)]
    + [f"img{i:03d}" for i in range(46, 50)]
)

BAD_DRAFT_ID = "img011"  # draft exceeds the 30-word limit, stays unfinalized

_CATEGORY_CYCLE = [
    ["politics"],
    ["race", "violence"],
    ["religion"],
    ["gender"],
    ["international relations", "politics"],
]

_RATIONALE_CYCLE = [
    "mock a political group",
    "incite violence against immigrants",
    "insult a religious community",
    "depreciate transgender individuals",
    "provoke hostility between nations",
]


def _post_text(img_id: str, platform: str) -> str:
    n = int(img_id[3:])
    if img_id in SHORT_POST:
        if platform == "4chan":
            return f"short >>12{n:03d} ok"
        return f"@user{n} short #cut ok"
    if platform == "4chan":
        return f"check this >>12{n:03d} epic meme number {n} right here http://example.com/{n} lol"
    if platform == "x":
        return f"@someone{n} this is a provocative meme number {n} worth a look #meme{n} https://t.co/x{n}"
    return f"#话题{n}# 这是一个非常有争议的表情包编号{n}，在网络上讨论度很高 @用户{n}"


def _img_text(img_id: str) -> str:
    n = int(img_id[3:])
    if img_id in OCR_FAIL:
        return "FAIL"
    if img_id in SHORT_IMG:
        return "tiny"
    return f"TOP TEXT MEME {n}\nBOTTOM LINE {n}"


def write_fixture_raw(root: str | Path) -> Path:
    """Write the raw fixture dumps, one directory per platform."""
    root = Path(root)
    for img_id, platform in _PLATFORM_OF.items():
        n = int(img_id[3:])
        platform_dir = root / platform
        platform_dir.mkdir(parents=True, exist_ok=True)
        doc = {
            "post_id": f"post{n:03d}",
            "post_time": 1706745600 + n * 60,
            "img_id": img_id,
            "img_url": f"https://example.com/{platform}/{img_id}.png",
            "post_text": _post_text(img_id, platform),
        }
        (platform_dir / f"{img_id}.json").write_text(
            json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
        (platform_dir / f"{img_id}.png").write_text(_img_text(img_id) + "\n", encoding="utf-8")
    return root


def _categories_for(img_id: str) -> list[str]:
    return _CATEGORY_CYCLE[int(img_id[3:]) % len(_CATEGORY_CYCLE)]


def rationale_for(img_id: str) -> str:
    if img_id == BAD_DRAFT_ID:
        return " ".join(["word"] * 31)
    return _RATIONALE_CYCLE[int(img_id[3:]) % len(_RATIONALE_CYCLE)]


def _binary(label: str, confidence: float) -> str:
    return json.dumps({"label": label, "confidence_score": confidence})


def _category_reply(categories: list[str]) -> str:
    return json.dumps({"category": categories,
                       "confidence_score": [0.8 for _ in categories]})


def fixture_ensemble() -> list[ScriptedAnnotator]:
    """Three scripted annotators realizing the designed agreement pattern."""
    disagree_cats = {"ann-a": ["race"], "ann-b": ["gender"], "ann-c": ["religion"]}
    providers = []
    for provider_id in ("ann-a", "ann-b", "ann-c"):
        script: dict = {}
        for img_id in HATE_UNANIMOUS:
            script[img_id] = {
                "binary": _binary("hate", 0.9),
                "categories": _category_reply(_categories_for(img_id)),
            }
        for img_id in HATE_CAT_DISAGREE:
            script[img_id] = {
                "binary": _binary("hate", 0.8),
                "categories": _category_reply(disagree_cats[provider_id]),
            }
        for img_id in NORMAL_UNANIMOUS:
            script[img_id] = {"binary": _binary("normal", 0.85)}
        for img_id in BINARY_DISAGREE:
            label = "normal" if provider_id == "ann-c" else "hate"
            script[img_id] = {
                "binary": _binary(label, 0.6),
                "categories": _category_reply(_categories_for(img_id)),
            }
        providers.append(ScriptedAnnotator(provider_id=provider_id, script=script))
    return providers


def fixture_explicator() -> ScriptedAnnotator:
    script = {img_id: {"rationale": rationale_for(img_id)} for img_id in HATE_UNANIMOUS}
    return ScriptedAnnotator(provider_id="explicator-mock", script=script)


class DigestAnnotator:
    """Generic deterministic mock annotator for dry runs outside the
    bundled fixture: answers derive from a digest of (provider, image id),
    so any store gets stable, reproducible mock annotations."""

    def __init__(self, provider_id: str):
        self.provider_id = provider_id

    def complete(self, img_ref: str, prompt: str) -> str:
        import hashlib

        key = Path(img_ref).stem
        digest = hashlib.md5(f"{self.provider_id}|{key}".encode("utf-8")).digest()
        if "classification assistant" in prompt:
            cats = _CATEGORY_CYCLE[digest[1] % len(_CATEGORY_CYCLE)]
            return _category_reply(cats)
        if "explicator" in prompt:
            return _RATIONALE_CYCLE[digest[2] % len(_RATIONALE_CYCLE)]
        label = "hate" if digest[0] % 2 == 0 else "normal"
        return _binary(label, 0.5 + (digest[3] % 50) / 100.0)


def run_fixture_pipeline(store_dir: str | Path, fixture_dir: str | Path, workers: int = 4) -> RecordStore:
    """Run the whole mock pipeline over the fixture into a store."""
    store = RecordStore(store_dir)
    queue = ReviewQueue(store.root / "queue.json")
    fixture_dir = Path(fixture_dir)
    for platform in ("4chan", "x", "weibo"):
        collect(DirectoryCollector(fixture_dir / platform, platform=platform), store)
    extract_corpus(store, MockOcr(), workers=workers)
    clean_corpus(store)
    annotate_corpus(store, fixture_ensemble())
    arbitrate_corpus(store, queue)
    explicate_corpus(store, fixture_explicator(), auto_finalize=True)
    return store
