"""Annotator ensemble: prompt rendering, dispatch, and response parsing.

Each meme is shown to N independent model providers. A provider first
answers the binary hate prompt; only a hate answer triggers the
fine-grained category prompt. Providers sit behind one request contract
(image reference + prompt in, raw text out) with HTTP, subprocess, and
scripted-mock adapters.
"""

from __future__ import annotations

import json
import logging
import re
import subprocess
from dataclasses import dataclass, field, replace
from pathlib import Path
from importlib import resources
from typing import Optional, Protocol

from .records import CATEGORY_UNIVERSE, HateLabel, MemeRecord, Stage, normalize_category, stage_rank
from .store import RecordStore

log = logging.getLogger(__name__)

TASK_BINARY = "binary"
TASK_CATEGORIES = "categories"

STATUS_OK = "ok"
STATUS_MALFORMED = "malformed"
STATUS_FAILED = "failed"

P1_BINARY = "p1_binary"
P2_CATEGORY = "p2_category"
E1_EXPLICATOR = "e1_explicator"

_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")


class UnboundPlaceholder(Exception):
    pass


class EnsembleEmpty(Exception):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    body: str

    def render(self, **bindings: str) -> str:
        def sub(match: re.Match) -> str:
            name = match.group(1)
            if name not in bindings:
                raise UnboundPlaceholder(name)
            return bindings[name]

        return _PLACEHOLDER_RE.sub(sub, self.body)


def load_template(template_id: str) -> PromptTemplate:
    body = resources.files("memepipe.prompts").joinpath(f"{template_id}.txt").read_text("utf-8")
    return PromptTemplate(template_id=template_id, body=body)


def render_prompt(template: PromptTemplate, record: MemeRecord, include_post: bool = True) -> str:
    """Bind a record into a prompt. With include_post off, the post clause
    of the binary prompt is dropped entirely (meme-only setting)."""
    body = template.body
    if template.template_id == P1_BINARY and not include_post:
        body = body.replace(" and post: {post_text}", "")
        template = PromptTemplate(template.template_id, body)
    bindings = {"post_text": record.post_text}
    return template.render(**{k: v for k, v in bindings.items() if "{" + k + "}" in body})


@dataclass(frozen=True)
class AnnotatorResponse:
    provider_id: str
    task: str
    raw_text: str = ""
    status: str = STATUS_OK
    label: Optional[str] = None
    label_confidence: Optional[float] = None
    categories: tuple[str, ...] = ()
    category_confidences: tuple[float, ...] = ()

    def to_doc(self) -> dict:
        doc: dict = {"provider_id": self.provider_id, "task": self.task, "status": self.status,
                     "raw_text": self.raw_text}
        if self.label is not None:
            doc["label"] = self.label
            doc["label_confidence"] = self.label_confidence
        if self.task == TASK_CATEGORIES and self.status == STATUS_OK:
            doc["categories"] = list(self.categories)
            doc["category_confidences"] = list(self.category_confidences)
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "AnnotatorResponse":
        return cls(
            provider_id=doc["provider_id"],
            task=doc["task"],
            raw_text=doc.get("raw_text", ""),
            status=doc.get("status", STATUS_OK),
            label=doc.get("label"),
            label_confidence=doc.get("label_confidence"),
            categories=tuple(doc.get("categories", [])),
            category_confidences=tuple(doc.get("category_confidences", [])),
        )


def _scan_json_objects(raw: str):
    """Yield every balanced, parseable JSON object embedded in raw text."""
    for start, ch in enumerate(raw):
        if ch != "{":
            continue
        depth = 0
        for end in range(start, len(raw)):
            if raw[end] == "{":
                depth += 1
            elif raw[end] == "}":
                depth -= 1
                if depth == 0:
                    try:
                        obj = json.loads(raw[start : end + 1])
                    except json.JSONDecodeError:
                        break
                    if isinstance(obj, dict):
                        yield obj
                    break


def _clamp(value, default: float = 0.5) -> float:
    try:
        return min(1.0, max(0.0, float(value)))
    except (TypeError, ValueError):
        return default


def parse_binary_response(raw: str, provider_id: str = "") -> AnnotatorResponse:
    """Extract the first well-formed {label, confidence_score} object.

    Total: anything unusable maps to a Malformed response, never an
    exception.
    """
    for obj in _scan_json_objects(raw):
        label_raw = obj.get("label")
        if not isinstance(label_raw, str):
            continue
        label = label_raw.strip().lower()
        if label not in (HateLabel.HATE.value, HateLabel.NORMAL.value):
            continue
        return AnnotatorResponse(
            provider_id=provider_id,
            task=TASK_BINARY,
            raw_text=raw,
            status=STATUS_OK,
            label=label,
            label_confidence=_clamp(obj.get("confidence_score")),
        )
    return AnnotatorResponse(provider_id=provider_id, task=TASK_BINARY, raw_text=raw, status=STATUS_MALFORMED)


def parse_category_response(raw: str, provider_id: str = "") -> AnnotatorResponse:
    """Extract the first {category: [...]} object; unknown category names
    are dropped with a warning; missing confidences default to 0.5."""
    for obj in _scan_json_objects(raw):
        cats_raw = obj.get("category")
        if not isinstance(cats_raw, list):
            continue
        confs_raw = obj.get("confidence_score")
        if not isinstance(confs_raw, list):
            confs_raw = []
        names: list[str] = []
        confs: list[float] = []
        for i, name in enumerate(cats_raw):
            canonical = normalize_category(str(name))
            if canonical is None:
                log.warning("dropping unknown category %r from %s", name, provider_id)
                continue
            if canonical in names:
                continue
            names.append(canonical)
            confs.append(_clamp(confs_raw[i]) if i < len(confs_raw) else 0.5)
        order = sorted(range(len(names)), key=lambda i: CATEGORY_UNIVERSE.index(names[i]))
        return AnnotatorResponse(
            provider_id=provider_id,
            task=TASK_CATEGORIES,
            raw_text=raw,
            status=STATUS_OK,
            categories=tuple(names[i] for i in order),
            category_confidences=tuple(confs[i] for i in order),
        )
    return AnnotatorResponse(provider_id=provider_id, task=TASK_CATEGORIES, raw_text=raw, status=STATUS_MALFORMED)


class ProviderCallFailed(Exception):
    pass


class AnnotatorProvider(Protocol):
    provider_id: str

    def complete(self, img_ref: str, prompt: str) -> str: ...


@dataclass
class ScriptedAnnotator:
    """Deterministic mock: maps (img_id, template kind) to a canned reply.

    The script maps ``img_id`` to ``{"binary": text, "categories": text}``;
    a text of ``RAISE`` raises, simulating a provider failure. Scripts may
    also hold a list of texts, consumed call-by-call, for flaky-provider
    tests.
    """

    provider_id: str
    script: dict = field(default_factory=dict)
    default_binary: str = '{"label": "normal", "confidence_score": 0.5}'
    calls: list = field(default_factory=list)

    def complete(self, img_ref: str, prompt: str) -> str:
        if "classification assistant" in prompt:
            kind = TASK_CATEGORIES
        elif "explicator" in prompt:
            kind = "rationale"
        else:
            kind = TASK_BINARY
        key = Path(img_ref).stem
        self.calls.append((key, kind))
        entry = self.script.get(key, self.script.get(img_ref, {}))
        defaults = {
            TASK_BINARY: self.default_binary,
            TASK_CATEGORIES: '{"category": []}',
            "rationale": "mock a generic group",
        }
        reply = entry.get(kind, defaults[kind])
        if isinstance(reply, list):
            reply = reply.pop(0) if reply else ""
        if reply == "RAISE":
            raise ProviderCallFailed(f"scripted failure for {img_ref}")
        return reply


class HttpAnnotator:
    """POSTs {img_ref, prompt} to an endpoint returning {"text": ...}."""

    def __init__(self, provider_id: str, endpoint: str, timeout: float = 60.0, client=None):
        import httpx

        self.provider_id = provider_id
        self.endpoint = endpoint
        self.client = client or httpx.Client(timeout=timeout)

    def complete(self, img_ref: str, prompt: str) -> str:
        try:
            resp = self.client.post(self.endpoint, json={"img": img_ref, "prompt": prompt})
        except Exception as exc:
            raise ProviderCallFailed(str(exc)) from exc
        if resp.status_code >= 400:
            raise ProviderCallFailed(f"{resp.status_code} from {self.endpoint}")
        return resp.json().get("text", "")


class SubprocessAnnotator:
    """Runs a command with the image path appended; the prompt arrives on
    stdin and the reply is read from stdout."""

    def __init__(self, provider_id: str, command: list[str], timeout: float = 120.0):
        self.provider_id = provider_id
        self.command = command
        self.timeout = timeout

    def complete(self, img_ref: str, prompt: str) -> str:
        try:
            proc = subprocess.run(
                self.command + [img_ref],
                input=prompt.encode("utf-8"),
                capture_output=True,
                timeout=self.timeout,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise ProviderCallFailed(str(exc)) from exc
        if proc.returncode != 0:
            raise ProviderCallFailed(proc.stderr.decode("utf-8", errors="replace").strip())
        return proc.stdout.decode("utf-8", errors="replace")


def _call_with_retries(provider, img_ref: str, prompt: str, parse, task: str, max_retries: int) -> AnnotatorResponse:
    last: Optional[AnnotatorResponse] = None
    for _ in range(max_retries + 1):
        try:
            raw = provider.complete(img_ref, prompt)
        except ProviderCallFailed as exc:
            last = AnnotatorResponse(
                provider_id=provider.provider_id,
                task=task,
                raw_text=str(exc),
                status=STATUS_FAILED,
            )
            continue
        response = parse(raw, provider.provider_id)
        if response.status == STATUS_OK:
            return response
        last = response
    assert last is not None
    return last


def annotate_record(
    record: MemeRecord,
    ensemble: list[AnnotatorProvider],
    include_post: bool = True,
    max_retries: int = 2,
    category_include_post: bool = False,
) -> list[AnnotatorResponse]:
    """Run the two-step prompt scheme against every provider.

    The category prompt fires if and only if the provider's binary answer
    is hate. Responses come back sorted by (provider_id, task) so the
    result is independent of dispatch order.
    """
    if not ensemble:
        raise EnsembleEmpty("annotator ensemble is empty")
    if stage_rank(record.stage) < stage_rank(Stage.CLEANED):
        raise ValueError(f"record {record.img_id} not cleaned yet")
    p1 = load_template(P1_BINARY)
    p2 = load_template(P2_CATEGORY)
    img_ref = record.img_path or record.img_id
    responses: list[AnnotatorResponse] = []
    for provider in sorted(ensemble, key=lambda p: p.provider_id):
        binary = _call_with_retries(
            provider, img_ref, render_prompt(p1, record, include_post), parse_binary_response,
            TASK_BINARY, max_retries
        )
        responses.append(binary)
        if binary.status == STATUS_OK and binary.label == HateLabel.HATE.value:
            category = _call_with_retries(
                provider,
                img_ref,
                render_prompt(p2, record, category_include_post),
                parse_category_response,
                TASK_CATEGORIES,
                max_retries,
            )
            responses.append(category)
    responses.sort(key=lambda r: (r.provider_id, r.task))
    return responses


@dataclass
class AnnotationReport:
    annotated: int = 0
    skipped: int = 0


def annotate_corpus(
    store: RecordStore,
    ensemble: list[AnnotatorProvider],
    include_post: bool = True,
    max_retries: int = 2,
) -> AnnotationReport:
    """Annotate every CLEANED record; responses persist on the record."""
    report = AnnotationReport()
    for record in store:
        if record.stage is not Stage.CLEANED:
            report.skipped += 1
            continue
        responses = annotate_record(record, ensemble, include_post=include_post, max_retries=max_retries)
        updated = replace(
            record.with_stage(Stage.ANNOTATED),
            responses=tuple(r.to_doc() for r in responses),
        )
        store.put(updated)
        report.annotated += 1
    return report
