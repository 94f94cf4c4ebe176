"""Pipeline configuration: one YAML file drives every stage.

Values may reference environment variables with ``${VAR}`` syntax (used
for secrets such as API tokens). Validation is not fail-fast: every
violation found is reported.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .cleaning import (
    DEFAULT_GATES,
    DEFAULT_RULES,
    CleaningRuleSet,
    LengthGate,
    WhitespacePolicy,
)

_ENV_RE = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")


class ConfigInvalid(Exception):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


def _interpolate(value: Any) -> Any:
    if isinstance(value, str):
        return _ENV_RE.sub(lambda m: os.environ.get(m.group(1), m.group(0)), value)
    if isinstance(value, list):
        return [_interpolate(v) for v in value]
    if isinstance(value, dict):
        return {k: _interpolate(v) for k, v in value.items()}
    return value


@dataclass
class ProviderConfig:
    provider_id: str
    kind: str = "mock"  # mock | http | subprocess
    endpoint: str = ""
    command: list[str] = field(default_factory=list)
    timeout: float = 60.0
    max_retries: int = 2


@dataclass
class PipelineConfig:
    store: str = "store"
    service_port: int = 8777
    separator: str = " [SEP] "
    quorum: int = 3
    tau: float = 0.5
    accept_threshold: int = 2
    lease_seconds: float = 600.0
    include_post: bool = True
    eval_population: str = "gold-hate"
    overall_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    rules: dict[str, CleaningRuleSet] = field(default_factory=lambda: dict(DEFAULT_RULES))
    gates: dict[str, LengthGate] = field(default_factory=lambda: dict(DEFAULT_GATES))
    ensemble: list[ProviderConfig] = field(default_factory=list)
    explicator: Optional[ProviderConfig] = None
    ocr_kind: str = "mock"  # mock | subprocess
    ocr_command: list[str] = field(default_factory=list)
    workers: int = 4
    prompt_overrides: dict[str, str] = field(default_factory=dict)


def _parse_platform(name: str, doc: dict, errors: list[str]) -> tuple[CleaningRuleSet | None, LengthGate | None]:
    rule = None
    gate = None
    try:
        policy = WhitespacePolicy(doc.get("whitespace_policy", "space"))
        rule = CleaningRuleSet(
            platform=name,
            strip_urls=bool(doc.get("strip_urls", True)),
            mention_pattern=doc.get("mention_pattern", r"@\S+"),
            hashtag_patterns=tuple(doc.get("hashtag_patterns", [r"#\S+"])),
            quote_ref_pattern=doc.get("quote_ref_pattern"),
            whitespace_policy=policy,
        )
    except (re.error, ValueError) as exc:
        errors.append(f"platforms.{name}: bad cleaning rules ({exc})")
    gate_doc = doc.get("gate", {})
    try:
        gate = LengthGate(
            post_min=int(gate_doc.get("post_min", 20)),
            post_max=int(gate_doc.get("post_max", 789)),
            img_min=int(gate_doc.get("img_min", 10)),
            img_max=int(gate_doc.get("img_max", 100)),
        )
    except ValueError as exc:
        errors.append(f"platforms.{name}: bad gate ({exc})")
    return rule, gate


def _parse_provider(doc: dict, index: int, errors: list[str]) -> ProviderConfig:
    provider_id = str(doc.get("provider_id", "")).strip()
    if not provider_id:
        errors.append(f"ensemble[{index}]: provider_id required")
    kind = doc.get("kind", "mock")
    if kind not in ("mock", "http", "subprocess"):
        errors.append(f"ensemble[{index}]: unknown kind {kind!r}")
    if kind == "http" and not doc.get("endpoint"):
        errors.append(f"ensemble[{index}]: http provider needs endpoint")
    if kind == "subprocess" and not doc.get("command"):
        errors.append(f"ensemble[{index}]: subprocess provider needs command")
    return ProviderConfig(
        provider_id=provider_id,
        kind=kind,
        endpoint=str(doc.get("endpoint", "")),
        command=[str(c) for c in doc.get("command", [])],
        timeout=float(doc.get("timeout", 60.0)),
        max_retries=int(doc.get("max_retries", 2)),
    )


def validate_config(path: str | Path) -> tuple[Optional[PipelineConfig], list[str]]:
    """Parse and fully validate a config file.

    Returns (config, []) on success or (None, all violations found).
    """
    path = Path(path)
    if not path.exists():
        return None, [f"config file {path} not found"]
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        return None, [f"unparseable YAML: {exc}"]
    if not isinstance(raw, dict):
        return None, ["config root must be a mapping"]
    raw = _interpolate(raw)

    errors: list[str] = []
    config = PipelineConfig()
    config.store = str(raw.get("store", config.store))
    config.service_port = int(raw.get("service_port", config.service_port))
    config.separator = str(raw.get("separator", config.separator))
    config.workers = int(raw.get("workers", config.workers))
    config.include_post = bool(raw.get("include_post", True))
    config.eval_population = str(raw.get("eval_population", config.eval_population))

    config.quorum = int(raw.get("quorum", config.quorum))
    if config.quorum < 1:
        errors.append(f"quorum must be >= 1, got {config.quorum}")
    config.tau = float(raw.get("tau", config.tau))
    if not 0.0 <= config.tau <= 1.0:
        errors.append(f"tau must be within [0, 1], got {config.tau}")
    config.accept_threshold = int(raw.get("accept_threshold", config.accept_threshold))
    if config.accept_threshold < 1:
        errors.append(f"accept_threshold must be >= 1, got {config.accept_threshold}")
    config.lease_seconds = float(raw.get("lease_seconds", config.lease_seconds))
    if config.lease_seconds <= 0:
        errors.append(f"lease_seconds must be positive, got {config.lease_seconds}")

    weights = raw.get("overall_weights", list(config.overall_weights))
    if not (isinstance(weights, list) and len(weights) == 3):
        errors.append("overall_weights must be a 3-element list")
    else:
        config.overall_weights = tuple(float(w) for w in weights)

    for name, doc in (raw.get("platforms") or {}).items():
        rule, gate = _parse_platform(str(name), doc or {}, errors)
        if rule is not None:
            config.rules[str(name)] = rule
        if gate is not None:
            config.gates[str(name)] = gate

    config.ensemble = [
        _parse_provider(doc or {}, i, errors) for i, doc in enumerate(raw.get("ensemble") or [])
    ]
    seen = set()
    for provider in config.ensemble:
        if provider.provider_id in seen:
            errors.append(f"duplicate provider_id {provider.provider_id!r}")
        seen.add(provider.provider_id)
    if raw.get("explicator"):
        config.explicator = _parse_provider(raw["explicator"], 0, errors)

    ocr = raw.get("ocr") or {}
    config.ocr_kind = ocr.get("kind", "mock")
    if config.ocr_kind not in ("mock", "subprocess"):
        errors.append(f"unknown ocr kind {config.ocr_kind!r}")
    config.ocr_command = [str(c) for c in ocr.get("command", [])]
    if config.ocr_kind == "subprocess" and not config.ocr_command:
        errors.append("subprocess OCR needs a command")

    for template_id, prompt_path in (raw.get("prompts") or {}).items():
        if not Path(prompt_path).exists():
            errors.append(f"prompts.{template_id}: file {prompt_path} not found")
        else:
            config.prompt_overrides[str(template_id)] = str(prompt_path)

    if errors:
        return None, errors
    return config, []


def load_config(path: str | Path) -> PipelineConfig:
    config, errors = validate_config(path)
    if config is None:
        raise ConfigInvalid(errors)
    return config
