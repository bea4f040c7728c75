"""Experiment configuration: models, temperatures, prompt templates, budgets."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..errors import SchemaViolation, TemperatureOutOfRange

CONFIG_ENV = "AGONE_CONFIG"
ROLES = ("system", "user")
POLICIES = ("compiled_only", "zero_penalized")
FALLBACKS = ("fail", "truncate_comments", "drop_low_relevance_methods")

# Context windows as published by the providers; anything else gets the
# conservative default.
DEFAULT_TOKEN_LIMITS = {
    "gpt-4o-mini": 128_000,
    "gpt-4o": 128_000,
    "gemini-1.5-pro": 2_000_000,
    "gemini-1.5-flash": 1_000_000,
    "llama3.1:70b": 128_000,
    "llama3.1:8b": 128_000,
}
FALLBACK_TOKEN_LIMIT = 8_192

_TOP_LEVEL = {"llms", "prompts", "token_limits", "aggregation_policy", "exemplar", "fallback", "variables"}
_LLM_KEYS = {"model", "temperature", "base_url", "api_key_ref", "timeout", "max_retries"}
_EXEMPLAR_KEYS = {"class_path", "test_path", "testing_framework", "java_version"}


@dataclass(frozen=True)
class LlmSpec:
    model: str
    temperature: float
    base_url: str | None = None
    api_key_ref: str | None = None
    timeout: float = 120.0
    max_retries: int = 3


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    messages: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class ExemplarRef:
    class_path: Path
    test_path: Path
    testing_framework: str = "JUnit 5"
    java_version: str = "17"


def default_exemplar() -> ExemplarRef:
    base = Path(__file__).resolve().parent.parent / "data" / "exemplar"
    return ExemplarRef(base / "Calculator.java", base / "CalculatorTest.java")


@dataclass(frozen=True)
class ExperimentConfig:
    llms: tuple[LlmSpec, ...]
    prompts: tuple[PromptTemplate, ...]
    token_limits: dict[str, int] = field(default_factory=dict)
    aggregation_policy: str = "compiled_only"
    exemplar: ExemplarRef = field(default_factory=default_exemplar)
    fallback: str = "fail"
    variables: dict[str, str] = field(default_factory=dict)

    def token_limit(self, model: str) -> int:
        if model in self.token_limits:
            return self.token_limits[model]
        return DEFAULT_TOKEN_LIMITS.get(model, FALLBACK_TOKEN_LIMIT)

    def prompt(self, name: str) -> PromptTemplate:
        for p in self.prompts:
            if p.name == name:
                return p
        raise KeyError(name)


def _require(cond: bool, message: str, path: str) -> None:
    if not cond:
        raise SchemaViolation(message, path)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _parse_llm(item, path: str) -> LlmSpec:
    _require(isinstance(item, dict), "expected a mapping", path)
    for key in item:
        _require(key in _LLM_KEYS, "unknown key", f"{path}.{key}")
    _require(isinstance(item.get("model"), str) and item["model"], "model name required", f"{path}.model")
    temp = item.get("temperature", 0)
    _require(_is_number(temp), "temperature must be a number", f"{path}.temperature")
    if not 0 <= temp <= 2:
        raise TemperatureOutOfRange(f"temperature {temp} outside [0, 2]", f"{path}.temperature")
    retries = item.get("max_retries", 3)
    _require(isinstance(retries, int) and retries >= 0, "must be a non-negative integer", f"{path}.max_retries")
    timeout = item.get("timeout", 120.0)
    _require(_is_number(timeout) and timeout > 0, "must be a positive number", f"{path}.timeout")
    return LlmSpec(
        model=item["model"],
        temperature=float(temp),
        base_url=item.get("base_url"),
        api_key_ref=item.get("api_key_ref"),
        timeout=float(timeout),
        max_retries=retries,
    )


def _parse_prompt(item, path: str) -> PromptTemplate:
    _require(isinstance(item, dict), "expected a mapping", path)
    for key in item:
        _require(key in ("name", "value"), "unknown key", f"{path}.{key}")
    _require(isinstance(item.get("name"), str) and item["name"], "prompt name required", f"{path}.name")
    value = item.get("value")
    _require(isinstance(value, list) and value, "expected a non-empty message list", f"{path}.value")
    messages = []
    for j, msg in enumerate(value):
        mpath = f"{path}.value[{j}]"
        _require(isinstance(msg, dict), "expected a mapping", mpath)
        for key in msg:
            _require(key in ("role", "content"), "unknown key", f"{mpath}.{key}")
        _require(msg.get("role") in ROLES, f"role must be one of {', '.join(ROLES)}", f"{mpath}.role")
        _require(isinstance(msg.get("content"), str), "content must be text", f"{mpath}.content")
        messages.append((msg["role"], msg["content"]))
    return PromptTemplate(item["name"], tuple(messages))


def _parse_exemplar(item, base_dir: Path) -> ExemplarRef:
    _require(isinstance(item, dict), "expected a mapping", "exemplar")
    for key in item:
        _require(key in _EXEMPLAR_KEYS, "unknown key", f"exemplar.{key}")
    for key in ("class_path", "test_path"):
        _require(isinstance(item.get(key), str), "path required", f"exemplar.{key}")
    return ExemplarRef(
        class_path=base_dir / item["class_path"],
        test_path=base_dir / item["test_path"],
        testing_framework=str(item.get("testing_framework", "JUnit 5")),
        java_version=str(item.get("java_version", "17")),
    )


def load_config(yaml_text: str, base_dir: str | Path | None = None) -> ExperimentConfig:
    """Validate and load a configuration document.

    Relative exemplar paths resolve against ``base_dir`` (the config file's
    directory when loaded from disk).
    """
    try:
        doc = yaml.safe_load(yaml_text)
    except yaml.YAMLError as exc:
        raise SchemaViolation(f"not valid YAML: {exc}") from exc
    _require(isinstance(doc, dict), "top level must be a mapping", "$")
    for key in doc:
        _require(key in _TOP_LEVEL, "unknown top-level key", str(key))
    llms = doc.get("llms")
    _require(isinstance(llms, list) and llms, "expected a non-empty list", "llms")
    prompts = doc.get("prompts")
    _require(isinstance(prompts, list) and prompts, "expected a non-empty list", "prompts")
    parsed_llms = tuple(_parse_llm(item, f"llms[{i}]") for i, item in enumerate(llms))
    parsed_prompts = tuple(_parse_prompt(item, f"prompts[{i}]") for i, item in enumerate(prompts))
    names = [p.name for p in parsed_prompts]
    _require(len(set(names)) == len(names), "prompt names must be unique", "prompts")

    limits = doc.get("token_limits") or {}
    _require(isinstance(limits, dict), "expected a mapping", "token_limits")
    for model, limit in limits.items():
        _require(isinstance(limit, int) and not isinstance(limit, bool) and limit > 0,
                 "must be a positive integer", f"token_limits.{model}")
    policy = doc.get("aggregation_policy", "compiled_only")
    _require(policy in POLICIES, f"must be one of {', '.join(POLICIES)}", "aggregation_policy")
    fallback = doc.get("fallback", "fail")
    _require(fallback in FALLBACKS, f"must be one of {', '.join(FALLBACKS)}", "fallback")
    variables = doc.get("variables") or {}
    _require(isinstance(variables, dict), "expected a mapping", "variables")
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    exemplar = _parse_exemplar(doc["exemplar"], base) if "exemplar" in doc else default_exemplar()
    return ExperimentConfig(
        llms=parsed_llms,
        prompts=parsed_prompts,
        token_limits={str(k): v for k, v in limits.items()},
        aggregation_policy=policy,
        exemplar=exemplar,
        fallback=fallback,
        variables={str(k): str(v) for k, v in variables.items()},
    )


def load_config_file(path: str | Path | None = None) -> ExperimentConfig:
    """Load from ``path``, or from the file named by ``AGONE_CONFIG``."""
    if path is None:
        path = os.environ.get(CONFIG_ENV)
        if not path:
            raise SchemaViolation(f"no config given and {CONFIG_ENV} is unset")
    path = Path(path)
    return load_config(path.read_text(encoding="utf-8"), base_dir=path.resolve().parent)
