"""Placeholder substitution and token budgeting for prompt templates."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..errors import TokenLimitExceeded, UnboundVariable
from .config import DEFAULT_TOKEN_LIMITS, FALLBACK_TOKEN_LIMIT, ExemplarRef, PromptTemplate
from .tokens import TokenCounter, counter_for

PLACEHOLDER = re.compile(r"\{\{\s*(\w+)\s*\}\}")

# The few-shot template in the reference configuration names the exemplar
# class ``example_java_class``.
ALIASES = {"example_java_class": "example_class_under_test"}


@dataclass(frozen=True)
class PromptVariables:
    class_under_test: str
    testing_framework: str
    java_version: str
    class_under_test_path: str | None = None
    example_class_under_test: str = ""
    example_test_class: str = ""
    example_testing_framework: str = ""
    example_java_version: str = ""
    custom: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.class_under_test:
            raise ValueError("class_under_test must not be empty")

    def bindings(self) -> dict[str, str]:
        values = dict(self.custom)
        for name in (
            "class_under_test",
            "testing_framework",
            "java_version",
            "class_under_test_path",
            "example_class_under_test",
            "example_test_class",
            "example_testing_framework",
            "example_java_version",
        ):
            value = getattr(self, name)
            if value is not None:
                values[name] = value
        for alias, target in ALIASES.items():
            if target in values and alias not in self.custom:
                values[alias] = values[target]
        return values


@dataclass(frozen=True)
class InstantiatedPrompt:
    model: str
    temperature: float
    messages: tuple[tuple[str, str], ...]
    token_count: int
    prompt_name: str = ""
    limit: int = 0
    template: PromptTemplate | None = field(default=None, compare=False, repr=False)
    variables: PromptVariables | None = field(default=None, compare=False, repr=False)

    def as_messages(self) -> list[dict]:
        return [{"role": role, "content": content} for role, content in self.messages]


def placeholders(template: PromptTemplate) -> list[str]:
    seen = []
    for _, content in template.messages:
        for name in PLACEHOLDER.findall(content):
            if name not in seen:
                seen.append(name)
    return seen


def substitute(content: str, bindings: dict[str, str]) -> str:
    """Single-pass literal splice; bound values are never re-scanned."""

    def value(match: re.Match) -> str:
        name = match.group(1)
        if name not in bindings:
            raise UnboundVariable(name)
        return bindings[name]

    return PLACEHOLDER.sub(value, content)


def count_tokens(messages, counter: TokenCounter) -> int:
    return sum(counter.count(content) for _, content in messages)


def instantiate(
    template: PromptTemplate,
    variables: PromptVariables,
    model: str,
    temperature: float,
    *,
    limit: int | None = None,
    counter: TokenCounter | None = None,
) -> InstantiatedPrompt:
    bindings = variables.bindings()
    messages = tuple((role, substitute(content, bindings)) for role, content in template.messages)
    counter = counter or counter_for(model)
    if limit is None:
        limit = DEFAULT_TOKEN_LIMITS.get(model, FALLBACK_TOKEN_LIMIT)
    prompt = InstantiatedPrompt(
        model=model,
        temperature=temperature,
        messages=messages,
        token_count=count_tokens(messages, counter),
        prompt_name=template.name,
        limit=limit,
        template=template,
        variables=variables,
    )
    if prompt.token_count > limit:
        raise TokenLimitExceeded(prompt.token_count, limit, prompt)
    return prompt


def build_enhanced_variables(base: PromptVariables, record) -> PromptVariables:
    """Bind ``class_under_test_path`` to the record's project-relative CUT path."""
    return replace(base, class_under_test_path=Path(record.cut_path).as_posix())


def exemplar_variables(exemplar: ExemplarRef) -> dict[str, str]:
    return {
        "example_class_under_test": Path(exemplar.class_path).read_text(encoding="utf-8"),
        "example_test_class": Path(exemplar.test_path).read_text(encoding="utf-8"),
        "example_testing_framework": exemplar.testing_framework,
        "example_java_version": exemplar.java_version,
    }
