"""Budget fallbacks: shrink the class under test until the prompt fits."""

from __future__ import annotations

from dataclasses import replace

from tree_sitter import Node

from ..errors import StillOverBudget, TokenLimitExceeded, UnparseableSource
from ..java.parsing import modifiers_of, name_of, parse_unit, text, walk
from .template import InstantiatedPrompt, instantiate
from .tokens import TokenCounter, counter_for

COMMENT_NODES = ("line_comment", "block_comment")


def _cut_spans(source: str, spans: list[tuple[int, int]]) -> str:
    """Remove byte spans; lines left holding only whitespace are dropped whole."""
    data = source.encode("utf-8")
    for start, end in sorted(spans, reverse=True):
        line_start = data.rfind(b"\n", 0, start) + 1
        line_end = data.find(b"\n", end)
        line_end = len(data) if line_end < 0 else line_end
        if not data[line_start:start].strip() and not data[end:line_end].strip():
            start, end = line_start, min(line_end + 1, len(data))
        data = data[:start] + data[end:]
    return data.decode("utf-8")


def strip_comments(source: str) -> str:
    unit = parse_unit(source)
    spans = [(n.start_byte, n.end_byte) for n in walk(unit.root) if n.type in COMMENT_NODES]
    return _cut_spans(source, spans)


def elidable_methods(source: str) -> list[Node]:
    """Private methods never invoked from a non-private member, longest first."""
    unit = parse_unit(source)
    private, called = [], set()
    for node in walk(unit.root):
        if node.type not in ("method_declaration", "constructor_declaration", "field_declaration"):
            continue
        if node.type == "method_declaration" and "private" in modifiers_of(node):
            private.append(node)
            continue
        if "private" in modifiers_of(node) and node.type != "constructor_declaration":
            continue
        for inner in walk(node):
            if inner.type == "method_invocation":
                called.add(name_of(inner))
            elif inner.type == "method_reference":
                called.add(text(inner.children[-1]))
    candidates = [m for m in private if name_of(m) not in called]
    candidates.sort(key=lambda m: (-(m.end_byte - m.start_byte), m.start_byte))
    return candidates


def _reinstantiate(prompt: InstantiatedPrompt, cut: str, counter: TokenCounter) -> InstantiatedPrompt:
    variables = replace(prompt.variables, class_under_test=cut)
    try:
        return instantiate(prompt.template, variables, prompt.model, prompt.temperature,
                           limit=prompt.limit, counter=counter)
    except TokenLimitExceeded as exc:
        return exc.prompt


def apply_fallback(
    prompt: InstantiatedPrompt, strategy: str, *, counter: TokenCounter | None = None
) -> InstantiatedPrompt:
    """Return a reduced prompt within budget or raise.

    ``fail`` surfaces :class:`TokenLimitExceeded`; the reducing strategies raise
    :class:`StillOverBudget` when they cannot bring the prompt under the limit.
    """
    if prompt.template is None or prompt.variables is None:
        raise ValueError("prompt was not produced by instantiate()")
    counter = counter or counter_for(prompt.model)
    if strategy == "fail":
        raise TokenLimitExceeded(prompt.token_count, prompt.limit, prompt)
    cut = prompt.variables.class_under_test
    try:
        if strategy == "truncate_comments":
            reduced = _reinstantiate(prompt, strip_comments(cut), counter)
        elif strategy == "drop_low_relevance_methods":
            reduced = prompt
            while reduced.token_count > prompt.limit:
                methods = elidable_methods(cut)
                if not methods:
                    break
                cut = _cut_spans(cut, [(methods[0].start_byte, methods[0].end_byte)])
                reduced = _reinstantiate(prompt, cut, counter)
        else:
            raise ValueError(f"unknown fallback strategy {strategy!r}")
    except UnparseableSource:
        reduced = prompt
    if reduced.token_count >= prompt.token_count or reduced.token_count > prompt.limit:
        raise StillOverBudget(reduced.token_count, prompt.limit, reduced)
    return reduced
