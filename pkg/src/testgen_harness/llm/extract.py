"""Recovering a test class from a free-form model reply."""

from __future__ import annotations

import re

from ..errors import ExtractionFailed, UnparseableSource
from ..java import parse_unit

_FENCE = re.compile(r"^[ \t]*```[ \t]*([\w+#.-]*)[^\n]*\n(.*?)^[ \t]*```", re.S | re.M)
_CODE_TAG = re.compile(r"<code>\s*\n?(.*?)</code>", re.S)
_START = re.compile(
    r"^\s*(package\s|import\s|@\w|(public|protected|private|final|abstract|static)\s|class\s|interface\s|enum\s|record\s)"
)


def _parses(source: str) -> bool:
    try:
        parse_unit(source)
    except UnparseableSource:
        return False
    return True


def _fenced(raw: str) -> str | None:
    blocks = _FENCE.findall(raw)
    if not blocks:
        return None
    java = [body for tag, body in blocks if tag.lower() == "java"]
    chosen = java or [body for tag, body in blocks if not tag]
    if not chosen:
        return None
    return "\n".join(b.rstrip() for b in chosen).strip("\n")


def _region(raw: str) -> str | None:
    lines = raw.splitlines(keepends=True)
    first = next((i for i, line in enumerate(lines) if _START.match(line)), None)
    if first is None:
        return None
    last = max((i for i, line in enumerate(lines) if "}" in line and i >= first), default=None)
    if last is None:
        return None
    region = "".join(lines[first : last + 1])
    # keep a bare class byte-for-byte, trailing text after the last brace aside
    tail = lines[last][lines[last].rfind("}") + 1 :]
    if tail.strip():
        region = region[: len(region) - len(tail)]
    elif first == 0 and last == len(lines) - 1:
        region = raw
    return region


def extract_test_source(raw: str) -> str:
    """Fenced Java blocks first, then ``<code>`` blocks, then the code-looking region."""
    if not raw or not raw.strip():
        raise ExtractionFailed("empty response")
    for candidate in (_fenced(raw), _tagged(raw), _region(raw)):
        if candidate and _parses(candidate):
            return candidate
    raise ExtractionFailed("no parseable Java type in the response")


def _tagged(raw: str) -> str | None:
    blocks = _CODE_TAG.findall(raw)
    return "\n".join(b.strip("\n") for b in blocks) if blocks else None
