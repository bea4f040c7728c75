"""Token counting with a bundled byte-pair vocabulary and a byte-based fallback.

Provider vocabularies are proprietary, so models matched in the manifest are
counted with a small Java-trained BPE vocabulary (fewer merges than any
production tokenizer, hence it over-counts) and every other model gets
``ceil(bytes / 3)``.
"""

from __future__ import annotations

import fnmatch
import json
import math
import os
from functools import lru_cache
from pathlib import Path
from typing import Protocol

import tiktoken
from tiktoken.load import load_tiktoken_bpe

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
MANIFEST = DATA_DIR / "vocab_manifest.json"


class TokenCounter(Protocol):
    name: str

    def count(self, text: str) -> int: ...


class ByteCounter:
    name = "bytes/3"

    def count(self, text: str) -> int:
        return math.ceil(len(text.encode("utf-8")) / 3)


class BpeCounter:
    def __init__(self, encoding: tiktoken.Encoding):
        self.encoding = encoding
        self.name = encoding.name

    def count(self, text: str) -> int:
        return len(self.encoding.encode_ordinary(text))


@lru_cache(maxsize=None)
def _encoding(name: str, file: str, pat_str: str) -> tiktoken.Encoding:
    ranks = load_tiktoken_bpe(os.fspath(DATA_DIR / file))
    return tiktoken.Encoding(name=name, pat_str=pat_str, mergeable_ranks=ranks, special_tokens={})


@lru_cache(maxsize=1)
def _manifest() -> list[dict]:
    if not MANIFEST.is_file():
        return []
    return json.loads(MANIFEST.read_text(encoding="utf-8"))["encodings"]


def counter_for(model: str) -> TokenCounter:
    for entry in _manifest():
        if any(fnmatch.fnmatchcase(model, pattern) for pattern in entry["models"]):
            return BpeCounter(_encoding(entry["name"], entry["file"], entry["pat_str"]))
    return ByteCounter()
