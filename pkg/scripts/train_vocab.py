"""Train the bundled byte-pair vocabulary used for token counting.

    python scripts/train_vocab.py DIR [DIR ...]

Every ``.java`` file under the given directories is concatenated into the
training text. The ranks are written in tiktoken's base64 format next to a
manifest that maps model-name patterns to the vocabulary.
"""

from __future__ import annotations

import argparse
import base64
import json
from pathlib import Path

from tiktoken._educational import bpe_train

DATA = Path(__file__).resolve().parent.parent / "src" / "testgen_harness" / "data"
# same pre-tokenization split as the cl100k family
PAT_STR = (
    r"""(?i:'s|'t|'re|'ve|'m|'ll|'d)|[^\r\n\p{L}\p{N}]?\p{L}+|\p{N}{1,3}| ?[^\s\p{L}\p{N}]+[\r\n]*|\s*[\r\n]+|\s+(?!\S)|\s+"""
)
MODELS = ["gpt-*", "o1*", "o3*", "gemini-*", "llama*", "codellama*"]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("dirs", nargs="+")
    parser.add_argument("--vocab-size", type=int, default=1024)
    args = parser.parse_args()
    files = sorted(p for d in args.dirs for p in Path(d).rglob("*.java"))
    text = "\n".join(p.read_text(encoding="utf-8") for p in files)
    ranks = bpe_train(text, args.vocab_size, PAT_STR, visualise=None)
    # tiktoken's writer needs blobfile; the format is one "base64 rank" per line
    lines = (f"{base64.b64encode(tok).decode()} {rank}\n" for tok, rank in sorted(ranks.items(), key=lambda x: x[1]))
    (DATA / "java_bpe.tiktoken").write_text("".join(lines), encoding="ascii")
    manifest = {"encodings": [{"name": "java-bpe", "file": "java_bpe.tiktoken", "pat_str": PAT_STR, "models": MODELS}]}
    (DATA / "vocab_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"trained {len(ranks)} ranks on {len(files)} files ({len(text)} chars)")


if __name__ == "__main__":
    main()
