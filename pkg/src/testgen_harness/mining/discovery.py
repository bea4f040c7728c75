"""Source-root detection and naming-convention discovery of test classes."""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from ..java import JavaSourceUnit

_SKIP_DIRS = {".git", "target", "build", "out", "node_modules", ".gradle"}
_GRADLE_TEST_DIRS = re.compile(
    r"test\s*\{[^{}]*?java\s*\{[^{}]*?srcDirs?\s*=?\s*\[?\s*((?:['\"][^'\"]+['\"]\s*,?\s*)+)",
    re.S,
)
_GRADLE_MAIN_DIRS = re.compile(
    r"main\s*\{[^{}]*?java\s*\{[^{}]*?srcDirs?\s*=?\s*\[?\s*((?:['\"][^'\"]+['\"]\s*,?\s*)+)",
    re.S,
)


@dataclass(frozen=True)
class Candidate:
    path: Path
    root: Path
    mirrored: bool


def _walk_files(base: Path, pattern: str):
    for path in sorted(base.rglob(pattern)):
        rel = path.relative_to(base).parts
        if any(part in _SKIP_DIRS for part in rel[:-1]):
            continue
        yield path


def _pom_dirs(checkout: Path, tag: str) -> list[Path]:
    found = []
    for pom in _walk_files(checkout, "pom.xml"):
        try:
            root = ET.parse(pom).getroot()
        except ET.ParseError:
            continue
        for el in root.iter():
            if el.tag.rsplit("}", 1)[-1] == tag and el.text and "${" not in el.text:
                found.append(pom.parent / el.text.strip())
    return found


def _gradle_dirs(checkout: Path, pattern: re.Pattern) -> list[Path]:
    found = []
    for name in ("build.gradle", "build.gradle.kts"):
        for build in _walk_files(checkout, name):
            for match in pattern.finditer(build.read_text(encoding="utf-8", errors="replace")):
                for d in re.findall(r"['\"]([^'\"]+)['\"]", match.group(1)):
                    found.append(build.parent / d)
    return found


def _roots(checkout: Path, conventional: str, pom_tag: str, gradle: re.Pattern) -> list[Path]:
    roots = {p for p in _walk_files(checkout, conventional.rsplit("/", 1)[-1]) if p.is_dir()
             and p.as_posix().endswith(conventional)}
    roots.update(p for p in _pom_dirs(checkout, pom_tag) + _gradle_dirs(checkout, gradle) if p.is_dir())
    return sorted(p.resolve() for p in roots)


def test_source_roots(checkout: str | Path) -> list[Path]:
    """``src/test/java`` directories plus test roots declared in build files."""
    return _roots(Path(checkout), "src/test/java", "testSourceDirectory", _GRADLE_TEST_DIRS)


def main_source_roots(checkout: str | Path) -> list[Path]:
    return _roots(Path(checkout), "src/main/java", "sourceDirectory", _GRADLE_MAIN_DIRS)


def candidate_names(type_name: str) -> set[str]:
    return {f"{type_name}Test", f"{type_name}Tests", f"Test{type_name}", f"{type_name}TestCase"}


def discover_candidates(
    checkout: str | Path, cut: JavaSourceUnit, test_roots: list[Path] | None = None
) -> list[Candidate]:
    """Test files named after ``cut``; mirrored-package matches sort first."""
    checkout = Path(checkout)
    roots = test_roots if test_roots is not None else test_source_roots(checkout)
    wanted = {n + ".java" for n in candidate_names(cut.primary_type)}
    package_dir = Path(*cut.package_name.split(".")) if cut.package_name else Path()
    found = []
    for root in roots:
        for path in _walk_files(root, "*.java"):
            if path.name in wanted:
                mirrored = path.parent.relative_to(root) == package_dir
                found.append(Candidate(path.resolve(), root, mirrored))
    found.sort(key=lambda c: (not c.mirrored, c.path.as_posix()))
    return found
