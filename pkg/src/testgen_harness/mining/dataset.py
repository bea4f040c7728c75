"""Dataset construction, serialization and corpus statistics."""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Mapping

from ..buildconf import elicit_profile
from ..buildconf.profile import FRAMEWORK_LABELS
from ..errors import EmptyDataset, HarnessError, UnparseableSource
from ..java import measure_complexity, parse_file
from .discovery import discover_candidates, main_source_roots, test_source_roots
from .evidence import ClassUnderTestRecord, ProductionIndex, Resolution, resolve_mappings, validate_mapping
from .repo import RepoIdentity, ingest_repo

log = logging.getLogger(__name__)

DATASET_FILE = "classes2test.jsonl"
EXCLUSIONS_FILE = "exclusions.jsonl"
STATS_FILE = "stats.json"


@dataclass
class DatasetStats:
    test_class_count: int
    repo_count: int
    avg_loc: float
    avg_cyclomatic: float
    framework_distribution: dict[str, float]
    java_version_distribution: dict[str, float]

    def to_json(self) -> dict:
        return asdict(self)


def mine_repository(
    locator: str, branch: str, workdir: str | Path, *, commit: str | None = None
) -> tuple[RepoIdentity, Resolution]:
    """Mine one repository into retained records and reasoned exclusions."""
    repo = ingest_repo(locator, branch, workdir, commit=commit)
    checkout = Path(repo.checkout).resolve()
    test_roots = test_source_roots(checkout)
    cuts = []
    for root in main_source_roots(checkout):
        for path in sorted(root.rglob("*.java")):
            try:
                cuts.append(parse_file(path))
            except UnparseableSource:
                log.warning("skipping unparseable %s", path)
    index = ProductionIndex(u.fqn(t) for u in cuts for t in u.type_names)
    tests = {}
    evidences = []
    for cut in cuts:
        if cut.path.stem != cut.primary_type:
            continue
        for cand in discover_candidates(checkout, cut, test_roots):
            if cand.path not in tests:
                try:
                    tests[cand.path] = parse_file(cand.path)
                except UnparseableSource:
                    tests[cand.path] = None
            test = tests[cand.path]
            if test is None:
                continue
            evidences.append(
                validate_mapping(
                    cut,
                    test,
                    index,
                    cut_path=cut.path.relative_to(checkout).as_posix(),
                    test_path=cand.path.relative_to(checkout).as_posix(),
                    mirrored=cand.mirrored,
                    repo=repo,
                )
            )
    return repo, resolve_mappings(evidences)


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=False, ensure_ascii=False) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def write_records(path: str | Path, records: Iterable[ClassUnderTestRecord]) -> None:
    write_jsonl(path, (r.to_json() for r in records))


def read_records(path: str | Path) -> list[ClassUnderTestRecord]:
    return [ClassUnderTestRecord.from_json(row) for row in read_jsonl(path)]


def _distribution(labels: list[str]) -> dict[str, float]:
    counts = Counter(labels)
    total = sum(counts.values())
    return {k: round(100.0 * v / total, 2) for k, v in sorted(counts.items())}


def compute_stats(
    records: list[ClassUnderTestRecord], checkouts: Mapping[str, Path] | None = None
) -> DatasetStats:
    """Corpus statistics; LOC and complexity are measured on the classes under test.

    ``checkouts`` maps each repository locator to its working copy and
    defaults to the checkout recorded on each record's identity.
    """
    if not records:
        raise EmptyDataset("no records to summarize")
    checkouts = dict(checkouts or {})
    for rec in records:
        if rec.repo.url_or_path not in checkouts:
            checkouts[rec.repo.url_or_path] = rec.repo.checkout or rec.repo.url_or_path
    locs, complexities = [], []
    for rec in records:
        report = measure_complexity(parse_file(Path(checkouts[rec.repo.url_or_path]) / rec.cut_path))
        locs.append(report.loc)
        complexities.append(report.cyclomatic_total)
    frameworks, versions = [], []
    for locator in sorted({r.repo.url_or_path for r in records}):
        try:
            profile = elicit_profile(checkouts[locator])
        except HarnessError:
            frameworks.append("Unknown")
            versions.append("unknown")
            continue
        frameworks.append(FRAMEWORK_LABELS[profile.testing_framework])
        versions.append(profile.java_version)
    return DatasetStats(
        test_class_count=len({(r.repo.url_or_path, r.test_path) for r in records}),
        repo_count=len({r.repo.url_or_path for r in records}),
        avg_loc=sum(locs) / len(locs),
        avg_cyclomatic=sum(complexities) / len(complexities),
        framework_distribution=_distribution(frameworks),
        java_version_distribution=_distribution(versions),
    )
