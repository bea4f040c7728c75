"""AST evidence for class-under-test / test-class mappings and their resolution."""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from ..java import JavaSourceUnit, extract_facts
from ..java.facts import MOCKING_HINT
from .repo import RepoIdentity

log = logging.getLogger(__name__)

DOMINANCE = 0.60
MIN_REFERENCES = 2

BELOW_DOMINANCE = "below-dominance"
AMBIGUOUS = "ambiguous"
TIE = "tie"
NOT_DOMINANT = "not-dominant"
INSUFFICIENT = "insufficient-evidence"


class ProductionIndex:
    """Fully-qualified production types of a repository, by simple name."""

    def __init__(self, fqns=()):
        self.fqns: set[str] = set()
        self.by_simple: dict[str, set[str]] = defaultdict(set)
        for fqn in fqns:
            self.add(fqn)

    def add(self, fqn: str) -> None:
        self.fqns.add(fqn)
        self.by_simple[fqn.rsplit(".", 1)[-1]].add(fqn)

    def resolver(self, unit: JavaSourceUnit, imports: list[str], static_imports: list[str]):
        explicit = {}
        wildcards = []
        for imp in imports:
            if imp.endswith(".*"):
                wildcards.append(imp[:-2])
            else:
                explicit[imp.rsplit(".", 1)[-1]] = imp
        for imp in static_imports:
            owner = imp[:-2] if imp.endswith(".*") else imp.rsplit(".", 1)[0]
            explicit.setdefault(owner.rsplit(".", 1)[-1], owner)

        def resolve(written: str) -> str | None:
            if not written:
                return None
            if "." in written:
                return written if written in self.fqns else None
            if written in explicit:
                return explicit[written] if explicit[written] in self.fqns else None
            local = f"{unit.package_name}.{written}" if unit.package_name else written
            if local in self.fqns:
                return local
            for pkg in wildcards:
                if f"{pkg}.{written}" in self.fqns:
                    return f"{pkg}.{written}"
            return None

        return resolve


@dataclass(frozen=True)
class EvidenceSummary:
    reference_counts: dict[str, int]
    dominant: str
    ratio: float
    cut_fqn: str = ""
    cut_path: str = ""
    test_fqn: str = ""
    test_path: str = ""
    mirrored: bool = True
    repo: RepoIdentity | None = field(default=None, compare=False)

    @property
    def total(self) -> int:
        return sum(self.reference_counts.values())

    def top_tied(self) -> bool:
        counts = sorted(self.reference_counts.values(), reverse=True)
        return len(counts) > 1 and counts[0] == counts[1] and counts[0] > 0


@dataclass(frozen=True)
class ClassUnderTestRecord:
    repo: RepoIdentity
    cut_path: str
    cut_fqn: str
    test_path: str
    test_fqn: str
    evidence: EvidenceSummary

    def __post_init__(self):
        if self.cut_path == self.test_path:
            raise ValueError("class under test and test class share a path")

    @property
    def cut_name(self) -> str:
        return self.cut_fqn.rsplit(".", 1)[-1]

    def to_json(self) -> dict:
        return {
            "repo_url": self.repo.url_or_path,
            "branch": self.repo.branch,
            "commit_hash": self.repo.commit_hash,
            "cut_path": self.cut_path,
            "cut_fqn": self.cut_fqn,
            "test_path": self.test_path,
            "test_fqn": self.test_fqn,
            "evidence_ratio": round(self.evidence.ratio, 6),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ClassUnderTestRecord":
        repo = RepoIdentity(data["repo_url"], data["branch"], data["commit_hash"])
        evidence = EvidenceSummary({}, data["cut_fqn"], float(data["evidence_ratio"]), data["cut_fqn"])
        return cls(repo, data["cut_path"], data["cut_fqn"], data["test_path"], data["test_fqn"], evidence)


@dataclass(frozen=True)
class Exclusion:
    cut_fqn: str
    test_path: str
    reason: str
    ratio: float

    def to_json(self) -> dict:
        return {"cut_fqn": self.cut_fqn, "test_path": self.test_path, "reason": self.reason, "ratio": round(self.ratio, 6)}


@dataclass
class Resolution:
    records: list[ClassUnderTestRecord]
    exclusions: list[Exclusion]


def reference_counts(test: JavaSourceUnit, index: ProductionIndex) -> Counter:
    """Tally imports, constructions, typed invocations and mocks per production type."""
    facts = extract_facts(test)
    resolve = index.resolver(test, facts.imports, facts.static_imports)
    counts: Counter = Counter()
    for imp in facts.imports:
        if imp in index.fqns:
            counts[imp] += 1
    for imp in facts.static_imports:
        owner = imp[:-2] if imp.endswith(".*") else imp.rsplit(".", 1)[0]
        if owner in index.fqns:
            counts[owner] += 1
    for written, n in facts.constructed_types.items():
        if fqn := resolve(written):
            counts[fqn] += n
    for (hint, _name), n in facts.invoked_methods.items():
        if hint and hint != MOCKING_HINT and (fqn := resolve(hint)):
            counts[fqn] += n
    for written, n in facts.mocked_types.items():
        if fqn := resolve(written):
            counts[fqn] += n
    own = {test.fqn(t) for t in test.type_names}
    for fqn in own:
        counts.pop(fqn, None)
    return counts


def validate_mapping(
    cut: JavaSourceUnit,
    candidate: JavaSourceUnit,
    index: ProductionIndex | None = None,
    *,
    cut_path: str = "",
    test_path: str = "",
    mirrored: bool = True,
    repo: RepoIdentity | None = None,
) -> EvidenceSummary:
    cut_fqn = cut.fqn()
    if index is None:
        index = ProductionIndex([cut_fqn])
    elif cut_fqn not in index.fqns:
        index.add(cut_fqn)
    counts = reference_counts(candidate, index)
    counts.setdefault(cut_fqn, 0)
    total = sum(counts.values())
    top = max(counts.values())
    # ties resolve towards the class under test, then lexicographically
    tied = sorted(k for k, v in counts.items() if v == top)
    dominant = cut_fqn if cut_fqn in tied else tied[0]
    ratio = counts[dominant] / total if total else 0.0
    return EvidenceSummary(
        reference_counts=dict(sorted(counts.items())),
        dominant=dominant,
        ratio=ratio,
        cut_fqn=cut_fqn,
        cut_path=cut_path or str(cut.path),
        test_fqn=candidate.fqn(),
        test_path=test_path or str(candidate.path),
        mirrored=mirrored,
        repo=repo,
    )


def _verdict(ev: EvidenceSummary, min_ratio: float, min_refs: int) -> str | None:
    if ev.total < min_refs:
        return INSUFFICIENT
    if ev.top_tied():
        return TIE
    if ev.dominant != ev.cut_fqn:
        return NOT_DOMINANT
    if ev.ratio < min_ratio:
        return BELOW_DOMINANCE
    return None


def resolve_mappings(
    evidences, *, min_ratio: float = DOMINANCE, min_refs: int = MIN_REFERENCES
) -> Resolution:
    """Keep dominant mappings; exclude the rest with a reason code.

    When several classes under test claim the same test class and none of
    them dominates, every claim is excluded as ambiguous.
    """
    by_test: dict[str, list[EvidenceSummary]] = defaultdict(list)
    for ev in evidences:
        by_test[ev.test_path].append(ev)
    records, exclusions = [], []
    for test_path in sorted(by_test):
        claims = sorted(by_test[test_path], key=lambda e: e.cut_fqn)
        verdicts = [_verdict(e, min_ratio, min_refs) for e in claims]
        multi = len({e.cut_fqn for e in claims}) > 1
        if multi and all(v is not None for v in verdicts):
            verdicts = [AMBIGUOUS] * len(claims)
        for ev, verdict in zip(claims, verdicts):
            if verdict is None:
                records.append(
                    ClassUnderTestRecord(ev.repo, ev.cut_path, ev.cut_fqn, ev.test_path, ev.test_fqn, ev)
                )
            else:
                log.info("excluded %s -> %s: %s (ratio %.2f)", ev.cut_fqn, test_path, verdict, ev.ratio)
                exclusions.append(Exclusion(ev.cut_fqn, test_path, verdict, ev.ratio))
    records.sort(key=lambda r: (r.cut_fqn, r.test_path))
    exclusions.sort(key=lambda x: (x.cut_fqn, x.test_path))
    return Resolution(records, exclusions)
