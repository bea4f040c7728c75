"""Per-class metric rows and their experiment-level averages."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from ..errors import AllFailedBuilds, EmptyLedger, KeyMismatch
from .smells import SMELL_CODES

METRICS = ("branch_coverage", "line_coverage", "method_coverage", "mutation_score")
POLICIES = ("compiled_only", "zero_penalized")


@dataclass(frozen=True)
class PerClassMetrics:
    model: str
    prompt_name: str
    project: str
    cut_fqn: str
    build: bool
    branch_coverage: float | None = None
    line_coverage: float | None = None
    method_coverage: float | None = None
    mutation_score: float | None = None
    smells: dict[str, int | None] = field(default_factory=lambda: dict.fromkeys(SMELL_CODES, 0))

    def __post_init__(self):
        for name in METRICS:
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 100.0:
                raise ValueError(f"{name}={value} outside [0, 100]")
        missing = set(SMELL_CODES) - set(self.smells)
        if missing:
            raise ValueError(f"smell codes missing: {sorted(missing)}")

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.model, self.prompt_name, self.project, self.cut_fqn)

    def value(self, metric: str) -> float | None:
        return self.smells[metric] if metric in self.smells else getattr(self, metric)

    def to_json(self) -> dict:
        row = {
            "model": self.model,
            "prompt_name": self.prompt_name,
            "project": self.project,
            "cut_fqn": self.cut_fqn,
            "build": self.build,
        }
        row.update({m: getattr(self, m) for m in METRICS})
        row["smells"] = {k: self.smells[k] for k in SMELL_CODES}
        return row

    @classmethod
    def from_json(cls, data: dict) -> "PerClassMetrics":
        return cls(
            model=data["model"],
            prompt_name=data["prompt_name"],
            project=str(data["project"]),
            cut_fqn=data["cut_fqn"],
            build=bool(data["build"]),
            smells=dict(data["smells"]),
            **{m: data.get(m) for m in METRICS},
        )


@dataclass
class EvaluationLedger:
    rows: list[PerClassMetrics]

    def slices(self) -> dict[tuple[str, str], list[PerClassMetrics]]:
        out: dict[tuple[str, str], list[PerClassMetrics]] = defaultdict(list)
        for row in self.rows:
            out[(row.model, row.prompt_name)].append(row)
        return dict(sorted(out.items()))

    def counts(self, model: str, prompt_name: str) -> tuple[int, int]:
        rows = self.slices().get((model, prompt_name), [])
        return len(rows), sum(r.build for r in rows)


@dataclass(frozen=True)
class SliceAggregate:
    n: int
    n_comp: int
    means: dict[str, float | None]

    @property
    def r_build(self) -> float:
        return self.n_comp / self.n


@dataclass(frozen=True)
class AggregateReport:
    policy: str
    slices: dict[tuple[str, str], SliceAggregate]


def slice_mean(rows: list[PerClassMetrics], metric: str, policy: str) -> float | None:
    """Mean of one metric over a slice.

    compiled_only averages compiled rows where the metric is defined.
    zero_penalized scores non-compiled rows as 0 and keeps them in the
    divisor; compiled rows with an undefined metric leave the divisor.
    """
    total = 0.0
    divisor = 0
    for row in rows:
        value = row.value(metric)
        if row.build:
            if value is not None:
                total += value
                divisor += 1
        elif policy == "zero_penalized":
            divisor += 1
    return total / divisor if divisor else None


def aggregate(ledger: EvaluationLedger, policy: str, *, strict: bool = False) -> AggregateReport:
    """Per (model, prompt) means and compilation rate.

    With ``strict`` a compiled_only slice where nothing compiled raises
    :class:`AllFailedBuilds`; otherwise its means are ``None``.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    if not ledger.rows:
        raise EmptyLedger("ledger has no rows")
    out = {}
    for key, rows in ledger.slices().items():
        n_comp = sum(r.build for r in rows)
        if policy == "compiled_only" and n_comp == 0 and strict:
            raise AllFailedBuilds(f"no class compiled for {key[0]} / {key[1]}", model=key[0], prompt=key[1])
        means = {m: slice_mean(rows, m, policy) for m in METRICS + SMELL_CODES}
        out[key] = SliceAggregate(len(rows), n_comp, means)
    return AggregateReport(policy, out)


def delta_table(before: AggregateReport, after: AggregateReport) -> dict[tuple[str, str], dict[str, float | None]]:
    """After minus before, in percentage points; ``build`` is the compilation-rate change."""
    if before.policy != after.policy:
        raise KeyMismatch(f"policies differ: {before.policy} vs {after.policy}")
    if set(before.slices) != set(after.slices):
        diff = sorted(set(before.slices) ^ set(after.slices))
        raise KeyMismatch(f"slice keys differ: {diff}", keys=[list(k) for k in diff])
    out = {}
    for key in sorted(before.slices):
        b, a = before.slices[key], after.slices[key]
        row = {"build": round(100.0 * a.r_build - 100.0 * b.r_build, 6)}
        for metric in METRICS + SMELL_CODES:
            x, y = b.means[metric], a.means[metric]
            row[metric] = None if x is None or y is None else round(y - x, 6)
        out[key] = row
    return out
