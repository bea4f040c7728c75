"""Tabular outputs: per-class CSV, aggregate and delta tables, run manifest."""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import WriteFailed
from .metrics import METRICS, SMELL_CODES, AggregateReport, PerClassMetrics

HEADER = ["model", "prompt_name", "project", "class_under_test", *METRICS, *SMELL_CODES]
AGGREGATE_HEADER = ["model", "prompt_name", "policy", "n", "n_comp", "build_rate", *METRICS, *SMELL_CODES]
DELTA_HEADER = ["model", "prompt_name", "build", *METRICS, *SMELL_CODES]
UNDEFINED = "-"
HUMAN_MODEL = "human"
HUMAN_PROMPT = "-"


def _round(value):
    return None if value is None else round(float(value), 2)


@dataclass(frozen=True)
class ReportRow:
    model: str
    prompt_name: str
    project: str
    class_under_test: str
    branch_coverage: float | None
    line_coverage: float | None
    method_coverage: float | None
    mutation_score: float | None
    smells: tuple[int | None, ...]

    def __post_init__(self):
        if len(self.smells) != len(SMELL_CODES):
            raise ValueError("one value per smell code required")
        if self.model == HUMAN_MODEL and self.prompt_name != HUMAN_PROMPT:
            raise ValueError("human rows carry prompt name '-'")
        for name in METRICS:
            object.__setattr__(self, name, _round(getattr(self, name)))

    @classmethod
    def from_metrics(cls, m: PerClassMetrics) -> "ReportRow":
        return cls(
            m.model,
            m.prompt_name,
            m.project,
            m.cut_fqn.rsplit(".", 1)[-1],
            m.branch_coverage,
            m.line_coverage,
            m.method_coverage,
            m.mutation_score,
            tuple(m.smells[c] for c in SMELL_CODES),
        )

    def cells(self) -> list[str]:
        return [
            self.model,
            self.prompt_name,
            self.project,
            self.class_under_test,
            *(fmt_percent(getattr(self, m)) for m in METRICS),
            *(UNDEFINED if s is None else str(s) for s in self.smells),
        ]

    @classmethod
    def from_cells(cls, cells: list[str]) -> "ReportRow":
        metrics = [None if c == UNDEFINED else float(c) for c in cells[4:8]]
        smells = tuple(None if c == UNDEFINED else int(c) for c in cells[8:])
        return cls(cells[0], cells[1], cells[2], cells[3], *metrics, smells)


def fmt_percent(value: float | None) -> str:
    return UNDEFINED if value is None else f"{value:.2f}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise WriteFailed(f"cannot write {path}: {exc}", path=str(path)) from exc


def emit_csv(rows, out: str | Path) -> None:
    _write_csv(Path(out), HEADER, (r.cells() for r in rows))


def read_csv(path: str | Path) -> list[ReportRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != HEADER:
            raise ValueError(f"{path}: unexpected header")
        return [ReportRow.from_cells(cells) for cells in reader]


def emit_aggregate(report: AggregateReport, out: str | Path) -> None:
    rows = []
    for (model, prompt), sl in report.slices.items():
        rows.append(
            [model, prompt, report.policy, sl.n, sl.n_comp, f"{100.0 * sl.r_build:.2f}"]
            + [fmt_percent(sl.means[m]) for m in METRICS + SMELL_CODES]
        )
    _write_csv(Path(out), AGGREGATE_HEADER, rows)


def fmt_delta(value: float | None) -> str:
    return UNDEFINED if value is None else f"{value:+.1f}"


def emit_deltas(deltas: dict, out: str | Path) -> None:
    rows = [
        [model, prompt] + [fmt_delta(d[c]) for c in ["build", *METRICS, *SMELL_CODES]]
        for (model, prompt), d in deltas.items()
    ]
    _write_csv(Path(out), DELTA_HEADER, rows)


def file_digest(path: str | Path | None) -> str | None:
    if path is None or not Path(path).is_file():
        return None
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    moment = time.gmtime(int(epoch)) if epoch else time.gmtime()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", moment)


@dataclass
class RunManifest:
    config_digest: str | None
    dataset_digest: str | None
    tool_versions: dict[str, str]
    mode: str
    started: str
    finished: str = ""

    @classmethod
    def begin(cls, config, dataset, tool_versions, mode) -> "RunManifest":
        return cls(file_digest(config), file_digest(dataset), dict(tool_versions), mode, _timestamp())

    def finish(self, out: str | Path) -> None:
        self.finished = _timestamp()
        Path(out).write_text(json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n", encoding="utf-8")
