"""The four pipeline stages; each reads the previous stage's files."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from .buildconf import elicit_profile, inject_measurement_deps
from .errors import (
    ClassNotInReport,
    ExtractionFailed,
    MalformedReport,
    PackageMissing,
    ProviderError,
    Timeout,
    TokenLimitExceeded,
    WriteFailed,
)
from .java import parse_unit
from .llm import GenerationOutcome, extract_test_source, place_test_class, remove_placed
from .llm.placement import owned_files, record_owned
from .metrics import PerClassMetrics, parse_coverage_report, parse_mutation_report, smells_for_source
from .mining import ClassUnderTestRecord, compute_stats, ingest_repo, mine_repository, write_records
from .mining.dataset import DATASET_FILE, EXCLUSIONS_FILE, STATS_FILE, read_jsonl, write_jsonl
from .mining.repo import project_id
from .prompts import ExperimentConfig, PromptVariables, apply_fallback, exemplar_variables, instantiate
from .prompts.template import build_enhanced_variables
from .report import HUMAN_MODEL, HUMAN_PROMPT
from .runner import PhaseTarget, ReplayStore, parse_diagnostics, run_phase

log = logging.getLogger(__name__)

OUTCOMES_FILE = "outcomes.jsonl"
LEDGER_FILE = "ledger.jsonl"
DIAGNOSTICS_FILE = "diagnostics.jsonl"


# ---------------------------------------------------------------- mine


def mine(locators: list[str], branch: str, workdir: Path, out: Path, *, commit: str | None = None,
         require_build: bool = False) -> list[ClassUnderTestRecord]:
    out.mkdir(parents=True, exist_ok=True)
    records, exclusions, checkouts = [], [], {}
    for locator in locators:
        repo, resolution = mine_repository(locator, branch, workdir, commit=commit)
        if require_build and not run_phase(repo.checkout, "compile", "live").exit_ok:
            log.warning("dropping %s: baseline build fails", locator)
            continue
        checkouts[repo.url_or_path] = repo.checkout
        records.extend(resolution.records)
        exclusions.extend(resolution.exclusions)
    write_records(out / DATASET_FILE, records)
    write_jsonl(out / EXCLUSIONS_FILE, (e.to_json() for e in exclusions))
    stats = compute_stats(records, checkouts)
    (out / STATS_FILE).write_text(json.dumps(stats.to_json(), indent=2) + "\n", encoding="utf-8")
    return records


# ---------------------------------------------------------------- generate


class _Checkouts:
    """Working copies pinned to each record's commit, reused across stages."""

    def __init__(self, workdir: Path):
        self.workdir = workdir
        self.cache: dict[tuple[str, str], Path] = {}

    def get(self, record: ClassUnderTestRecord) -> Path:
        key = (record.repo.url_or_path, record.repo.commit_hash)
        if key not in self.cache:
            repo = ingest_repo(record.repo.url_or_path, record.repo.branch, self.workdir,
                               commit=record.repo.commit_hash)
            self.cache[key] = Path(repo.checkout)
        return self.cache[key]


def _variables(config: ExperimentConfig, record: ClassUnderTestRecord, checkout: Path) -> PromptVariables:
    profile = elicit_profile(checkout)
    exemplar = exemplar_variables(config.exemplar)
    base = PromptVariables(
        class_under_test=(checkout / record.cut_path).read_text(encoding="utf-8"),
        testing_framework=profile.framework_label,
        java_version=profile.java_version,
        custom=dict(config.variables),
        **exemplar,
    )
    return build_enhanced_variables(base, record)


def generate(config: ExperimentConfig, records: list[ClassUnderTestRecord], provider, workdir: Path,
             out: Path) -> list[GenerationOutcome]:
    out.mkdir(parents=True, exist_ok=True)
    checkouts = _Checkouts(workdir)
    outcomes = []
    for record in sorted(records, key=lambda r: (r.repo.url_or_path, r.cut_fqn, r.test_path)):
        checkout = checkouts.get(record)
        variables = _variables(config, record, checkout)
        for llm in config.llms:
            for template in config.prompts:
                outcomes.append(_generate_one(config, record, checkout, variables, llm, template, provider))
    write_jsonl(out / OUTCOMES_FILE, (o.to_json() for o in outcomes))
    return outcomes


def _generate_one(config, record, checkout, variables, llm, template, provider) -> GenerationOutcome:
    limit = config.token_limit(llm.model)
    try:
        prompt = instantiate(template, variables, llm.model, llm.temperature, limit=limit)
    except TokenLimitExceeded as exc:
        prompt = apply_fallback(exc.prompt, config.fallback)
    common = dict(model=llm.model, prompt_name=template.name, record=record.to_json(),
                  token_count=prompt.token_count)
    start = time.monotonic()
    try:
        raw = provider.complete(prompt, record.cut_fqn)
    except (ProviderError, Timeout) as exc:
        return GenerationOutcome(raw_response="", extracted_source=None, placed_path=None,
                                 status="provider_error", error=str(exc), **common)
    latency = 0 if provider.name in ("mock", "replay") else int((time.monotonic() - start) * 1000)
    try:
        source = extract_test_source(raw)
        placed = place_test_class(checkout, source)
        source = placed.read_text(encoding="utf-8")
        rel = placed.relative_to(checkout.resolve()).as_posix()
        # park: generated classes stay out of the tree until evaluated one by one
        remove_placed(checkout, rel)
    except (ExtractionFailed, PackageMissing) as exc:
        return GenerationOutcome(raw_response=raw, extracted_source=None, placed_path=None,
                                 status="extraction_failed", latency_ms=latency, error=str(exc), **common)
    return GenerationOutcome(raw_response=raw, extracted_source=source, placed_path=rel,
                             status="ok", latency_ms=latency, **common)


# ---------------------------------------------------------------- evaluate


@dataclass
class EvaluateOptions:
    mode: str = "replay"
    replay_dir: Path | None = None
    timeouts: dict[str, float] = field(default_factory=dict)
    include_human: bool = True


def _restore(checkout: Path, rel: str, source: str) -> Path:
    path = checkout / rel
    if path.exists() and rel not in owned_files(checkout):
        raise WriteFailed(f"{rel} exists and was not written by the harness", path=rel)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(source, encoding="utf-8")
    record_owned(checkout.resolve(), rel)
    return path


def _measure(checkout: Path, key: tuple[str, str, str], record: ClassUnderTestRecord, test_fqn: str,
             opts: EvaluateOptions, store: ReplayStore | None):
    """Compile, then cover and mutate; returns (build, coverage, mutation, compile output)."""
    target = PhaseTarget(test_fqn=test_fqn, cut_fqn=record.cut_fqn)

    def phase(name):
        return run_phase(checkout, name, opts.mode, timeout=opts.timeouts.get(name), target=target,
                         replay=store, key=key)

    compiled = phase("compile")
    if not compiled.exit_ok:
        return False, None, None, compiled.stdout + "\n" + compiled.stderr
    coverage = mutation = None
    cov_run = phase("coverage")
    for artifact in cov_run.artifacts:
        try:
            coverage = parse_coverage_report(artifact, record.cut_fqn)
        except (ClassNotInReport, MalformedReport) as exc:
            log.warning("%s: %s", key, exc)
    mut_run = phase("mutation")
    for artifact in mut_run.artifacts:
        try:
            mutation = parse_mutation_report(artifact, record.cut_fqn)
        except MalformedReport as exc:
            log.warning("%s: %s", key, exc)
    return True, coverage, mutation, ""


def _row(key, record, build, coverage, mutation, smells) -> PerClassMetrics:
    return PerClassMetrics(
        model=key[0],
        prompt_name=key[1],
        project=project_id(record.repo.url_or_path),
        cut_fqn=record.cut_fqn,
        build=build,
        branch_coverage=coverage.branch if build and coverage else None,
        line_coverage=coverage.line if build and coverage else None,
        method_coverage=coverage.method if build and coverage else None,
        mutation_score=mutation if build else None,
        smells=smells,
    )


def evaluate(outcomes: list[GenerationOutcome], workdir: Path, out: Path,
             opts: EvaluateOptions) -> list[PerClassMetrics]:
    out.mkdir(parents=True, exist_ok=True)
    store = ReplayStore(opts.replay_dir) if opts.mode == "replay" and opts.replay_dir else None
    checkouts = _Checkouts(workdir)
    injected = set()
    rows, diagnostics = [], []
    records = {}
    for o in outcomes:
        records.setdefault((o.record["repo_url"], o.record["cut_fqn"], o.record["test_path"]),
                           ClassUnderTestRecord.from_json(o.record))

    def prepare(record):
        checkout = checkouts.get(record)
        if opts.mode == "live" and checkout not in injected:
            inject_measurement_deps(elicit_profile(checkout))
            injected.add(checkout)
        return checkout

    if opts.include_human:
        for record in records.values():
            checkout = prepare(record)
            key = (HUMAN_MODEL, HUMAN_PROMPT, record.cut_fqn)
            build, cov, mut, _ = _measure(checkout, key, record, record.test_fqn, opts, store)
            source = (checkout / record.test_path).read_text(encoding="utf-8")
            # human tests are the project's own, compiled baseline
            rows.append(_row(key, record, True, cov, mut, smells_for_source(source, record.cut_name)))
            if not build:
                log.warning("human test for %s did not build", record.cut_fqn)

    for o in outcomes:
        record = records[(o.record["repo_url"], o.record["cut_fqn"], o.record["test_path"])]
        key = (o.model, o.prompt_name, record.cut_fqn)
        if o.status != "ok":
            rows.append(_row(key, record, False, None, None, smells_for_source(o.extracted_source or "")))
            continue
        checkout = prepare(record)
        placed = _restore(checkout, o.placed_path, o.extracted_source)
        try:
            test_fqn = _fqn_of(o.extracted_source, placed)
            build, cov, mut, output = _measure(checkout, key, record, test_fqn, opts, store)
        finally:
            remove_placed(checkout, o.placed_path)
        for err in parse_diagnostics(output):
            diagnostics.append({"model": o.model, "prompt_name": o.prompt_name, "cut_fqn": record.cut_fqn,
                                "file": Path(err.file).name, "line": err.line, "message": err.message,
                                "category": err.category.name})
        rows.append(_row(key, record, build, cov, mut, smells_for_source(o.extracted_source, record.cut_name)))

    write_jsonl(out / LEDGER_FILE, (r.to_json() for r in rows))
    write_jsonl(out / DIAGNOSTICS_FILE, diagnostics)
    return rows


def _fqn_of(source: str, placed: Path) -> str:
    unit = parse_unit(source)
    return f"{unit.package_name}.{placed.stem}" if unit.package_name else placed.stem


def read_outcomes(path: Path) -> list[GenerationOutcome]:
    return [GenerationOutcome.from_json(row) for row in read_jsonl(path)]


def read_ledger(path: Path) -> list[PerClassMetrics]:
    return [PerClassMetrics.from_json(row) for row in read_jsonl(path)]

