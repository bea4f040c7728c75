"""``testgen-harness`` command line: mine, generate, evaluate, report."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import pipeline
from .buildconf import tool_versions
from .errors import HarnessError, SchemaViolation
from .llm import HttpProvider, MockProvider, ProviderEndpoint, ReplayProvider
from .metrics import EvaluationLedger, aggregate, delta_table
from .mining import read_records
from .mining.dataset import read_jsonl
from .prompts import load_config_file
from .prompts.config import CONFIG_ENV
from .report import ReportRow, RunManifest, emit_aggregate, emit_csv, emit_deltas
from .runner import CATEGORIES, CompilationError, ErrorCategory, error_profile

log = logging.getLogger("testgen_harness")


def _global_flags(parser: argparse.ArgumentParser, top: bool) -> None:
    # accepted before or after the subcommand
    default = None if top else argparse.SUPPRESS
    parser.add_argument("--config", default=default, help=f"experiment YAML (default: ${CONFIG_ENV})")
    parser.add_argument("--workdir", default=default, help="where repositories are checked out")
    parser.add_argument("--mode", choices=("live", "replay"), default=default, help="build execution mode")
    parser.add_argument("-v", "--verbose", action="store_true", default=False if top else argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="testgen-harness", description=__doc__)
    _global_flags(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="build a class-under-test / test-class dataset")
    _global_flags(p, top=False)
    p.add_argument("--repo", action="append", required=True, help="repository URL or path (repeatable)")
    p.add_argument("--branch", required=True)
    p.add_argument("--commit", help="pin every repository to this commit")
    p.add_argument("--out", required=True)
    p.add_argument("--require-build", action="store_true", help="drop repositories whose baseline build fails")

    p = sub.add_parser("generate", help="obtain generated test classes")
    _global_flags(p, top=False)
    p.add_argument("--dataset", required=True, help="classes2test.jsonl")
    p.add_argument("--provider", choices=("live", "mock", "replay"), default="mock")
    p.add_argument("--responses", help="canned responses directory for mock/replay providers")
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="build and measure generated and human tests")
    _global_flags(p, top=False)
    p.add_argument("--outcomes", required=True, help="outcomes.jsonl")
    p.add_argument("--replay-dir", help="directory holding replay/manifest.json fixtures")
    p.add_argument("--timeout-compile", type=float, default=300)
    p.add_argument("--timeout-mutation", type=float, default=1800)
    p.add_argument("--no-human", action="store_true", help="skip the human-written baseline rows")
    p.add_argument("--out", required=True)

    p = sub.add_parser("report", help="write CSV reports, aggregates and deltas")
    _global_flags(p, top=False)
    p.add_argument("--ledger", required=True)
    p.add_argument("--policy", choices=("compiled_only", "zero_penalized"))
    p.add_argument("--before", help="ledger of a baseline run; emits deltas.csv")
    p.add_argument("--diagnostics", help="diagnostics.jsonl (default: next to the ledger)")
    p.add_argument("--out", required=True)
    return parser


def _config_path(args) -> Path | None:
    value = args.config or os.environ.get(CONFIG_ENV)
    return Path(value) if value else None


def _workdir(args) -> Path:
    return Path(args.workdir or ".testgen-work").resolve()


def cmd_mine(args) -> int:
    pipeline.mine(args.repo, args.branch, _workdir(args), Path(args.out),
                  commit=args.commit, require_build=args.require_build)
    return 0


def _provider(args, config):
    if args.provider == "mock":
        return MockProvider(responses=args.responses)
    if args.provider == "replay":
        if not args.responses:
            raise SchemaViolation("replay provider needs --responses", "--responses")
        return ReplayProvider(args.responses)
    providers = {}
    for llm in config.llms:
        if not llm.base_url:
            raise SchemaViolation("live provider needs base_url", f"llms.{llm.model}.base_url")
        providers[llm.model] = HttpProvider(
            ProviderEndpoint(llm.base_url, llm.api_key_ref, llm.model, llm.timeout, llm.max_retries)
        )
    return _PerModel(providers)


class _PerModel:
    name = "live"

    def __init__(self, providers):
        self.providers = providers

    def complete(self, prompt, cut_fqn):
        return self.providers[prompt.model].complete(prompt, cut_fqn)


def cmd_generate(args) -> int:
    config_path = _config_path(args)
    config = load_config_file(config_path)
    records = read_records(args.dataset)
    out = Path(args.out)
    manifest = RunManifest.begin(config_path, args.dataset, tool_versions(), args.mode or "replay")
    pipeline.generate(config, records, _provider(args, config), _workdir(args), out)
    manifest.finish(out / "manifest.json")
    return 0


def cmd_evaluate(args) -> int:
    mode = args.mode or "replay"
    replay_dir = Path(args.replay_dir) if args.replay_dir else None
    opts = pipeline.EvaluateOptions(
        mode=mode,
        replay_dir=replay_dir,
        timeouts={"compile": args.timeout_compile, "test": args.timeout_compile,
                  "coverage": args.timeout_compile, "mutation": args.timeout_mutation},
        include_human=not args.no_human,
    )
    if mode == "replay" and replay_dir is None:
        raise SchemaViolation("replay mode needs --replay-dir", "--replay-dir")
    outcomes = pipeline.read_outcomes(Path(args.outcomes))
    pipeline.evaluate(outcomes, _workdir(args), Path(args.out), opts)
    return 0


def _policy(args) -> str:
    if args.policy:
        return args.policy
    path = _config_path(args)
    return load_config_file(path).aggregation_policy if path else "compiled_only"


def cmd_report(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ledger_path = Path(args.ledger)
    manifest = RunManifest.begin(_config_path(args), ledger_path, tool_versions(), args.mode or "replay")
    rows = pipeline.read_ledger(ledger_path)
    policy = _policy(args)
    emit_csv([ReportRow.from_metrics(r) for r in rows], out / "report.csv")
    after = aggregate(EvaluationLedger(rows), policy)
    emit_aggregate(after, out / "aggregate.csv")
    if args.before:
        before = aggregate(EvaluationLedger(pipeline.read_ledger(Path(args.before))), policy)
        emit_deltas(delta_table(before, after), out / "deltas.csv")
    diag_path = Path(args.diagnostics) if args.diagnostics else ledger_path.parent / pipeline.DIAGNOSTICS_FILE
    errors = []
    if diag_path.is_file():
        errors = [
            CompilationError(d["file"], d["line"], d["message"], ErrorCategory(d["category"]))
            for d in read_jsonl(diag_path)
            if d["category"] in CATEGORIES
        ]
    profile = error_profile(errors).to_json() if errors else {"total": 0, "categories": {}, "groups": {}}
    (out / "errors_profile.json").write_text(json.dumps(profile, indent=2) + "\n", encoding="utf-8")
    manifest.finish(out / "manifest.json")
    return 0


COMMANDS = {"mine": cmd_mine, "generate": cmd_generate, "evaluate": cmd_evaluate, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except HarnessError as exc:
        print(json.dumps(exc.to_json(), sort_keys=True), file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
