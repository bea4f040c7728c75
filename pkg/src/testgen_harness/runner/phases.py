"""Build phases run through the project's own build tool, or replayed from fixtures."""

from __future__ import annotations

import json
import logging
import shutil
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import MissingReplayFixture, ToolNotFound

log = logging.getLogger(__name__)

PHASES = ("compile", "test", "coverage", "mutation")
DEFAULT_TIMEOUTS = {"compile": 300, "test": 300, "coverage": 300, "mutation": 1800}

MAVEN_REPORTS = {
    "coverage": ["target/site/jacoco/jacoco.xml"],
    "mutation": ["target/pit-reports/mutations.xml"],
}
GRADLE_REPORTS = {
    "coverage": ["build/reports/jacoco/test/jacocoTestReport.xml"],
    "mutation": ["build/reports/pitest/mutations.xml"],
}


@dataclass
class BuildRun:
    project_root: Path
    phase: str
    exit_ok: bool
    stdout: str = ""
    stderr: str = ""
    artifacts: list[Path] = field(default_factory=list)
    duration_ms: int = 0
    timed_out: bool = False


@dataclass(frozen=True)
class PhaseTarget:
    """Restricts a live phase to one test class and its class under test."""

    test_fqn: str | None = None
    cut_fqn: str | None = None


def _maven_command(root: Path, phase: str, target: PhaseTarget) -> list[str]:
    wrapper = root / "mvnw"
    exe = str(wrapper) if wrapper.is_file() else shutil.which("mvn")
    if exe is None:
        raise ToolNotFound("mvn not found on PATH and no mvnw wrapper", tool="mvn")
    base = [exe, "-B", "-q"]
    select = [f"-Dtest={target.test_fqn}", "-Dsurefire.failIfNoSpecifiedTests=false"] if target.test_fqn else []
    if phase == "compile":
        return base + ["test-compile"]
    if phase == "test":
        return base + ["test"] + select
    if phase == "coverage":
        return base + ["test", "-Dmaven.test.failure.ignore=true"] + select
    pit = ["org.pitest:pitest-maven:mutationCoverage"]
    if target.cut_fqn:
        pit.append(f"-DtargetClasses={target.cut_fqn}")
    if target.test_fqn:
        pit.append(f"-DtargetTests={target.test_fqn}")
    return base + ["test-compile"] + pit


def _gradle_command(root: Path, phase: str, target: PhaseTarget) -> list[str]:
    wrapper = root / "gradlew"
    exe = str(wrapper) if wrapper.is_file() else shutil.which("gradle")
    if exe is None:
        raise ToolNotFound("gradle not found on PATH and no gradlew wrapper", tool="gradle")
    select = ["--tests", target.test_fqn] if target.test_fqn else []
    tasks = {
        "compile": ["compileTestJava"],
        "test": ["test"] + select,
        "coverage": ["test", "jacocoTestReport", "--continue"] + select,
        "mutation": ["pitest"],
    }[phase]
    return [exe, "--quiet", "--console=plain"] + tasks


def _run_live(root: Path, phase: str, timeout: float, target: PhaseTarget) -> BuildRun:
    if (root / "pom.xml").is_file():
        cmd, reports = _maven_command(root, phase, target), MAVEN_REPORTS
    else:
        cmd, reports = _gradle_command(root, phase, target), GRADLE_REPORTS
    start = time.monotonic()
    try:
        proc = subprocess.run(cmd, cwd=root, capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired as exc:
        return BuildRun(
            root, phase, False,
            stdout=_decode(exc.stdout), stderr=_decode(exc.stderr) + f"\nphase timed out after {timeout}s",
            duration_ms=int((time.monotonic() - start) * 1000), timed_out=True,
        )
    except FileNotFoundError as exc:
        raise ToolNotFound(str(exc), tool=cmd[0]) from exc
    artifacts = [root / rel for rel in reports.get(phase, []) if (root / rel).is_file()]
    exit_ok = proc.returncode == 0 and (phase not in reports or bool(artifacts))
    return BuildRun(
        root, phase, exit_ok, proc.stdout, proc.stderr, artifacts,
        duration_ms=int((time.monotonic() - start) * 1000),
    )


def _decode(data) -> str:
    if data is None:
        return ""
    return data.decode("utf-8", "replace") if isinstance(data, bytes) else data


class ReplayStore:
    """Fixture runs described by ``manifest.json`` in a replay directory.

    Each manifest entry names (model, prompt, cut_fqn, phase) and carries
    ``exit_ok``, ``artifacts`` and an optional ``stderr`` file, all relative
    to the replay directory.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        manifest = self.root / "manifest.json"
        if not manifest.is_file():
            raise MissingReplayFixture(f"no replay manifest at {manifest}", path=str(manifest))
        entries = json.loads(manifest.read_text(encoding="utf-8"))["runs"]
        self.entries = {(e["model"], e["prompt"], e["cut_fqn"], e["phase"]): e for e in entries}

    def run(self, project_root: Path, phase: str, key: tuple[str, str, str]) -> BuildRun:
        entry = self.entries.get((*key, phase))
        if entry is None:
            model, prompt, cut = key
            raise MissingReplayFixture(
                f"no replay fixture for {model}/{prompt}/{cut} phase {phase}",
                model=model, prompt=prompt, cut_fqn=cut, phase=phase,
            )
        artifacts = [self.root / a for a in entry.get("artifacts", [])]
        for path in artifacts:
            if not path.is_file():
                raise MissingReplayFixture(f"replay artifact {path} is missing", path=str(path))
        stderr = ""
        if entry.get("stderr"):
            stderr_path = self.root / entry["stderr"]
            if not stderr_path.is_file():
                raise MissingReplayFixture(f"replay stderr {stderr_path} is missing", path=str(stderr_path))
            stderr = stderr_path.read_text(encoding="utf-8")
        return BuildRun(Path(project_root), phase, bool(entry["exit_ok"]), "", stderr, artifacts)


def run_phase(
    project_root: str | Path,
    phase: str,
    mode: str = "live",
    *,
    timeout: float | None = None,
    target: PhaseTarget = PhaseTarget(),
    replay: ReplayStore | None = None,
    key: tuple[str, str, str] | None = None,
) -> BuildRun:
    """Run one build phase.

    Replay mode needs ``key`` = (model, prompt_name, cut_fqn); the store
    defaults to ``<project_root>/replay``.
    """
    if phase not in PHASES:
        raise ValueError(f"unknown phase {phase!r}")
    root = Path(project_root)
    if mode == "replay":
        store = replay or ReplayStore(root / "replay")
        if key is None:
            raise ValueError("replay mode needs a (model, prompt, cut_fqn) key")
        return store.run(root, phase, key)
    if mode != "live":
        raise ValueError(f"unknown mode {mode!r}")
    return _run_live(root, phase, timeout or DEFAULT_TIMEOUTS[phase], target)
