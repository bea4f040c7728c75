"""Cloning and commit pinning of source repositories."""

from __future__ import annotations

import hashlib
import logging
import os
import re
import shutil
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import BranchNotFound, CloneFailed

log = logging.getLogger(__name__)

_HASH = re.compile(r"^[0-9a-f]{40}$")
_GIT_ENV = {"GIT_TERMINAL_PROMPT": "0", "GIT_ASKPASS": "echo"}


@dataclass(frozen=True)
class RepoIdentity:
    url_or_path: str
    branch: str
    commit_hash: str
    checkout: Path | None = field(default=None, compare=False)

    def __post_init__(self):
        if not _HASH.match(self.commit_hash):
            raise ValueError(f"commit hash must be 40 lowercase hex characters: {self.commit_hash!r}")

    @property
    def project_id(self) -> str:
        return project_id(self.url_or_path)


def project_id(locator: str) -> str:
    """Stable numeric identifier derived from a repository locator."""
    digest = hashlib.sha256(locator.encode("utf-8")).hexdigest()
    return str(int(digest[:8], 16))


def _git(*args: str, cwd: Path | None = None, timeout: float = 600) -> subprocess.CompletedProcess:
    env = {**os.environ, **_GIT_ENV}
    return subprocess.run(
        ["git", *args], cwd=cwd, env=env, capture_output=True, text=True, timeout=timeout
    )


def head_commit(checkout: Path) -> str:
    proc = _git("rev-parse", "HEAD", cwd=checkout)
    if proc.returncode != 0:
        raise CloneFailed(f"not a git checkout: {checkout}", stderr=proc.stderr.strip())
    return proc.stdout.strip()


def ingest_repo(locator: str, branch: str, workdir: str | Path, commit: str | None = None) -> RepoIdentity:
    """Clone ``locator`` at ``branch`` under ``workdir`` and record the commit.

    With ``commit`` given, an existing checkout already at that commit is
    reused, otherwise the fresh clone is detached at it.
    """
    workdir = Path(workdir)
    if os.path.isdir(locator):
        locator = str(Path(locator).resolve())
    dest = workdir / "repos" / project_id(locator)
    if commit and (dest / ".git").exists():
        try:
            if head_commit(dest) == commit:
                return RepoIdentity(locator, branch, commit, dest)
        except CloneFailed:
            pass
    if dest.exists():
        shutil.rmtree(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    try:
        proc = _git("clone", "--quiet", "--branch", branch, "--single-branch", locator, str(dest))
    except subprocess.TimeoutExpired as exc:
        raise CloneFailed(f"clone of {locator} timed out", locator=locator) from exc
    if proc.returncode != 0:
        err = proc.stderr.strip()
        if "Remote branch" in err and "not found" in err:
            raise BranchNotFound(f"branch {branch!r} not found in {locator}", locator=locator, branch=branch)
        raise CloneFailed(f"cannot clone {locator}: {err.splitlines()[-1] if err else proc.returncode}", locator=locator)
    if commit:
        proc = _git("checkout", "--quiet", "--detach", commit, cwd=dest)
        if proc.returncode != 0:
            raise CloneFailed(f"commit {commit} not reachable on {branch}", locator=locator)
    identity = RepoIdentity(locator, branch, head_commit(dest), dest)
    log.info("ingested %s@%s -> %s", locator, branch, identity.commit_hash)
    return identity
