"""Readers for JaCoCo coverage XML and PIT mutation XML."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from ..errors import ClassNotInReport, MalformedReport

# PIT statuses: detected ones count as killed; RUN_ERROR and NON_VIABLE
# mutants never executed meaningfully and are left out of the denominator.
KILLED = {"KILLED", "TIMED_OUT", "MEMORY_ERROR"}
NOT_KILLED = {"SURVIVED", "NO_COVERAGE"}


@dataclass(frozen=True)
class Coverage:
    branch: float | None
    line: float | None
    method: float | None


def percent(covered: int, missed: int) -> float | None:
    total = covered + missed
    return None if total == 0 else 100.0 * covered / total


def _load(path: str | Path) -> ET.Element:
    try:
        return ET.parse(path).getroot()
    except (ET.ParseError, OSError) as exc:
        raise MalformedReport(f"{path}: {exc}", path=str(path)) from exc


def parse_coverage_report(path: str | Path, cut_fqn: str) -> Coverage:
    """Branch, line and method coverage of ``cut_fqn`` including its nested classes."""
    root = _load(path)
    if root.tag != "report":
        raise MalformedReport(f"{path}: root element is <{root.tag}>, expected <report>", path=str(path))
    internal = cut_fqn.replace(".", "/")
    totals = {"BRANCH": [0, 0], "LINE": [0, 0], "METHOD": [0, 0]}
    found = False
    for cls in root.iter("class"):
        name = cls.get("name", "")
        if name != internal and not name.startswith(internal + "$"):
            continue
        found = True
        for counter in cls.findall("counter"):
            kind = counter.get("type")
            if kind in totals:
                try:
                    totals[kind][0] += int(counter.get("covered", ""))
                    totals[kind][1] += int(counter.get("missed", ""))
                except ValueError as exc:
                    raise MalformedReport(f"{path}: bad counter on {name}", path=str(path)) from exc
    if not found:
        raise ClassNotInReport(f"{cut_fqn} does not appear in {path}", cut_fqn=cut_fqn, path=str(path))
    return Coverage(percent(*totals["BRANCH"]), percent(*totals["LINE"]), percent(*totals["METHOD"]))


def parse_mutation_report(path: str | Path, cut_fqn: str | None = None) -> float | None:
    """Mutation score over the mutants of ``cut_fqn`` (every mutant when None)."""
    root = _load(path)
    if root.tag != "mutations":
        raise MalformedReport(f"{path}: root element is <{root.tag}>, expected <mutations>", path=str(path))
    killed = not_killed = 0
    for mutation in root.iter("mutation"):
        cls = (mutation.findtext("mutatedClass") or "").strip()
        if cut_fqn and cls != cut_fqn and not cls.startswith(cut_fqn + "$"):
            continue
        status = mutation.get("status")
        if status is None:
            raise MalformedReport(f"{path}: mutation without status", path=str(path))
        if status in KILLED:
            killed += 1
        elif status in NOT_KILLED:
            not_killed += 1
    return percent(killed, not_killed)
