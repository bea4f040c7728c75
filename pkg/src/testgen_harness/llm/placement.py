"""Writing generated test classes into a project's test tree."""

from __future__ import annotations

import json
import logging
from pathlib import Path

from ..errors import PackageMissing, WriteFailed
from ..java.parsing import modifiers_of, name_of, parse_unit, top_level_types, walk
from ..mining.discovery import main_source_roots, test_source_roots

log = logging.getLogger(__name__)

OWNED_MANIFEST = ".testgen-harness-owned.json"
COLLISION_SUFFIX = "_AgoneGen"


def owned_files(project_root: Path) -> set[str]:
    path = Path(project_root) / OWNED_MANIFEST
    if not path.is_file():
        return set()
    return set(json.loads(path.read_text(encoding="utf-8")))


def record_owned(project_root: Path, rel: str, owned: bool = True) -> None:
    files = owned_files(project_root)
    files.add(rel) if owned else files.discard(rel)
    (Path(project_root) / OWNED_MANIFEST).write_text(json.dumps(sorted(files), indent=1) + "\n", encoding="utf-8")


def default_test_root(project_root: Path) -> Path:
    conventional = (Path(project_root) / "src" / "test" / "java").resolve()
    roots = test_source_roots(project_root)
    if conventional in roots or not roots:
        return conventional
    return roots[0]


def _uses_packages(project_root: Path) -> bool:
    for root in main_source_roots(project_root):
        for path in root.rglob("*.java"):
            if path.parent != root:
                return True
    return False


def rename_type(source: str, old: str, new: str) -> str:
    """Rewrite every identifier token spelling ``old`` to ``new``."""
    unit = parse_unit(source)
    spans = [
        (n.start_byte, n.end_byte)
        for n in walk(unit.root)
        if n.type in ("identifier", "type_identifier") and n.text == old.encode()
    ]
    data = source.encode("utf-8")
    for start, end in sorted(spans, reverse=True):
        data = data[:start] + new.encode() + data[end:]
    return data.decode("utf-8")


def _single_public_type(source: str) -> str:
    unit = parse_unit(source)
    public = [n for n in top_level_types(unit.root) if "public" in modifiers_of(n)]
    if len(public) <= 1:
        return source
    log.warning("reply declares %d public types; keeping %s", len(public), name_of(public[0]))
    data = source.encode("utf-8")
    for node in sorted(public[1:], key=lambda n: n.start_byte, reverse=True):
        data = data[: node.start_byte] + data[node.end_byte :]
    return data.decode("utf-8")


def place_test_class(project_root: str | Path, source: str, test_root: str | Path | None = None) -> Path:
    """Write ``source`` at ``<test root>/<package dirs>/<Type>.java``.

    Files previously written by the harness are overwritten. A human-written
    file at the target is left alone and the generated class is renamed with
    the collision suffix instead.
    """
    project_root = Path(project_root).resolve()
    source = _single_public_type(source)
    unit = parse_unit(source)
    if not unit.package_name and _uses_packages(project_root):
        raise PackageMissing(f"generated class {unit.primary_type} has no package declaration")
    root = Path(test_root) if test_root else default_test_root(project_root)
    directory = root.joinpath(*unit.package_name.split(".")) if unit.package_name else root
    name = unit.primary_type
    owned = owned_files(project_root)
    target = directory / f"{name}.java"
    if target.exists() and _rel(project_root, target) not in owned:
        new_name = name + COLLISION_SUFFIX
        source = rename_type(source, name, new_name)
        target = directory / f"{new_name}.java"
        if target.exists() and _rel(project_root, target) not in owned:
            raise WriteFailed(f"{target} exists and was not written by the harness", path=str(target))
    try:
        directory.mkdir(parents=True, exist_ok=True)
        target.write_text(source, encoding="utf-8")
    except OSError as exc:
        raise WriteFailed(f"cannot write {target}: {exc}", path=str(target)) from exc
    record_owned(project_root, _rel(project_root, target))
    return target


def remove_placed(project_root: str | Path, path: str | Path) -> None:
    """Delete a harness-written file; human files are refused."""
    project_root = Path(project_root).resolve()
    path = Path(path)
    if not path.is_absolute():
        path = project_root / path
    rel = _rel(project_root, path)
    if rel not in owned_files(project_root):
        raise WriteFailed(f"{rel} was not written by the harness", path=rel)
    path.unlink(missing_ok=True)
    record_owned(project_root, rel, owned=False)


def _rel(project_root: Path, path: Path) -> str:
    return Path(path).resolve().relative_to(project_root).as_posix()
