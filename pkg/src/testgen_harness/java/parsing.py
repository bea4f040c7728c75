"""Error-tolerant parsing of Java compilation units with tree-sitter."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import tree_sitter_java
from tree_sitter import Language, Node, Parser, Tree

from ..errors import UnparseableSource

JAVA = Language(tree_sitter_java.language())

TYPE_DECLARATIONS = frozenset(
    {
        "class_declaration",
        "interface_declaration",
        "enum_declaration",
        "record_declaration",
        "annotation_type_declaration",
    }
)

_local = threading.local()


def _parser() -> Parser:
    # Parser instances are not safe to share between threads.
    parser = getattr(_local, "parser", None)
    if parser is None:
        parser = _local.parser = Parser(JAVA)
    return parser


@dataclass(frozen=True)
class JavaSourceUnit:
    path: Path
    package_name: str
    type_names: tuple[str, ...]
    raw_text: str
    degraded: bool = False
    tree: Tree | None = field(default=None, compare=False, repr=False)

    @property
    def root(self) -> Node:
        return self.tree.root_node

    @property
    def primary_type(self) -> str:
        """The public top-level type if any, else the first declared one."""
        for node in top_level_types(self.root):
            if "public" in modifiers_of(node):
                return name_of(node)
        return self.type_names[0]

    def fqn(self, type_name: str | None = None) -> str:
        name = type_name or self.primary_type
        return f"{self.package_name}.{name}" if self.package_name else name


def parse_unit(source_text: str, path: str | Path = "<memory>") -> JavaSourceUnit:
    """Parse ``source_text``; raise :class:`UnparseableSource` without any type."""
    tree = _parser().parse(source_text.encode("utf-8"))
    root = tree.root_node
    types = tuple(name_of(n) for n in top_level_types(root))
    types = tuple(t for t in types if t)
    if not types:
        raise UnparseableSource(f"no top-level type recoverable from {path}", path=str(path))
    return JavaSourceUnit(
        path=Path(path),
        package_name=_package_of(root),
        type_names=types,
        raw_text=source_text,
        degraded=root.has_error,
        tree=tree,
    )


def parse_file(path: str | Path) -> JavaSourceUnit:
    path = Path(path)
    return parse_unit(path.read_text(encoding="utf-8", errors="replace"), path)


def text(node: Node | None) -> str:
    return node.text.decode("utf-8", errors="replace") if node is not None else ""


def name_of(node: Node) -> str:
    return text(node.child_by_field_name("name"))


def modifiers_of(node: Node) -> set[str]:
    for child in node.children:
        if child.type == "modifiers":
            return {text(c) for c in child.children if not c.is_named or c.type not in ("marker_annotation", "annotation")}
    return set()


def annotations_of(node: Node) -> list[Node]:
    for child in node.children:
        if child.type == "modifiers":
            return [c for c in child.children if c.type in ("marker_annotation", "annotation")]
    return []


def annotation_name(node: Node) -> str:
    return text(node.child_by_field_name("name")).rsplit(".", 1)[-1]


def top_level_types(root: Node) -> Iterator[Node]:
    for child in root.children:
        if child.type in TYPE_DECLARATIONS:
            yield child
        elif child.type == "ERROR":
            # declarations swallowed by a recovery node are still top level
            yield from top_level_types(child)


def walk(node: Node) -> Iterator[Node]:
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(current.children))


def type_name(node: Node | None) -> str:
    """Written name of a type node with generics and array brackets dropped."""
    if node is None:
        return ""
    if node.type == "generic_type":
        for child in node.children:
            if child.type in ("type_identifier", "scoped_type_identifier"):
                return text(child)
    if node.type == "array_type":
        return type_name(node.child_by_field_name("element"))
    return text(node)


def _package_of(root: Node) -> str:
    for child in root.children:
        if child.type == "package_declaration":
            for c in child.children:
                if c.type in ("scoped_identifier", "identifier"):
                    return text(c)
    return ""
