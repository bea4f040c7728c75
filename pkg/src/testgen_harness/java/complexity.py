"""Lines of code and McCabe complexity for Java units."""

from __future__ import annotations

from dataclasses import dataclass

from tree_sitter import Node

from .parsing import TYPE_DECLARATIONS, JavaSourceUnit, walk

METHOD_NODES = frozenset({"method_declaration", "constructor_declaration", "compact_constructor_declaration"})

_BRANCHES = frozenset(
    {
        "if_statement",
        "for_statement",
        "enhanced_for_statement",
        "while_statement",
        "do_statement",
        "catch_clause",
        "ternary_expression",
    }
)


@dataclass(frozen=True)
class ComplexityReport:
    loc: int
    cyclomatic_total: int
    method_count: int
    per_method: tuple[tuple[str, int], ...] = ()


def count_loc(source: str) -> int:
    """Non-blank lines; comment lines count."""
    return sum(1 for line in source.splitlines() if line.strip())


def method_complexity(method: Node) -> int:
    """1 + decision points, excluding nested methods and classes."""
    body = method.child_by_field_name("body")
    if body is None:
        return 1
    points = 0
    stack = [body]
    while stack:
        node = stack.pop()
        kind = node.type
        if kind in _BRANCHES:
            points += 1
        elif kind == "switch_label" and node.named_child_count:
            points += 1  # `default` carries no children
        elif kind == "binary_expression":
            op = node.child_by_field_name("operator")
            if op is not None and op.type in ("&&", "||"):
                points += 1
        if node is not body and (kind in METHOD_NODES or kind in TYPE_DECLARATIONS or kind == "class_body"):
            continue
        stack.extend(node.children)
    return 1 + points


def measure_complexity(unit: JavaSourceUnit) -> ComplexityReport:
    per_method = []
    for node in walk(unit.root):
        if node.type in METHOD_NODES:
            name = node.child_by_field_name("name")
            per_method.append((name.text.decode() if name else "", method_complexity(node)))
    return ComplexityReport(
        loc=count_loc(unit.raw_text),
        cyclomatic_total=sum(c for _, c in per_method),
        method_count=len(per_method),
        per_method=tuple(per_method),
    )
