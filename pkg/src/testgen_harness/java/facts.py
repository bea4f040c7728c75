"""Structural facts extracted from a parsed Java unit.

One traversal yields both unit-wide counters (used by the mapping validator)
and per-method facts (used by the smell detectors).  Receiver type hints are
best effort: declared fields, parameters, locals and constructor sites only.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from tree_sitter import Node

from .parsing import (
    TYPE_DECLARATIONS,
    JavaSourceUnit,
    annotation_name,
    annotations_of,
    modifiers_of,
    name_of,
    text,
    type_name,
    walk,
)

MOCKING_CALLS = frozenset({"mock", "spy", "when", "verify"})
MOCKING_RECEIVERS = frozenset({"Mockito", "BDDMockito", "PowerMockito", "EasyMock"})
MOCKING_ANNOTATIONS = frozenset({"Mock", "Spy", "MockBean", "SpyBean", "InjectMocks"})
MOCKING_HINT = "mocking"

VERIFICATION_CALLS = frozenset({"verify"})

CONTROL_FLOW = frozenset(
    {
        "if_statement",
        "for_statement",
        "enhanced_for_statement",
        "while_statement",
        "do_statement",
        "switch_expression",
        "switch_statement",
        "ternary_expression",
    }
)

NUMERIC_LITERALS = frozenset(
    {
        "decimal_integer_literal",
        "hex_integer_literal",
        "octal_integer_literal",
        "binary_integer_literal",
        "decimal_floating_point_literal",
        "hex_floating_point_literal",
    }
)

PRINT_METHODS = frozenset({"print", "println", "printf", "format", "write"})
FILE_TYPES = frozenset(
    {"File", "FileReader", "FileWriter", "FileInputStream", "FileOutputStream", "RandomAccessFile"}
)
FILE_STATICS = {"Files": None, "Paths": {"get"}, "Path": {"of"}, "DriverManager": {"getConnection"}}
EXISTENCE_CHECKS = frozenset({"exists", "notExists", "isFile", "isDirectory"})

# Expected argument count of common assertions without a message argument.
ASSERT_ARITY = {
    "assertEquals": 2,
    "assertNotEquals": 2,
    "assertSame": 2,
    "assertNotSame": 2,
    "assertArrayEquals": 2,
    "assertIterableEquals": 2,
    "assertLinesMatch": 2,
    "assertInstanceOf": 2,
    "assertThat": 2,
    "assertThrows": 2,
    "assertTimeout": 2,
    "assertTimeoutPreemptively": 2,
    "assertTrue": 1,
    "assertFalse": 1,
    "assertNull": 1,
    "assertNotNull": 1,
    "assertDoesNotThrow": 1,
    "assertAll": 0,
    "fail": 0,
}


@dataclass(frozen=True)
class AssertionCall:
    method_name: str
    arg_count: int
    has_message: bool
    args_textual: tuple[str, ...]
    enclosing_method: str

    @property
    def is_assert(self) -> bool:
        return self.method_name.startswith(("assert", "fail"))


@dataclass(frozen=True)
class FieldFacts:
    name: str
    type_name: str
    annotations: tuple[str, ...]
    initialized: bool


@dataclass
class MethodFacts:
    name: str
    owner: str
    annotations: tuple[str, ...] = ()
    annotation_args: dict[str, str] = field(default_factory=dict)
    modifiers: frozenset[str] = frozenset()
    is_constructor: bool = False
    has_body: bool = True
    statement_count: int = 0
    invocations: Counter = field(default_factory=Counter)
    constructed: Counter = field(default_factory=Counter)
    assertions: list[AssertionCall] = field(default_factory=list)
    control_flow: int = 0
    throw_count: int = 0
    try_count: int = 0
    print_calls: int = 0
    sleep_calls: int = 0
    file_api_uses: int = 0
    file_object_uses: int = 0
    existence_checks: int = 0
    tostring_in_assert: int = 0
    identifiers: set[str] = field(default_factory=set)
    assigned: set[str] = field(default_factory=set)
    expects_exception: bool = False
    length: int = 0

    @property
    def body_empty(self) -> bool:
        return self.has_body and self.statement_count == 0


@dataclass
class AstFacts:
    imports: list[str] = field(default_factory=list)
    static_imports: list[str] = field(default_factory=list)
    constructed_types: Counter = field(default_factory=Counter)
    invoked_methods: Counter = field(default_factory=Counter)
    annotations: Counter = field(default_factory=Counter)
    assertion_calls: list[AssertionCall] = field(default_factory=list)
    control_flow_count: int = 0
    numeric_literal_args: Counter = field(default_factory=Counter)
    print_calls: int = 0
    sleep_calls: int = 0
    file_api_uses: int = 0
    tostring_in_assert: int = 0
    mocked_types: Counter = field(default_factory=Counter)
    methods: list[MethodFacts] = field(default_factory=list)
    fields: list[FieldFacts] = field(default_factory=list)
    class_names: list[str] = field(default_factory=list)
    superclasses: list[str] = field(default_factory=list)
    degraded: bool = False

    @property
    def constructor_count(self) -> int:
        return sum(1 for m in self.methods if m.is_constructor)

    def counters(self) -> dict[str, int]:
        return {
            "control_flow_count": self.control_flow_count,
            "print_calls": self.print_calls,
            "sleep_calls": self.sleep_calls,
            "file_api_uses": self.file_api_uses,
            "tostring_in_assert": self.tostring_in_assert,
            "assertion_calls": len(self.assertion_calls),
        }


def extract_facts(unit: JavaSourceUnit) -> AstFacts:
    facts = AstFacts(degraded=unit.degraded)
    root = unit.root
    for child in root.children:
        if child.type == "import_declaration":
            name = _import_name(child)
            if any(c.type == "static" for c in child.children):
                facts.static_imports.append(name)
            else:
                facts.imports.append(name)
    _Walker(facts).visit_types(root)
    return facts


def _import_name(node: Node) -> str:
    parts = []
    for c in node.children:
        if c.type in ("scoped_identifier", "identifier"):
            parts.append(text(c))
        elif c.type == "asterisk":
            parts.append("*")
    return ".".join(parts)


def _is_stringy(node: Node) -> bool:
    if node.type in ("string_literal", "text_block", "lambda_expression"):
        return True
    if node.type == "binary_expression":
        return any(_is_stringy(c) for c in node.children if c.is_named)
    return False


def numeric_token(node: Node) -> str | None:
    if node.type in NUMERIC_LITERALS:
        return text(node)
    if node.type == "unary_expression" and node.child_count == 2:
        op, operand = node.children
        if op.type in ("-", "+") and operand.type in NUMERIC_LITERALS:
            return text(node)
    return None


def _call_args(node: Node) -> list[Node]:
    args = node.child_by_field_name("arguments")
    return [a for a in args.named_children if a.type not in ("line_comment", "block_comment")] if args else []


class _Walker:
    def __init__(self, facts: AstFacts):
        self.facts = facts
        self.field_types: dict[str, str] = {}

    def visit_types(self, node: Node) -> None:
        for child in node.children:
            if child.type in TYPE_DECLARATIONS:
                self.visit_type(child)
            elif child.type == "ERROR":
                self.visit_types(child)

    def visit_type(self, decl: Node) -> None:
        facts = self.facts
        owner = name_of(decl)
        facts.class_names.append(owner)
        for ann in annotations_of(decl):
            facts.annotations[annotation_name(ann)] += 1
        sup = decl.child_by_field_name("superclass")
        if sup is not None:
            facts.superclasses.append(type_name(sup.named_children[0]) if sup.named_children else "")
        body = decl.child_by_field_name("body")
        if body is None:
            return
        members = []
        for member in body.named_children:
            if member.type == "enum_body_declarations":
                members.extend(member.named_children)
            else:
                members.append(member)
        outer_fields = self.field_types
        self.field_types = dict(outer_fields)
        for member in members:
            if member.type == "field_declaration":
                declared = type_name(member.child_by_field_name("type"))
                for decl_node in member.children_by_field_name("declarator"):
                    self.field_types[name_of(decl_node)] = declared
        for member in members:
            if member.type == "field_declaration":
                self.visit_field(member)
            elif member.type in ("method_declaration", "constructor_declaration", "compact_constructor_declaration"):
                self.visit_method(member, owner)
            elif member.type in TYPE_DECLARATIONS:
                self.visit_type(member)
            elif member.type in ("static_initializer", "block"):
                self.visit_body(member, None, dict(self.field_types))
        self.field_types = outer_fields

    def visit_field(self, node: Node) -> None:
        anns = tuple(annotation_name(a) for a in annotations_of(node))
        for a in anns:
            self.facts.annotations[a] += 1
        declared = type_name(node.child_by_field_name("type"))
        for decl_node in node.children_by_field_name("declarator"):
            value = decl_node.child_by_field_name("value")
            self.facts.fields.append(FieldFacts(name_of(decl_node), declared, anns, value is not None))
            if MOCKING_ANNOTATIONS.intersection(anns):
                self.facts.mocked_types[declared] += 1
            if value is not None:
                self.visit_body(value, None, dict(self.field_types))

    def visit_method(self, node: Node, owner: str) -> None:
        anns = annotations_of(node)
        method = MethodFacts(
            name=name_of(node) or owner,
            owner=owner,
            annotations=tuple(annotation_name(a) for a in anns),
            modifiers=frozenset(modifiers_of(node)),
            is_constructor=node.type != "method_declaration",
            length=len(node.text),
        )
        for a in anns:
            self.facts.annotations[annotation_name(a)] += 1
            args = a.child_by_field_name("arguments")
            if args is not None:
                for pair in args.named_children:
                    if pair.type == "element_value_pair":
                        key = text(pair.child_by_field_name("key"))
                        method.annotation_args[key] = text(pair.child_by_field_name("value"))
        if "expected" in method.annotation_args:
            method.expects_exception = True
        scope = dict(self.field_types)
        params = node.child_by_field_name("parameters")
        if params is not None:
            for p in params.named_children:
                if p.type in ("formal_parameter", "spread_parameter"):
                    scope[name_of(p) or text(p.named_children[-1])] = type_name(p.child_by_field_name("type"))
        body = node.child_by_field_name("body")
        if body is None:
            method.has_body = False
        else:
            method.statement_count = sum(
                1 for c in body.named_children if c.type not in ("line_comment", "block_comment")
            )
            for n in _scope_walk(body):
                if n.type in ("local_variable_declaration", "resource"):
                    declared = type_name(n.child_by_field_name("type"))
                    if n.type == "resource":
                        scope[name_of(n)] = declared
                    for d in n.children_by_field_name("declarator"):
                        scope[name_of(d)] = declared
                elif n.type in ("enhanced_for_statement", "catch_formal_parameter", "formal_parameter"):
                    declared = type_name(n.child_by_field_name("type"))
                    if n.type == "catch_formal_parameter":
                        ct = next((c for c in n.named_children if c.type == "catch_type"), None)
                        declared = text(ct)
                    scope[name_of(n)] = declared
            self.visit_body(body, method, scope)
        self.facts.methods.append(method)

    def visit_body(self, node: Node, method: MethodFacts | None, scope: dict[str, str]) -> None:
        facts = self.facts
        for n in _scope_walk(node):
            kind = n.type
            if kind in CONTROL_FLOW:
                facts.control_flow_count += 1
                if method:
                    method.control_flow += 1
            elif kind == "throw_statement" and method:
                method.throw_count += 1
            elif kind in ("try_statement", "try_with_resources_statement") and method:
                if any(c.type in ("catch_clause", "finally_clause") for c in n.children):
                    method.try_count += 1
            elif kind == "identifier" and method:
                method.identifiers.add(text(n))
            elif kind == "assignment_expression" and method:
                left = n.child_by_field_name("left")
                if left is not None:
                    target = left.child_by_field_name("field") if left.type == "field_access" else left
                    method.assigned.add(text(target))
            elif kind == "object_creation_expression":
                self.visit_creation(n, method)
            elif kind == "method_invocation":
                self.visit_call(n, method, scope)
            elif kind == "marker_annotation" or kind == "annotation":
                facts.annotations[annotation_name(n)] += 1

    def visit_creation(self, n: Node, method: MethodFacts | None) -> None:
        created = type_name(n.child_by_field_name("type"))
        self.facts.constructed_types[created] += 1
        simple = created.rsplit(".", 1)[-1]
        if simple in FILE_TYPES:
            self.facts.file_api_uses += 1
        if method:
            method.constructed[created] += 1
            if simple in FILE_TYPES:
                method.file_api_uses += 1
        self._count_literals(n)

    def visit_call(self, n: Node, method: MethodFacts | None, scope: dict[str, str]) -> None:
        facts = self.facts
        name = text(n.child_by_field_name("name"))
        obj = n.child_by_field_name("object")
        obj_text = text(obj)
        hint = self.receiver_hint(obj, scope)
        if name in MOCKING_CALLS and (obj is None or obj_text in MOCKING_RECEIVERS):
            hint = MOCKING_HINT
            for arg in _call_args(n):
                if arg.type == "class_literal":
                    facts.mocked_types[type_name(arg.named_children[0])] += 1
        facts.invoked_methods[(hint, name)] += 1
        self._count_literals(n)

        is_print = obj_text in ("System.out", "System.err") and name in PRINT_METHODS
        is_sleep = name == "sleep" and (obj_text in ("Thread", "SystemClock") or obj_text.startswith("TimeUnit."))
        statics = FILE_STATICS.get(obj_text, ())
        is_file_api = obj_text in FILE_STATICS and (statics is None or name in statics)
        is_check = name in EXISTENCE_CHECKS
        is_file_object = hint.rsplit(".", 1)[-1] == "File" and not is_check
        facts.print_calls += is_print
        facts.sleep_calls += is_sleep
        facts.file_api_uses += is_file_api
        if method:
            method.invocations[(hint, name)] += 1
            method.print_calls += is_print
            method.sleep_calls += is_sleep
            method.file_api_uses += is_file_api
            method.existence_checks += is_check
            method.file_object_uses += is_file_object
            if obj_text in ("thrown", "exception", "expectedException") and name.startswith("expect"):
                method.expects_exception = True

        if name.startswith(("assert", "fail")) or name in VERIFICATION_CALLS:
            call = self.assertion_call(n, name, method)
            facts.assertion_calls.append(call)
            tostrings = sum(
                1
                for arg in _call_args(n)
                for sub in walk(arg)
                if sub.type == "method_invocation" and text(sub.child_by_field_name("name")) == "toString"
            )
            facts.tostring_in_assert += tostrings
            if method:
                method.assertions.append(call)
                method.tostring_in_assert += tostrings

    def assertion_call(self, n: Node, name: str, method: MethodFacts | None) -> AssertionCall:
        args = _call_args(n)
        base = ASSERT_ARITY.get(name, 1)
        has_message = bool(args) and len(args) > base and (_is_stringy(args[0]) or _is_stringy(args[-1]))
        return AssertionCall(
            method_name=name,
            arg_count=len(args),
            has_message=has_message,
            args_textual=tuple(text(a) for a in args),
            enclosing_method=method.name if method else "",
        )

    def receiver_hint(self, obj: Node | None, scope: dict[str, str]) -> str:
        if obj is None:
            return ""
        if obj.type == "identifier":
            name = text(obj)
            if name in scope:
                return scope[name]
            return name if name[:1].isupper() else ""
        if obj.type == "object_creation_expression":
            return type_name(obj.child_by_field_name("type"))
        if obj.type == "field_access":
            target = obj.child_by_field_name("object")
            fld = text(obj.child_by_field_name("field"))
            if target is not None and target.type == "this":
                return self.field_types.get(fld, "")
            written = text(obj)
            if fld[:1].isupper() and written[:1].islower():
                return written  # qualified type name such as com.example.Key
        if obj.type == "parenthesized_expression" and obj.named_children:
            return self.receiver_hint(obj.named_children[0], scope)
        if obj.type == "cast_expression":
            return type_name(obj.child_by_field_name("type"))
        return ""

    def _count_literals(self, n: Node) -> None:
        for arg in _call_args(n):
            token = numeric_token(arg)
            if token is not None:
                self.facts.numeric_literal_args[token] += 1


def _scope_walk(node: Node):
    """Pre-order walk that does not descend into nested type or class bodies."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        if current is not node and current.type in TYPE_DECLARATIONS:
            continue
        if current.type == "class_body" and current is not node:
            continue
        stack.extend(reversed(current.children))
