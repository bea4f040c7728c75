"""Compiler diagnostics: parsing, categorization and category profiles."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from ..errors import EmptyInput

CATEGORIES = (
    "SymbolNotFound",
    "MissingImport",
    "OverrideIssue",
    "VisibilityIssue",
    "TypeMismatch",
    "InstantiationIssue",
    "SyntaxError",
    "FinalVariableIssue",
    "Other",
)
GROUPS = {
    "SymbolNotFound": "symbol_reference",
    "MissingImport": "symbol_reference",
    "OverrideIssue": "structure_consistency",
    "VisibilityIssue": "structure_consistency",
    "TypeMismatch": "structure_consistency",
    "InstantiationIssue": "structure_consistency",
    "SyntaxError": "syntax_rules",
    "FinalVariableIssue": "syntax_rules",
    "Other": "other",
}

# First match wins. The final-variable rule runs before the syntax rule so a
# final variable named ``expected`` is not read as a parse error.
_CORE = (
    (r"cannot find symbol", "SymbolNotFound"),
    (r"package \S+ does not exist|cannot access", "MissingImport"),
    (r"does not override", "OverrideIssue"),
    (r"has (private|protected) access", "VisibilityIssue"),
    (r"incompatible types|cannot be converted to", "TypeMismatch"),
    (r"is abstract; cannot be instantiated|constructor \S+ in \S+ \S+ cannot be applied", "InstantiationIssue"),
    (r"cannot assign a value to final variable", "FinalVariableIssue"),
    (r"\bexpected\b|illegal start of", "SyntaxError"),
)
# Other javac wordings of the same problems; these only see messages that
# no core rule matched.
_EXTENDED = (
    (r"static import only from classes and interfaces", "MissingImport"),
    (r"cannot (override|implement) \S+ in \S+|overridden method (does not throw|is (static|final))",
     "OverrideIssue"),
    (r"is not public in \S+; cannot be accessed from outside package", "VisibilityIssue"),
    (r"no suitable constructor found", "InstantiationIssue"),
    (r"method \S+ in \S+ \S+ cannot be applied|no suitable method found|bad operand types? for|incomparable types",
     "TypeMismatch"),
    (r"reached end of file while parsing|unclosed (string|character) literal|unclosed comment|not a statement",
     "SyntaxError"),
    (r"must be final or effectively final|might already have been assigned|cannot assign a value to static final",
     "FinalVariableIssue"),
)
RULES: tuple[tuple[re.Pattern, str], ...] = tuple((re.compile(p, re.I), cat) for p, cat in _CORE + _EXTENDED)


@dataclass(frozen=True)
class ErrorCategory:
    name: str

    @property
    def group(self) -> str:
        return GROUPS[self.name]


@dataclass(frozen=True)
class CompilationError:
    file: str
    line: int | None
    message: str
    category: ErrorCategory


def classify_error(message: str) -> ErrorCategory:
    for pattern, category in RULES:
        if pattern.search(message):
            return ErrorCategory(category)
    return ErrorCategory("Other")


# Maven prints "[ERROR] /p/KeyTest.java:[12,8] msg"; javac prints "KeyTest.java:12: error: msg".
_MAVEN = re.compile(r"^(?:\[ERROR\]\s*)?(?P<file>\S+?\.java):\[(?P<line>\d+),\d+\]\s*(?:error:\s*)?(?P<msg>.+)$")
_JAVAC = re.compile(r"^(?P<file>\S+?\.java):(?P<line>\d+):\s*error:\s*(?P<msg>.+)$")
_DETAIL = re.compile(r"^\s*(symbol|location)\s*:\s*(.+)$")


def parse_diagnostics(output: str) -> list[CompilationError]:
    """Extract one error per compiler diagnostic from build output.

    ``symbol:`` detail lines that javac prints under "cannot find symbol" are
    folded into the preceding message.
    """
    errors: list[tuple[str, int | None, str]] = []
    seen = set()
    for raw in output.splitlines():
        line = raw.rstrip()
        m = _MAVEN.match(line.strip()) or _JAVAC.match(line.strip())
        if m:
            errors.append((m.group("file"), int(m.group("line")), m.group("msg").strip()))
            continue
        d = _DETAIL.match(line.removeprefix("[ERROR]"))
        if d and errors and d.group(1) == "symbol" and errors[-1][2].endswith("symbol"):
            f, ln, msg = errors[-1]
            errors[-1] = (f, ln, f"{msg}: {d.group(2).strip()}")
    result = []
    for f, ln, msg in errors:
        # maven repeats the compiler errors in its summary
        if (f, ln, msg) in seen:
            continue
        seen.add((f, ln, msg))
        result.append(CompilationError(f, ln, msg, classify_error(msg)))
    return result


@dataclass(frozen=True)
class ErrorProfile:
    total: int
    counts: dict[str, int]
    percentages: dict[str, float]
    group_counts: dict[str, int]
    group_percentages: dict[str, float]

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "categories": {c: {"count": self.counts[c], "percent": self.percentages[c]} for c in CATEGORIES},
            "groups": {
                g: {"count": self.group_counts[g], "percent": self.group_percentages[g]}
                for g in dict.fromkeys(GROUPS.values())
            },
        }


def error_profile(errors) -> ErrorProfile:
    """Category and group percentages over error messages.

    Category percentages are rounded to two decimals and each group's
    percentage is the sum of its members' rounded values, so the group table
    always agrees with the category table it summarizes.
    """
    errors = list(errors)
    if not errors:
        raise EmptyInput("no compilation errors to profile")
    counts = Counter(e.category.name for e in errors)
    total = len(errors)
    per_cat = {c: counts.get(c, 0) for c in CATEGORIES}
    pct = {c: round(100.0 * n / total, 2) for c, n in per_cat.items()}
    groups = list(dict.fromkeys(GROUPS.values()))
    group_counts = {g: sum(n for c, n in per_cat.items() if GROUPS[c] == g) for g in groups}
    group_pct = {g: round(sum(p for c, p in pct.items() if GROUPS[c] == g), 2) for g in groups}
    return ErrorProfile(total, per_cat, pct, group_counts, group_pct)
