"""Static test-smell detectors over a parsed test class.

Counting granularity per smell:

==== ==========================================================
AR   message-less assertions in methods with more than one assertion
CTL  control-flow constructs inside test methods
CI   constructors declared by the test class
DT   classes named ExampleUnitTest / ExampleInstrumentedTest
DA   repeated identical assertions within a method (extra copies)
EA   test methods calling more than one distinct CUT method
EM   test methods with empty bodies
EH   test methods that throw or catch
GF   setup-assigned fields some test method never touches
IT   @Ignore / @Disabled annotations
LT   CUT methods called from more than one test method
MNT  numeric literals passed directly to assertions
MG   file-system or database API references
RP   System.out / System.err print calls
RA   assertions whose expected and actual texts are identical
RO   File-object calls in methods without an existence check
SE   toString() calls inside assertion arguments
ST   sleep calls
UT   test methods without assertions or expected-exception marker
==== ==========================================================
"""

from __future__ import annotations

import re
from collections import Counter

from ..errors import UnparseableSource
from ..java import AstFacts, JavaSourceUnit, MethodFacts, extract_facts, parse_unit

SMELL_CODES = (
    "AR", "CTL", "CI", "DT", "DA", "EA", "EM", "EH", "GF", "IT",
    "LT", "MNT", "MG", "RP", "RA", "RO", "SE", "ST", "UT",
)

TEST_ANNOTATIONS = {"Test", "ParameterizedTest", "RepeatedTest", "TestFactory", "TestTemplate"}
SETUP_ANNOTATIONS = {"Before", "BeforeEach", "BeforeClass", "BeforeAll"}
IGNORE_ANNOTATIONS = {"Ignore", "Disabled"}
DEFAULT_TEST_NAMES = {"ExampleUnitTest", "ExampleInstrumentedTest"}
EQUALITY_ASSERTS = {
    "assertEquals", "assertNotEquals", "assertSame", "assertNotSame",
    "assertArrayEquals", "assertIterableEquals", "assertLinesMatch",
}
_NUMBER = re.compile(
    r"^[-+]?\s*(0[xX][0-9a-fA-F_]+[lL]?|0[bB][01_]+[lL]?|(\d[\d_]*\.?[\d_]*|\.\d[\d_]*)([eE][-+]?\d+)?[fFdDlL]?)$"
)


def is_test_method(m: MethodFacts, junit3: bool) -> bool:
    if m.is_constructor:
        return False
    if TEST_ANNOTATIONS.intersection(m.annotations):
        return True
    return junit3 and m.name.startswith("test") and "public" in m.modifiers


def is_setup_method(m: MethodFacts) -> bool:
    return bool(SETUP_ANNOTATIONS.intersection(m.annotations)) or m.name == "setUp"


def infer_cut_name(test_name: str) -> str:
    for suffix in ("TestCase", "Tests", "Test"):
        if test_name.endswith(suffix) and len(test_name) > len(suffix):
            return test_name[: -len(suffix)]
    if test_name.startswith("Test") and len(test_name) > 4:
        return test_name[4:]
    return test_name


def _asserts(m: MethodFacts):
    return [a for a in m.assertions if a.is_assert]


def _compared(call) -> tuple[str, str] | None:
    """Expected/actual argument texts of an equality-style assertion."""
    if call.method_name not in EQUALITY_ASSERTS:
        return None
    args = list(call.args_textual)
    if call.has_message and len(args) > 2:
        # JUnit 4 puts the message first, JUnit 5 last
        args = args[1:] if args[0].startswith('"') else args[:-1]
    return (args[0], args[1]) if len(args) >= 2 else None


def detect_smells(test_unit: JavaSourceUnit, cut_name: str | None = None) -> dict[str, int]:
    facts = extract_facts(test_unit)
    primary = test_unit.primary_type
    cut = (cut_name or infer_cut_name(primary)).rsplit(".", 1)[-1]
    return _detect(facts, primary, cut)


def _is_cut_hint(hint: str, cut: str) -> bool:
    return bool(hint) and hint.rsplit(".", 1)[-1] == cut


def _detect(facts: AstFacts, primary: str, cut: str) -> dict[str, int]:
    junit3 = any(s.rsplit(".", 1)[-1] == "TestCase" for s in facts.superclasses)
    tests = [m for m in facts.methods if is_test_method(m, junit3)]
    setups = [m for m in facts.methods if is_setup_method(m)]
    s = dict.fromkeys(SMELL_CODES, 0)

    for m in tests:
        asserts = _asserts(m)
        if len(asserts) > 1:
            s["AR"] += sum(1 for a in asserts if not a.has_message)
        s["CTL"] += m.control_flow
        keys = Counter((a.method_name, a.args_textual) for a in asserts)
        s["DA"] += sum(n - 1 for n in keys.values() if n > 1)
        production = {name for (hint, name) in m.invocations if _is_cut_hint(hint, cut)}
        s["EA"] += len(production) > 1
        s["EM"] += m.body_empty
        s["EH"] += m.throw_count > 0 or m.try_count > 0
        for a in asserts:
            s["MNT"] += sum(1 for arg in a.args_textual if _NUMBER.match(arg))
            pair = _compared(a)
            s["RA"] += pair is not None and pair[0] == pair[1]
        s["UT"] += not m.assertions and not m.expects_exception

    s["CI"] = sum(1 for m in facts.methods if m.is_constructor and m.owner == primary)
    s["DT"] = sum(1 for name in facts.class_names if name in DEFAULT_TEST_NAMES)

    field_names = {f.name for f in facts.fields}
    initialized = set()
    for m in setups:
        initialized.update(m.assigned & field_names)
    s["GF"] = sum(1 for f in sorted(initialized) if tests and any(f not in m.identifiers for m in tests))

    s["IT"] = sum(facts.annotations[a] for a in IGNORE_ANNOTATIONS)

    callers: Counter = Counter()
    for m in tests:
        for name in {name for (hint, name) in m.invocations if _is_cut_hint(hint, cut)}:
            callers[name] += 1
    s["LT"] = sum(1 for n in callers.values() if n > 1)

    s["MG"] = facts.file_api_uses
    s["RP"] = facts.print_calls
    s["RO"] = sum(m.file_object_uses for m in facts.methods if m.existence_checks == 0)
    s["SE"] = facts.tostring_in_assert
    s["ST"] = facts.sleep_calls
    return s


def smells_for_source(source: str, cut_name: str | None = None) -> dict[str, int | None]:
    """Smell counts, or all ``None`` (not measured) when the source does not parse."""
    try:
        unit = parse_unit(source)
    except UnparseableSource:
        return dict.fromkeys(SMELL_CODES)
    return detect_smells(unit, cut_name)
