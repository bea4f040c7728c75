from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from testgen_harness.errors import UnparseableSource
from testgen_harness.java import count_loc, extract_facts, measure_complexity, parse_unit

SAMPLE = """\
package org.demo.util;

import java.util.List;
import static org.junit.jupiter.api.Assertions.assertEquals;

// a comment line

public class Sample {
    private final List<String> items;

    public Sample(List<String> items) { this.items = items; }

    int pick(int a, boolean b) {
        if (a > 0 && b) {
            return 1;
        }
        for (int i = 0; i < a; i++) {
            while (b) { b = false; }
        }
        try { a = a / 0; } catch (ArithmeticException e) { a = 0; }
        switch (a) { case 1: return 2; case 2: return 3; default: return a > 3 ? 4 : 5; }
    }
}
"""


def test_parse_reports_package_and_types():
    unit = parse_unit(SAMPLE)
    assert unit.package_name == "org.demo.util"
    assert unit.type_names == ("Sample",)
    assert unit.fqn() == "org.demo.util.Sample"
    assert not unit.degraded


def test_default_package_is_empty():
    assert parse_unit("class A {}").package_name == ""


def test_no_type_is_unparseable():
    with pytest.raises(UnparseableSource):
        parse_unit("this is plainly not java at all")


def test_broken_source_degrades_instead_of_failing():
    unit = parse_unit("public class Broken { void f() { int x = ; } }")
    assert unit.degraded
    assert unit.type_names == ("Broken",)


def test_loc_skips_blank_lines_keeps_comments():
    assert count_loc("a\n\n  \n// c\nb\n") == 3


def test_complexity_of_sample():
    # pick: 1 + if + && + for + while + catch + 2 case labels + ternary = 9; constructor: 1
    report = measure_complexity(parse_unit(SAMPLE))
    assert dict(report.per_method) == {"Sample": 1, "pick": 9}
    assert report.cyclomatic_total == 10
    assert report.method_count == 2


def test_facts_collect_imports_calls_and_asserts():
    src = """
    import java.util.ArrayList;
    import static org.junit.Assert.*;
    class T {
        @Test void t() {
            ArrayList<String> xs = new ArrayList<>();
            xs.add("a");
            assertEquals("size", 1, xs.size());
            System.out.println(xs);
        }
    }"""
    facts = extract_facts(parse_unit(src))
    assert facts.imports == ["java.util.ArrayList"]
    assert facts.static_imports == ["org.junit.Assert.*"]
    assert facts.constructed_types == Counter({"ArrayList": 1})
    assert facts.invoked_methods[("ArrayList", "add")] == 1
    assert facts.annotations["Test"] == 1
    assert facts.print_calls == 1
    [call] = facts.assertion_calls
    assert call.method_name == "assertEquals"
    assert call.has_message
    assert call.arg_count == len(call.args_textual) == 3


def test_mock_references_are_recorded():
    src = """
    class T {
        @Mock Repo repo;
        void t() { Service s = Mockito.mock(Service.class); when(s.x()).thenReturn(1); }
    }"""
    facts = extract_facts(parse_unit(src))
    assert facts.mocked_types["Repo"] == 1
    assert facts.mocked_types["Service"] == 1


# ---------------------------------------------------------------- properties

STATEMENTS = st.sampled_from([
    "int a = 1;",
    "if (x > 0) { x--; }",
    "for (int i = 0; i < 3; i++) { x += i; }",
    "while (x > 10 || x < -10) { x /= 2; }",
    "new java.util.ArrayList<String>().add(\"s\");",
    "Helper h = new Helper(); h.run(2);",
    "assertEquals(1, x);",
    "assertTrue(\"msg\", x > 0);",
    "System.out.println(x);",
    "Thread.sleep(10);",
    "x = x > 0 ? 1 : 2;",
    "try { x = 1 / x; } catch (Exception e) { x = 0; }",
])
NAMES = st.from_regex(r"m[a-z]{1,6}", fullmatch=True)


def method_src(name, body, annotated):
    ann = "@Test " if annotated else ""
    return f"{ann}void {name}(int x) throws Exception {{ {' '.join(body)} }}"


methods = st.lists(st.tuples(NAMES, st.lists(STATEMENTS, max_size=6), st.booleans()), min_size=1, max_size=4)


def klass(members):
    return "class C {\n" + "\n".join(method_src(*m) for m in members) + "\n}\n"


def fact_multisets(facts):
    return {
        "constructed": Counter(facts.constructed_types),
        "invoked": Counter(facts.invoked_methods),
        "annotations": Counter(facts.annotations),
        "asserts": Counter((a.method_name, a.args_textual) for a in facts.assertion_calls),
        "numeric": Counter(facts.numeric_literal_args),
        "scalars": Counter(facts.counters()),
    }


@settings(max_examples=60, deadline=None)
@given(methods)
def test_parsing_is_idempotent(members):
    src = klass(members)
    assert extract_facts(parse_unit(src)) == extract_facts(parse_unit(src))
    assert measure_complexity(parse_unit(src)) == measure_complexity(parse_unit(src))


@settings(max_examples=60, deadline=None)
@given(methods, st.tuples(NAMES, st.lists(STATEMENTS, max_size=6), st.booleans()))
def test_appending_a_method_never_decreases_counters(members, extra):
    before = extract_facts(parse_unit(klass(members)))
    after = extract_facts(parse_unit(klass(members + [extra])))
    for key, value in before.counters().items():
        assert after.counters()[key] >= value
    for name in ("constructed_types", "invoked_methods", "annotations", "numeric_literal_args"):
        assert not (getattr(before, name) - getattr(after, name))
    assert measure_complexity(parse_unit(klass(members + [extra]))).cyclomatic_total >= \
        measure_complexity(parse_unit(klass(members))).cyclomatic_total


@settings(max_examples=60, deadline=None)
@given(methods)
def test_complexity_floor(members):
    report = measure_complexity(parse_unit(klass(members)))
    assert report.method_count == len(members)
    assert report.cyclomatic_total >= report.method_count


@settings(max_examples=60, deadline=None)
@given(methods, methods)
def test_fact_conservation_under_body_concatenation(left, right):
    a = fact_multisets(extract_facts(parse_unit(klass(left))))
    b = fact_multisets(extract_facts(parse_unit(klass(right))))
    joined = fact_multisets(extract_facts(parse_unit(klass(left + right))))
    for key in joined:
        assert joined[key] == a[key] + b[key], key


@settings(max_examples=40, deadline=None)
@given(st.lists(STATEMENTS, max_size=8))
def test_assertion_invariants(body):
    facts = extract_facts(parse_unit(klass([("m", body, True)])))
    for call in facts.assertion_calls:
        assert call.arg_count == len(call.args_textual)
        assert call.method_name.startswith(("assert", "fail")) or call.method_name == "verify"
