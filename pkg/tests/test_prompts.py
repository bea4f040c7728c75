from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES
from testgen_harness.errors import (
    SchemaViolation,
    StillOverBudget,
    TemperatureOutOfRange,
    TokenLimitExceeded,
    UnboundVariable,
)
from testgen_harness.mining import ClassUnderTestRecord
from testgen_harness.prompts import (
    DEFAULT_TOKEN_LIMITS,
    BpeCounter,
    ByteCounter,
    PromptTemplate,
    PromptVariables,
    apply_fallback,
    build_enhanced_variables,
    counter_for,
    elidable_methods,
    exemplar_variables,
    instantiate,
    load_config,
    load_config_file,
    placeholders,
    strip_comments,
)

REFERENCE = (FIXTURES / "reference_config.yaml").read_text(encoding="utf-8")

CUT = """\
package org.shop;

/** A basket of priced items. */
public class Basket {
    // running total in cents
    private long total;

    public void add(long cents) {
        total += normalise(cents);
    }

    public long total() {
        return total;
    }

    /* clamps negative input */
    private long normalise(long cents) {
        return Math.max(0, cents);
    }

    private String debugDump() {
        StringBuilder sb = new StringBuilder();
        sb.append("total=").append(total).append(';');
        sb.append("class=").append(getClass().getName());
        return sb.toString();
    }
}
"""


def variables(cut=CUT, **kw):
    return PromptVariables(class_under_test=cut, testing_framework="JUnit 5", java_version="17", **kw)


def test_reference_config_loads_verbatim():
    config = load_config(REFERENCE)
    assert [llm.model for llm in config.llms] == ["gpt-4o-mini", "gemini-1.5-pro", "llama3.1:70b"]
    assert all(llm.temperature == 0 for llm in config.llms)
    assert [p.name for p in config.prompts] == ["zero-shot", "few-shot"]
    assert [role for role, _ in config.prompt("few-shot").messages] == ["system", "user"]
    assert config.aggregation_policy == "compiled_only"
    assert config.token_limit("gpt-4o-mini") == DEFAULT_TOKEN_LIMITS["gpt-4o-mini"]


def test_reference_prompts_instantiate_completely():
    config = load_config(REFERENCE)
    v = variables(**exemplar_variables(config.exemplar))
    for llm in config.llms:
        for template in config.prompts:
            prompt = instantiate(template, v, llm.model, llm.temperature)
            assert all("{{" not in content for _, content in prompt.messages)
            assert prompt.token_count <= config.token_limit(llm.model)
    few = instantiate(config.prompt("few-shot"), v, "gpt-4o-mini", 0)
    assert "public class Calculator" in few.messages[1][1]


@pytest.mark.parametrize("temp", [2.5, -0.1])
def test_temperature_outside_range_rejected(temp):
    text = REFERENCE.replace("temperature: 0\n- model: gemini", f"temperature: {temp}\n- model: gemini", 1)
    with pytest.raises(TemperatureOutOfRange) as info:
        load_config(text)
    assert info.value.path == "llms[0].temperature"


def test_temperature_bounds_are_inclusive():
    cfg = load_config("llms: [{model: m, temperature: 2}]\nprompts: [{name: p, value: [{role: user, content: x}]}]")
    assert cfg.llms[0].temperature == 2.0


@pytest.mark.parametrize("text, path", [
    ("llms: [{model: m}]\nprompts: [{name: p, value: [{role: assistant, content: x}]}]", "prompts[0].value[0].role"),
    ("llms: [{model: m}]\nprompts: [{name: p, value: [{role: user, content: x}]}]\nextra: 1", "extra"),
    ("llms: []\nprompts: [{name: p, value: [{role: user, content: x}]}]", "llms"),
    ("llms: [{model: m}]\nprompts: [{name: p, value: [{role: user, content: x}]}, "
     "{name: p, value: [{role: user, content: y}]}]", "prompts"),
    ("llms: [{model: m, colour: red}]\nprompts: [{name: p, value: [{role: user, content: x}]}]", "llms[0].colour"),
    ("llms: [{model: m}]\nprompts: [{name: p, value: [{role: user, content: x}]}]\n"
     "aggregation_policy: average", "aggregation_policy"),
])
def test_schema_violations_name_the_path(text, path):
    with pytest.raises(SchemaViolation) as info:
        load_config(text)
    assert info.value.path == path


def test_config_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "c.yaml"
    path.write_text(REFERENCE)
    monkeypatch.setenv("AGONE_CONFIG", str(path))
    assert len(load_config_file().llms) == 3


def test_substitution_and_alias():
    t = PromptTemplate("p", (("user", "{{ testing_framework }} / {{example_java_class}} / {{java_version}}"),))
    prompt = instantiate(t, variables(example_class_under_test="class E {}"), "gpt-4o-mini", 0)
    assert prompt.messages[0][1] == "JUnit 5 / class E {} / 17"
    assert placeholders(t) == ["testing_framework", "example_java_class", "java_version"]


def test_unbound_variable():
    t = PromptTemplate("p", (("user", "path: {{class_under_test_path}}"),))
    with pytest.raises(UnboundVariable) as info:
        instantiate(t, variables(), "gpt-4o-mini", 0)
    assert info.value.name == "class_under_test_path"


def test_enhanced_strategy_binds_the_path():
    rec = ClassUnderTestRecord.from_json({
        "repo_url": "r", "branch": "main", "commit_hash": "a" * 40,
        "cut_path": "src/main/java/org/shop/Basket.java", "cut_fqn": "org.shop.Basket",
        "test_path": "src/test/java/org/shop/BasketTest.java", "test_fqn": "org.shop.BasketTest",
        "evidence_ratio": 1.0})
    t = PromptTemplate("enhanced", (("user", "{{class_under_test_path}}"),))
    prompt = instantiate(t, build_enhanced_variables(variables(), rec), "gpt-4o-mini", 0)
    assert prompt.messages[0][1] == "src/main/java/org/shop/Basket.java"


def test_custom_variables():
    t = PromptTemplate("p", (("user", "{{house_style}}"),))
    prompt = instantiate(t, variables(custom={"house_style": "AAA"}), "gpt-4o-mini", 0)
    assert prompt.messages[0][1] == "AAA"


def test_empty_class_is_rejected():
    with pytest.raises(ValueError):
        variables(cut="")


def test_token_limit_breach_reports_counts():
    # 450 ASCII bytes under the bytes/3 counter is exactly 150 tokens
    t = PromptTemplate("p", (("user", "{{class_under_test}}"),))
    with pytest.raises(TokenLimitExceeded) as info:
        instantiate(t, variables(cut="x" * 450), "some-model", 0, limit=100, counter=ByteCounter())
    assert (info.value.required, info.value.limit) == (150, 100)
    assert "150" in str(info.value) and "100" in str(info.value)


def test_counters():
    assert ByteCounter().count("abcd") == 2
    assert ByteCounter().count("") == 0
    assert isinstance(counter_for("gpt-4o-mini"), BpeCounter)
    assert isinstance(counter_for("llama3.1:70b"), BpeCounter)
    assert isinstance(counter_for("mistral-large"), ByteCounter)
    bpe = counter_for("gemini-1.5-pro")
    assert bpe.count(CUT) == bpe.count(CUT) > 0


def _over_budget(cut, counter):
    t = PromptTemplate("p", (("user", "{{class_under_test}}"),))
    full = counter.count(cut)
    with pytest.raises(TokenLimitExceeded) as info:
        instantiate(t, variables(cut=cut), "m", 0, limit=full - 1, counter=counter)
    return info.value.prompt


def test_fail_strategy_reraises():
    prompt = _over_budget(CUT, ByteCounter())
    with pytest.raises(TokenLimitExceeded) as info:
        apply_fallback(prompt, "fail", counter=ByteCounter())
    assert not isinstance(info.value, StillOverBudget)
    assert info.value.required == prompt.token_count


def test_truncate_comments_strictly_reduces():
    counter = ByteCounter()
    prompt = _over_budget(CUT, counter)
    reduced = apply_fallback(prompt, "truncate_comments", counter=counter)
    assert reduced.token_count < prompt.token_count
    assert reduced.token_count <= prompt.limit
    body = reduced.messages[0][1]
    assert "//" not in body and "/*" not in body
    assert "private long normalise" in body


def test_drop_low_relevance_methods_strictly_reduces():
    counter = ByteCounter()
    prompt = _over_budget(CUT, counter)
    reduced = apply_fallback(prompt, "drop_low_relevance_methods", counter=counter)
    assert reduced.token_count < prompt.token_count <= prompt.limit + 1
    body = reduced.messages[0][1]
    # the unused helper goes; the one called from add() stays
    assert "debugDump" not in body
    assert "normalise" in body


def test_elidable_methods_only_unreferenced_private():
    names = [m.child_by_field_name("name").text.decode() for m in elidable_methods(CUT)]
    assert names == ["debugDump"]


def test_strip_comments_keeps_strings():
    src = 'class A { String s = "// not a comment"; /* gone */ int x; // gone\n}'
    out = strip_comments(src)
    assert '"// not a comment"' in out and "gone" not in out


def test_fallback_that_cannot_fit_raises():
    counter = ByteCounter()
    t = PromptTemplate("p", (("user", "{{class_under_test}}"),))
    with pytest.raises(TokenLimitExceeded) as info:
        instantiate(t, variables(), "m", 0, limit=5, counter=counter)
    with pytest.raises(StillOverBudget):
        apply_fallback(info.value.prompt, "truncate_comments", counter=counter)


# brace-free values: a value ending in "{" next to one starting with "{" would splice a "{{"
TEXT = st.text(st.characters(blacklist_categories=("Cs",), blacklist_characters="{}"), min_size=1, max_size=60)


@settings(max_examples=80, deadline=None)
@given(cut=TEXT, fw=TEXT, jv=TEXT, extra=TEXT)
def test_instantiation_is_complete_and_pure(cut, fw, jv, extra):
    t = PromptTemplate("p", (("system", "fw {{testing_framework}} {{ java_version }}"),
                             ("user", "{{class_under_test}}{{x}}{{class_under_test}}")))
    v = PromptVariables(class_under_test=cut, testing_framework=fw, java_version=jv, custom={"x": extra})
    a = instantiate(t, v, "gpt-4o-mini", 0)
    b = instantiate(t, v, "gpt-4o-mini", 0)
    assert a == b
    assert a.messages[1][1] == cut + extra + cut
    assert a.token_count <= a.limit
    assert all("{{" not in content for _, content in a.messages)


METHOD_BODIES = st.lists(st.sampled_from([
    "return a + 1;", "int t = a * 2; return t;", "// step\nreturn a - 1;", "/* tmp */ return a;",
]), min_size=1, max_size=6)


@settings(max_examples=40, deadline=None)
@given(bodies=METHOD_BODIES, strategy=st.sampled_from(["truncate_comments", "drop_low_relevance_methods"]))
def test_every_fallback_result_is_strictly_smaller(bodies, strategy):
    methods = "\n".join(f"    // helper {i}\n    private int h{i}(int a) {{ {b} }}" for i, b in enumerate(bodies))
    cut = f"public class G {{\n    public int run(int a) {{ return a; }}\n{methods}\n}}\n"
    counter = ByteCounter()
    prompt = _over_budget(cut, counter)
    try:
        reduced = apply_fallback(prompt, strategy, counter=counter)
    except StillOverBudget as exc:
        assert exc.required > exc.limit or exc.prompt.token_count >= prompt.token_count
        return
    assert reduced.token_count < prompt.token_count
    assert reduced.token_count <= reduced.limit
