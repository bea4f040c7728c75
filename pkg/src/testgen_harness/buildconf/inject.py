"""Idempotent injection of coverage and mutation tooling into build files.

Maven descriptors are edited by inserting text at element boundaries found
by a small tag scanner, so formatting, comments and namespaces of the
original file survive byte for byte.  Gradle builds get marker-delimited
blocks.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import MalformedBuildFile, UnrecognizedBuild, WriteFailed
from .profile import ProjectBuildProfile

VERSIONS_ENV = "AGONE_TOOL_VERSIONS"

JACOCO = ("org.jacoco", "jacoco-maven-plugin")
PITEST = ("org.pitest", "pitest-maven")
PITEST_JUNIT5 = ("org.pitest", "pitest-junit5-plugin")
GRADLE_PITEST_ID = "info.solidsoft.pitest"

MARK_BEGIN = ">>> testgen-harness"
MARK_END = "<<< testgen-harness"


def tool_versions() -> dict[str, str]:
    """Pinned tool versions, optionally overridden by ``$AGONE_TOOL_VERSIONS``."""
    data = json.loads(resources.files("testgen_harness.data").joinpath("tool_versions.json").read_text())
    override = os.environ.get(VERSIONS_ENV)
    if override:
        data.update(json.loads(Path(override).read_text(encoding="utf-8")))
    return data


@dataclass
class InjectionPlan:
    additions: list[tuple[str, str]] = field(default_factory=list)
    modified: bool = False
    required: list[tuple[str, str]] = field(default_factory=list)


# ---------------------------------------------------------------- xml spans

@dataclass
class _Element:
    tag: str
    start: int
    open_end: int
    close_start: int = -1
    end: int = -1
    children: list["_Element"] = field(default_factory=list)

    def child(self, tag: str) -> "_Element | None":
        return next((c for c in self.children if c.tag == tag), None)

    def all(self, tag: str) -> list["_Element"]:
        return [c for c in self.children if c.tag == tag]

    def inner(self, source: str) -> str:
        return source[self.open_end:self.close_start] if self.close_start >= 0 else ""


_TOKEN = re.compile(r"<!--.*?-->|<!\[CDATA\[.*?\]\]>|<\?.*?\?>|<!DOCTYPE[^>]*>|<(/?)([\w:.-]+)[^>]*?(/?)>", re.S)


def _scan(source: str) -> _Element:
    root = _Element("#document", 0, 0)
    stack = [root]
    for m in _TOKEN.finditer(source):
        if m.group(2) is None:
            continue
        closing, tag, selfclosing = m.group(1), m.group(2).split(":")[-1], m.group(3)
        if closing:
            if len(stack) < 2 or stack[-1].tag != tag:
                raise MalformedBuildFile(f"unbalanced </{tag}> at offset {m.start()}")
            el = stack.pop()
            el.close_start, el.end = m.start(), m.end()
        else:
            el = _Element(tag, m.start(), m.end())
            stack[-1].children.append(el)
            if selfclosing:
                el.close_start = el.end = m.end()
            else:
                stack.append(el)
    if len(stack) != 1:
        raise MalformedBuildFile(f"unclosed <{stack[-1].tag}>")
    return root


def _text_of(el: _Element | None, source: str) -> str:
    return el.inner(source).strip() if el is not None else ""


def _line_indent(source: str, pos: int) -> str:
    line_start = source.rfind("\n", 0, pos) + 1
    m = re.match(r"[ \t]*", source[line_start:])
    return m.group(0)


def _indent_unit(source: str, project: _Element) -> str:
    for child in project.children:
        indent = _line_indent(source, child.start)
        if indent:
            return indent
    return "    "


def _render(lines: list[tuple[int, str]], base: str, unit: str) -> str:
    return "".join(f"{base}{unit * depth}{line}\n" for depth, line in lines)


def _plugin_xml(group: str, artifact: str, version: str, body: list[tuple[int, str]] = ()) -> list[tuple[int, str]]:
    lines = [
        (0, "<plugin>"),
        (1, f"<groupId>{group}</groupId>"),
        (1, f"<artifactId>{artifact}</artifactId>"),
        (1, f"<version>{version}</version>"),
    ]
    lines += [(d + 1, t) for d, t in body]
    lines.append((0, "</plugin>"))
    return lines


def _dependency_xml(group: str, artifact: str, version: str) -> list[tuple[int, str]]:
    return [
        (0, "<dependency>"),
        (1, f"<groupId>{group}</groupId>"),
        (1, f"<artifactId>{artifact}</artifactId>"),
        (1, f"<version>{version}</version>"),
        (0, "</dependency>"),
    ]


def _jacoco_body() -> list[tuple[int, str]]:
    return [
        (0, "<executions>"),
        (1, "<execution>"),
        (2, "<id>harness-prepare-agent</id>"),
        (2, "<goals><goal>prepare-agent</goal></goals>"),
        (1, "</execution>"),
        (1, "<execution>"),
        (2, "<id>harness-report</id>"),
        (2, "<phase>test</phase>"),
        (2, "<goals><goal>report</goal></goals>"),
        (1, "</execution>"),
        (0, "</executions>"),
    ]


def _pitest_body(versions, junit5: bool) -> list[tuple[int, str]]:
    body = [
        (0, "<configuration>"),
        (1, "<outputFormats><outputFormat>XML</outputFormat></outputFormats>"),
        (1, "<timestampedReports>false</timestampedReports>"),
        (0, "</configuration>"),
    ]
    if junit5:
        body.append((0, "<dependencies>"))
        body += [(d + 1, t) for d, t in _dependency_xml(*PITEST_JUNIT5, versions["pitest-junit5-plugin"])]
        body.append((0, "</dependencies>"))
    return body


def _find_plugin(plugins: _Element | None, coord: tuple[str, str], source: str) -> _Element | None:
    if plugins is None:
        return None
    for plugin in plugins.all("plugin"):
        if _text_of(plugin.child("artifactId"), source) == coord[1]:
            return plugin
    return None


def _has_dependency(plugin: _Element, coord: tuple[str, str], source: str) -> bool:
    deps = plugin.child("dependencies")
    return deps is not None and any(
        _text_of(d.child("artifactId"), source) == coord[1] for d in deps.all("dependency")
    )


def _maven_next_edit(source: str, junit5: bool, versions):
    """The first missing piece of tooling as ((offset, text), additions), or None."""
    doc = _scan(source)
    project = doc.child("project")
    if project is None or project.close_start < 0:
        raise MalformedBuildFile("no <project> element")
    unit = _indent_unit(source, project)
    build = project.child("build")
    plugins = build.child("plugins") if build is not None else None
    jacoco = _find_plugin(plugins, JACOCO, source)
    pitest = _find_plugin(plugins, PITEST, source)

    wanted = []
    if jacoco is None:
        wanted.append((_plugin_xml(*JACOCO, versions["jacoco-maven-plugin"], _jacoco_body()),
                       [(":".join(JACOCO) + ":" + versions["jacoco-maven-plugin"], "plugin")]))
    if pitest is None:
        added = [(":".join(PITEST) + ":" + versions["pitest-maven"], "plugin")]
        if junit5:
            added.append((":".join(PITEST_JUNIT5) + ":" + versions["pitest-junit5-plugin"], "plugin-dependency"))
        wanted.append((_plugin_xml(*PITEST, versions["pitest-maven"], _pitest_body(versions, junit5)), added))
    if wanted:
        lines, addition = wanted[0]
        if build is None:
            wrapped = [(0, "<build>"), (1, "<plugins>")] + [(d + 2, t) for d, t in lines] + [(1, "</plugins>"), (0, "</build>")]
            base = _line_indent(source, project.close_start) + unit
            return _at_close(source, project, _render(wrapped, base, unit)), addition
        if plugins is None:
            wrapped = [(0, "<plugins>")] + [(d + 1, t) for d, t in lines] + [(0, "</plugins>")]
            base = _line_indent(source, build.start) + unit
            return _at_close(source, build, _render(wrapped, base, unit)), addition
        base = _line_indent(source, plugins.start) + unit
        return _at_close(source, plugins, _render(lines, base, unit)), addition

    if junit5 and not _has_dependency(pitest, PITEST_JUNIT5, source):
        dep = _dependency_xml(*PITEST_JUNIT5, versions["pitest-junit5-plugin"])
        addition = [(":".join(PITEST_JUNIT5) + ":" + versions["pitest-junit5-plugin"], "plugin-dependency")]
        deps = pitest.child("dependencies")
        if deps is None:
            wrapped = [(0, "<dependencies>")] + [(d + 1, t) for d, t in dep] + [(0, "</dependencies>")]
            base = _line_indent(source, pitest.start) + unit
            return _at_close(source, pitest, _render(wrapped, base, unit)), addition
        base = _line_indent(source, deps.start) + unit
        return _at_close(source, deps, _render(dep, base, unit)), addition
    return None


def _at_close(source: str, el: _Element, snippet: str) -> tuple[int, str]:
    if el.close_start == el.end:
        raise MalformedBuildFile(f"cannot extend self-closing <{el.tag}/>")
    pos = el.close_start
    line_start = source.rfind("\n", 0, pos) + 1
    if source[line_start:pos].strip() == "":
        return line_start, snippet  # closing tag sits on its own line
    return pos, "\n" + snippet


def inject_maven(source: str, junit5: bool, versions) -> tuple[str, list[tuple[str, str]]]:
    additions = []
    for _ in range(4):
        edit = _maven_next_edit(source, junit5, versions)
        if edit is None:
            break
        (pos, snippet), added = edit
        source = source[:pos] + snippet + source[pos:]
        additions.extend(added)
    return source, additions


# ---------------------------------------------------------------- gradle

_G_JACOCO = re.compile(r"""(id\s*\(?\s*['"]jacoco['"]|apply\s+plugin\s*:\s*['"]jacoco['"])""")
_G_PITEST = re.compile(re.escape(GRADLE_PITEST_ID))
_G_JUNIT5 = re.compile(r"junit5PluginVersion|pitest-junit5-plugin")


def _block_end(source: str, open_brace: int) -> int:
    depth = 0
    for i in range(open_brace, len(source)):
        if source[i] == "{":
            depth += 1
        elif source[i] == "}":
            depth -= 1
            if depth == 0:
                return i
    raise MalformedBuildFile("unbalanced braces in build.gradle")


def inject_gradle(source: str, junit5: bool, versions) -> tuple[str, list[tuple[str, str]]]:
    additions = []
    plugin_lines = []
    if not _G_JACOCO.search(source):
        plugin_lines.append("id 'jacoco'")
        additions.append((f"jacoco:{versions['jacoco']}", "plugin"))
    if not _G_PITEST.search(source):
        plugin_lines.append(f"id '{GRADLE_PITEST_ID}' version '{versions['gradle-pitest-plugin']}'")
        additions.append((f"{GRADLE_PITEST_ID}:{versions['gradle-pitest-plugin']}", "plugin"))
    if plugin_lines:
        m = re.search(r"^plugins\s*\{[^\n]*\n", source, re.M)
        block = [f"// {MARK_BEGIN}: measurement plugins"] + plugin_lines + [f"// {MARK_END}"]
        if m:
            source = source[: m.end()] + "".join(f"    {line}\n" for line in block) + source[m.end():]
        else:
            text = "plugins {\n" + "".join(f"    {line}\n" for line in block) + "}\n"
            bs = re.search(r"^buildscript\s*\{", source, re.M)
            if bs:
                end = _block_end(source, bs.end() - 1) + 1
                source = source[:end] + "\n\n" + text + source[end:].lstrip("\n")
            else:
                source = text + "\n" + source
    config = []
    if "id 'info.solidsoft.pitest'" in "".join(plugin_lines):
        config += ["pitest {", "    outputFormats = ['XML']", "    timestampedReports = false"]
        if junit5:
            config.append(f"    junit5PluginVersion = '{versions['pitest-junit5-plugin']}'")
        config.append("}")
    elif junit5 and not _G_JUNIT5.search(source):
        config += ["pitest {", f"    junit5PluginVersion = '{versions['pitest-junit5-plugin']}'", "}"]
    if junit5 and config:
        additions.append((f"org.pitest:pitest-junit5-plugin:{versions['pitest-junit5-plugin']}", "plugin-dependency"))
    if "id 'jacoco'" in plugin_lines:
        config += ["jacocoTestReport {", "    reports {", "        xml.required = true", "    }", "}"]
    if config:
        if not source.endswith("\n"):
            source += "\n"
        source += "\n" + "\n".join([f"// {MARK_BEGIN}: measurement configuration"] + config + [f"// {MARK_END}"]) + "\n"
    return source, additions


# ---------------------------------------------------------------- entry point


def required_tooling(profile: ProjectBuildProfile, versions=None) -> list[tuple[str, str]]:
    versions = versions or tool_versions()
    if profile.build_system == "maven":
        req = [(":".join(JACOCO) + ":" + versions["jacoco-maven-plugin"], "plugin"),
               (":".join(PITEST) + ":" + versions["pitest-maven"], "plugin")]
    else:
        req = [(f"jacoco:{versions['jacoco']}", "plugin"),
               (f"{GRADLE_PITEST_ID}:{versions['gradle-pitest-plugin']}", "plugin")]
    if profile.testing_framework == "junit5":
        req.append((f"org.pitest:pitest-junit5-plugin:{versions['pitest-junit5-plugin']}", "plugin-dependency"))
    return req


def inject_measurement_deps(profile: ProjectBuildProfile, *, dry_run: bool = False) -> InjectionPlan:
    """Ensure coverage and mutation tooling is declared; a second call is a no-op."""
    path = profile.build_file_path
    if path.name.endswith(".kts"):
        raise UnrecognizedBuild(f"{path}: Kotlin DSL builds are supported for elicitation only", path=str(path))
    versions = tool_versions()
    junit5 = profile.testing_framework == "junit5"
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            source = fh.read()
    except OSError as exc:
        raise WriteFailed(f"cannot read {path}: {exc}", path=str(path)) from exc
    if profile.build_system == "maven":
        updated, additions = inject_maven(source, junit5, versions)
    else:
        updated, additions = inject_gradle(source, junit5, versions)
    plan = InjectionPlan(additions, updated != source, required_tooling(profile, versions))
    if plan.modified and not dry_run:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(updated)
        except OSError as exc:
            raise WriteFailed(f"cannot write {path}: {exc}", path=str(path)) from exc
    return plan
