"""Elicitation of test framework and Java version from Maven/Gradle builds."""

from __future__ import annotations

import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from ..errors import MalformedBuildFile, NoBuildFile, UnrecognizedBuild

log = logging.getLogger(__name__)

FRAMEWORK_LABELS = {"junit4": "JUnit 4", "junit5": "JUnit 5", "testng": "TestNG", "other": "Other"}
DEFAULT_JAVA = "8"
UNSPECIFIED = "unspecified"


@dataclass(frozen=True)
class ProjectBuildProfile:
    build_system: str
    java_version: str
    testing_framework: str
    framework_version: str
    build_file_path: Path

    @property
    def framework_label(self) -> str:
        """Human label used for the ``testing_framework`` prompt variable."""
        label = FRAMEWORK_LABELS[self.testing_framework]
        if self.framework_version and self.framework_version != UNSPECIFIED:
            return f"{label} ({self.framework_version})"
        return label

    @property
    def project_root(self) -> Path:
        return self.build_file_path.parent


def find_build_file(project_root: str | Path) -> Path:
    root = Path(project_root)
    for name in ("pom.xml", "build.gradle", "build.gradle.kts"):
        if (root / name).is_file():
            return root / name
    raise NoBuildFile(f"no pom.xml or build.gradle in {root}", project_root=str(root))


def normalize_java(version: str) -> str | None:
    version = version.strip().strip("'\"")
    version = re.sub(r"^(JavaVersion\.)?VERSION_", "", version).replace("_", ".")
    if version.startswith("1."):
        version = version[2:]
    m = re.match(r"(\d+)", version)
    return m.group(1) if m and int(m.group(1)) > 0 else None


def _framework_of(group: str, artifact: str) -> str | None:
    if group.startswith("org.junit.jupiter") or (group == "org.junit" and artifact == "junit-bom"):
        return "junit5"
    if group == "junit" and artifact == "junit":
        return "junit4"
    if group == "org.testng" and artifact == "testng":
        return "testng"
    return None


def _choose(found: list[tuple[str, str]]) -> tuple[str, str]:
    """Pick the framework; JUnit 5 wins when both JUnit generations appear."""
    for wanted in ("junit5", "junit4", "testng"):
        versions = [v for fw, v in found if fw == wanted]
        if versions:
            known = [v for v in versions if v and v != UNSPECIFIED]
            return wanted, known[0] if known else UNSPECIFIED
    return "other", ""


# ---------------------------------------------------------------- maven


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _child(el, name):
    for c in el:
        if _local(c.tag) == name:
            return c
    return None


def _children(el, name):
    return [c for c in el if _local(c.tag) == name]


def _maven_properties(root) -> dict[str, str]:
    props = {}
    node = _child(root, "properties")
    if node is not None:
        for p in node:
            if isinstance(p.tag, str):
                props[_local(p.tag)] = (p.text or "").strip()
    for key in ("version", "groupId", "artifactId"):
        el = _child(root, key)
        if el is not None and el.text:
            props[f"project.{key}"] = el.text.strip()
    return props


def _interpolate(value: str, props: dict[str, str]) -> str:
    for _ in range(5):
        new = re.sub(r"\$\{([^}]+)\}", lambda m: props.get(m.group(1), m.group(0)), value)
        if new == value:
            break
        value = new
    return value


def parse_pom(path: Path):
    try:
        return ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise MalformedBuildFile(f"{path}: {exc}", path=str(path)) from exc


def _maven_profile(path: Path) -> ProjectBuildProfile:
    root = parse_pom(path)
    if _local(root.tag) != "project":
        raise UnrecognizedBuild(f"{path} is not a Maven project descriptor", path=str(path))
    props = _maven_properties(root)
    found = []
    for section in (root, _child(root, "dependencyManagement")):
        if section is None:
            continue
        deps = _child(section, "dependencies")
        for dep in _children(deps, "dependency") if deps is not None else []:
            group = (_child(dep, "groupId").text or "").strip() if _child(dep, "groupId") is not None else ""
            artifact = (_child(dep, "artifactId").text or "").strip() if _child(dep, "artifactId") is not None else ""
            version_el = _child(dep, "version")
            version = _interpolate((version_el.text or "").strip(), props) if version_el is not None else ""
            fw = _framework_of(group, artifact)
            if fw:
                found.append((fw, version if version and "${" not in version else UNSPECIFIED))
    framework, version = _choose(found)

    java = None
    for key in ("maven.compiler.release", "maven.compiler.source", "maven.compiler.target", "java.version"):
        if key in props and (java := normalize_java(_interpolate(props[key], props))):
            break
    if java is None:
        for el in root.iter():
            if _local(el.tag) == "artifactId" and (el.text or "").strip() == "maven-compiler-plugin":
                plugin = _parent_plugin(root, el)
                conf = _child(plugin, "configuration") if plugin is not None else None
                for key in ("release", "source", "target"):
                    node = _child(conf, key) if conf is not None else None
                    if node is not None and (java := normalize_java(_interpolate(node.text or "", props))):
                        break
                if java:
                    break
    return ProjectBuildProfile("maven", java or _default_java(path), framework, version, path)


def _parent_plugin(root, artifact_el):
    for plugin in root.iter():
        if _local(plugin.tag) == "plugin" and artifact_el in list(plugin):
            return plugin
    return None


# ---------------------------------------------------------------- gradle

_GRADLE_DEP = re.compile(
    r"\b(?:testImplementation|testCompile|testCompileOnly|testRuntimeOnly|implementation|compile|api"
    r"|androidTestImplementation)\s*\(?\s*(?:platform\s*\(\s*)?['\"]([^'\"]+)['\"]"
)
_GRADLE_MAP_DEP = re.compile(
    r"group\s*[:=]\s*['\"]([^'\"]+)['\"]\s*,\s*name\s*[:=]\s*['\"]([^'\"]+)['\"]"
    r"(?:\s*,\s*version\s*[:=]\s*['\"]([^'\"]+)['\"])?"
)
_GRADLE_JAVA = [
    re.compile(r"JavaLanguageVersion\.of\(\s*['\"]?(\d+)"),
    re.compile(r"jvmToolchain\s*\(\s*(\d+)"),
    re.compile(r"\brelease\s*(?:=|\.set\()\s*['\"]?(\d+)"),
    re.compile(r"sourceCompatibility\s*=?\s*(JavaVersion\.VERSION_[0-9_]+|['\"]?[0-9.]+['\"]?)"),
    re.compile(r"targetCompatibility\s*=?\s*(JavaVersion\.VERSION_[0-9_]+|['\"]?[0-9.]+['\"]?)"),
]
_GRADLE_PROP = re.compile(r"^\s*(?:ext\.)?(?:set\(\s*['\"])?(\w+)['\"]?\s*[=,]\s*['\"]([^'\"]+)['\"]", re.M)


def _gradle_properties(path: Path, source: str) -> dict[str, str]:
    props = dict(_GRADLE_PROP.findall(source))
    gp = path.parent / "gradle.properties"
    if gp.is_file():
        for line in gp.read_text(encoding="utf-8", errors="replace").splitlines():
            if "=" in line and not line.lstrip().startswith("#"):
                key, value = line.split("=", 1)
                props[key.strip()] = value.strip()
    return props


def _gradle_expand(value: str, props: dict[str, str]) -> str:
    return re.sub(r"\$\{?(\w+)\}?", lambda m: props.get(m.group(1), m.group(0)), value)


def _gradle_profile(path: Path) -> ProjectBuildProfile:
    source = path.read_text(encoding="utf-8", errors="replace")
    props = _gradle_properties(path, source)
    found = []
    for coord in _GRADLE_DEP.findall(source):
        parts = _gradle_expand(coord, props).split(":")
        if len(parts) >= 2 and (fw := _framework_of(parts[0], parts[1])):
            found.append((fw, parts[2] if len(parts) > 2 and "$" not in parts[2] else UNSPECIFIED))
    for group, name, version in _GRADLE_MAP_DEP.findall(source):
        if fw := _framework_of(group, name):
            found.append((fw, _gradle_expand(version, props) or UNSPECIFIED))
    if not found:
        if "useJUnitPlatform" in source:
            found.append(("junit5", UNSPECIFIED))
        elif "useTestNG" in source:
            found.append(("testng", UNSPECIFIED))
    framework, version = _choose(found)
    java = None
    for pattern in _GRADLE_JAVA:
        m = pattern.search(source)
        if m and (java := normalize_java(_gradle_expand(m.group(1), props))):
            break
    return ProjectBuildProfile("gradle", java or _default_java(path), framework, version, path)


def _default_java(path: Path) -> str:
    log.warning("%s declares no Java version; assuming %s", path, DEFAULT_JAVA)
    return DEFAULT_JAVA


def elicit_profile(project_root: str | Path) -> ProjectBuildProfile:
    path = find_build_file(project_root)
    if path.name == "pom.xml":
        return _maven_profile(path)
    return _gradle_profile(path)
