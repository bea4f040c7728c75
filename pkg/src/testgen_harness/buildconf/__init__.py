"""Build-file elicitation and measurement-tool injection for Maven and Gradle."""

from .inject import InjectionPlan, inject_measurement_deps, required_tooling, tool_versions
from .profile import ProjectBuildProfile, elicit_profile, find_build_file

__all__ = [
    "InjectionPlan",
    "ProjectBuildProfile",
    "elicit_profile",
    "find_build_file",
    "inject_measurement_deps",
    "required_tooling",
    "tool_versions",
]
