"""Experiment configuration, prompt instantiation and token budgets."""

from .config import (
    DEFAULT_TOKEN_LIMITS,
    ExemplarRef,
    ExperimentConfig,
    LlmSpec,
    PromptTemplate,
    load_config,
    load_config_file,
)
from .fallback import apply_fallback, elidable_methods, strip_comments
from .template import (
    InstantiatedPrompt,
    PromptVariables,
    build_enhanced_variables,
    exemplar_variables,
    instantiate,
    placeholders,
)
from .tokens import BpeCounter, ByteCounter, counter_for

__all__ = [
    "DEFAULT_TOKEN_LIMITS",
    "BpeCounter",
    "ByteCounter",
    "ExemplarRef",
    "ExperimentConfig",
    "InstantiatedPrompt",
    "LlmSpec",
    "PromptTemplate",
    "PromptVariables",
    "apply_fallback",
    "build_enhanced_variables",
    "counter_for",
    "elidable_methods",
    "exemplar_variables",
    "instantiate",
    "load_config",
    "load_config_file",
    "placeholders",
    "strip_comments",
]
