"""Evaluation harness for LLM-generated Java unit-test suites."""

__version__ = "0.1.0"
