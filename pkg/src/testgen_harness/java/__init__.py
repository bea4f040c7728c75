"""Java source analysis: parsing, structural facts and complexity."""

from .complexity import ComplexityReport, count_loc, measure_complexity
from .facts import AssertionCall, AstFacts, FieldFacts, MethodFacts, extract_facts
from .parsing import JavaSourceUnit, parse_file, parse_unit

__all__ = [
    "AssertionCall",
    "AstFacts",
    "ComplexityReport",
    "FieldFacts",
    "JavaSourceUnit",
    "MethodFacts",
    "count_loc",
    "extract_facts",
    "measure_complexity",
    "parse_file",
    "parse_unit",
]
