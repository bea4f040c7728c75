"""Exception types raised across the harness.

Every stage error derives from :class:`HarnessError` so the CLI can turn any
of them into a machine-readable error record.
"""

from __future__ import annotations


class HarnessError(Exception):
    """Base class. ``details`` is merged into the CLI error JSON."""

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.details = details

    def to_json(self) -> dict:
        payload = {"error": type(self).__name__, "message": str(self)}
        payload.update({k: v for k, v in self.details.items() if _jsonable(v)})
        return payload


def _jsonable(value) -> bool:
    return isinstance(value, (str, int, float, bool, type(None), list, dict, tuple))


# java analysis
class UnparseableSource(HarnessError):
    pass


# repository mining
class CloneFailed(HarnessError):
    pass


class BranchNotFound(HarnessError):
    pass


class EmptyDataset(HarnessError):
    pass


# build configuration
class NoBuildFile(HarnessError):
    pass


class UnrecognizedBuild(HarnessError):
    pass


class MalformedBuildFile(HarnessError):
    pass


class WriteFailed(HarnessError):
    pass


# prompts
class SchemaViolation(HarnessError):
    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message, path=path)
        self.path = path


class TemperatureOutOfRange(SchemaViolation):
    pass


class UnboundVariable(HarnessError):
    def __init__(self, name: str):
        super().__init__(f"template variable {{{{{name}}}}} has no binding", name=name)
        self.name = name


class TokenLimitExceeded(HarnessError):
    """Raised when an instantiated prompt does not fit the model budget.

    ``prompt`` carries the over-budget prompt so a fallback can be applied.
    """

    def __init__(self, required: int, limit: int, prompt=None):
        super().__init__(
            f"prompt needs {required} tokens but the model limit is {limit}; "
            "shorten the class, choose a fallback strategy, or trim the template",
            required=required,
            limit=limit,
        )
        self.required = required
        self.limit = limit
        self.prompt = prompt


class StillOverBudget(TokenLimitExceeded):
    pass


# llm gateway
class ProviderError(HarnessError):
    def __init__(self, status: int, body: str = ""):
        super().__init__(f"provider returned HTTP {status}: {body[:200]}", status=status)
        self.status = status
        self.body = body[:200]


class Timeout(HarnessError):
    pass


class ExtractionFailed(HarnessError):
    pass


class PackageMissing(HarnessError):
    pass


class MissingReplayResponse(HarnessError):
    pass


# test runner
class ToolNotFound(HarnessError):
    pass


class MissingReplayFixture(HarnessError):
    pass


class EmptyInput(HarnessError):
    pass


# metrics
class MalformedReport(HarnessError):
    pass


class ClassNotInReport(HarnessError):
    pass


class EmptyLedger(HarnessError):
    pass


class AllFailedBuilds(HarnessError):
    pass


class KeyMismatch(HarnessError):
    pass
