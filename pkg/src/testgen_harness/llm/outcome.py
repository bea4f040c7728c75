"""Per (model, prompt, class) generation result."""

from __future__ import annotations

from dataclasses import asdict, dataclass

STATUSES = ("ok", "extraction_failed", "provider_error")


@dataclass(frozen=True)
class GenerationOutcome:
    model: str
    prompt_name: str
    record: dict
    raw_response: str
    extracted_source: str | None
    placed_path: str | None
    status: str
    latency_ms: int = 0
    token_count: int = 0
    error: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if (self.placed_path is not None) != (self.status == "ok"):
            raise ValueError("placed_path is present exactly when status is ok")
        if (self.extracted_source is not None) != (self.status == "ok"):
            raise ValueError("extracted_source is present exactly when status is ok")

    @property
    def cut_fqn(self) -> str:
        return self.record["cut_fqn"]

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "GenerationOutcome":
        return cls(**data)
