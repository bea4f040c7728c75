"""Model endpoints, reply post-processing and test-class placement."""

from .extract import extract_test_source
from .gateway import (
    HttpProvider,
    MockProvider,
    ProviderEndpoint,
    ReplayProvider,
    complete,
    synthesize_stub,
)
from .outcome import STATUSES, GenerationOutcome
from .placement import COLLISION_SUFFIX, place_test_class, remove_placed

__all__ = [
    "COLLISION_SUFFIX",
    "STATUSES",
    "GenerationOutcome",
    "HttpProvider",
    "MockProvider",
    "ProviderEndpoint",
    "ReplayProvider",
    "complete",
    "extract_test_source",
    "place_test_class",
    "remove_placed",
    "synthesize_stub",
]
