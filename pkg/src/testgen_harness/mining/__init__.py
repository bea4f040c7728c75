"""Mining of class-under-test / test-class pairs from Java repositories."""

from .dataset import (
    DatasetStats,
    compute_stats,
    mine_repository,
    read_records,
    write_records,
)
from .discovery import Candidate, discover_candidates, main_source_roots, test_source_roots
from .evidence import (
    ClassUnderTestRecord,
    EvidenceSummary,
    Exclusion,
    ProductionIndex,
    Resolution,
    resolve_mappings,
    validate_mapping,
)
from .repo import RepoIdentity, ingest_repo, project_id

__all__ = [
    "Candidate",
    "ClassUnderTestRecord",
    "DatasetStats",
    "EvidenceSummary",
    "Exclusion",
    "ProductionIndex",
    "RepoIdentity",
    "Resolution",
    "compute_stats",
    "discover_candidates",
    "ingest_repo",
    "main_source_roots",
    "mine_repository",
    "project_id",
    "read_records",
    "resolve_mappings",
    "test_source_roots",
    "validate_mapping",
    "write_records",
]
