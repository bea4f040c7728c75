from __future__ import annotations

import json
import time

import pytest

from conftest import git, make_repo
from mining_corpus import CORPUS
from testgen_harness.errors import BranchNotFound, CloneFailed, EmptyDataset
from testgen_harness.java import parse_file
from testgen_harness.mining import (
    compute_stats,
    discover_candidates,
    ingest_repo,
    main_source_roots,
    mine_repository,
    project_id,
    write_records,
)
from testgen_harness.mining import discovery
from testgen_harness.mining.evidence import DOMINANCE


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    base = tmp_path_factory.mktemp("corpus")
    return {name: make_repo(base / name, files) for name, (files, _) in CORPUS.items()}


def observed(resolution):
    out = {}
    for r in resolution.records:
        out[(r.cut_fqn, r.test_path)] = ("keep", round(r.evidence.ratio, 6))
    for x in resolution.exclusions:
        out[(x.cut_fqn, x.test_path)] = ("drop", x.reason, round(x.ratio, 6))
    return out


def labelled(expected):
    return {k: (v[0], *v[1:-1], round(v[-1], 6)) for k, v in expected.items()}


def test_mapping_dominance_matches_hand_labels(corpus, tmp_path):
    start = time.monotonic()
    agree = total = 0
    for name, (_, expected) in CORPUS.items():
        _, resolution = mine_repository(str(corpus[name]), "main", tmp_path / "work")
        got = observed(resolution)
        want = labelled(expected)
        assert got == want, name
        total += len(want)
        agree += sum(got.get(k) == v for k, v in want.items())
    assert agree == total == 15
    assert time.monotonic() - start < 30


def test_corpus_covers_the_required_edge_cases():
    verdicts = [v for _, exp in CORPUS.values() for v in exp.values()]
    assert any(v[0] == "drop" and v[1] == "below-dominance" and round(v[2], 2) == 0.59 for v in verdicts)
    assert any(v[:2] == ("drop", "tie") for v in verdicts)
    assert sum(v[:2] == ("drop", "ambiguous") for v in verdicts) == 2
    assert len(CORPUS) == 12


def test_dominance_soundness_and_injectivity(corpus, tmp_path):
    seen = set()
    for name in CORPUS:
        _, resolution = mine_repository(str(corpus[name]), "main", tmp_path / "work")
        for r in resolution.records:
            assert r.evidence.ratio >= DOMINANCE
            assert r.cut_path != r.test_path
            assert (name, r.test_path) not in seen
            seen.add((name, r.test_path))


def test_exclusion_accounting(corpus, tmp_path):
    for name in CORPUS:
        repo, resolution = mine_repository(str(corpus[name]), "main", tmp_path / "work")
        checkout = repo.checkout
        roots = discovery.test_source_roots(checkout)
        pairs = 0
        for root in main_source_roots(checkout):
            for path in root.rglob("*.java"):
                pairs += len(discover_candidates(checkout, parse_file(path), roots))
        assert pairs == len(resolution.records) + len(resolution.exclusions), name


def test_mining_is_deterministic(corpus, tmp_path):
    outputs = []
    for run in ("a", "b"):
        records = []
        for name in sorted(CORPUS):
            repo, resolution = mine_repository(str(corpus[name]), "main", tmp_path / run)
            records.extend(resolution.records)
        write_records(tmp_path / f"{run}.jsonl", records)
        outputs.append((tmp_path / f"{run}.jsonl").read_bytes())
    assert outputs[0] == outputs[1]


def test_record_json_fields(corpus, tmp_path):
    _, resolution = mine_repository(str(corpus["clean"]), "main", tmp_path)
    [rec] = resolution.records
    data = rec.to_json()
    assert list(data) == ["repo_url", "branch", "commit_hash", "cut_path", "cut_fqn", "test_path", "test_fqn",
                          "evidence_ratio"]
    assert data["test_fqn"] == "org.calc.CalcTest"
    assert len(data["commit_hash"]) == 40


def test_ingest_pins_commit(tmp_path):
    repo = make_repo(tmp_path / "src", {"a.txt": "one\n"})
    first = git(repo, "rev-parse", "HEAD")
    (repo / "a.txt").write_text("two\n")
    git(repo, "commit", "-qam", "second")
    pinned = ingest_repo(str(repo), "main", tmp_path / "w", commit=first)
    assert pinned.commit_hash == first
    assert (pinned.checkout / "a.txt").read_text() == "one\n"
    latest = ingest_repo(str(repo), "main", tmp_path / "w")
    assert latest.commit_hash != first
    assert all(c in "0123456789abcdef" for c in latest.commit_hash)


def test_ingest_errors(tmp_path):
    repo = make_repo(tmp_path / "src", {"a.txt": "x\n"})
    with pytest.raises(BranchNotFound):
        ingest_repo(str(repo), "no-such-branch", tmp_path / "w")
    with pytest.raises(CloneFailed):
        ingest_repo(str(tmp_path / "missing"), "main", tmp_path / "w")


def test_project_id_is_stable_and_numeric():
    assert project_id("https://example.org/r.git") == project_id("https://example.org/r.git")
    assert project_id("a").isdigit()
    assert project_id("a") != project_id("b")


def test_stats_on_toy_project(toy_repo, tmp_path):
    repo, resolution = mine_repository(str(toy_repo), "main", tmp_path)
    stats = compute_stats(resolution.records)
    assert stats.repo_count == 1
    assert stats.test_class_count == len(resolution.records) == 3
    assert stats.framework_distribution == {"JUnit 5": 100.0}
    assert stats.java_version_distribution == {"17": 100.0}
    for dist in (stats.framework_distribution, stats.java_version_distribution):
        assert abs(sum(dist.values()) - 100) <= 0.5
    json.dumps(stats.to_json())


def test_stats_of_nothing():
    with pytest.raises(EmptyDataset):
        compute_stats([])
