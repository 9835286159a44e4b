"""Stratified split invariants: ratios, determinism, totality."""

import numpy as np
import pytest

from pve.datakit import (
    ClassTooSmallError,
    SplitAssignment,
    stratified_split,
)
from conftest import make_manifest

RATIOS = {"train": 0.6, "val": 0.2, "test": 0.2}


def class_split_counts(manifest, assignment):
    counts = {}
    for entry in manifest.entries:
        key = (entry.label, assignment.by_path[entry.path])
        counts[key] = counts.get(key, 0) + 1
    return counts


def test_balanced_100_gives_30_10_10_per_class():
    manifest = make_manifest(50, 50)
    assignment = stratified_split(manifest, seed=1)
    counts = class_split_counts(manifest, assignment)
    for label in ("ai", "human"):
        assert counts[(label, "train")] == 30
        assert counts[(label, "val")] == 10
        assert counts[(label, "test")] == 10


def test_ten_per_class_gives_6_2_2():
    manifest = make_manifest(10, 10)
    counts = class_split_counts(manifest, stratified_split(manifest, seed=3))
    for label in ("ai", "human"):
        assert counts[(label, "train")] == 6
        assert counts[(label, "val")] == 2
        assert counts[(label, "test")] == 2


def test_same_seed_identical_assignment():
    manifest = make_manifest(37, 23)
    a = stratified_split(manifest, seed=42)
    b = stratified_split(manifest, seed=42)
    assert a.by_path == b.by_path


def test_different_seed_differs():
    manifest = make_manifest(200, 200)
    a = stratified_split(manifest, seed=1)
    b = stratified_split(manifest, seed=2)
    assert a.by_path != b.by_path


def test_class_too_small_rejected():
    with pytest.raises(ClassTooSmallError):
        stratified_split(make_manifest(4, 100), seed=0)


def test_single_class_rejected():
    manifest = make_manifest(20, 0)
    with pytest.raises(ClassTooSmallError):
        stratified_split(manifest, seed=0)


@pytest.mark.parametrize("case", range(40))
def test_randomized_manifests_hold_invariants(case):
    rng = np.random.default_rng(1000 + case)
    total = int(rng.integers(10, 10_001))
    skew = float(rng.uniform(1.0, 20.0))
    n_ai = max(5, int(total * skew / (1.0 + skew)))
    n_human = max(5, total - n_ai)
    manifest = make_manifest(n_ai, n_human)
    seed = int(rng.integers(0, 2 ** 63))

    assignment = stratified_split(manifest, seed=seed)

    # total and disjoint: every path assigned exactly one split
    assert set(assignment.by_path) == {e.path for e in manifest.entries}

    counts = class_split_counts(manifest, assignment)
    for label, class_total in (("ai", n_ai), ("human", n_human)):
        for split, ratio in RATIOS.items():
            got = counts.get((label, split), 0)
            assert abs(got - ratio * class_total) <= 1.0, \
                f"{label}/{split}: {got} vs {ratio * class_total}"

    again = stratified_split(manifest, seed=seed)
    assert again.by_path == assignment.by_path


def test_by_source_stratifies_within_groups():
    from pve.datakit import DatasetManifest

    entries = make_manifest(40, 40).entries
    for i, entry in enumerate(entries):
        entry.source = f"src{i % 2}"
    manifest = DatasetManifest(entries=entries)

    assignment = stratified_split(manifest, seed=9, by_source=True)
    per_group = {}
    for entry in entries:
        key = (entry.label, entry.source, assignment.by_path[entry.path])
        per_group[key] = per_group.get(key, 0) + 1
    for label in ("ai", "human"):
        for source in ("src0", "src1"):
            assert per_group[(label, source, "train")] == 12
            assert per_group[(label, source, "val")] == 4
            assert per_group[(label, source, "test")] == 4


def test_split_file_roundtrip(tmp_path):
    manifest = make_manifest(30, 30)
    assignment = stratified_split(manifest, seed=5)
    path = tmp_path / "split.tsv"
    assignment.write(path)
    again = SplitAssignment.read(path, seed=5)
    assert again.by_path == assignment.by_path


def test_split_counts_helper():
    manifest = make_manifest(25, 25)
    counts = stratified_split(manifest, seed=0).counts()
    assert counts["train"] == 30 and counts["val"] == 10 and counts["test"] == 10
