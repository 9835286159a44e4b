"""Deterministic stratified 60/20/20 train/validation/test splits.

Within each class the entries are shuffled by a seeded generator and cut
at the floor(0.6n) and floor(0.8n) boundaries, which keeps every split
within one item of its exact ratio share for any class size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .manifest import DatasetManifest

TRAIN = "train"
VAL = "val"
TEST = "test"
SPLIT_NAMES = (TRAIN, VAL, TEST)
RATIOS = (0.6, 0.2, 0.2)

MIN_CLASS_SIZE = 5


class ClassTooSmallError(ValueError):
    pass


@dataclass
class SplitAssignment:
    by_path: dict[str, str]
    seed: int
    ratios: tuple[float, float, float] = RATIOS

    def split_of(self, path: str) -> str:
        return self.by_path[path]

    def counts(self) -> dict[str, int]:
        out = {name: 0 for name in SPLIT_NAMES}
        for split in self.by_path.values():
            out[split] += 1
        return out

    def paths_in(self, split: str) -> list[str]:
        return [p for p, s in self.by_path.items() if s == split]

    @classmethod
    def read(cls, path, seed: int = 0) -> "SplitAssignment":
        by_path = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2 or fields[1] not in SPLIT_NAMES:
                raise ValueError(f"{path}:{lineno}: expected 'path<TAB>train|val|test'")
            by_path[fields[0]] = fields[1]
        return cls(by_path=by_path, seed=seed)

    def write(self, path) -> None:
        lines = [f"{p}\t{s}" for p, s in self.by_path.items()]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def stratified_split(manifest: DatasetManifest, seed: int,
                     by_source: bool = False) -> SplitAssignment:
    """Deterministic given (manifest order, seed). Stratifies per class,
    or per (class, source) group when by_source is set."""
    groups: dict[tuple, list[int]] = {}
    for idx, entry in enumerate(manifest.entries):
        key = (entry.label, entry.source) if by_source else (entry.label,)
        groups.setdefault(key, []).append(idx)

    labels = {key[0] for key in groups}
    if len(labels) < 2:
        raise ClassTooSmallError(f"need both labels, manifest has only {sorted(labels)}")
    for key, idxs in groups.items():
        if len(idxs) < MIN_CLASS_SIZE:
            raise ClassTooSmallError(
                f"group {key} has {len(idxs)} entries, need >= {MIN_CLASS_SIZE}")

    rng = np.random.default_rng(seed)
    by_path: dict[str, str] = {}
    for key in sorted(groups):
        idxs = groups[key]
        n = len(idxs)
        order = rng.permutation(n)
        b1 = math.floor(0.6 * n)
        b2 = math.floor(0.8 * n)
        for rank, pos in enumerate(order):
            if rank < b1:
                split = TRAIN
            elif rank < b2:
                split = VAL
            else:
                split = TEST
            by_path[manifest.entries[idxs[pos]].path] = split

    # keep manifest order in the assignment file
    ordered = {e.path: by_path[e.path] for e in manifest.entries}
    return SplitAssignment(by_path=ordered, seed=seed)
