"""Dataset manifests: labeled image lists on disk.

File format, one record per line, UTF-8:

    path<TAB>label<TAB>source

Labels are "ai" or "human". Paths may be relative; they resolve against
the manifest's root directory (the file's parent when read from disk).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..detector import LABEL_AI, LABEL_HUMAN

VALID_LABELS = (LABEL_AI, LABEL_HUMAN)


@dataclass
class ManifestEntry:
    path: str
    label: str
    source: str


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry] = field(default_factory=list)
    root: Path = field(default_factory=Path)

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            if entry.label not in VALID_LABELS:
                raise ValueError(f"{entry.path}: label {entry.label!r} not in {VALID_LABELS}")
            if entry.path in seen:
                raise ValueError(f"duplicate manifest path {entry.path!r}")
            seen.add(entry.path)

    def resolve(self, entry: ManifestEntry) -> Path:
        path = Path(entry.path)
        return path if path.is_absolute() else self.root / path

    def label_counts(self) -> dict[str, int]:
        counts = {LABEL_AI: 0, LABEL_HUMAN: 0}
        for entry in self.entries:
            counts[entry.label] += 1
        return counts

    @classmethod
    def read(cls, path) -> "DatasetManifest":
        path = Path(path)
        entries = []
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            entries.append(ManifestEntry(path=fields[0], label=fields[1], source=fields[2]))
        return cls(entries=entries, root=path.parent)

    def write(self, path) -> None:
        lines = [f"{e.path}\t{e.label}\t{e.source}" for e in self.entries]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
