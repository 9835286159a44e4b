import numpy as np
import pytest

from pve.datakit import DatasetManifest, ManifestEntry, generate_synthetic_corpus
from testutil import GraphBuilder


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory) -> DatasetManifest:
    """40 images, 32x32: enough to exercise split/train/eval quickly."""
    out = tmp_path_factory.mktemp("tiny-corpus")
    return generate_synthetic_corpus(out, count=40, size=32, seed=7)


def make_manifest(n_ai: int, n_human: int, root=None) -> DatasetManifest:
    """In-memory manifest with synthetic paths (no files behind them)."""
    entries = [ManifestEntry(path=f"ai/{i:05d}.png", label="ai", source="synthetic")
               for i in range(n_ai)]
    entries += [ManifestEntry(path=f"human/{i:05d}.png", label="human", source="synthetic")
                for i in range(n_human)]
    manifest = DatasetManifest(entries=entries)
    if root is not None:
        manifest.root = root
    return manifest


def small_arch(input_side: int = 32) -> "GraphBuilder":
    """Training-friendly architecture over (side, side, 3) inputs."""
    g = GraphBuilder((input_side, input_side, 3))
    g.conv(8, kernel=3, stride=2, padding=1)
    g.relu()
    g.conv(8, kernel=3, stride=2, padding=1)
    g.relu()
    g.gap()
    g.dense(1)
    g.sigmoid()
    return g


@pytest.fixture()
def small_model():
    rng = np.random.default_rng(0)
    g = GraphBuilder((32, 32, 3))
    g.conv(8, kernel=3, stride=2, padding=1, rng=rng)
    g.relu()
    g.gap()
    g.dense(1, rng=rng)
    g.sigmoid()
    return g.build(name="small")
