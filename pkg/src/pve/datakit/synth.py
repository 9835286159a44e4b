"""Synthetic separable corpus for desk-scale training runs.

Both classes start from smooth low-frequency noise; the "ai" class adds
a high-frequency periodic grid artifact on top. A small CNN separates
the two from texture alone, which makes the corpus a fast end-to-end
check of the training and evaluation path.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from ..detector import LABEL_AI, LABEL_HUMAN
from ..preprocess import resample_bilinear
from .manifest import DatasetManifest, ManifestEntry

MANIFEST_NAME = "manifest.tsv"


def synthetic_image(label: str, rng: np.random.Generator, size: int = 128,
                    artifact_period: int = 4, artifact_amplitude: float = 96.0) -> np.ndarray:
    """One (size, size, 3) uint8 image: smooth noise, plus a periodic
    grid artifact for the "ai" label."""
    coarse = rng.uniform(48.0, 208.0, size=(size // 8, size // 8, 3))
    base = resample_bilinear(coarse, size, size)
    if label == LABEL_AI:
        xs = np.arange(size) * (2.0 * np.pi / artifact_period)
        grid = np.sin(xs)[None, :] * np.sin(xs)[:, None]
        base = base + artifact_amplitude * grid[..., None]
    return np.floor(base + 0.5).clip(0, 255).astype(np.uint8)


def encode_png(pixels: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(pixels, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def generate_synthetic_corpus(out_dir, count: int = 1000, size: int = 128,
                              seed: int = 0, ai_fraction: float = 0.5) -> DatasetManifest:
    """Write `count` PNGs plus a manifest.tsv under out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n_ai = round(count * ai_fraction)

    entries = []
    root_seq = np.random.SeedSequence(seed)
    for i, child in enumerate(root_seq.spawn(count)):
        label = LABEL_AI if i < n_ai else LABEL_HUMAN
        rng = np.random.default_rng(child)
        pixels = synthetic_image(label, rng, size=size)
        name = f"{label}_{i:05d}.png"
        (out_dir / name).write_bytes(encode_png(pixels))
        entries.append(ManifestEntry(path=name, label=label, source="synthetic"))

    manifest = DatasetManifest(entries=entries, root=out_dir)
    manifest.write(out_dir / MANIFEST_NAME)
    return manifest
