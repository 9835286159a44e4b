"""Training-set augmentation: horizontal flip, slight rotation, contrast.

Applied in that fixed order. Every call consumes exactly three random
draws (flip coin, angle, contrast factor) whether or not a stage changes
the image, so augmentation streams stay aligned across configurations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..preprocess import RawImage


@dataclass
class AugmentConfig:
    hflip_prob: float = 0.5
    max_rotation_degrees: float = 10.0
    contrast_range: tuple[float, float] = (0.8, 1.25)
    seed: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.hflip_prob <= 1.0:
            raise ValueError(f"hflip_prob {self.hflip_prob} outside [0, 1]")
        if self.max_rotation_degrees < 0:
            raise ValueError("max_rotation_degrees must be >= 0")
        lo, hi = self.contrast_range
        if lo <= 0 or hi <= 0 or lo > hi:
            raise ValueError(f"bad contrast range ({lo}, {hi})")


def rotate_bilinear(img: RawImage, degrees: float) -> RawImage:
    """Rotate about the image center, bilinear-resampled, sampling
    coordinates clamped to the edges."""
    if degrees == 0.0:
        return RawImage.from_array(img.pixels.copy())
    theta = np.deg2rad(degrees)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    h, w = img.height, img.width
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0

    ys, xs = np.meshgrid(np.arange(h) - cy, np.arange(w) - cx, indexing="ij")
    # inverse mapping: rotate destination coords back into the source
    sx = np.clip(cos_t * xs + sin_t * ys + cx, 0.0, w - 1.0)
    sy = np.clip(-sin_t * xs + cos_t * ys + cy, 0.0, h - 1.0)

    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (sx - x0)[..., None]
    fy = (sy - y0)[..., None]

    src = img.pixels.astype(np.float64)
    top = src[y0, x0] * (1.0 - fx) + src[y0, x1] * fx
    bottom = src[y1, x0] * (1.0 - fx) + src[y1, x1] * fx
    out = top * (1.0 - fy) + bottom * fy
    return RawImage.from_array(np.floor(out + 0.5).clip(0, 255).astype(np.uint8))


def adjust_contrast(img: RawImage, factor: float) -> RawImage:
    adjusted = factor * (img.pixels.astype(np.float64) - 128.0) + 128.0
    return RawImage.from_array(np.floor(adjusted + 0.5).clip(0, 255).astype(np.uint8))


def hflip(img: RawImage) -> RawImage:
    return RawImage.from_array(img.pixels[:, ::-1].copy())


def augment(img: RawImage, config: AugmentConfig, rng: np.random.Generator) -> RawImage:
    flip_draw = rng.random()
    angle = rng.uniform(-config.max_rotation_degrees, config.max_rotation_degrees)
    factor = rng.uniform(config.contrast_range[0], config.contrast_range[1])

    out = img
    if flip_draw < config.hflip_prob:
        out = hflip(out)
    out = rotate_bilinear(out, angle)
    if factor != 1.0:
        out = adjust_contrast(out, factor)
    return out
