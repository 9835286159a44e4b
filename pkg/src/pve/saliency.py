"""Vanilla-gradient saliency maps and heatmap overlays.

The attribution for a pixel is the channelwise maximum of the absolute
input gradient of the pre-sigmoid logit, min-max normalized per image to
[0, 1] (an identically-zero gradient stays all-zero). Maps are computed
at model resolution, upscaled to the original image size, colorized
through a 256-entry table, and alpha-blended over the original.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._colordata import INFERNO
from .detector import LABEL_AI, DetectorConfig, Prediction, classify
from .engine import ForwardTrace, ModelGraph, backward_to_input, forward
from .preprocess import RawImage, decode_image, normalize, resample_bilinear, resize_bilinear


@dataclass
class SaliencyMap:
    """Per-pixel attribution in [0, 1], shaped (height, width)."""

    width: int
    height: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.height, self.width):
            raise ValueError(
                f"value shape {self.values.shape} != ({self.height}, {self.width})")


@dataclass
class OverlayConfig:
    alpha: float = 0.45
    colormap: str = "inferno"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha {self.alpha} outside [0, 1]")
        if self.colormap not in COLORMAPS:
            raise ValueError(f"unknown colormap {self.colormap!r}")


def _jet_table() -> list[tuple[int, int, int]]:
    table = []
    for i in range(256):
        v = i / 255.0
        r = min(max(1.5 - abs(4.0 * v - 3.0), 0.0), 1.0)
        g = min(max(1.5 - abs(4.0 * v - 2.0), 0.0), 1.0)
        b = min(max(1.5 - abs(4.0 * v - 1.0), 0.0), 1.0)
        table.append((int(r * 255 + 0.5), int(g * 255 + 0.5), int(b * 255 + 0.5)))
    return table


COLORMAPS: dict[str, np.ndarray] = {
    "inferno": np.array(INFERNO, dtype=np.float64),
    "jet": np.array(_jet_table(), dtype=np.float64),
    "grayscale": np.stack([np.arange(256.0)] * 3, axis=1),
}


def vanilla_gradient(model: ModelGraph, input_tensor: np.ndarray,
                     trace: Optional[ForwardTrace] = None) -> SaliencyMap:
    """Saliency at model resolution: max over channels of |d logit / d x|,
    min-max rescaled; all-zero gradients produce an all-zero map."""
    if trace is None:
        trace = forward(model, input_tensor)
    grad = backward_to_input(model, trace)
    magnitude = np.abs(grad).max(axis=2).astype(np.float64)
    lo = magnitude.min()
    hi = magnitude.max()
    if hi == 0.0:
        values = np.zeros_like(magnitude)
    elif hi == lo:
        values = np.ones_like(magnitude)
    else:
        values = (magnitude - lo) / (hi - lo)
    h, w = values.shape
    return SaliencyMap(width=w, height=h, values=values.astype(np.float32))


def upscale_map(smap: SaliencyMap, target_w: int, target_h: int) -> SaliencyMap:
    resampled = resample_bilinear(smap.values.astype(np.float64), target_w, target_h)
    values = np.clip(resampled, 0.0, 1.0).astype(np.float32)
    return SaliencyMap(width=target_w, height=target_h, values=values)


def colorize(smap: SaliencyMap, colormap: str = "inferno") -> RawImage:
    """Map values through a 256-entry table, linearly interpolating
    between adjacent entries; rounding is half-up."""
    if colormap not in COLORMAPS:
        raise ValueError(f"unknown colormap {colormap!r}")
    table = COLORMAPS[colormap]
    pos = np.clip(smap.values.astype(np.float64), 0.0, 1.0) * 255.0
    i0 = np.floor(pos).astype(np.intp)
    i1 = np.minimum(i0 + 1, 255)
    frac = (pos - i0)[..., None]
    rgb = table[i0] * (1.0 - frac) + table[i1] * frac
    pixels = np.floor(rgb + 0.5).clip(0, 255).astype(np.uint8)
    return RawImage(width=smap.width, height=smap.height, pixels=pixels)


def blend(original: RawImage, heat: RawImage, alpha: float) -> RawImage:
    """out = round((1 - alpha) * original + alpha * heat), per channel."""
    if (original.width, original.height) != (heat.width, heat.height):
        raise ValueError(
            f"overlay size {heat.width}x{heat.height} != "
            f"image size {original.width}x{original.height}")
    mixed = (1.0 - alpha) * original.pixels.astype(np.float64) \
        + alpha * heat.pixels.astype(np.float64)
    pixels = np.floor(mixed + 0.5).clip(0, 255).astype(np.uint8)
    return RawImage(width=original.width, height=original.height, pixels=pixels)


@dataclass
class Explanation:
    image: RawImage
    prediction: Prediction
    overlaid: bool
    saliency_micros: int = 0


def explain(model: ModelGraph, image_bytes: bytes,
            overlay_config: Optional[OverlayConfig] = None,
            detector_config: Optional[DetectorConfig] = None) -> Explanation:
    """Predict and, for positive detections (or always, when configured),
    build the heatmap overlay at the original image dimensions."""
    overlay_config = overlay_config or OverlayConfig()
    detector_config = detector_config or DetectorConfig()

    raw = decode_image(image_bytes)
    t0 = time.perf_counter_ns()
    tensor = normalize(resize_bilinear(raw))
    trace = forward(model, tensor)
    infer_micros = (time.perf_counter_ns() - t0) // 1000
    prediction = Prediction(
        probability=trace.probability,
        label=classify(trace.probability, detector_config),
        threshold=detector_config.threshold,
        inference_micros=int(infer_micros),
    )

    wants_overlay = (prediction.label == LABEL_AI
                     or not detector_config.saliency_on_positive_only)
    if not wants_overlay:
        return Explanation(image=raw, prediction=prediction, overlaid=False)

    t1 = time.perf_counter_ns()
    smap = vanilla_gradient(model, tensor, trace=trace)
    upscaled = upscale_map(smap, raw.width, raw.height)
    heat = colorize(upscaled, overlay_config.colormap)
    overlay = blend(raw, heat, overlay_config.alpha)
    saliency_micros = (time.perf_counter_ns() - t1) // 1000
    return Explanation(image=overlay, prediction=prediction, overlaid=True,
                       saliency_micros=int(saliency_micros))
