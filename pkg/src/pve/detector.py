"""Binary AI-vs-human classification over the engine.

The decision threshold is inclusive: probability >= threshold reads "ai".
Output bias initialization follows the log-ratio rule ln(n_ai/n_human),
which makes a zero-weight network predict the empirical class prior.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from . import preprocess as pp
from .engine import ForwardTrace, ModelGraph, forward

LABEL_AI = "ai"
LABEL_HUMAN = "human"


@dataclass
class DetectorConfig:
    threshold: float = 0.5
    saliency_on_positive_only: bool = True

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold {self.threshold} outside (0, 1)")


@dataclass
class Prediction:
    probability: float
    label: str
    threshold: float
    inference_micros: int


def init_output_bias(n_ai: int, n_human: int) -> float:
    """ln(n_ai / n_human), computed as a log difference so that swapping
    the arguments negates the result exactly."""
    if n_ai <= 0 or n_human <= 0:
        raise ValueError(f"class counts must be positive, got ({n_ai}, {n_human})")
    return math.log(n_ai) - math.log(n_human)


def classify(probability: float, config: DetectorConfig) -> str:
    if not 0.0 <= probability <= 1.0:
        raise ValueError(f"probability {probability} outside [0, 1]")
    return LABEL_AI if probability >= config.threshold else LABEL_HUMAN


def predict_raw(model: ModelGraph, raw: pp.RawImage,
                config: DetectorConfig | None = None) -> tuple[Prediction, ForwardTrace]:
    """Classify an already-decoded image; timing covers preprocess + forward."""
    if model.input_shape != pp.NET_SHAPE:
        raise ValueError(
            f"detector needs a {pp.NET_SHAPE} model, got {model.input_shape}")
    config = config or DetectorConfig()
    t0 = time.perf_counter_ns()
    tensor = pp.normalize(pp.resize_bilinear(raw))
    trace = forward(model, tensor)
    micros = (time.perf_counter_ns() - t0) // 1000
    prediction = Prediction(
        probability=trace.probability,
        label=classify(trace.probability, config),
        threshold=config.threshold,
        inference_micros=int(micros),
    )
    return prediction, trace


def predict(model: ModelGraph, image_bytes: bytes,
            config: DetectorConfig | None = None) -> Prediction:
    """Decode, preprocess, and classify one image. Decode time is not
    counted in inference_micros."""
    raw = pp.decode_image(image_bytes)
    prediction, _ = predict_raw(model, raw, config)
    return prediction
