"""Classification metrics: confusion counts, accuracy/precision/recall,
and mean binary cross-entropy. Positive class is "ai"."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..detector import LABEL_AI
from ..engine import ModelGraph, forward
from .. import preprocess as pp
from .manifest import DatasetManifest
from .split import SplitAssignment

LOSS_CLAMP = 1e-7


@dataclass
class Metrics:
    accuracy: float
    precision: float
    recall: float
    loss: float
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def metrics_from_probabilities(probabilities: Sequence[float],
                               labels: Sequence[str],
                               threshold: float = 0.5) -> Metrics:
    if len(probabilities) != len(labels):
        raise ValueError("probabilities and labels differ in length")
    if not probabilities:
        raise ValueError("cannot compute metrics over an empty set")

    tp = fp = tn = fn = 0
    loss_sum = 0.0
    for p, label in zip(probabilities, labels):
        actual_ai = label == LABEL_AI
        predicted_ai = p >= threshold
        if predicted_ai and actual_ai:
            tp += 1
        elif predicted_ai and not actual_ai:
            fp += 1
        elif not predicted_ai and not actual_ai:
            tn += 1
        else:
            fn += 1
        clamped = min(max(p, LOSS_CLAMP), 1.0 - LOSS_CLAMP)
        loss_sum += -math.log(clamped) if actual_ai else -math.log(1.0 - clamped)

    total = len(probabilities)
    return Metrics(
        accuracy=(tp + tn) / total,
        precision=tp / (tp + fp) if tp + fp else 0.0,
        recall=tp / (tp + fn) if tp + fn else 0.0,
        loss=loss_sum / total,
        tp=tp, fp=fp, tn=tn, fn=fn,
    )


def evaluate(model: ModelGraph, manifest: DatasetManifest,
             split: Optional[SplitAssignment] = None,
             split_name: Optional[str] = None,
             threshold: float = 0.5) -> Metrics:
    """Run the model over a manifest (optionally restricted to one split)
    and compute metrics at the given threshold."""
    entries = manifest.entries
    if split is not None and split_name is not None:
        entries = [e for e in entries if split.by_path.get(e.path) == split_name]
    if not entries:
        raise ValueError(f"no entries to evaluate in split {split_name!r}")

    in_h, in_w = model.input_shape[0], model.input_shape[1]
    probabilities = []
    labels = []
    for entry in entries:
        data = manifest.resolve(entry).read_bytes()
        raw = pp.decode_image(data)
        if (raw.height, raw.width) != (in_h, in_w):
            raw = pp.resize_bilinear(raw, in_w, in_h)
        tensor = (raw.pixels / 255.0).astype(np.float32)
        probabilities.append(forward(model, tensor).probability)
        labels.append(entry.label)
    return metrics_from_probabilities(probabilities, labels, threshold)
