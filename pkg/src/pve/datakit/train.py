"""Desk-scale training: minibatch SGD on binary cross-entropy.

The loop is deliberately plain: He-uniform init for conv/dense kernels,
zero hidden biases, log-ratio output bias from the training-split class
counts, augmentation on the training split only, sequential gradient
application. Everything derives from one seed, so identical calls yield
bit-identical weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..detector import LABEL_AI, init_output_bias
from ..engine import CONV2D, DENSE, ModelGraph, backward, forward
from .. import preprocess as pp
from .augment import AugmentConfig, augment
from .manifest import DatasetManifest
from .split import TRAIN, SplitAssignment
from .metrics import LOSS_CLAMP


class TrainingDivergedError(RuntimeError):
    def __init__(self, epoch: int):
        super().__init__(f"training loss became non-finite during epoch {epoch}")
        self.epoch = epoch


@dataclass
class TrainResult:
    model: ModelGraph
    epoch_losses: list[float] = field(default_factory=list)
    train_n_ai: int = 0
    train_n_human: int = 0


def kaiming_init(model: ModelGraph, weights: np.ndarray,
                 rng: np.random.Generator) -> None:
    """He-uniform fan-in init for conv/dense kernels, zero biases,
    written into the given flat float64 buffer."""
    for spec in model.layers:
        if spec.kind == CONV2D:
            hp = spec.hyperparams
            fan_in = hp["kernel_h"] * hp["kernel_w"] * hp["in_channels"]
        elif spec.kind == DENSE:
            fan_in = spec.hyperparams["in_features"]
        else:
            continue
        bound = np.sqrt(6.0 / fan_in)
        weights[spec.weight_offset:spec.weight_offset + spec.weight_len] = \
            rng.uniform(-bound, bound, size=spec.weight_len)
        weights[spec.bias_offset:spec.bias_offset + spec.bias_len] = 0.0


def train_toy(arch: ModelGraph, manifest: DatasetManifest, split: SplitAssignment,
              epochs: int, lr: float, seed: int,
              batch_size: int = 16,
              augment_config: Optional[AugmentConfig] = None,
              init_weights: bool = True) -> TrainResult:
    """Train a copy of `arch` on the manifest's training split.

    With init_weights=False the template's weights are used as-is (only
    the output bias is installed), so a zero-weight template trained for
    zero epochs predicts exactly the training-class prior.
    """
    augment_config = augment_config or AugmentConfig()
    seeds = np.random.SeedSequence(seed).spawn(3)
    rng_init = np.random.default_rng(seeds[0])
    rng_shuffle = np.random.default_rng(seeds[1])
    rng_augment = np.random.default_rng(
        augment_config.seed if augment_config.seed is not None else seeds[2])

    train_entries = [e for e in manifest.entries
                     if split.by_path.get(e.path) == TRAIN]
    n_ai = sum(1 for e in train_entries if e.label == LABEL_AI)
    n_human = len(train_entries) - n_ai
    if n_ai == 0 or n_human == 0:
        raise ValueError(f"training split needs both classes, got ai={n_ai} human={n_human}")

    weights64 = arch.weights.astype(np.float64)
    model = ModelGraph(name=arch.name, layers=arch.layers, input_shape=arch.input_shape,
                       weights=weights64.astype(np.float32), n_ai=n_ai, n_human=n_human,
                       format_version=arch.format_version)
    if init_weights:
        kaiming_init(model, weights64, rng_init)
    bias_layer = model.layers[model.output_bias_layer()]
    weights64[bias_layer.bias_offset] = init_output_bias(n_ai, n_human)
    model.weights[:] = weights64.astype(np.float32)

    if model.input_shape[2] != 3:
        raise ValueError(f"training expects 3-channel input, got {model.input_shape}")
    in_h, in_w = model.input_shape[0], model.input_shape[1]

    decoded = [pp.decode_image(manifest.resolve(e).read_bytes()) for e in train_entries]
    targets = np.array([1.0 if e.label == LABEL_AI else 0.0 for e in train_entries])

    grad_buffer = np.empty_like(weights64)
    epoch_losses: list[float] = []
    for epoch in range(epochs):
        order = rng_shuffle.permutation(len(train_entries))
        loss_sum = 0.0
        for start in range(0, len(order), batch_size):
            batch = order[start:start + batch_size]
            grad_buffer[:] = 0.0
            for idx in batch:
                raw = augment(decoded[idx], augment_config, rng_augment)
                if (raw.height, raw.width) != (in_h, in_w):
                    raw = pp.resize_bilinear(raw, in_w, in_h)
                x = (raw.pixels / 255.0).astype(np.float32)
                trace = forward(model, x)
                p = trace.probability
                y = targets[idx]
                clamped = min(max(p, LOSS_CLAMP), 1.0 - LOSS_CLAMP)
                loss_sum += -np.log(clamped) if y else -np.log(1.0 - clamped)
                _, weight_grads = backward(model, trace, seed=p - y,
                                           want_input=False, want_weights=True)
                for spec, grads in zip(model.layers, weight_grads):
                    if grads is None:
                        continue
                    dw, db = grads
                    grad_buffer[spec.weight_offset:spec.weight_offset + spec.weight_len] += \
                        dw.reshape(-1)
                    grad_buffer[spec.bias_offset:spec.bias_offset + spec.bias_len] += db
            weights64 -= (lr / len(batch)) * grad_buffer
            model.weights[:] = weights64.astype(np.float32)

        epoch_loss = loss_sum / len(train_entries)
        if not np.isfinite(epoch_loss):
            raise TrainingDivergedError(epoch)
        epoch_losses.append(float(epoch_loss))

    return TrainResult(model=model, epoch_losses=epoch_losses,
                       train_n_ai=n_ai, train_n_human=n_human)
