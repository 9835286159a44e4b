"""The compact detector: the default reference network.

A small residual CNN over 256x256x3 inputs, built from the engine's
closed layer set. The shipped default carries zero weights and the
log-ratio output bias, so it predicts the training prior of the full
corpus until retrained.
"""

from __future__ import annotations

import numpy as np

from .detector import init_output_bias
from .engine import (
    ADD_SKIP,
    CONV2D,
    DENSE,
    GLOBAL_AVG_POOL,
    MAXPOOL2D,
    RELU,
    SIGMOID_OUTPUT,
    LayerSpec,
    ModelGraph,
)

COMPACT_NAME = "compact-detector"

# corpus metadata counts; the bias operand below differs by the 13
# samples the original bias computation counted on the human side
DEFAULT_N_AI = 190549
DEFAULT_N_HUMAN = 81444
BIAS_N_HUMAN = 81457


def _conv(in_c: int, out_c: int, stride: int, offset: int) -> tuple[LayerSpec, int]:
    wlen = 3 * 3 * in_c * out_c
    spec = LayerSpec(
        kind=CONV2D,
        hyperparams={"kernel_h": 3, "kernel_w": 3, "stride": stride, "padding": 1,
                     "in_channels": in_c, "out_channels": out_c},
        weight_offset=offset, weight_len=wlen,
        bias_offset=offset + wlen, bias_len=out_c,
    )
    return spec, offset + wlen + out_c


def compact_detector_layers() -> tuple[list[LayerSpec], int]:
    """Layer list and total weight count for the compact detector."""
    specs = []
    offset = 0

    spec, offset = _conv(3, 8, 2, offset)          # 256 -> 128
    specs.append(spec)
    specs.append(LayerSpec(kind=RELU))
    spec, offset = _conv(8, 16, 2, offset)         # 128 -> 64
    specs.append(spec)
    specs.append(LayerSpec(kind=RELU))
    specs.append(LayerSpec(kind=MAXPOOL2D,
                           hyperparams={"pool_size": 2, "stride": 2}))  # 64 -> 32
    skip_source = len(specs) - 1

    spec, offset = _conv(16, 16, 1, offset)
    specs.append(spec)
    specs.append(LayerSpec(kind=RELU))
    spec, offset = _conv(16, 16, 1, offset)
    specs.append(spec)
    specs.append(LayerSpec(kind=ADD_SKIP, hyperparams={"source": skip_source}))
    specs.append(LayerSpec(kind=RELU))

    specs.append(LayerSpec(kind=GLOBAL_AVG_POOL))
    specs.append(LayerSpec(
        kind=DENSE,
        hyperparams={"in_features": 16, "out_features": 1},
        weight_offset=offset, weight_len=16,
        bias_offset=offset + 16, bias_len=1,
    ))
    offset += 17
    specs.append(LayerSpec(kind=SIGMOID_OUTPUT))
    return specs, offset


def build_compact_detector(name: str = COMPACT_NAME,
                           n_ai: int = DEFAULT_N_AI,
                           n_human: int = DEFAULT_N_HUMAN,
                           output_bias: float | None = None) -> ModelGraph:
    """Zero-weight compact detector with the given output bias (defaults
    to the shipped log-ratio value)."""
    specs, total = compact_detector_layers()
    weights = np.zeros(total, dtype=np.float32)
    if output_bias is None:
        output_bias = init_output_bias(DEFAULT_N_AI, BIAS_N_HUMAN)
    dense_spec = specs[-2]
    weights[dense_spec.bias_offset] = output_bias
    return ModelGraph(name=name, layers=specs, input_shape=(256, 256, 3),
                      weights=weights, n_ai=n_ai, n_human=n_human)


def build_default_model() -> ModelGraph:
    return build_compact_detector()
