"""Model graphs: layer specs, shape inference, forward and backward passes.

A ModelGraph is an ordered list of layers over one flat float32 weight
blob. Graphs are immutable after construction and safe to share across
threads; forward/backward allocate all scratch state per call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    ShapeInferenceError,
    ShapeMismatchError,
    TraceMismatchError,
    UnsupportedLayerError,
    WeightSliceError,
)
from . import layers as K

CONV2D = "conv2d"
RELU = "relu"
MAXPOOL2D = "maxpool2d"
GLOBAL_AVG_POOL = "global_avg_pool"
DENSE = "dense"
ADD_SKIP = "add_skip"
SIGMOID_OUTPUT = "sigmoid_output"

LAYER_KINDS = frozenset({
    CONV2D, RELU, MAXPOOL2D, GLOBAL_AVG_POOL, DENSE, ADD_SKIP, SIGMOID_OUTPUT,
})

# hyperparameter keys each kind must carry, and nothing else
_HYPERPARAM_KEYS = {
    CONV2D: {"kernel_h", "kernel_w", "stride", "padding", "in_channels", "out_channels"},
    MAXPOOL2D: {"pool_size", "stride"},
    DENSE: {"in_features", "out_features"},
    ADD_SKIP: {"source"},
    RELU: set(),
    GLOBAL_AVG_POOL: set(),
    SIGMOID_OUTPUT: set(),
}


@dataclass(frozen=True)
class LayerSpec:
    """One layer: a kind, its hyperparameters, and weight/bias slices
    (element offsets into the model's flat weight blob)."""

    kind: str
    hyperparams: dict = field(default_factory=dict)
    weight_offset: int = 0
    weight_len: int = 0
    bias_offset: int = 0
    bias_len: int = 0

    def expected_weight_len(self) -> int:
        hp = self.hyperparams
        if self.kind == CONV2D:
            return hp["kernel_h"] * hp["kernel_w"] * hp["in_channels"] * hp["out_channels"]
        if self.kind == DENSE:
            return hp["in_features"] * hp["out_features"]
        return 0

    def expected_bias_len(self) -> int:
        if self.kind == CONV2D:
            return self.hyperparams["out_channels"]
        if self.kind == DENSE:
            return self.hyperparams["out_features"]
        return 0


def validate_layer(index: int, spec: LayerSpec, blob_len: int) -> None:
    if spec.kind not in LAYER_KINDS:
        raise UnsupportedLayerError(index, spec.kind)
    expected = _HYPERPARAM_KEYS[spec.kind]
    got = set(spec.hyperparams)
    if got != expected:
        raise ShapeInferenceError(
            index, f"{spec.kind} hyperparams {sorted(got)} != expected {sorted(expected)}")
    for key, value in spec.hyperparams.items():
        if not isinstance(value, int):
            raise ShapeInferenceError(index, f"hyperparam {key} must be an integer")
        if key != "source" and value <= 0 and key != "padding":
            raise ShapeInferenceError(index, f"hyperparam {key} must be positive")
        if key == "padding" and value < 0:
            raise ShapeInferenceError(index, "padding must be >= 0")

    if spec.weight_len != spec.expected_weight_len():
        raise WeightSliceError(
            index,
            f"weight slice length {spec.weight_len} != required {spec.expected_weight_len()}")
    if spec.bias_len != spec.expected_bias_len():
        raise WeightSliceError(
            index,
            f"bias slice length {spec.bias_len} != required {spec.expected_bias_len()}")
    for name, off, ln in (("weight", spec.weight_offset, spec.weight_len),
                          ("bias", spec.bias_offset, spec.bias_len)):
        if off < 0 or off + ln > blob_len:
            raise WeightSliceError(
                index, f"{name} slice [{off}, {off + ln}) outside blob of {blob_len} floats")


def infer_shapes(specs: list[LayerSpec], input_shape: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Output shape of every layer in order; raises at the first layer
    whose input cannot be consumed."""
    shapes: list[tuple[int, ...]] = []
    current = tuple(input_shape)
    for i, spec in enumerate(specs):
        hp = spec.hyperparams
        if spec.kind not in LAYER_KINDS:
            raise UnsupportedLayerError(i, spec.kind)
        if spec.kind == CONV2D:
            if len(current) != 3:
                raise ShapeInferenceError(i, f"conv2d needs (H, W, C) input, got {current}")
            h, w, c = current
            if c != hp["in_channels"]:
                raise ShapeInferenceError(
                    i, f"conv2d expects {hp['in_channels']} channels, got {c}")
            oh = (h + 2 * hp["padding"] - hp["kernel_h"]) // hp["stride"] + 1
            ow = (w + 2 * hp["padding"] - hp["kernel_w"]) // hp["stride"] + 1
            if oh < 1 or ow < 1:
                raise ShapeInferenceError(i, f"conv2d output {oh}x{ow} not positive")
            current = (oh, ow, hp["out_channels"])
        elif spec.kind == MAXPOOL2D:
            if len(current) != 3:
                raise ShapeInferenceError(i, f"maxpool2d needs (H, W, C) input, got {current}")
            h, w, c = current
            if h < hp["pool_size"] or w < hp["pool_size"]:
                raise ShapeInferenceError(
                    i, f"pool window {hp['pool_size']} larger than input {h}x{w}")
            oh = (h - hp["pool_size"]) // hp["stride"] + 1
            ow = (w - hp["pool_size"]) // hp["stride"] + 1
            current = (oh, ow, c)
        elif spec.kind == GLOBAL_AVG_POOL:
            if len(current) != 3:
                raise ShapeInferenceError(
                    i, f"global_avg_pool needs (H, W, C) input, got {current}")
            current = (current[2],)
        elif spec.kind == DENSE:
            size = int(np.prod(current))
            if size != hp["in_features"]:
                raise ShapeInferenceError(
                    i, f"dense expects {hp['in_features']} inputs, got {size}")
            current = (hp["out_features"],)
        elif spec.kind == ADD_SKIP:
            src = hp["source"]
            if not 0 <= src < i:
                raise ShapeInferenceError(i, f"skip source {src} is not an earlier layer")
            if shapes[src] != current:
                raise ShapeInferenceError(
                    i, f"skip source shape {shapes[src]} != input shape {current}")
        elif spec.kind == SIGMOID_OUTPUT:
            if current != (1,):
                raise ShapeInferenceError(
                    i, f"sigmoid_output needs a scalar (1,) logit, got {current}")
            if i != len(specs) - 1:
                raise ShapeInferenceError(i, "sigmoid_output must be the final layer")
        shapes.append(current)
    return shapes


class ModelGraph:
    """Validated, immutable network: layers + flat float32 weights + metadata."""

    def __init__(self, name: str, layers: list[LayerSpec],
                 input_shape: tuple[int, ...], weights: np.ndarray,
                 n_ai: int, n_human: int, format_version: int = 1):
        self.name = name
        self.layers = list(layers)
        self.input_shape = tuple(int(d) for d in input_shape)
        self.weights = np.ascontiguousarray(weights, dtype=np.float32).reshape(-1)
        self.n_ai = int(n_ai)
        self.n_human = int(n_human)
        self.format_version = int(format_version)

        for i, spec in enumerate(self.layers):
            validate_layer(i, spec, self.weights.size)
        if not self.layers or self.layers[-1].kind != SIGMOID_OUTPUT:
            raise ShapeInferenceError(
                max(len(self.layers) - 1, 0), "graph must end with sigmoid_output")
        for i, spec in enumerate(self.layers[:-1]):
            if spec.kind == SIGMOID_OUTPUT:
                raise ShapeInferenceError(i, "sigmoid_output before the final layer")
        self.output_shapes = infer_shapes(self.layers, self.input_shape)

    @property
    def version(self) -> str:
        return str(self.format_version)

    def weight_slice(self, spec: LayerSpec) -> np.ndarray:
        return self.weights[spec.weight_offset:spec.weight_offset + spec.weight_len]

    def bias_slice(self, spec: LayerSpec) -> np.ndarray:
        return self.weights[spec.bias_offset:spec.bias_offset + spec.bias_len]

    def conv_weight(self, spec: LayerSpec) -> np.ndarray:
        hp = spec.hyperparams
        return self.weight_slice(spec).reshape(
            hp["kernel_h"], hp["kernel_w"], hp["in_channels"], hp["out_channels"])

    def dense_weight(self, spec: LayerSpec) -> np.ndarray:
        hp = spec.hyperparams
        return self.weight_slice(spec).reshape(hp["in_features"], hp["out_features"])

    def output_bias_layer(self) -> int:
        """Index of the last biased layer, the one carrying the output bias."""
        for idx in range(len(self.layers) - 2, -1, -1):
            if self.layers[idx].bias_len:
                return idx
        raise ShapeInferenceError(len(self.layers) - 1, "graph has no biased layer")


@dataclass
class ForwardTrace:
    """Cached per-layer outputs of one forward pass (float64), plus the
    scalar logit and its sigmoid."""

    model: ModelGraph
    input: np.ndarray
    outputs: list[np.ndarray]
    logit: float
    probability: float


def forward(model: ModelGraph, x: np.ndarray) -> ForwardTrace:
    if tuple(x.shape) != model.input_shape:
        raise ShapeMismatchError(
            f"input shape {tuple(x.shape)} != model input shape {model.input_shape}")
    x64 = np.asarray(x, dtype=np.float64)
    outputs: list[np.ndarray] = []
    current = x64
    for spec in model.layers:
        hp = spec.hyperparams
        if spec.kind == CONV2D:
            w = model.conv_weight(spec).astype(np.float64)
            b = model.bias_slice(spec).astype(np.float64)
            current = K.conv2d_forward(current, w, b, hp["stride"], hp["padding"])
        elif spec.kind == RELU:
            current = K.relu_forward(current)
        elif spec.kind == MAXPOOL2D:
            current = K.maxpool2d_forward(current, hp["pool_size"], hp["stride"])
        elif spec.kind == GLOBAL_AVG_POOL:
            current = K.global_avg_pool_forward(current)
        elif spec.kind == DENSE:
            w = model.dense_weight(spec).astype(np.float64)
            b = model.bias_slice(spec).astype(np.float64)
            current = K.dense_forward(current, w, b)
        elif spec.kind == ADD_SKIP:
            current = current + outputs[hp["source"]]
        elif spec.kind == SIGMOID_OUTPUT:
            current = K.sigmoid(current)
        outputs.append(current)
    logit = float(outputs[-2][0])
    probability = float(outputs[-1][0])
    return ForwardTrace(model=model, input=x64, outputs=outputs,
                        logit=logit, probability=probability)


def backward(model: ModelGraph, trace: ForwardTrace, seed: float = 1.0,
             want_input: bool = True, want_weights: bool = False):
    """Backpropagate d(logit) through the graph.

    Returns (input_grad, weight_grads) where weight_grads is a per-layer
    list of (dw, db) pairs (None for weightless layers). The sigmoid
    output layer is excluded: gradients are of the pre-sigmoid logit.
    """
    if trace.model is not model:
        raise TraceMismatchError("trace was produced by a different model")
    if len(trace.outputs) != len(model.layers):
        raise TraceMismatchError(
            f"trace has {len(trace.outputs)} layers, model has {len(model.layers)}")

    n = len(model.layers)
    grads: list[Optional[np.ndarray]] = [None] * n
    grads[n - 2] = np.array([float(seed)], dtype=np.float64)
    weight_grads: list[Optional[tuple]] = [None] * n
    input_grad: Optional[np.ndarray] = None

    def layer_input(i: int) -> np.ndarray:
        return trace.outputs[i - 1] if i > 0 else trace.input

    for i in range(n - 2, -1, -1):
        g = grads[i]
        if g is None:
            continue
        spec = model.layers[i]
        hp = spec.hyperparams
        x = layer_input(i)
        if spec.kind == CONV2D:
            w = model.conv_weight(spec).astype(np.float64)
            dx, dw, db = K.conv2d_backward(x, w, g, hp["stride"], hp["padding"],
                                           want_weights=want_weights)
            if want_weights:
                weight_grads[i] = (dw, db)
        elif spec.kind == RELU:
            dx = K.relu_backward(x, g)
        elif spec.kind == MAXPOOL2D:
            dx = K.maxpool2d_backward(x, g, hp["pool_size"], hp["stride"])
        elif spec.kind == GLOBAL_AVG_POOL:
            dx = K.global_avg_pool_backward(x, g)
        elif spec.kind == DENSE:
            w = model.dense_weight(spec).astype(np.float64)
            dx, dw, db = K.dense_backward(x, w, g, want_weights=want_weights)
            if want_weights:
                weight_grads[i] = (dw, db)
        elif spec.kind == ADD_SKIP:
            dx = g
            src = hp["source"]
            grads[src] = g.copy() if grads[src] is None else grads[src] + g
        else:  # pragma: no cover - sigmoid never receives a gradient here
            raise TraceMismatchError(f"unexpected gradient at layer {i}")

        if i == 0:
            if want_input:
                input_grad = dx if input_grad is None else input_grad + dx
        else:
            grads[i - 1] = dx if grads[i - 1] is None else grads[i - 1] + dx

    return input_grad, weight_grads


def backward_to_input(model: ModelGraph, trace: ForwardTrace) -> np.ndarray:
    """Gradient of the pre-sigmoid logit with respect to the input,
    as float32 with the input's shape."""
    input_grad, _ = backward(model, trace, seed=1.0, want_input=True)
    return input_grad.astype(np.float32)
