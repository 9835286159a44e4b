"""Minimal differentiable CNN engine.

Loads PVE1 model containers, runs forward inference, and backpropagates
the scalar pre-sigmoid logit to the input image. Weights are stored as
float32; all arithmetic runs at float64.
"""

from .errors import (
    ChecksumMismatchError,
    EngineError,
    MalformedContainerError,
    ShapeInferenceError,
    ShapeMismatchError,
    TraceMismatchError,
    UnsupportedLayerError,
    WeightSliceError,
)
from .graph import (
    ADD_SKIP,
    CONV2D,
    DENSE,
    GLOBAL_AVG_POOL,
    LAYER_KINDS,
    MAXPOOL2D,
    RELU,
    SIGMOID_OUTPUT,
    ForwardTrace,
    LayerSpec,
    ModelGraph,
    backward,
    backward_to_input,
    forward,
    infer_shapes,
)
from .layers import sigmoid
from .container import load_model, read_model, save_model, write_model

__all__ = [
    "ADD_SKIP", "CONV2D", "DENSE", "GLOBAL_AVG_POOL", "LAYER_KINDS",
    "MAXPOOL2D", "RELU", "SIGMOID_OUTPUT",
    "ChecksumMismatchError", "EngineError", "ForwardTrace", "LayerSpec",
    "MalformedContainerError", "ModelGraph", "ShapeInferenceError",
    "ShapeMismatchError", "TraceMismatchError", "UnsupportedLayerError",
    "WeightSliceError",
    "backward", "backward_to_input", "forward", "infer_shapes",
    "load_model", "read_model", "save_model", "sigmoid", "write_model",
]
