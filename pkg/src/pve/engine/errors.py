"""Engine error types.

Every structural failure names the layer index it was detected at, so
callers can report exactly which part of a model graph is broken.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine failures."""


class MalformedContainerError(EngineError):
    """Container bytes do not follow the PVE1 layout or header schema."""


class ChecksumMismatchError(EngineError):
    """Container CRC32 trailer does not match the stored payload."""


class UnsupportedLayerError(EngineError):
    def __init__(self, layer_index: int, kind: str):
        super().__init__(f"layer {layer_index}: unsupported kind {kind!r}")
        self.layer_index = layer_index
        self.kind = kind


class WeightSliceError(EngineError):
    def __init__(self, layer_index: int, message: str):
        super().__init__(f"layer {layer_index}: {message}")
        self.layer_index = layer_index


class ShapeInferenceError(EngineError):
    def __init__(self, layer_index: int, message: str):
        super().__init__(f"layer {layer_index}: {message}")
        self.layer_index = layer_index


class ShapeMismatchError(EngineError):
    """Input tensor shape does not match the model's declared input shape."""


class TraceMismatchError(EngineError):
    """A forward trace was paired with a model it was not produced by."""
