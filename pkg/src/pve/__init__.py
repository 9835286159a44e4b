"""pve: real-time AI-generated image detection with gradient saliency.

A compact CNN engine (forward + input gradients), the image pipeline
around it, dataset/training tooling, a benchmark harness, an HTTP
service, and an operator CLI.
"""

from . import bench, datakit, detector, engine, preprocess, reference, saliency, service
from .detector import DetectorConfig, Prediction, classify, init_output_bias, predict
from .engine import ModelGraph, backward_to_input, forward, load_model, save_model
from .preprocess import RawImage, decode_image, normalize, preprocess as preprocess_bytes, resize_bilinear
from .reference import build_compact_detector, build_default_model
from .saliency import OverlayConfig, SaliencyMap, blend, colorize, explain, upscale_map, vanilla_gradient

__version__ = "0.1.0"

__all__ = [
    "DetectorConfig", "ModelGraph", "OverlayConfig", "Prediction", "RawImage",
    "SaliencyMap", "backward_to_input", "bench", "blend", "build_compact_detector",
    "build_default_model", "classify", "colorize", "datakit", "decode_image",
    "detector", "engine", "explain", "forward", "init_output_bias", "load_model",
    "normalize", "predict", "preprocess", "preprocess_bytes", "reference",
    "resize_bilinear", "saliency", "save_model", "service", "upscale_map",
    "vanilla_gradient",
]
