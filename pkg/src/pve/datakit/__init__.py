"""Dataset tooling: manifests, stratified splits, augmentation,
desk-scale training, and metric evaluation."""

from .augment import AugmentConfig, adjust_contrast, augment, hflip, rotate_bilinear
from .manifest import DatasetManifest, ManifestEntry
from .metrics import Metrics, evaluate, metrics_from_probabilities
from .split import (
    RATIOS,
    SPLIT_NAMES,
    TEST,
    TRAIN,
    VAL,
    ClassTooSmallError,
    SplitAssignment,
    stratified_split,
)
from .synth import generate_synthetic_corpus, synthetic_image
from .train import TrainingDivergedError, TrainResult, kaiming_init, train_toy

__all__ = [
    "AugmentConfig", "ClassTooSmallError", "DatasetManifest", "ManifestEntry",
    "Metrics", "RATIOS", "SPLIT_NAMES", "SplitAssignment", "TEST", "TRAIN",
    "TrainResult", "TrainingDivergedError", "VAL",
    "adjust_contrast", "augment", "evaluate", "generate_synthetic_corpus",
    "hflip", "kaiming_init", "metrics_from_probabilities", "rotate_bilinear",
    "stratified_split", "synthetic_image", "train_toy",
]
