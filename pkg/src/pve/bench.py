"""Latency benchmark harness.

Times the per-image pipeline stage by stage (preprocess, forward,
saliency, end-to-end) over repeated runs, excluding warmup iterations,
and reports nearest-rank percentiles alongside the raw samples and the
hardware the run happened on.
"""

from __future__ import annotations

import math
import os
import platform
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from . import preprocess as pp
from .engine import ModelGraph, forward
from .saliency import vanilla_gradient

STAGE_ALL = "all"
STAGE_FORWARD = "forward"
STAGE_SALIENCY = "saliency"
STAGES = (STAGE_ALL, STAGE_FORWARD, STAGE_SALIENCY)

PERCENTILE_METHOD = "nearest-rank"
SYNTHETIC_SEED = 0xBE7C


def nearest_rank_percentile(samples: list, p: float):
    """Value at the ceil(p/100 * n)-th position of the sorted samples."""
    if not samples:
        raise ValueError("no samples")
    if not 0.0 < p <= 100.0:
        raise ValueError(f"percentile {p} outside (0, 100]")
    ordered = sorted(samples)
    rank = math.ceil(p / 100.0 * len(ordered))
    return ordered[rank - 1]


def stage_stats(samples: list[int]) -> dict:
    return {
        "p50": nearest_rank_percentile(samples, 50),
        "p90": nearest_rank_percentile(samples, 90),
        "p95": nearest_rank_percentile(samples, 95),
        "mean": statistics.fmean(samples),
        "stddev": statistics.pstdev(samples),
        "min": min(samples),
        "max": max(samples),
    }


def hardware_string() -> str:
    cpu = platform.processor() or platform.machine() or "unknown-cpu"
    return f"{cpu}, {os.cpu_count()} logical cores, {platform.system()} {platform.release()}"


@dataclass
class BenchmarkReport:
    model_name: str
    input_description: str
    iterations: int
    warmup: int
    stage: str
    hardware: str = field(default_factory=hardware_string)
    percentile_method: str = PERCENTILE_METHOD
    samples: dict[str, list[int]] = field(default_factory=dict)

    def stats(self) -> dict[str, dict]:
        return {name: stage_stats(vals) for name, vals in self.samples.items() if vals}

    def to_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "input_description": self.input_description,
            "iterations": self.iterations,
            "warmup": self.warmup,
            "stage": self.stage,
            "hardware": self.hardware,
            "percentile_method": self.percentile_method,
            "unit": "microseconds",
            "samples": self.samples,
            "stats": self.stats(),
        }


def synthetic_input(seed: int = SYNTHETIC_SEED, size: int = 256) -> pp.RawImage:
    """Fixed-seed noise image: content-independent timing input."""
    rng = np.random.default_rng(seed)
    pixels = rng.integers(0, 256, size=(size, size, 3), dtype=np.uint8)
    return pp.RawImage.from_array(pixels)


def run_benchmark(model: ModelGraph, raw: pp.RawImage, iters: int = 100,
                  warmup: int = 10, stage: str = STAGE_ALL,
                  input_description: str = "synthetic noise 256x256") -> BenchmarkReport:
    """Sequential timing loop; warmup iterations run the same work but
    are excluded from the recorded samples."""
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if warmup < 0:
        raise ValueError("warmup must be >= 0")
    if stage not in STAGES:
        raise ValueError(f"stage {stage!r} not in {STAGES}")

    samples: dict[str, list[int]] = {
        "preprocess": [], "forward": [], "saliency": [], "end_to_end": [],
    }

    for i in range(warmup + iters):
        record = i >= warmup
        if stage == STAGE_SALIENCY:
            tensor = pp.normalize(pp.resize_bilinear(raw))
            trace = forward(model, tensor)
            t0 = time.perf_counter_ns()
            vanilla_gradient(model, tensor, trace=trace)
            t1 = time.perf_counter_ns()
            if record:
                samples["saliency"].append((t1 - t0) // 1000)
                samples["end_to_end"].append((t1 - t0) // 1000)
            continue

        t0 = time.perf_counter_ns()
        tensor = pp.normalize(pp.resize_bilinear(raw))
        t1 = time.perf_counter_ns()
        trace = forward(model, tensor)
        t2 = time.perf_counter_ns()
        if stage == STAGE_ALL:
            vanilla_gradient(model, tensor, trace=trace)
        t3 = time.perf_counter_ns()
        if record:
            samples["preprocess"].append((t1 - t0) // 1000)
            samples["forward"].append((t2 - t1) // 1000)
            if stage == STAGE_ALL:
                samples["saliency"].append((t3 - t2) // 1000)
            samples["end_to_end"].append((t3 - t0) // 1000)

    return BenchmarkReport(
        model_name=model.name,
        input_description=input_description,
        iterations=iters,
        warmup=warmup,
        stage=stage,
        samples=samples,
    )
