"""Operator command line: detection, overlays, dataset ops, training,
benchmarking, and serving."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import bench as benchmod
from . import datakit
from . import preprocess as pp
from .detector import DetectorConfig, LABEL_AI, predict
from .engine import EngineError, read_model, write_model
from .reference import build_compact_detector, build_default_model
from .saliency import COLORMAPS, OverlayConfig, explain
from .service import DEFAULT_HOST, DEFAULT_PORT, ServiceConfig, serve as run_service

EXIT_HUMAN = 0
EXIT_ERROR = 1
EXIT_AI = 2


def _load_model(path: str | None):
    return read_model(path) if path else build_default_model()


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_ERROR)


@click.group()
def main() -> None:
    """AI-generated image detection with gradient saliency overlays."""


@main.command()
@click.argument("image", type=click.Path())
@click.option("--model", "model_path", type=click.Path(), help="Model container path.")
@click.option("--threshold", type=float, default=0.5, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit JSON on stdout.")
def detect(image: str, model_path: str | None, threshold: float, as_json: bool) -> None:
    """Classify one image; exit 0 for human, 2 for ai, 1 on error."""
    try:
        data = Path(image).read_bytes()
        model = _load_model(model_path)
        prediction = predict(model, data, DetectorConfig(threshold=threshold))
    except (OSError, ValueError, pp.DecodeError, EngineError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps({
            "probability": prediction.probability,
            "label": prediction.label,
            "threshold": prediction.threshold,
            "inference_micros": prediction.inference_micros,
        }))
    else:
        click.echo(f"probability {prediction.probability:.5f} -> {prediction.label} "
                   f"(threshold {prediction.threshold}, "
                   f"{prediction.inference_micros} us)")
    sys.exit(EXIT_AI if prediction.label == LABEL_AI else EXIT_HUMAN)


@main.command()
@click.argument("image", type=click.Path())
@click.option("-o", "--output", required=True, type=click.Path())
@click.option("--model", "model_path", type=click.Path())
@click.option("--alpha", type=float, default=0.45, show_default=True)
@click.option("--colormap", type=click.Choice(sorted(COLORMAPS)), default="inferno",
              show_default=True)
@click.option("--threshold", type=float, default=0.5, show_default=True)
@click.option("--force", is_flag=True,
              help="Overlay even when the image is classified as human.")
@click.option("--json", "as_json", is_flag=True)
def overlay(image: str, output: str, model_path: str | None, alpha: float,
            colormap: str, threshold: float, force: bool, as_json: bool) -> None:
    """Write the saliency overlay PNG for an image (pass-through copy of
    the decoded image when it is classified human and --force is absent)."""
    try:
        data = Path(image).read_bytes()
        model = _load_model(model_path)
        result = explain(
            model, data,
            overlay_config=OverlayConfig(alpha=alpha, colormap=colormap),
            detector_config=DetectorConfig(threshold=threshold,
                                           saliency_on_positive_only=not force),
        )
        Path(output).write_bytes(pp.encode_png(result.image))
    except (OSError, ValueError, pp.DecodeError, EngineError) as exc:
        _fail(str(exc))
    payload = {
        "output": output,
        "probability": result.prediction.probability,
        "label": result.prediction.label,
        "overlaid": result.overlaid,
        "width": result.image.width,
        "height": result.image.height,
    }
    if as_json:
        click.echo(json.dumps(payload))
    else:
        click.echo(f"{output}: {result.prediction.label} "
                   f"(p={result.prediction.probability:.5f}, "
                   f"overlay={'yes' if result.overlaid else 'no'})")


@main.command()
@click.option("--model", "model_path", type=click.Path())
@click.option("--iters", type=int, default=100, show_default=True)
@click.option("--warmup", type=int, default=10, show_default=True)
@click.option("--image", "image_path", type=click.Path(), help="Benchmark input image.")
@click.option("--synthetic", is_flag=True, help="Use the fixed-seed noise input (default).")
@click.option("--stage", type=click.Choice(benchmod.STAGES), default=benchmod.STAGE_ALL,
              show_default=True)
@click.option("--json", "as_json", is_flag=True)
def bench(model_path: str | None, iters: int, warmup: int, image_path: str | None,
          synthetic: bool, stage: str, as_json: bool) -> None:
    """Benchmark per-image latency and print percentile statistics."""
    try:
        model = _load_model(model_path)
        if image_path and not synthetic:
            raw = pp.decode_image(Path(image_path).read_bytes())
            description = f"{image_path} ({raw.width}x{raw.height})"
        else:
            raw = benchmod.synthetic_input()
            description = "synthetic noise 256x256"
        report = benchmod.run_benchmark(model, raw, iters=iters, warmup=warmup,
                                        stage=stage, input_description=description)
    except (OSError, ValueError, pp.DecodeError, EngineError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps(report.to_dict()))
        return
    click.echo(f"model: {report.model_name}  input: {report.input_description}")
    click.echo(f"hardware: {report.hardware}")
    click.echo(f"iterations: {report.iterations} (warmup {report.warmup}, excluded); "
               f"percentiles: {report.percentile_method}")
    header = f"{'stage':<12} {'p50':>9} {'p90':>9} {'p95':>9} {'mean':>10} {'stddev':>9}"
    click.echo(header)
    for name, stats in report.stats().items():
        click.echo(f"{name:<12} {stats['p50']:>7} us {stats['p90']:>7} us "
                   f"{stats['p95']:>7} us {stats['mean']:>8.1f} us {stats['stddev']:>7.1f} us")


@main.command()
@click.argument("manifest", type=click.Path())
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), help="Split file (default: stdout).")
@click.option("--by-source", is_flag=True, help="Stratify per (label, source) group.")
@click.option("--json", "as_json", is_flag=True)
def split(manifest: str, seed: int, out_path: str | None, by_source: bool,
          as_json: bool) -> None:
    """Compute a deterministic stratified 60/20/20 split of a manifest."""
    try:
        mf = datakit.DatasetManifest.read(manifest)
        assignment = datakit.stratified_split(mf, seed=seed, by_source=by_source)
    except (OSError, ValueError) as exc:
        _fail(str(exc))
    if out_path:
        assignment.write(out_path)
    counts = assignment.counts()
    if as_json:
        click.echo(json.dumps({"seed": seed, "counts": counts,
                               "out": out_path, "by_source": by_source}))
    elif not out_path:
        for path, name in assignment.by_path.items():
            click.echo(f"{path}\t{name}")
    else:
        click.echo(f"wrote {out_path}: {counts}")


@main.command()
@click.argument("manifest", type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Output model container.")
@click.option("--split-file", type=click.Path(), help="Existing split file to reuse.")
@click.option("--epochs", type=int, default=5, show_default=True)
@click.option("--lr", type=float, default=0.05, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--batch-size", type=int, default=16, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def train(manifest: str, out_path: str, split_file: str | None, epochs: int,
          lr: float, seed: int, batch_size: int, as_json: bool) -> None:
    """Train the compact detector on a manifest's training split."""
    try:
        mf = datakit.DatasetManifest.read(manifest)
        assignment = (datakit.SplitAssignment.read(split_file, seed=seed)
                      if split_file else datakit.stratified_split(mf, seed=seed))
        arch = build_compact_detector()
        result = datakit.train_toy(arch, mf, assignment, epochs=epochs, lr=lr,
                                   seed=seed, batch_size=batch_size)
        write_model(result.model, out_path)
    except (OSError, ValueError, datakit.TrainingDivergedError, EngineError) as exc:
        _fail(str(exc))
    payload = {
        "out": out_path,
        "epochs": epochs,
        "epoch_losses": result.epoch_losses,
        "train_n_ai": result.train_n_ai,
        "train_n_human": result.train_n_human,
    }
    if as_json:
        click.echo(json.dumps(payload))
    else:
        losses = ", ".join(f"{x:.4f}" for x in result.epoch_losses) or "none"
        click.echo(f"wrote {out_path}; epoch losses: {losses}")


@main.command(name="eval")
@click.argument("manifest", type=click.Path())
@click.option("--model", "model_path", type=click.Path())
@click.option("--split-file", type=click.Path())
@click.option("--split-name", type=click.Choice(datakit.SPLIT_NAMES), default=datakit.VAL,
              show_default=True)
@click.option("--threshold", type=float, default=0.5, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def eval_cmd(manifest: str, model_path: str | None, split_file: str | None,
             split_name: str, threshold: float, as_json: bool) -> None:
    """Evaluate a model over a manifest (optionally one split of it)."""
    try:
        mf = datakit.DatasetManifest.read(manifest)
        model = _load_model(model_path)
        assignment = datakit.SplitAssignment.read(split_file) if split_file else None
        metrics = datakit.evaluate(model, mf, split=assignment,
                                   split_name=split_name if assignment else None,
                                   threshold=threshold)
    except (OSError, ValueError, pp.DecodeError, EngineError) as exc:
        _fail(str(exc))
    payload = {
        "accuracy": metrics.accuracy,
        "precision": metrics.precision,
        "recall": metrics.recall,
        "loss": metrics.loss,
        "tp": metrics.tp, "fp": metrics.fp, "tn": metrics.tn, "fn": metrics.fn,
        "threshold": threshold,
    }
    if as_json:
        click.echo(json.dumps(payload))
    else:
        click.echo(f"accuracy {metrics.accuracy:.4f}  precision {metrics.precision:.4f}  "
                   f"recall {metrics.recall:.4f}  loss {metrics.loss:.4f}  "
                   f"(tp={metrics.tp} fp={metrics.fp} tn={metrics.tn} fn={metrics.fn})")


@main.command()
@click.argument("out_dir", type=click.Path())
@click.option("--count", type=int, default=1000, show_default=True)
@click.option("--size", type=int, default=128, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def synth(out_dir: str, count: int, size: int, seed: int, as_json: bool) -> None:
    """Generate the synthetic separable corpus with its manifest."""
    try:
        manifest = datakit.generate_synthetic_corpus(out_dir, count=count,
                                                     size=size, seed=seed)
    except (OSError, ValueError) as exc:
        _fail(str(exc))
    counts = manifest.label_counts()
    if as_json:
        click.echo(json.dumps({"out_dir": out_dir, "count": count, "size": size,
                               "seed": seed, "counts": counts}))
    else:
        click.echo(f"wrote {count} images under {out_dir} ({counts})")


@main.command(name="init-model")
@click.argument("out_path", type=click.Path())
@click.option("--init-seed", type=int, help="He-uniform weight init with this seed "
              "(default: zero weights with the shipped output bias).")
@click.option("--json", "as_json", is_flag=True)
def init_model(out_path: str, init_seed: int | None, as_json: bool) -> None:
    """Write the compact detector container to a file."""
    import numpy as np

    try:
        model = build_compact_detector()
        if init_seed is not None:
            weights64 = model.weights.astype("float64")
            datakit.kaiming_init(model, weights64, np.random.default_rng(init_seed))
            bias_spec = model.layers[model.output_bias_layer()]
            weights64[bias_spec.bias_offset] = model.weights[bias_spec.bias_offset]
            model.weights[:] = weights64.astype("float32")
        write_model(model, out_path)
    except (OSError, ValueError, EngineError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps({"out": out_path, "name": model.name,
                               "weights": int(model.weights.size)}))
    else:
        click.echo(f"wrote {out_path} ({model.name}, {model.weights.size} weights)")


@main.command()
@click.option("--host", default=DEFAULT_HOST, show_default=True)
@click.option("--port", type=int, default=DEFAULT_PORT, show_default=True)
@click.option("--model", "model_path", type=click.Path())
@click.option("--threshold", type=float, default=0.5, show_default=True)
@click.option("--alpha", type=float, default=0.45, show_default=True)
@click.option("--colormap", type=click.Choice(sorted(COLORMAPS)), default="inferno",
              show_default=True)
@click.option("--max-body-mib", type=int, default=20, show_default=True)
@click.option("--cors-origin", "cors_origins", multiple=True,
              help="Allowed CORS origin (repeatable; default '*').")
@click.option("--force-saliency", is_flag=True,
              help="Overlay every detection, not only positives.")
def serve(host: str, port: int, model_path: str | None, threshold: float, alpha: float,
          colormap: str, max_body_mib: int, cors_origins: tuple[str, ...],
          force_saliency: bool) -> None:
    """Run the detection HTTP service."""
    config = ServiceConfig(
        model_path=model_path,
        max_body_bytes=max_body_mib * 1024 * 1024,
        threshold=threshold,
        alpha=alpha,
        colormap=colormap,
        saliency_positive_only=not force_saliency,
        cors_origins=list(cors_origins) or ["*"],
        host=host,
        port=port,
    )
    run_service(config)


if __name__ == "__main__":
    main()
