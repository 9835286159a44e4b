"""HTTP facade: submit images, get predictions and overlays.

One immutable model is shared by every request; handlers allocate all
per-request state, so any number of detections can run concurrently.
Request bodies are never persisted and image content is never logged.
"""

from __future__ import annotations

import base64
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import preprocess as pp
from .detector import DetectorConfig, LABEL_AI, classify
from .engine import EngineError, ModelGraph, forward, read_model
from .reference import build_default_model
from .saliency import COLORMAPS, blend, colorize, upscale_map, vanilla_gradient

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8597
MAX_BATCH = 64


@dataclass
class ServiceConfig:
    model_path: Optional[str] = None
    max_body_bytes: int = 20 * 1024 * 1024
    threshold: float = 0.5
    alpha: float = 0.45
    colormap: str = "inferno"
    saliency_positive_only: bool = True
    cors_origins: list[str] = field(default_factory=lambda: ["*"])
    host: str = DEFAULT_HOST
    port: int = DEFAULT_PORT


def detect_one(model: ModelGraph, data: bytes, threshold: float,
               want_saliency: bool, alpha: float, colormap: str,
               positive_only: bool = True) -> dict:
    """Full single-image pipeline with per-stage wall-clock micros."""
    t0 = time.perf_counter_ns()
    raw = pp.decode_image(data)
    t1 = time.perf_counter_ns()
    tensor = pp.normalize(pp.resize_bilinear(raw))
    t2 = time.perf_counter_ns()
    trace = forward(model, tensor)
    t3 = time.perf_counter_ns()

    probability = trace.probability
    label = classify(probability, DetectorConfig(threshold=threshold))
    response = {
        "probability": probability,
        "label": label,
        "threshold": threshold,
        "model": {"name": model.name, "version": model.version},
        "timings": {
            "decode_micros": (t1 - t0) // 1000,
            "preprocess_micros": (t2 - t1) // 1000,
            "forward_micros": (t3 - t2) // 1000,
            "saliency_micros": 0,
        },
    }

    if want_saliency and (label == LABEL_AI or not positive_only):
        t4 = time.perf_counter_ns()
        smap = vanilla_gradient(model, tensor, trace=trace)
        upscaled = upscale_map(smap, raw.width, raw.height)
        overlay = blend(raw, colorize(upscaled, colormap), alpha)
        png = pp.encode_png(overlay)
        response["timings"]["saliency_micros"] = (time.perf_counter_ns() - t4) // 1000
        response["overlay_png_base64"] = base64.b64encode(png).decode("ascii")
    return response


def create_app(config: Optional[ServiceConfig] = None,
               model: Optional[ModelGraph] = None) -> FastAPI:
    config = config or ServiceConfig()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if app.state.model is None:
            if config.model_path:
                app.state.model = read_model(config.model_path)
            else:
                app.state.model = build_default_model()
        yield

    app = FastAPI(title="pve", docs_url=None, redoc_url=None, lifespan=lifespan)
    app.state.config = config
    app.state.model = model

    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.cors_origins,
        allow_credentials=False,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def require_model() -> ModelGraph:
        current = app.state.model
        if current is None:
            raise HTTPException(status_code=503, detail="model not loaded")
        return current

    def check_params(threshold: Optional[float], alpha: Optional[float],
                     colormap: Optional[str]) -> tuple[float, float, str]:
        threshold = config.threshold if threshold is None else threshold
        alpha = config.alpha if alpha is None else alpha
        colormap = config.colormap if colormap is None else colormap
        if not 0.0 < threshold < 1.0:
            raise HTTPException(status_code=422, detail=f"threshold {threshold} outside (0, 1)")
        if not 0.0 <= alpha <= 1.0:
            raise HTTPException(status_code=422, detail=f"alpha {alpha} outside [0, 1]")
        if colormap not in COLORMAPS:
            raise HTTPException(
                status_code=422,
                detail=f"unknown colormap {colormap!r}, have {sorted(COLORMAPS)}")
        return threshold, alpha, colormap

    def run_detect(model: ModelGraph, data: bytes, threshold: float,
                   want_saliency: bool, alpha: float, colormap: str) -> dict:
        if len(data) > config.max_body_bytes:
            raise HTTPException(
                status_code=413,
                detail=f"image of {len(data)} bytes exceeds limit {config.max_body_bytes}")
        if not data:
            raise HTTPException(status_code=400, detail="empty image payload")
        try:
            return detect_one(model, data, threshold, want_saliency, alpha, colormap,
                              positive_only=config.saliency_positive_only)
        except pp.DecodeError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except EngineError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc

    @app.get("/v1/health")
    def health() -> dict:
        require_model()
        return {"status": "ok"}

    @app.get("/v1/model")
    def model_info() -> dict:
        current = require_model()
        return {
            "name": current.name,
            "version": current.version,
            "input_shape": list(current.input_shape),
            "n_ai": current.n_ai,
            "n_human": current.n_human,
            "threshold": config.threshold,
        }

    @app.post("/v1/detect")
    async def detect(request: Request, saliency: bool = True,
                     threshold: Optional[float] = None,
                     alpha: Optional[float] = None,
                     colormap: Optional[str] = None) -> dict:
        model = require_model()
        threshold, alpha, colormap = check_params(threshold, alpha, colormap)
        length = request.headers.get("content-length")
        if length and length.isdigit() and int(length) > config.max_body_bytes:
            raise HTTPException(status_code=413, detail="request body exceeds limit")

        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            uploads = [item for _, item in form.multi_items() if hasattr(item, "read")]
            if not uploads:
                raise HTTPException(status_code=400, detail="multipart body has no file part")
            data = await uploads[0].read()
        else:
            data = await request.body()

        return await run_in_threadpool(
            run_detect, model, data, threshold, saliency, alpha, colormap)

    @app.post("/v1/detect/batch")
    async def detect_batch(request: Request, saliency: bool = True,
                           threshold: Optional[float] = None,
                           alpha: Optional[float] = None,
                           colormap: Optional[str] = None) -> JSONResponse:
        model = require_model()
        threshold, alpha, colormap = check_params(threshold, alpha, colormap)
        form = await request.form()
        uploads = [item for _, item in form.multi_items() if hasattr(item, "read")]
        if not uploads:
            raise HTTPException(status_code=400, detail="batch needs at least one file part")
        if len(uploads) > MAX_BATCH:
            raise HTTPException(
                status_code=413, detail=f"batch of {len(uploads)} exceeds limit {MAX_BATCH}")

        results = []
        for upload in uploads:
            data = await upload.read()
            try:
                results.append(await run_in_threadpool(
                    run_detect, model, data, threshold, saliency, alpha, colormap))
            except HTTPException as exc:
                results.append({"error": {"status": exc.status_code, "detail": exc.detail}})
        return JSONResponse(results)

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
