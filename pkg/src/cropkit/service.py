"""HTTP service backing the interactive client.

Endpoints:
  POST /v1/crop     JSON crop request -> crop response
  POST /v1/heatmap  multipart image upload -> heuristic saliency PNG
  GET  /v1/health   liveness probe

Stateless: every request carries its own seed, so identical requests give
identical responses regardless of ordering or concurrency. Uploads are
capped at 16 MiB and oversized heatmaps are resampled down to a 256x256
scoring grid to bound per-request cost.
"""

from __future__ import annotations

import base64
import binascii
import io
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field, model_validator

from .geometry import AspectRatio, CropBox, Dims
from .heatmaps import (
    CorruptFile,
    PixelImage,
    UnsupportedFormat,
    heuristic_saliency,
    load_heatmap,
    load_heatmap_bytes,
    resample,
)
from .optimizer import InfeasibleSearchSpace, OptimizerConfig
from .pipeline import CropRequest, run_crop
from .proposals import DEFAULT_K_END, DEFAULT_K_START, EmptyProposalSet
from .scoring import DEFAULT_ALPHA, Heatmap

MAX_UPLOAD_BYTES = 16 * 1024 * 1024
MAX_SCORING_GRID = Dims(256, 256)


class BoxPayload(BaseModel):
    x: int = Field(ge=0)
    y: int = Field(ge=0)
    w: int = Field(ge=1)
    h: int = Field(ge=1)
    weight: float = 1.0


class CropPayload(BaseModel):
    heatmap_b64: str | None = None
    heatmap_path: str | None = None
    width: int = Field(ge=1)
    height: int = Field(ge=1)
    aspect: float | str
    layout: list[BoxPayload] = []
    method: str = "heatmap"
    alpha: float = DEFAULT_ALPHA
    iterations: int = Field(default=100, ge=1)
    strategy: str = "anneal"
    step_granularity: float = Field(default=32.0, ge=1)
    seed: int = Field(default=0, ge=0)
    k_start: int = DEFAULT_K_START
    k_end: int = DEFAULT_K_END
    include_trace: bool = False

    @model_validator(mode="after")
    def exactly_one_heatmap_source(self) -> "CropPayload":
        if (self.heatmap_b64 is None) == (self.heatmap_path is None):
            raise ValueError("provide exactly one of heatmap_b64 / heatmap_path")
        return self

    def omega(self) -> float:
        if isinstance(self.aspect, str):
            return float(AspectRatio.parse(self.aspect))
        return float(AspectRatio(self.aspect))


def _load_request_heatmap(payload: CropPayload) -> Heatmap:
    if payload.heatmap_path is not None:
        return load_heatmap(payload.heatmap_path)
    try:
        raw = base64.b64decode(payload.heatmap_b64, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise CorruptFile(f"heatmap_b64 is not valid base64: {exc}") from exc
    if len(raw) > MAX_UPLOAD_BYTES:
        raise _PayloadTooLarge()
    return load_heatmap_bytes(raw)


def _cap_grid(heatmap: Heatmap) -> Heatmap:
    if (
        heatmap.dims.width <= MAX_SCORING_GRID.width
        and heatmap.dims.height <= MAX_SCORING_GRID.height
    ):
        return heatmap
    scale = min(
        MAX_SCORING_GRID.width / heatmap.dims.width,
        MAX_SCORING_GRID.height / heatmap.dims.height,
    )
    out = Dims(
        max(1, round(heatmap.dims.width * scale)),
        max(1, round(heatmap.dims.height * scale)),
    )
    return Heatmap(out, np.clip(resample(heatmap.values, out), 0.0, 1.0))


class _PayloadTooLarge(Exception):
    pass


def create_app(static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="cropkit", version="0.1.0")

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": str(exc.errors()[:3])})

    @app.exception_handler(_PayloadTooLarge)
    async def too_large(request: Request, exc: _PayloadTooLarge) -> JSONResponse:
        return JSONResponse(status_code=413, content={"error": "upload exceeds 16 MiB"})

    @app.get("/v1/health", response_class=PlainTextResponse)
    async def health() -> str:
        return "ok"

    @app.post("/v1/crop")
    async def crop(request: Request, payload: CropPayload) -> JSONResponse:
        body = await request.body()
        if len(body) > MAX_UPLOAD_BYTES:
            raise _PayloadTooLarge()
        try:
            heatmap = _cap_grid(_load_request_heatmap(payload))
            crop_request = CropRequest(
                heatmap=heatmap,
                image_dims=Dims(payload.width, payload.height),
                omega=payload.omega(),
                layout=[(CropBox(b.x, b.y, b.w, b.h), b.weight) for b in payload.layout],
                method=payload.method,
                alpha=payload.alpha,
                optimizer=OptimizerConfig(
                    iterations=payload.iterations,
                    strategy=payload.strategy,
                    step_granularity=payload.step_granularity,
                    seed=payload.seed,
                ),
                k_start=payload.k_start,
                k_end=payload.k_end,
                include_trace=payload.include_trace,
            )
        except _PayloadTooLarge:
            raise
        except (ValueError, CorruptFile, UnsupportedFormat, OSError) as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        try:
            response = run_crop(crop_request)
        except (InfeasibleSearchSpace, EmptyProposalSet) as exc:
            return JSONResponse(status_code=422, content={"error": str(exc)})
        out = response.to_json()
        if crop_request.include_trace and response.trace is not None:
            out["trace"] = [
                {"iteration": i, "box": box.to_json(), "total": total}
                for i, (_, box, total) in enumerate(response.trace.evaluations)
            ]
        return JSONResponse(out)

    @app.post("/v1/heatmap")
    async def saliency(file: UploadFile, out_width: int = 64, out_height: int = 64) -> Response:
        data = await file.read()
        if len(data) > MAX_UPLOAD_BYTES:
            raise _PayloadTooLarge()
        try:
            from PIL import Image

            with Image.open(io.BytesIO(data)) as img:
                if img.mode in ("L", "1"):
                    arr = np.asarray(img.convert("L"), dtype=np.uint8)
                    pixels = PixelImage(Dims(arr.shape[1], arr.shape[0]), 1, arr)
                else:
                    arr = np.asarray(img.convert("RGB"), dtype=np.uint8)
                    pixels = PixelImage(Dims(arr.shape[1], arr.shape[0]), 3, arr)
            out_dims = Dims(out_width, out_height)
        except (ValueError, OSError) as exc:
            return JSONResponse(status_code=400, content={"error": f"bad image upload: {exc}"})
        heatmap = heuristic_saliency(pixels, out_dims)
        quantized = np.rint(heatmap.values * 255.0).astype(np.uint8)
        from PIL import Image as PILImage

        buf = io.BytesIO()
        PILImage.fromarray(quantized, mode="L").save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=Path(static_dir), html=True), name="static")

    return app
