"""Heatmap providers: file IO, annotation-derived pseudo-heatmaps, a
heuristic saliency map, and synthetic fixtures for verification.

Supported heatmap file formats:
  * 8-bit grayscale PNG or PGM, values mapped v/255 into [0, 1]
  * plain-text CSV with a one-line "H W" header followed by H comma
    separated rows of reals

All providers are pure given their inputs (and seed, where one applies).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .geometry import CropBox, Dims, scale_box
from .scoring import Heatmap

PSEUDO_HEATMAP_DIMS = Dims(64, 64)


class UnsupportedFormat(ValueError):
    """File extension or payload is not a recognized heatmap format."""


class CorruptFile(ValueError):
    """File matched a known format but its contents are invalid."""


@dataclass(frozen=True)
class AnnotationRecord:
    """Expert crop annotations for one image."""

    image_id: str
    dims: Dims
    gt_boxes: tuple[CropBox, ...]

    def __post_init__(self) -> None:
        if not self.gt_boxes:
            raise ValueError(f"record {self.image_id!r} has no boxes")
        for b in self.gt_boxes:
            if not b.fits(self.dims):
                raise ValueError(f"record {self.image_id!r}: box {b} exceeds {self.dims}")


@dataclass(frozen=True, eq=False)
class PixelImage:
    """Raw grayscale or RGB pixels, row-major uint8."""

    dims: Dims
    channels: int
    values: np.ndarray

    def __post_init__(self) -> None:
        expected = (self.dims.height, self.dims.width) + ((self.channels,) if self.channels > 1 else ())
        v = np.asarray(self.values, dtype=np.uint8)
        if self.channels not in (1, 3) or v.shape != expected:
            raise ValueError(f"pixel grid {v.shape} does not match {self.dims} x{self.channels}")
        object.__setattr__(self, "values", v)


def _parse_csv_heatmap(text: str, origin: str) -> Heatmap:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CorruptFile(f"{origin}: empty heatmap file")
    try:
        h, w = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise CorruptFile(f"{origin}: expected 'H W' header, got {lines[0]!r}") from exc
    if len(lines) - 1 != h:
        raise CorruptFile(f"{origin}: header says {h} rows, found {len(lines) - 1}")
    try:
        values = np.array([[float(tok) for tok in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise CorruptFile(f"{origin}: non-numeric cell") from exc
    if values.shape != (h, w):
        raise CorruptFile(f"{origin}: ragged rows, expected width {w}")
    if values.size and (values.min() < 0 or values.max() > 1):
        raise CorruptFile(f"{origin}: values outside [0, 1]")
    return Heatmap(Dims(w, h), values)


def _load_image_heatmap(path: Path) -> Heatmap:
    try:
        with Image.open(path) as img:
            gray = img.convert("L")
            values = np.asarray(gray, dtype=np.float64) / 255.0
    except Exception as exc:
        raise CorruptFile(f"{path}: {exc}") from exc
    h, w = values.shape
    return Heatmap(Dims(w, h), values)


def load_heatmap(path: str | Path) -> Heatmap:
    """Load a heatmap file, dispatching on the extension."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".csv":
        return _parse_csv_heatmap(path.read_text(), str(path))
    if suffix in (".png", ".pgm"):
        return _load_image_heatmap(path)
    raise UnsupportedFormat(f"{path}: unsupported heatmap format {suffix!r}")


def load_heatmap_bytes(data: bytes) -> Heatmap:
    """Load a heatmap from raw file bytes, sniffing the format."""
    import io

    if data[:8] == b"\x89PNG\r\n\x1a\n" or data[:2] in (b"P2", b"P5"):
        try:
            with Image.open(io.BytesIO(data)) as img:
                values = np.asarray(img.convert("L"), dtype=np.float64) / 255.0
        except Exception as exc:
            raise CorruptFile(str(exc)) from exc
        h, w = values.shape
        return Heatmap(Dims(w, h), values)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise UnsupportedFormat("payload is neither PNG, PGM, nor CSV text") from exc
    return _parse_csv_heatmap(text, "<inline>")


def save_heatmap(heatmap: Heatmap, path: str | Path) -> None:
    """Write a heatmap to PNG/PGM (8-bit quantized) or CSV (exact)."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".csv":
        lines = [f"{heatmap.dims.height} {heatmap.dims.width}"]
        for row in heatmap.values:
            lines.append(",".join(repr(float(v)) for v in row))
        path.write_text("\n".join(lines) + "\n")
        return
    if suffix in (".png", ".pgm"):
        quantized = np.rint(heatmap.values * 255.0).astype(np.uint8)
        Image.fromarray(quantized, mode="L").save(path)
        return
    raise UnsupportedFormat(f"{path}: unsupported heatmap format {suffix!r}")


def pseudo_heatmap(record: AnnotationRecord, out_dims: Dims = PSEUDO_HEATMAP_DIMS) -> Heatmap:
    """Average of the annotation boxes' indicator masks.

    Each cell holds (number of boxes covering it) / (number of boxes), after
    mapping the boxes onto the output grid, so values are exact multiples of
    1/N.
    """
    counts = np.zeros((out_dims.height, out_dims.width), dtype=np.float64)
    for box in record.gt_boxes:
        b = box if record.dims == out_dims else scale_box(box, record.dims, out_dims)
        counts[b.y : b.y2, b.x : b.x2] += 1.0
    return Heatmap(out_dims, counts / len(record.gt_boxes))


def _box_mean(values: np.ndarray, radius: int) -> np.ndarray:
    # Mean over a (2r+1)^2 window clipped at the borders, via prefix sums.
    h, w = values.shape
    prefix = np.zeros((h + 1, w + 1))
    np.cumsum(np.cumsum(values, axis=0), axis=1, out=prefix[1:, 1:])
    ys = np.arange(h)
    xs = np.arange(w)
    y1 = np.clip(ys - radius, 0, h)[:, None]
    y2 = np.clip(ys + radius + 1, 0, h)[:, None]
    x1 = np.clip(xs - radius, 0, w)[None, :]
    x2 = np.clip(xs + radius + 1, 0, w)[None, :]
    sums = prefix[y2, x2] - prefix[y1, x2] - prefix[y2, x1] + prefix[y1, x1]
    areas = (y2 - y1) * (x2 - x1)
    return sums / areas


def _axis_weights(n_in: int, n_out: int) -> np.ndarray:
    # Row-stochastic overlap weights for exact area-weighted resampling.
    weights = np.zeros((n_out, n_in))
    scale = n_in / n_out
    for o in range(n_out):
        lo, hi = o * scale, (o + 1) * scale
        for i in range(int(math.floor(lo)), min(int(math.ceil(hi)), n_in)):
            weights[o, i] = min(hi, i + 1) - max(lo, i)
    return weights / weights.sum(axis=1, keepdims=True)


def resample(values: np.ndarray, out_dims: Dims) -> np.ndarray:
    """Area-weighted resize of a value grid to a new resolution."""
    h, w = values.shape
    if (w, h) == (out_dims.width, out_dims.height):
        return values.copy()
    wy = _axis_weights(h, out_dims.height)
    wx = _axis_weights(w, out_dims.width)
    return wy @ values @ wx.T


def luminance(img: PixelImage) -> np.ndarray:
    """Rec. 601 luma in [0, 255] as float64."""
    v = img.values.astype(np.float64)
    if img.channels == 1:
        return v
    return 0.299 * v[:, :, 0] + 0.587 * v[:, :, 1] + 0.114 * v[:, :, 2]


def heuristic_saliency(img: PixelImage, out_dims: Dims) -> Heatmap:
    """Center-surround saliency: local brightness minus the wide-neighborhood
    mean, rectified and normalized so the maximum is 1 (all zeros for a
    constant image). Deterministic, no learned components."""
    lum = luminance(img)
    small = max(1, min(img.dims.width, img.dims.height) // 64)
    large = max(small * 4, min(img.dims.width, img.dims.height) // 8)
    response = np.clip(_box_mean(lum, small) - _box_mean(lum, large), 0.0, None)
    response = resample(response, out_dims)
    peak = response.max()
    if peak <= 1e-12:
        return Heatmap(out_dims, np.zeros((out_dims.height, out_dims.width)))
    return Heatmap(out_dims, response / peak)


def synth_planted(dims: Dims, planted: CropBox, noise_amp: float, seed: int) -> Heatmap:
    """Indicator heatmap of a planted box with bounded uniform noise:
    values in [1-noise_amp, 1] inside the box and [0, noise_amp] outside."""
    if not planted.fits(dims):
        raise ValueError(f"planted box {planted} exceeds {dims}")
    if not (0 <= noise_amp <= 0.5):
        raise ValueError(f"noise_amp must be in [0, 0.5], got {noise_amp}")
    rng = np.random.default_rng(seed)
    values = rng.uniform(0.0, 1.0, size=(dims.height, dims.width)) * noise_amp
    inside = values[planted.y : planted.y2, planted.x : planted.x2]
    values[planted.y : planted.y2, planted.x : planted.x2] = 1.0 - inside
    return Heatmap(dims, np.clip(values, 0.0, 1.0))


def load_image(path: str | Path) -> PixelImage:
    """Read a PNG/PPM/PGM image into raw pixels."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            if img.mode in ("L", "1", "I;16", "I"):
                arr = np.asarray(img.convert("L"), dtype=np.uint8)
                channels = 1
            else:
                arr = np.asarray(img.convert("RGB"), dtype=np.uint8)
                channels = 3
    except Exception as exc:
        raise CorruptFile(f"{path}: {exc}") from exc
    h, w = arr.shape[:2]
    return PixelImage(Dims(w, h), channels, arr)


def read_annotations(path: str | Path) -> list[AnnotationRecord]:
    """Read annotation records from JSONL, one record per line."""
    records = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            dims = Dims(int(obj["width"]), int(obj["height"]))
            boxes = tuple(CropBox.from_json(b) for b in obj["gt_boxes"])
            records.append(AnnotationRecord(str(obj["image_id"]), dims, boxes))
        except (KeyError, ValueError, TypeError) as exc:
            raise CorruptFile(f"{path}:{line_no}: {exc}") from exc
    return records


def write_annotations(records: list[AnnotationRecord], path: str | Path) -> None:
    lines = []
    for r in records:
        lines.append(
            json.dumps(
                {
                    "image_id": r.image_id,
                    "width": r.dims.width,
                    "height": r.dims.height,
                    "gt_boxes": [b.to_json() for b in r.gt_boxes],
                },
                separators=(",", ":"),
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")
