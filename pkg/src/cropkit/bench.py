"""Evaluation harness: run a cropping method over a benchmark, report mean
IoU and per-crop wall time, and sweep single parameters the way the
hyperparameter tables do.

A cropping method is any callable (benchmark tuple, heatmap) -> CropBox; a
heatmap provider is any callable image_id -> Heatmap (or None when it
cannot serve that id). Timing covers the crop call only, never heatmap
construction, so numbers across methods are comparable in kind.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .baselines import EdgeMode, baseline_crop
from .dataset import BenchmarkTuple
from .geometry import CropBox, Dims, iou
from .heatmaps import Heatmap
from .optimizer import OptimizerConfig, optimize
from .proposals import DEFAULT_K_END, DEFAULT_K_START, exhaustive_search, generate_proposals
from .scoring import (
    DEFAULT_ALPHA,
    LayoutConstraint,
    ScoreWeights,
    build_integral,
    crop_scorer,
    v_layout,
)

CropMethod = Callable[[BenchmarkTuple, Heatmap], CropBox]
HeatmapProvider = Callable[[str], "Heatmap | None"]

SWEEP_PARAMS = ("iterations", "k_range", "alpha", "step_granularity")


class MissingHeatmap(KeyError):
    """The provider has no heatmap for a benchmark image id."""


@dataclass(frozen=True)
class ItemResult:
    item_id: str
    iou: float
    recall: float
    elapsed_s: float


@dataclass(frozen=True)
class EvalReport:
    method_id: str
    mean_iou: float
    mean_recall: float
    mean_elapsed: float
    per_item: tuple[ItemResult, ...]

    def to_csv(self) -> str:
        lines = ["id,iou,recall,elapsed_s"]
        for item in self.per_item:
            lines.append(f"{item.item_id},{item.iou:.6f},{item.recall:.6f},{item.elapsed_s:.6f}")
        lines.append(
            f"# mean,{self.mean_iou:.6f},{self.mean_recall:.6f},{self.mean_elapsed:.6f}"
        )
        return "\n".join(lines) + "\n"


def evaluate(
    method: CropMethod,
    tuples: Sequence[BenchmarkTuple],
    provider: HeatmapProvider,
    method_id: str = "method",
) -> EvalReport:
    """Run the method on every benchmark tuple and aggregate IoU against the
    ground truth, layout recall of the output, and per-crop wall time."""
    if not tuples:
        raise ValueError("benchmark is empty")
    items: list[ItemResult] = []
    for index, t in enumerate(tuples):
        heatmap = provider(t.image_id)
        if heatmap is None:
            raise MissingHeatmap(t.image_id)
        start = time.perf_counter()
        box = method(t, heatmap)
        elapsed = time.perf_counter() - start
        phi = LayoutConstraint([t.layout_box], dims=t.dims)
        items.append(
            ItemResult(
                item_id=f"{t.image_id}#{index}",
                iou=iou(box, t.gt_box),
                recall=v_layout(phi, box),
                elapsed_s=elapsed,
            )
        )
    n = len(items)
    return EvalReport(
        method_id=method_id,
        mean_iou=sum(i.iou for i in items) / n,
        mean_recall=sum(i.recall for i in items) / n,
        mean_elapsed=sum(i.elapsed_s for i in items) / n,
        per_item=tuple(items),
    )


@dataclass(frozen=True)
class MethodConfig:
    """Everything needed to instantiate any of the built-in methods."""

    name: str = "heatmap"
    alpha: float = DEFAULT_ALPHA
    optimizer: OptimizerConfig = OptimizerConfig()
    k_start: int = DEFAULT_K_START
    k_end: int = DEFAULT_K_END

    def weights(self) -> ScoreWeights:
        return ScoreWeights(alpha=self.alpha)


def _constraint(t: BenchmarkTuple) -> LayoutConstraint:
    return LayoutConstraint([t.layout_box], dims=t.dims)


def make_method(config: MethodConfig) -> CropMethod:
    """Build a cropping method from its configuration.

    Known names: heatmap (budgeted search), proposal (exhaustive grid),
    baseline_short / baseline_long (saliency re-framing; the provider's
    heatmap doubles as the saliency map), oracle (returns the ground truth,
    for harness self-checks).
    """
    name = config.name

    if name == "oracle":
        return lambda t, heatmap: t.gt_box

    if name == "heatmap":

        def run_heatmap(t: BenchmarkTuple, heatmap: Heatmap) -> CropBox:
            scorer = crop_scorer(build_integral(heatmap), _constraint(t), config.weights(), t.dims)
            # Item-specific seeds keep runs independent yet reproducible.
            cfg = replace(config.optimizer, seed=config.optimizer.seed + _item_salt(t))
            box, _, _ = optimize(scorer, t.dims, float(t.omega), cfg)
            return box

        return run_heatmap

    if name == "proposal":

        def run_proposal(t: BenchmarkTuple, heatmap: Heatmap) -> CropBox:
            scorer = crop_scorer(build_integral(heatmap), _constraint(t), config.weights(), t.dims)
            proposals = generate_proposals(t.dims, float(t.omega), config.k_start, config.k_end)
            box, _ = exhaustive_search(scorer, proposals)
            return box

        return run_proposal

    if name in ("baseline_short", "baseline_long"):
        mode = EdgeMode.SHORT if name == "baseline_short" else EdgeMode.LONG

        def run_baseline(t: BenchmarkTuple, heatmap: Heatmap) -> CropBox:
            return baseline_crop(heatmap, _constraint(t), float(t.omega), mode, t.dims)

        return run_baseline

    raise ValueError(f"unknown method {name!r}")


def _item_salt(t: BenchmarkTuple) -> int:
    # Stable across runs; independent of list position.
    import zlib

    key = f"{t.image_id}:{t.gt_box.to_json()}:{t.layout_box.to_json()}"
    return zlib.crc32(key.encode())


def sweep(
    parameter: str,
    values: Iterable,
    config: MethodConfig,
    tuples: Sequence[BenchmarkTuple],
    provider: HeatmapProvider,
) -> list[tuple[object, EvalReport]]:
    """One evaluation per parameter value, holding everything else fixed.

    Supported parameters: iterations, k_range (pairs or "start:end"
    strings), alpha, step_granularity.
    """
    if parameter not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {parameter!r}, expected one of {SWEEP_PARAMS}")
    rows: list[tuple[object, EvalReport]] = []
    for value in values:
        cfg = _apply_sweep_value(config, parameter, value)
        report = evaluate(
            make_method(cfg), tuples, provider, method_id=f"{cfg.name}[{parameter}={value}]"
        )
        rows.append((value, report))
    return rows


def _apply_sweep_value(config: MethodConfig, parameter: str, value) -> MethodConfig:
    if parameter == "iterations":
        return replace(config, optimizer=replace(config.optimizer, iterations=int(value)))
    if parameter == "step_granularity":
        return replace(config, optimizer=replace(config.optimizer, step_granularity=float(value)))
    if parameter == "alpha":
        return replace(config, alpha=float(value))
    if isinstance(value, str):
        start, end = (int(tok) for tok in value.split(":"))
    else:
        start, end = (int(v) for v in value)
    return replace(config, k_start=start, k_end=end)


def sweep_csv(parameter: str, rows: list[tuple[object, EvalReport]]) -> str:
    lines = [f"{parameter},mean_iou,mean_recall,mean_elapsed_s"]
    for value, report in rows:
        lines.append(
            f"{value},{report.mean_iou:.6f},{report.mean_recall:.6f},{report.mean_elapsed:.6f}"
        )
    return "\n".join(lines) + "\n"


def report_table(reports: Sequence[EvalReport]) -> str:
    """Plain-text methods-comparison table: one row per evaluated method."""
    header = ("Methods", "IoU", "time[s]")
    body = [
        (r.method_id, f"{r.mean_iou:.4f}", f"{r.mean_elapsed:.4f}") for r in reports
    ]
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(3)]
    fmt = f"{{:<{widths[0]}}}  {{:>{widths[1]}}}  {{:>{widths[2]}}}"
    return "\n".join(fmt.format(*row) for row in [header, *body]) + "\n"


def sweep_table(parameter: str, rows: list[tuple[object, EvalReport]]) -> str:
    """Plain-text table mirroring the hyperparameter-study layout."""
    header = (parameter, "IoU", "recall", "time[s]")
    body = [
        (str(value), f"{r.mean_iou:.4f}", f"{r.mean_recall:.4f}", f"{r.mean_elapsed:.4f}")
        for value, r in rows
    ]
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(4)]
    fmt = "  ".join(f"{{:>{w}}}" for w in widths)
    return "\n".join(fmt.format(*row) for row in [header, *body]) + "\n"


def write_overlay(
    path: str | Path,
    dims: Dims,
    heatmap: Heatmap | None = None,
    gt: CropBox | None = None,
    layout: Sequence[CropBox] = (),
    prediction: CropBox | None = None,
) -> None:
    """Render boxes over the heatmap (or a dark background): ground truth in
    blue, layout regions in red, the predicted crop in green."""
    import numpy as np
    from PIL import Image, ImageDraw

    from .heatmaps import resample

    if heatmap is not None:
        gray = np.rint(resample(heatmap.values, dims) * 255.0).astype(np.uint8)
    else:
        gray = np.full((dims.height, dims.width), 32, dtype=np.uint8)
    img = Image.fromarray(gray, mode="L").convert("RGB")
    draw = ImageDraw.Draw(img)

    def outline(box: CropBox, color: tuple[int, int, int]) -> None:
        draw.rectangle((box.x, box.y, box.x2 - 1, box.y2 - 1), outline=color, width=2)

    if gt is not None:
        outline(gt, (64, 96, 255))
    for region in layout:
        outline(region, (255, 64, 64))
    if prediction is not None:
        outline(prediction, (64, 220, 96))
    img.save(path)
