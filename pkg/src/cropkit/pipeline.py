"""Single entry point shared by the CLI and the HTTP service, so both
front ends produce identical responses for identical logical requests."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .baselines import EdgeMode, baseline_crop
from .geometry import CropBox, Dims
from .heatmaps import Heatmap
from .optimizer import OptimizerConfig, SearchTrace, optimize
from .proposals import DEFAULT_K_END, DEFAULT_K_START, exhaustive_search, generate_proposals
from .scoring import (
    DEFAULT_ALPHA,
    LayoutConstraint,
    ScoreBreakdown,
    ScoreWeights,
    build_integral,
    crop_scorer,
    score_crop,
    v_layout,
)

METHODS = ("heatmap", "proposal", "baseline_short", "baseline_long")


@dataclass
class CropRequest:
    """A fully resolved cropping job: the heatmap is already loaded and the
    layout regions are validated against the image dimensions."""

    heatmap: Heatmap
    image_dims: Dims
    omega: float
    layout: list[tuple[CropBox, float]] = field(default_factory=list)
    method: str = "heatmap"
    alpha: float = DEFAULT_ALPHA
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    k_start: int = DEFAULT_K_START
    k_end: int = DEFAULT_K_END
    include_trace: bool = False

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {METHODS}")
        for region, _ in self.layout:
            if not region.fits(self.image_dims):
                raise ValueError(f"layout region {region} exceeds image {self.image_dims}")
        if not self.omega > 0:
            raise ValueError(f"aspect ratio must be positive, got {self.omega}")

    def constraint(self) -> LayoutConstraint | None:
        if not self.layout:
            return None
        regions = [r for r, _ in self.layout]
        weights = [w for _, w in self.layout]
        return LayoutConstraint(regions, weights, dims=self.image_dims)


@dataclass
class CropResponse:
    box: CropBox
    breakdown: ScoreBreakdown
    recall: float
    elapsed: float
    trace: SearchTrace | None = None

    def to_json(self) -> dict:
        out = {
            "box": self.box.to_json(),
            "breakdown": self.breakdown.to_json(),
            "recall": self.recall,
            "elapsed": self.elapsed,
        }
        if self.trace is not None:
            out["trace_len"] = len(self.trace.evaluations)
        return out


def run_crop(request: CropRequest) -> CropResponse:
    """Run the selected method and assemble the response. Raises
    InfeasibleSearchSpace / EmptyProposalSet when no valid crop exists."""
    phi = request.constraint()
    weights = ScoreWeights(alpha=request.alpha)
    ii = build_integral(request.heatmap)
    trace: SearchTrace | None = None

    start = time.perf_counter()
    if request.method == "heatmap":
        scorer = crop_scorer(ii, phi, weights, request.image_dims)
        box, breakdown, trace = optimize(scorer, request.image_dims, request.omega, request.optimizer)
    elif request.method == "proposal":
        scorer = crop_scorer(ii, phi, weights, request.image_dims)
        proposals = generate_proposals(request.image_dims, request.omega, request.k_start, request.k_end)
        box, breakdown = exhaustive_search(scorer, proposals)
    else:
        mode = EdgeMode.SHORT if request.method == "baseline_short" else EdgeMode.LONG
        box = baseline_crop(request.heatmap, phi, request.omega, mode, request.image_dims)
        breakdown = score_crop(ii, phi, weights, box, request.image_dims)
    elapsed = time.perf_counter() - start

    if phi is not None and phi.has_inclusion:
        recall = v_layout(phi, box)
    else:
        recall = 1.0
    return CropResponse(
        box=box,
        breakdown=breakdown,
        recall=recall,
        elapsed=elapsed,
        trace=trace if request.include_trace else None,
    )
