"""Crop score functions over aesthetic heatmaps and layout constraints.

A heatmap assigns each grid cell a value in [0, 1] measuring how much that
location belongs in a good crop. The aesthetic score of a crop is the
heatmap mass inside it plus the complement mass outside it, evaluated in
O(1) per crop through an integral image. The layout score is the recall of
the constraint region pixels covered by the crop. Both combine linearly,
with a weight large enough to make layout coverage effectively hard.

Heatmaps and integral images are immutable after construction; every score
function is pure and safe to share across concurrent search workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import CropBox, Dims, scale_box

DEFAULT_ALPHA = 1e4


class OutOfBounds(ValueError):
    """A box exceeds the grid it is scored against."""


@dataclass(frozen=True, eq=False)
class Heatmap:
    """Row-major grid of per-cell values in [0, 1]."""

    dims: Dims
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.dims.height, self.dims.width):
            raise ValueError(f"value grid {v.shape} does not match dims {self.dims}")
        if v.size and (v.min() < -1e-9 or v.max() > 1 + 1e-9):
            raise ValueError("heatmap values must lie in [0, 1]")
        object.__setattr__(self, "values", np.clip(v, 0.0, 1.0))

    @classmethod
    def from_array(cls, values: np.ndarray) -> "Heatmap":
        values = np.asarray(values, dtype=np.float64)
        h, w = values.shape
        return cls(Dims(w, h), values)


@dataclass(frozen=True, eq=False)
class IntegralImage:
    """Inclusive prefix sums of a heatmap, one row/column of zero padding."""

    dims: Dims
    prefix: np.ndarray
    total: float


@dataclass(frozen=True)
class ScoreWeights:
    """Mixing weights for the combined score.

    alpha weighs layout recall against the aesthetic term when the aspect
    ratio is enforced as a hard constraint. lambda1/lambda2 serve the general
    three-term combiner, where an externally supplied soft aspect score joins
    in; this package ships no aspect score of its own.
    """

    alpha: float = DEFAULT_ALPHA
    lambda1: float = 0.0
    lambda2: float = 0.0

    def __post_init__(self) -> None:
        for name in ("alpha", "lambda1", "lambda2"):
            v = getattr(self, name)
            if not (v >= 0 and np.isfinite(v)):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")


@dataclass(frozen=True)
class ScoreBreakdown:
    v_aesth: float
    v_layout: float
    total: float

    def to_json(self) -> dict:
        return {"v_aesth": self.v_aesth, "v_layout": self.v_layout, "total": self.total}


def _merge_intervals(spans: list[tuple[int, int]]) -> list[tuple[int, int]]:
    merged: list[tuple[int, int]] = []
    for lo, hi in sorted(spans):
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _disjoint_rects(boxes: list[CropBox]) -> list[tuple[int, int, int, int]]:
    # Decompose a union of boxes into disjoint (x1, y1, x2, y2) rectangles
    # by sweeping the x-axis slab by slab.
    xs = sorted({b.x for b in boxes} | {b.x2 for b in boxes})
    rects: list[tuple[int, int, int, int]] = []
    for x1, x2 in zip(xs, xs[1:]):
        spans = [(b.y, b.y2) for b in boxes if b.x <= x1 and b.x2 >= x2]
        for y1, y2 in _merge_intervals(spans):
            rects.append((x1, y1, x2, y2))
    return rects


class LayoutConstraint:
    """Regions the crop should cover, with optional signed per-region weights.

    Regions with the default weight +1 form the inclusion constraint proper:
    their union defines the pixel set whose recall is the layout score.
    Regions with any other weight contribute their own recall scaled by that
    weight, which is how exclusion ("keep this out of the crop") is expressed
    with a negative weight.
    """

    def __init__(
        self,
        regions: list[CropBox],
        weights: list[float] | None = None,
        dims: Dims | None = None,
    ) -> None:
        if not regions:
            raise ValueError("layout constraint needs at least one region")
        if weights is None:
            weights = [1.0] * len(regions)
        if len(weights) != len(regions):
            raise ValueError("one weight per region required")
        if dims is not None:
            for r in regions:
                if not r.fits(dims):
                    raise ValueError(f"layout region {r} exceeds {dims}")
        self.regions = list(regions)
        self.weights = [float(w) for w in weights]
        self._union_members = [r for r, w in zip(regions, self.weights) if w == 1.0]
        self._extras = [(r, w) for r, w in zip(regions, self.weights) if w != 1.0]
        self._union_rects = _disjoint_rects(self._union_members)
        self.area = sum((x2 - x1) * (y2 - y1) for x1, y1, x2, y2 in self._union_rects)

    @property
    def has_inclusion(self) -> bool:
        return self.area > 0


def _overlap_area(rect: tuple[int, int, int, int], box: CropBox) -> int:
    x1, y1, x2, y2 = rect
    iw = min(x2, box.x2) - max(x1, box.x)
    ih = min(y2, box.y2) - max(y1, box.y)
    return iw * ih if iw > 0 and ih > 0 else 0


def v_layout(phi: LayoutConstraint, box: CropBox) -> float:
    """Recall of the constraint pixels covered by the crop: exact integer
    pixel counts over the union of the inclusion regions."""
    if not phi.has_inclusion:
        return 0.0
    covered = sum(_overlap_area(r, box) for r in phi._union_rects)
    return covered / phi.area


def layout_term(phi: LayoutConstraint | None, box: CropBox) -> float:
    """Full layout score: inclusion-union recall plus any signed per-region
    extras. Equals plain `v_layout` when every weight is +1."""
    if phi is None:
        return 0.0
    score = v_layout(phi, box)
    for region, weight in phi._extras:
        score += weight * _overlap_area((region.x, region.y, region.x2, region.y2), box) / region.area
    return score


def build_integral(h: Heatmap) -> IntegralImage:
    """Prefix-sum table so any region sum costs four lookups."""
    prefix = np.zeros((h.dims.height + 1, h.dims.width + 1), dtype=np.float64)
    np.cumsum(np.cumsum(h.values, axis=0), axis=1, out=prefix[1:, 1:])
    return IntegralImage(h.dims, prefix, float(prefix[-1, -1]))


def _check_box(ii: IntegralImage, box: CropBox) -> None:
    if not box.fits(ii.dims):
        raise OutOfBounds(f"box {box} exceeds grid {ii.dims.width}x{ii.dims.height}")


def region_sum(ii: IntegralImage, box: CropBox) -> float:
    """Sum of heatmap values over the box, four-corner prefix formula."""
    _check_box(ii, box)
    p = ii.prefix
    return float(p[box.y2, box.x2] - p[box.y, box.x2] - p[box.y2, box.x] + p[box.y, box.x])


def v_roi(ii: IntegralImage, box: CropBox) -> float:
    """Heatmap mass inside the crop."""
    return region_sum(ii, box)


def v_rod(ii: IntegralImage, box: CropBox) -> float:
    """Complement mass outside the crop: sum of (1 - value) over cells not
    in the box."""
    _check_box(ii, box)
    outside_cells = ii.dims.area - box.area
    outside_mass = ii.total - region_sum(ii, box)
    return outside_cells - outside_mass


def v_aesth_heatmap(ii: IntegralImage, box: CropBox) -> float:
    """Aesthetic score of a crop: inside mass plus outside complement mass.

    Closed form: 2 * region_sum(box) - box.area + (cells - total).
    """
    return v_roi(ii, box) + v_rod(ii, box)


def total_score(
    weights: ScoreWeights,
    v_aesth: float,
    v_layout_value: float,
    v_aspect: float | None = None,
) -> float:
    """Combine the component scores linearly.

    Without an aspect term this is the hard-aspect form: aesthetic plus
    alpha-weighted layout. With one, the general combiner applies lambda1 to
    the aspect score and lambda2 to the layout score.
    """
    if v_aspect is None:
        return v_aesth + weights.alpha * v_layout_value
    return v_aesth + weights.lambda1 * v_aspect + weights.lambda2 * v_layout_value


def score_crop(
    ii: IntegralImage,
    phi: LayoutConstraint | None,
    weights: ScoreWeights,
    box_in_image: CropBox,
    image_dims: Dims,
) -> ScoreBreakdown:
    """Score a crop given in image coordinates.

    The aesthetic term is computed in heatmap space (the box is scaled onto
    the heatmap grid when resolutions differ); layout recall stays in image
    space where the constraint and ground truth live.
    """
    if not box_in_image.fits(image_dims):
        raise OutOfBounds(f"box {box_in_image} exceeds image {image_dims}")
    if ii.dims == image_dims:
        hbox = box_in_image
    else:
        hbox = scale_box(box_in_image, image_dims, ii.dims)
    va = v_aesth_heatmap(ii, hbox)
    vl = layout_term(phi, box_in_image)
    return ScoreBreakdown(va, vl, total_score(weights, va, vl))


def crop_scorer(
    ii: IntegralImage,
    phi: LayoutConstraint | None,
    weights: ScoreWeights,
    image_dims: Dims,
):
    """Bind heatmap, constraint and weights into a box -> ScoreBreakdown
    callable for the search strategies."""

    def score(box: CropBox) -> ScoreBreakdown:
        return score_crop(ii, phi, weights, box, image_dims)

    return score
