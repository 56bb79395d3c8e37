"""Saliency-mask baselines: threshold a saliency map, merge it with the
layout regions, and re-frame the merged mask's bounding box to the target
aspect ratio.

Two re-framing modes exist. `short_edge` inscribes: the crop fits within
the mask box's extent, its derived side rounded down. `long_edge`
circumscribes: the crop covers the mask box, its derived side rounded up.
Both center on the mask box and shift (or, as a last resort, shrink at the
same ratio) to stay inside the frame, so the baseline is total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import CropBox, Dims, round_half_up, scale_box
from .scoring import Heatmap, LayoutConstraint

SALIENCY_THRESHOLD = 0.01


class EdgeMode(str, Enum):
    SHORT = "short_edge"
    LONG = "long_edge"


@dataclass(frozen=True, eq=False)
class BinaryMask:
    dims: Dims
    bits: np.ndarray

    def __post_init__(self) -> None:
        b = np.asarray(self.bits, dtype=bool)
        if b.shape != (self.dims.height, self.dims.width):
            raise ValueError(f"mask {b.shape} does not match dims {self.dims}")
        object.__setattr__(self, "bits", b)


def threshold_mask(heatmap: Heatmap, tau: float) -> BinaryMask:
    """Binary mask of cells with value >= tau."""
    if not (0.0 <= tau <= 1.0):
        raise ValueError(f"threshold must be in [0, 1], got {tau}")
    return BinaryMask(heatmap.dims, heatmap.values >= tau)


def mask_bbox(mask: BinaryMask) -> CropBox | None:
    """Tight bounding box of the set bits, or None for an empty mask."""
    ys, xs = np.nonzero(mask.bits)
    if xs.size == 0:
        return None
    x1, x2 = int(xs.min()), int(xs.max()) + 1
    y1, y2 = int(ys.min()), int(ys.max()) + 1
    return CropBox(x1, y1, x2 - x1, y2 - y1)


def _bbox_union(boxes: list[CropBox]) -> CropBox:
    x1 = min(b.x for b in boxes)
    y1 = min(b.y for b in boxes)
    x2 = max(b.x2 for b in boxes)
    y2 = max(b.y2 for b in boxes)
    return CropBox(x1, y1, x2 - x1, y2 - y1)


def _reframe(base: CropBox, omega: float, mode: EdgeMode) -> tuple[int, int]:
    # Crop size of ratio omega derived from the mask box: inscribed for
    # short_edge (derived side floored), circumscribed for long_edge
    # (derived side ceiled).
    if mode is EdgeMode.SHORT:
        if base.width / base.height <= omega:
            w = base.width
            h = max(1, math.floor(base.width / omega))
        else:
            h = base.height
            w = max(1, math.floor(base.height * omega))
    else:
        if base.width / base.height <= omega:
            h = base.height
            w = max(1, math.ceil(base.height * omega))
        else:
            w = base.width
            h = max(1, math.ceil(base.width / omega))
    return w, h


def _max_fit(dims: Dims, omega: float) -> tuple[int, int]:
    # Largest crop of ratio omega inside the frame.
    if dims.width / dims.height <= omega:
        w = dims.width
        h = max(1, math.floor(dims.width / omega))
    else:
        h = dims.height
        w = max(1, math.floor(dims.height * omega))
    return w, h


def baseline_crop(
    saliency: Heatmap,
    phi: LayoutConstraint | None,
    omega: float,
    mode: EdgeMode | str,
    image_dims: Dims,
) -> CropBox:
    """Aspect-corrected crop around the thresholded saliency mask merged
    with the layout regions. Total: an empty mask falls back to the whole
    frame, and a crop larger than the frame shrinks at the same ratio."""
    mode = EdgeMode(mode)
    omega = float(omega)
    parts: list[CropBox] = []
    sal_box = mask_bbox(threshold_mask(saliency, SALIENCY_THRESHOLD))
    if sal_box is not None:
        if saliency.dims != image_dims:
            sal_box = scale_box(sal_box, saliency.dims, image_dims)
        parts.append(sal_box)
    if phi is not None:
        parts.extend(r for r, w in zip(phi.regions, phi.weights) if w > 0)
    base = _bbox_union(parts) if parts else CropBox(0, 0, image_dims.width, image_dims.height)

    w, h = _reframe(base, omega, mode)
    if w > image_dims.width or h > image_dims.height:
        w, h = _max_fit(image_dims, omega)
    x = round_half_up(base.x + (base.width - w) / 2)
    y = round_half_up(base.y + (base.height - h) / 2)
    x = min(max(x, 0), image_dims.width - w)
    y = min(max(y, 0), image_dims.height - h)
    return CropBox(x, y, w, h)
