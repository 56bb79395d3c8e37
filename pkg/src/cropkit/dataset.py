"""Benchmark construction from expert crop annotations.

Eight layout templates are placed on each image: four narrow strips along
the sides (for text bands and similar reserved areas) and the four
quadrants obtained by splitting the image at its center point. A template
paired with a ground-truth crop that fully contains it becomes one
benchmark tuple, carrying the ground truth's exact aspect ratio as the
ratio condition.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .geometry import CropBox, Dims, contains, round_half_up
from .heatmaps import AnnotationRecord

STRIP_FRACTION = 0.15


@dataclass(frozen=True)
class BenchmarkTuple:
    """One evaluation item: image, layout condition, ratio condition, and
    the ground-truth crop that satisfies both."""

    image_id: str
    dims: Dims
    layout_box: CropBox
    omega: Fraction
    gt_box: CropBox

    def __post_init__(self) -> None:
        if not contains(self.gt_box, self.layout_box):
            raise ValueError("ground truth must contain the layout box")
        if self.omega != Fraction(self.gt_box.width, self.gt_box.height):
            raise ValueError("omega must equal the ground-truth ratio")

    def to_json(self) -> dict:
        return {
            "image_id": self.image_id,
            "width": self.dims.width,
            "height": self.dims.height,
            "layout": self.layout_box.to_json(),
            "omega_num": self.omega.numerator,
            "omega_den": self.omega.denominator,
            "gt": self.gt_box.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BenchmarkTuple":
        return cls(
            image_id=str(obj["image_id"]),
            dims=Dims(int(obj["width"]), int(obj["height"])),
            layout_box=CropBox.from_json(obj["layout"]),
            omega=Fraction(int(obj["omega_num"]), int(obj["omega_den"])),
            gt_box=CropBox.from_json(obj["gt"]),
        )


def layout_templates(dims: Dims) -> list[CropBox]:
    """The eight template regions for an image size.

    Order: top strip, bottom strip, left strip, right strip, then the
    top-left, top-right, bottom-left, bottom-right quadrants. Strips span
    the full side at 15% thickness; quadrants are the ceil-half rectangles
    meeting at the center point.
    """
    if dims.width < 10 or dims.height < 10:
        raise ValueError(f"image too small for templates: {dims.width}x{dims.height}")
    w, h = dims.width, dims.height
    th = max(1, round_half_up(STRIP_FRACTION * h))
    tw = max(1, round_half_up(STRIP_FRACTION * w))
    cw = -(-w // 2)
    ch = -(-h // 2)
    return [
        CropBox(0, 0, w, th),
        CropBox(0, h - th, w, th),
        CropBox(0, 0, tw, h),
        CropBox(w - tw, 0, tw, h),
        CropBox(0, 0, cw, ch),
        CropBox(w - cw, 0, cw, ch),
        CropBox(0, h - ch, cw, ch),
        CropBox(w - cw, h - ch, cw, ch),
    ]


def build_benchmark(records: list[AnnotationRecord]) -> list[BenchmarkTuple]:
    """Every (ground-truth box, template) pair where the box contains the
    template, in record order, then box order, then template order."""
    tuples: list[BenchmarkTuple] = []
    for record in records:
        templates = layout_templates(record.dims)
        for gt in record.gt_boxes:
            omega = Fraction(gt.width, gt.height)
            for template in templates:
                if contains(gt, template):
                    tuples.append(
                        BenchmarkTuple(record.image_id, record.dims, template, omega, gt)
                    )
    return tuples


def write_benchmark(tuples: list[BenchmarkTuple], path: str | Path) -> None:
    lines = [json.dumps(t.to_json(), separators=(",", ":")) for t in tuples]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def read_benchmark(path: str | Path) -> list[BenchmarkTuple]:
    tuples = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            tuples.append(BenchmarkTuple.from_json(json.loads(line)))
    return tuples
