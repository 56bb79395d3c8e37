"""Box arithmetic: IoU, containment, aspect-ratio handling, and the
step-parameter search space used by the heatmap crop optimizer.

Coordinate convention: top-left origin, x rightward, y downward, half-open
pixel intervals [x, x+w) x [y, y+h). All operations here are pure functions
over immutable value types and are safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class StepOutOfRange(ValueError):
    """The step parameter does not yield a valid in-bounds crop."""


def round_half_up(v: float) -> int:
    # Python's round() is banker's rounding; pixel sizes need half-away-from-zero.
    return int(math.floor(v + 0.5))


@dataclass(frozen=True)
class Dims:
    """Pixel dimensions of an image or heatmap grid."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"dims must be at least 1x1, got {self.width}x{self.height}")

    @property
    def area(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class CropBox:
    """Axis-aligned crop rectangle in pixel coordinates."""

    x: int
    y: int
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.x < 0 or self.y < 0:
            raise ValueError(f"box origin must be non-negative, got ({self.x},{self.y})")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"box sides must be positive, got {self.width}x{self.height}")

    @property
    def x2(self) -> int:
        return self.x + self.width

    @property
    def y2(self) -> int:
        return self.y + self.height

    @property
    def area(self) -> int:
        return self.width * self.height

    def ratio(self) -> float:
        """Width divided by height."""
        return self.width / self.height

    def fits(self, dims: Dims) -> bool:
        return self.x2 <= dims.width and self.y2 <= dims.height

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.width, "h": self.height}

    @classmethod
    def from_json(cls, obj: dict) -> "CropBox":
        return cls(int(obj["x"]), int(obj["y"]), int(obj["w"]), int(obj["h"]))


@dataclass(frozen=True)
class AspectRatio:
    """Target crop ratio, expressed as width divided by height."""

    omega: float

    def __post_init__(self) -> None:
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValueError(f"aspect ratio must be a positive finite number, got {self.omega}")

    def __float__(self) -> float:
        return self.omega

    @classmethod
    def parse(cls, text: str) -> "AspectRatio":
        """Parse a "W:H" pair or a plain positive decimal."""
        text = text.strip()
        if ":" in text:
            w_part, h_part = text.split(":", 1)
            return cls(float(w_part) / float(h_part))
        return cls(float(text))

    @classmethod
    def of_box(cls, box: CropBox) -> "AspectRatio":
        return cls(box.width / box.height)


@dataclass(frozen=True)
class SearchPoint:
    """Free parameters of the heatmap search: a top-left position plus a
    single size parameter; the other side follows from the aspect ratio."""

    position_x: int
    position_y: int
    step: float


def iou(a: CropBox, b: CropBox) -> float:
    """Intersection over union of two boxes, over continuous rectangle areas.

    Returns 0.0 for disjoint boxes; symmetric in its arguments.
    """
    iw = min(a.x2, b.x2) - max(a.x, b.x)
    ih = min(a.y2, b.y2) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = float(iw) * float(ih)
    union = a.area + b.area - inter
    return inter / union


def contains(outer: CropBox, inner: CropBox) -> bool:
    """True iff every pixel of `inner` lies inside `outer`."""
    return (
        inner.x >= outer.x
        and inner.y >= outer.y
        and inner.x2 <= outer.x2
        and inner.y2 <= outer.y2
    )


def scale_box(box: CropBox, from_dims: Dims, to_dims: Dims) -> CropBox:
    """Map a box between coordinate spaces (e.g. image space to heatmap space).

    Coordinates and sizes scale per axis, round half-away-from-zero, and are
    clamped so the result stays in bounds with sides of at least one pixel.
    """
    fx = to_dims.width / from_dims.width
    fy = to_dims.height / from_dims.height
    x = min(round_half_up(box.x * fx), to_dims.width - 1)
    y = min(round_half_up(box.y * fy), to_dims.height - 1)
    w = max(1, min(round_half_up(box.width * fx), to_dims.width - x))
    h = max(1, min(round_half_up(box.height * fy), to_dims.height - y))
    return CropBox(x, y, w, h)


def step_max(position_x: int, position_y: int, dims: Dims, omega: AspectRatio | float) -> float:
    """Largest step at a given top-left position that still yields an
    in-bounds box under `convert_step`."""
    w = float(omega)
    margin_x = dims.width - position_x
    margin_y = dims.height - position_y
    if margin_x <= 0 or margin_y <= 0:
        return 0.0
    omega_margin = margin_x / margin_y
    if omega_margin <= w:
        return margin_x / w
    return w * margin_y


def convert_step(point: SearchPoint, dims: Dims, omega: AspectRatio | float) -> CropBox:
    """Turn a (position, step) search point into a crop box of ratio omega.

    The remaining margin below-right of the position decides which side the
    step parameter controls: when the margin is relatively narrower than
    omega, the step sets the height and the width is omega-scaled; otherwise
    the step sets the width. Sides are rounded to whole pixels and clamped
    into bounds, so the output ratio matches omega up to one pixel.

    Raises StepOutOfRange when the step exceeds the feasible maximum or a
    side would round to zero.
    """
    w = float(omega)
    px, py = point.position_x, point.position_y
    if not (0 <= px < dims.width and 0 <= py < dims.height):
        raise StepOutOfRange(f"position ({px},{py}) outside {dims.width}x{dims.height}")
    smax = step_max(px, py, dims, w)
    if point.step <= 0 or point.step > smax * (1 + 1e-12):
        raise StepOutOfRange(f"step {point.step} outside (0, {smax}]")
    margin_x = dims.width - px
    margin_y = dims.height - py
    if margin_x / margin_y <= w:
        height = point.step
        width = point.step * w
    else:
        height = point.step / w
        width = point.step
    wi = round_half_up(width)
    hi = round_half_up(height)
    if wi < 1 or hi < 1:
        raise StepOutOfRange(f"step {point.step} rounds to a zero-sized side at ratio {w}")
    wi = min(wi, margin_x)
    hi = min(hi, margin_y)
    return CropBox(px, py, wi, hi)


def satisfies_aspect(box: CropBox, omega: AspectRatio | float) -> bool:
    """True when the box ratio matches omega up to integer-pixel rounding:
    one side must fall between the floor and ceiling of the omega-scaled
    other side."""
    w = float(omega)
    if math.floor(box.height * w) <= box.width <= math.ceil(box.height * w):
        return True
    return math.floor(box.width / w) <= box.height <= math.ceil(box.width / w)
