"""Shared test oracles: independent brute-force implementations the library
results are checked against."""

from __future__ import annotations

import numpy as np

from cropkit.geometry import CropBox, Dims


def pixel_set(box: CropBox, dims: Dims) -> np.ndarray:
    grid = np.zeros((dims.height, dims.width), dtype=bool)
    grid[box.y : box.y2, box.x : box.x2] = True
    return grid


def iou_pixel_oracle(a: CropBox, b: CropBox, dims: Dims) -> float:
    ga, gb = pixel_set(a, dims), pixel_set(b, dims)
    union = np.logical_or(ga, gb).sum()
    if union == 0:
        return 0.0
    return float(np.logical_and(ga, gb).sum() / union)


def contains_pixel_oracle(outer: CropBox, inner: CropBox, dims: Dims) -> bool:
    go, gi = pixel_set(outer, dims), pixel_set(inner, dims)
    return bool(np.all(go[gi]))


def region_sum_oracle(values: np.ndarray, box: CropBox) -> float:
    total = 0.0
    for y in range(box.y, box.y2):
        for x in range(box.x, box.x2):
            total += values[y, x]
    return total


def v_rod_oracle(values: np.ndarray, box: CropBox) -> float:
    h, w = values.shape
    total = 0.0
    for y in range(h):
        for x in range(w):
            if not (box.y <= y < box.y2 and box.x <= x < box.x2):
                total += 1.0 - values[y, x]
    return total


def v_layout_oracle(regions: list[CropBox], box: CropBox, dims: Dims) -> float:
    union = np.zeros((dims.height, dims.width), dtype=bool)
    for r in regions:
        union |= pixel_set(r, dims)
    area = union.sum()
    covered = np.logical_and(union, pixel_set(box, dims)).sum()
    return float(covered / area)


def rand_box(rng: np.random.Generator, dims: Dims, max_side: int | None = None) -> CropBox:
    max_w = min(dims.width, max_side) if max_side else dims.width
    max_h = min(dims.height, max_side) if max_side else dims.height
    w = int(rng.integers(1, max_w + 1))
    h = int(rng.integers(1, max_h + 1))
    x = int(rng.integers(0, dims.width - w + 1))
    y = int(rng.integers(0, dims.height - h + 1))
    return CropBox(x, y, w, h)


def rand_heatmap_values(rng: np.random.Generator, dims: Dims) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=(dims.height, dims.width))


def window_count_oracle(
    dims: Dims,
    step_h: int,
    step_w: int,
    offset_h: int,
    offset_w: int,
    k_start: int,
    k_end: int,
) -> int:
    count = 0
    for k in range(k_start, k_end + 1):
        bh, bw = k * step_h, k * step_w
        if bh > dims.height or bw > dims.width:
            continue
        count += ((dims.height - bh) // offset_h + 1) * ((dims.width - bw) // offset_w + 1)
    return count


def planted_instances(n: int, dims: Dims, seed: int = 42) -> list[CropBox]:
    rng = np.random.default_rng(seed)
    boxes = []
    for _ in range(n):
        w = int(rng.integers(16, 44))
        h = int(rng.integers(16, 44))
        x = int(rng.integers(0, dims.width - w + 1))
        y = int(rng.integers(0, dims.height - h + 1))
        boxes.append(CropBox(x, y, w, h))
    return boxes
