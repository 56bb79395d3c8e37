import math

import numpy as np
import pytest

from cropkit.geometry import (
    AspectRatio,
    CropBox,
    Dims,
    SearchPoint,
    StepOutOfRange,
    contains,
    convert_step,
    iou,
    round_half_up,
    satisfies_aspect,
    scale_box,
    step_max,
)
from helpers import contains_pixel_oracle, iou_pixel_oracle, rand_box


def test_iou_identity():
    a = CropBox(0, 0, 10, 10)
    assert iou(a, a) == 1.0


def test_iou_disjoint():
    assert iou(CropBox(0, 0, 10, 10), CropBox(100, 100, 5, 5)) == 0.0


def test_iou_half_overlap():
    # inter=50, union=150 on a 20x10 canvas
    v = iou(CropBox(0, 0, 10, 10), CropBox(5, 0, 10, 10))
    assert abs(v - 50.0 / 150.0) < 1e-12


def test_iou_symmetry_and_range():
    rng = np.random.default_rng(0)
    dims = Dims(64, 64)
    for _ in range(300):
        a, b = rand_box(rng, dims), rand_box(rng, dims)
        v = iou(a, b)
        assert v == iou(b, a)
        assert 0.0 <= v <= 1.0
        assert (v == 1.0) == (a == b)


def test_iou_matches_pixel_count_oracle():
    rng = np.random.default_rng(1)
    for _ in range(300):
        side = int(rng.integers(8, 65))
        dims = Dims(side, side)
        a, b = rand_box(rng, dims), rand_box(rng, dims)
        assert abs(iou(a, b) - iou_pixel_oracle(a, b, dims)) <= 1e-9


def test_step_max_hand_traces():
    assert step_max(10, 20, Dims(100, 100), 2.0) == 45.0
    assert step_max(0, 0, Dims(100, 100), 1.0) == 100.0
    assert step_max(10, 20, Dims(100, 100), 1.0) == 80.0


def test_convert_step_hand_traces():
    assert convert_step(SearchPoint(10, 20, 30), Dims(100, 100), 2.0) == CropBox(10, 20, 60, 30)
    assert convert_step(SearchPoint(0, 0, 100), Dims(100, 100), 1.0) == CropBox(0, 0, 100, 100)
    assert convert_step(SearchPoint(10, 20, 40), Dims(100, 100), 0.5) == CropBox(10, 20, 40, 80)


def test_convert_step_rejects_overlong_step():
    with pytest.raises(StepOutOfRange):
        convert_step(SearchPoint(10, 20, 46), Dims(100, 100), 2.0)


def test_convert_step_rejects_zero_rounding():
    # narrow margin picks the height=step branch; width = step * omega
    # rounds to zero
    with pytest.raises(StepOutOfRange):
        convert_step(SearchPoint(0, 0, 1.0), Dims(10, 1000), 0.02)


def test_convert_step_random_fit_and_aspect():
    rng = np.random.default_rng(2)
    for _ in range(2000):
        dims = Dims(int(rng.integers(8, 600)), int(rng.integers(8, 600)))
        x = int(rng.integers(0, dims.width))
        y = int(rng.integers(0, dims.height))
        omega = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
        hi = step_max(x, y, dims, omega)
        lo = max(0.5, 0.5 / omega, 0.5 * omega)
        if hi < lo:
            continue
        step = float(rng.uniform(lo, hi))
        box = convert_step(SearchPoint(x, y, step), dims, omega)
        assert box.fits(dims)
        assert satisfies_aspect(box, omega), (box, omega)


def test_convert_step_branch_consistency():
    # whichever branch fires, the free side is the step and the other side
    # carries the ratio
    rng = np.random.default_rng(3)
    for _ in range(500):
        dims = Dims(int(rng.integers(16, 300)), int(rng.integers(16, 300)))
        x = int(rng.integers(0, dims.width))
        y = int(rng.integers(0, dims.height))
        omega = float(np.exp(rng.uniform(np.log(0.3), np.log(3.0))))
        hi = step_max(x, y, dims, omega)
        lo = max(1.0, 1.0 / omega, omega)
        if hi < lo:
            continue
        step = float(rng.uniform(lo, hi))
        box = convert_step(SearchPoint(x, y, step), dims, omega)
        margin_x, margin_y = dims.width - x, dims.height - y
        if margin_x / margin_y <= omega:
            assert box.height == min(round_half_up(step), margin_y)
            assert box.width == min(round_half_up(step * omega), margin_x)
        else:
            assert box.width == min(round_half_up(step), margin_x)
            assert box.height == min(round_half_up(step / omega), margin_y)


def test_contains_examples():
    assert contains(CropBox(0, 0, 10, 10), CropBox(2, 2, 4, 4))
    box = CropBox(3, 4, 5, 6)
    assert contains(box, box)
    assert not contains(CropBox(0, 0, 10, 10), CropBox(8, 8, 4, 4))


def test_contains_matches_pixel_oracle():
    rng = np.random.default_rng(4)
    dims = Dims(32, 32)
    for _ in range(300):
        outer, inner = rand_box(rng, dims), rand_box(rng, dims)
        assert contains(outer, inner) == contains_pixel_oracle(outer, inner, dims)


def test_scale_box_examples():
    assert scale_box(CropBox(0, 0, 256, 256), Dims(256, 256), Dims(64, 64)) == CropBox(0, 0, 64, 64)
    assert scale_box(CropBox(128, 0, 128, 256), Dims(256, 256), Dims(64, 64)) == CropBox(32, 0, 32, 64)
    box = CropBox(10, 10, 10, 10)
    assert scale_box(box, Dims(100, 100), Dims(100, 100)) == box


def test_scale_box_stays_in_bounds():
    rng = np.random.default_rng(5)
    for _ in range(500):
        src = Dims(int(rng.integers(2, 500)), int(rng.integers(2, 500)))
        dst = Dims(int(rng.integers(2, 500)), int(rng.integers(2, 500)))
        box = rand_box(rng, src)
        out = scale_box(box, src, dst)
        assert out.fits(dst)
        assert out.width >= 1 and out.height >= 1


def test_aspect_ratio_parsing():
    assert float(AspectRatio.parse("16:9")) == pytest.approx(16 / 9)
    assert float(AspectRatio.parse("1.5")) == 1.5
    with pytest.raises(ValueError):
        AspectRatio(0.0)
    with pytest.raises(ValueError):
        AspectRatio(math.inf)


def test_box_json_round_trip():
    box = CropBox(3, 5, 7, 11)
    assert CropBox.from_json(box.to_json()) == box


def test_invalid_boxes_rejected():
    with pytest.raises(ValueError):
        CropBox(-1, 0, 5, 5)
    with pytest.raises(ValueError):
        CropBox(0, 0, 0, 5)
    with pytest.raises(ValueError):
        Dims(0, 10)
