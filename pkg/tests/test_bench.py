from fractions import Fraction

import numpy as np
import pytest

from cropkit.bench import (
    MethodConfig,
    MissingHeatmap,
    evaluate,
    make_method,
    sweep,
    sweep_csv,
    sweep_table,
    write_overlay,
)
from cropkit.dataset import BenchmarkTuple
from cropkit.geometry import CropBox, Dims, iou
from cropkit.heatmaps import synth_planted
from cropkit.optimizer import OptimizerConfig
from cropkit.scoring import Heatmap


def _planted_bench(n=6, seed=40):
    rng = np.random.default_rng(seed)
    dims = Dims(64, 64)
    tuples, heatmaps = [], {}
    for i in range(n):
        w = int(rng.integers(20, 41))
        h = int(rng.integers(20, 41))
        gt = CropBox(
            int(rng.integers(0, dims.width - w + 1)),
            int(rng.integers(0, dims.height - h + 1)),
            w,
            h,
        )
        layout = CropBox(gt.x + 2, gt.y + 2, max(1, w // 3), max(1, h // 3))
        tuples.append(BenchmarkTuple(f"img{i}", dims, layout, Fraction(w, h), gt))
        heatmaps[f"img{i}"] = synth_planted(dims, gt, 0.1, seed=i)
    return tuples, heatmaps


def test_oracle_scores_perfect():
    tuples, heatmaps = _planted_bench()
    report = evaluate(make_method(MethodConfig(name="oracle")), tuples, heatmaps.get)
    assert report.mean_iou == 1.0
    assert report.mean_recall == 1.0
    assert len(report.per_item) == len(tuples)


def test_full_frame_method_on_full_frame_gt():
    dims = Dims(64, 64)
    gt = CropBox(0, 0, 64, 64)
    t = BenchmarkTuple("a", dims, CropBox(0, 0, 32, 32), Fraction(1), gt)
    heatmap = Heatmap.from_array(np.zeros((64, 64)))
    report = evaluate(lambda tup, hm: gt, [t], {"a": heatmap}.get)
    assert report.per_item[0].iou == 1.0


def test_missing_heatmap_raises():
    tuples, heatmaps = _planted_bench(n=2)
    with pytest.raises(MissingHeatmap):
        evaluate(make_method(MethodConfig(name="oracle")), tuples, {}.get)


def test_mean_recomputable_from_items():
    tuples, heatmaps = _planted_bench()
    config = MethodConfig(name="baseline_long")
    report = evaluate(make_method(config), tuples, heatmaps.get)
    assert report.mean_iou == pytest.approx(
        sum(i.iou for i in report.per_item) / len(report.per_item)
    )
    assert report.mean_recall == pytest.approx(
        sum(i.recall for i in report.per_item) / len(report.per_item)
    )


def test_heatmap_method_beats_random_boxes():
    tuples, heatmaps = _planted_bench(n=10, seed=41)
    config = MethodConfig(
        name="heatmap",
        optimizer=OptimizerConfig(iterations=300, strategy="anneal", step_granularity=1, seed=0),
    )
    smart = evaluate(make_method(config), tuples, heatmaps.get)

    rng = np.random.default_rng(0)

    def random_box(t, hm):
        from cropkit.optimizer import make_strategy_state, sample_point
        from cropkit.geometry import convert_step

        cfg = OptimizerConfig(iterations=1, strategy="random", step_granularity=1, seed=int(rng.integers(1 << 31)))
        state = make_strategy_state(t.dims, float(t.omega), cfg)
        point = sample_point(t.dims, float(t.omega), np.random.default_rng(cfg.seed), state)
        return convert_step(point, t.dims, float(t.omega))

    dumb = evaluate(random_box, tuples, heatmaps.get)
    assert smart.mean_iou > dumb.mean_iou


def test_method_determinism():
    tuples, heatmaps = _planted_bench(n=4)
    config = MethodConfig(
        name="heatmap",
        optimizer=OptimizerConfig(iterations=50, strategy="anneal", step_granularity=1, seed=11),
    )
    a = evaluate(make_method(config), tuples, heatmaps.get)
    b = evaluate(make_method(config), tuples, heatmaps.get)
    assert [i.iou for i in a.per_item] == [i.iou for i in b.per_item]


def test_csv_shape():
    tuples, heatmaps = _planted_bench(n=3)
    report = evaluate(make_method(MethodConfig(name="oracle")), tuples, heatmaps.get)
    lines = report.to_csv().strip().splitlines()
    assert lines[0] == "id,iou,recall,elapsed_s"
    assert len(lines) == 5  # header + 3 items + summary footer
    assert lines[-1].startswith("# mean,")


def test_report_table_layout():
    from cropkit.bench import report_table

    tuples, heatmaps = _planted_bench(n=2)
    reports = [
        evaluate(make_method(MethodConfig(name=name)), tuples, heatmaps.get, method_id=name)
        for name in ("baseline_short", "baseline_long", "oracle")
    ]
    table = report_table(reports)
    lines = table.strip().splitlines()
    assert lines[0].split() == ["Methods", "IoU", "time[s]"]
    assert len(lines) == 4
    assert lines[3].startswith("oracle")
    assert "1.0000" in lines[3]


def test_sweep_rows_and_formats():
    tuples, heatmaps = _planted_bench(n=3)
    config = MethodConfig(
        name="heatmap",
        optimizer=OptimizerConfig(iterations=20, strategy="anneal", step_granularity=1, seed=5),
    )
    rows = sweep("iterations", [10, 40], config, tuples, heatmaps.get)
    assert len(rows) == 2
    assert rows[0][0] == 10
    csv_text = sweep_csv("iterations", rows)
    assert csv_text.splitlines()[0] == "iterations,mean_iou,mean_recall,mean_elapsed_s"
    table = sweep_table("iterations", rows)
    assert "IoU" in table and len(table.splitlines()) == 3


def test_single_value_sweep_matches_direct_evaluate():
    tuples, heatmaps = _planted_bench(n=3)
    config = MethodConfig(
        name="heatmap",
        optimizer=OptimizerConfig(iterations=30, strategy="anneal", step_granularity=1, seed=5),
    )
    rows = sweep("iterations", [30], config, tuples, heatmaps.get)
    direct = evaluate(make_method(config), tuples, heatmaps.get)
    assert rows[0][1].mean_iou == direct.mean_iou


def test_sweep_k_range_parsing():
    dims = Dims(384, 384)
    gt = CropBox(0, 0, 336, 336)
    t = BenchmarkTuple("a", dims, CropBox(10, 10, 30, 30), Fraction(1), gt)
    heatmap = synth_planted(Dims(64, 64), CropBox(0, 0, 56, 56), 0.1, seed=0)
    rows = sweep("k_range", ["14:20", "14:28"], MethodConfig(name="proposal"), [t], {"a": heatmap}.get)
    assert len(rows) == 2


def test_sweep_rejects_unknown_parameter():
    tuples, heatmaps = _planted_bench(n=2)
    with pytest.raises(ValueError):
        sweep("gamma", [1], MethodConfig(), tuples, heatmaps.get)


def test_overlay_written(tmp_path):
    from PIL import Image

    tuples, heatmaps = _planted_bench(n=1)
    t = tuples[0]
    out = tmp_path / "overlay.png"
    write_overlay(out, t.dims, heatmap=heatmaps[t.image_id], gt=t.gt_box,
                  layout=[t.layout_box], prediction=CropBox(1, 1, 20, 20))
    with Image.open(out) as img:
        assert img.size == (t.dims.width, t.dims.height)
        assert img.mode == "RGB"
