"""Command-line front end: one-off crops, benchmark construction and
evaluation, parameter sweeps, and the HTTP service launcher.

Exit codes: 0 success, 2 bad flags, 3 infeasible search space,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from . import dataset as dataset_mod
from .geometry import AspectRatio, CropBox, Dims
from .heatmaps import (
    CorruptFile,
    Heatmap,
    PSEUDO_HEATMAP_DIMS,
    UnsupportedFormat,
    heuristic_saliency,
    load_heatmap,
    load_image,
    pseudo_heatmap,
    read_annotations,
)
from .optimizer import InfeasibleSearchSpace, OptimizerConfig
from .pipeline import CropRequest, run_crop
from .proposals import DEFAULT_K_END, DEFAULT_K_START, EmptyProposalSet
from .scoring import DEFAULT_ALPHA

EXIT_BAD_FLAGS = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


def _parse_layout(spec: str) -> tuple[CropBox, float]:
    coords, _, weight = spec.partition(":")
    parts = coords.split(",")
    if len(parts) != 4:
        raise ValueError(f"layout must be x,y,w,h[:weight], got {spec!r}")
    x, y, w, h = (int(p) for p in parts)
    return CropBox(x, y, w, h), float(weight) if weight else 1.0


def _parse_dims(spec: str) -> Dims:
    w, _, h = spec.lower().partition("x")
    return Dims(int(w), int(h))


def _add_method_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", default="heatmap",
                        help="heatmap | proposal | baseline_short | baseline_long")
    parser.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                        help="layout weight in the combined score")
    parser.add_argument("--iterations", type=int, default=100)
    parser.add_argument("--strategy", default="anneal", help="random | anneal | tpe-lite")
    parser.add_argument("--step-granularity", type=float, default=32.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--kstart", type=int, default=DEFAULT_K_START)
    parser.add_argument("--kend", type=int, default=DEFAULT_K_END)


def _method_config(args: argparse.Namespace) -> bench_mod.MethodConfig:
    return bench_mod.MethodConfig(
        name=args.method,
        alpha=args.alpha,
        optimizer=OptimizerConfig(
            iterations=args.iterations,
            strategy=args.strategy,
            step_granularity=args.step_granularity,
            seed=args.seed,
        ),
        k_start=args.kstart,
        k_end=args.kend,
    )


def cmd_crop(args: argparse.Namespace) -> int:
    if args.heatmap is not None:
        heatmap = load_heatmap(args.heatmap)
        image_dims = _parse_dims(args.dims) if args.dims else heatmap.dims
    else:
        image = load_image(args.image)
        image_dims = image.dims
        heatmap = heuristic_saliency(image, _parse_dims(args.dims) if args.dims else PSEUDO_HEATMAP_DIMS)

    request = CropRequest(
        heatmap=heatmap,
        image_dims=image_dims,
        omega=float(AspectRatio.parse(args.aspect)),
        layout=[_parse_layout(spec) for spec in args.layout],
        method=args.method,
        alpha=args.alpha,
        optimizer=OptimizerConfig(
            iterations=args.iterations,
            strategy=args.strategy,
            step_granularity=args.step_granularity,
            seed=args.seed,
        ),
        k_start=args.kstart,
        k_end=args.kend,
        include_trace=args.trace is not None,
    )
    response = run_crop(request)

    if args.trace is not None and response.trace is not None:
        Path(args.trace).write_text(response.trace.to_jsonl() + "\n")
    if args.overlay is not None:
        bench_mod.write_overlay(
            args.overlay,
            image_dims,
            heatmap=heatmap,
            layout=[r for r, _ in request.layout],
            prediction=response.box,
        )
    payload = json.dumps(response.to_json(), indent=2)
    if args.out is not None:
        Path(args.out).write_text(payload + "\n")
    else:
        print(payload)
    return 0


def cmd_dataset(args: argparse.Namespace) -> int:
    records = read_annotations(args.annotations)
    tuples = dataset_mod.build_benchmark(records)
    for t in tuples:
        # Revalidate through the JSON round trip before anything ships.
        dataset_mod.BenchmarkTuple.from_json(t.to_json())
    dataset_mod.write_benchmark(tuples, args.out)
    print(f"wrote {len(tuples)} tuples from {len(records)} records to {args.out}")
    return 0


def _pseudo_dims(image_dims: Dims) -> Dims:
    return Dims(min(PSEUDO_HEATMAP_DIMS.width, image_dims.width),
                min(PSEUDO_HEATMAP_DIMS.height, image_dims.height))


def _build_provider(args: argparse.Namespace) -> bench_mod.HeatmapProvider:
    if args.annotations is not None:
        cache: dict[str, Heatmap] = {}
        for record in read_annotations(args.annotations):
            cache[record.image_id] = pseudo_heatmap(record, _pseudo_dims(record.dims))
        return cache.get
    if args.heatmap_dir is not None:
        root = Path(args.heatmap_dir)

        def from_dir(image_id: str) -> Heatmap | None:
            for suffix in (".csv", ".pgm", ".png"):
                candidate = root / f"{image_id}{suffix}"
                if candidate.exists():
                    return load_heatmap(candidate)
            return None

        return from_dir
    raise ValueError("--annotations or --heatmap-dir is required for this method")


def cmd_bench(args: argparse.Namespace) -> int:
    tuples = dataset_mod.read_benchmark(args.benchmark)
    if not tuples:
        print("benchmark file is empty", file=sys.stderr)
        return EXIT_IO
    config = _method_config(args)
    provider = _build_provider(args)
    report = bench_mod.evaluate(bench_mod.make_method(config), tuples, provider, method_id=args.method)
    csv_text = report.to_csv()
    if args.out is not None:
        Path(args.out).write_text(csv_text)
    print(f"method={report.method_id} items={len(report.per_item)} "
          f"mean_iou={report.mean_iou:.4f} mean_recall={report.mean_recall:.4f} "
          f"mean_elapsed={report.mean_elapsed:.4f}s")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    tuples = dataset_mod.read_benchmark(args.benchmark)
    if not tuples:
        print("benchmark file is empty", file=sys.stderr)
        return EXIT_IO
    values = args.values.split(",")
    if len(values) < 1:
        raise ValueError("need at least one sweep value")
    if args.param in ("iterations",):
        parsed = [int(v) for v in values]
    elif args.param in ("alpha", "step_granularity"):
        parsed = [float(v) for v in values]
    else:
        parsed = values  # k_range entries like "14:28"
    rows = bench_mod.sweep(args.param, parsed, _method_config(args), tuples, _build_provider(args))
    csv_text = bench_mod.sweep_csv(args.param, rows)
    if args.out is not None:
        Path(args.out).write_text(csv_text)
    print(bench_mod.sweep_table(args.param, rows), end="")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cropkit",
                                     description="Aspect-exact, layout-aware image crop search")
    sub = parser.add_subparsers(dest="command", required=True)

    crop = sub.add_parser("crop", help="compute one crop")
    src = crop.add_mutually_exclusive_group(required=True)
    src.add_argument("--heatmap", help="heatmap file (png/pgm/csv)")
    src.add_argument("--image", help="image file; scored via heuristic saliency")
    crop.add_argument("--aspect", required=True, help='aspect ratio, "W:H" or decimal')
    crop.add_argument("--layout", action="append", default=[],
                      help="x,y,w,h[:weight] region to include (repeatable; negative weight excludes)")
    crop.add_argument("--dims", help="image dimensions WxH (defaults to the heatmap/image size)")
    _add_method_flags(crop)
    crop.add_argument("--out", help="write the JSON response here instead of stdout")
    crop.add_argument("--overlay", help="write an overlay PNG here")
    crop.add_argument("--trace", help="write the optimizer trace JSONL here")
    crop.set_defaults(func=cmd_crop)

    dataset = sub.add_parser("dataset", help="build a benchmark from annotations")
    dataset.add_argument("--annotations", required=True, help="annotation JSONL")
    dataset.add_argument("--out", required=True, help="benchmark JSONL to write")
    dataset.set_defaults(func=cmd_dataset)

    bench = sub.add_parser("bench", help="evaluate a method on a benchmark")
    bench.add_argument("--benchmark", required=True, help="benchmark JSONL")
    bench.add_argument("--annotations", help="annotation JSONL; heatmaps become per-image pseudo-heatmaps")
    bench.add_argument("--heatmap-dir", help="directory of <image_id>.{csv,pgm,png} heatmaps")
    bench.add_argument("--out", help="write the per-item CSV report here")
    _add_method_flags(bench)
    bench.set_defaults(func=cmd_bench)

    sweep = sub.add_parser("sweep", help="evaluate one parameter over several values")
    sweep.add_argument("--param", required=True,
                       help="iterations | k_range | alpha | step_granularity")
    sweep.add_argument("--values", required=True, help="comma separated values")
    sweep.add_argument("--benchmark", required=True)
    sweep.add_argument("--annotations")
    sweep.add_argument("--heatmap-dir")
    sweep.add_argument("--out", help="write the sweep CSV here")
    _add_method_flags(sweep)
    sweep.set_defaults(func=cmd_sweep)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--static-dir", help="directory with the web client bundle")
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleSearchSpace, EmptyProposalSet) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UnsupportedFormat, CorruptFile, bench_mod.MissingHeatmap, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_FLAGS


if __name__ == "__main__":
    sys.exit(main())
