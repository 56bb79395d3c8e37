"""Constrained image cropping: find the crop that maximizes a heatmap
aesthetic score while matching an exact aspect ratio and covering the
requested layout regions."""

from .geometry import (
    AspectRatio,
    CropBox,
    Dims,
    SearchPoint,
    StepOutOfRange,
    contains,
    convert_step,
    iou,
    satisfies_aspect,
    scale_box,
    step_max,
)
from .scoring import (
    DEFAULT_ALPHA,
    Heatmap,
    IntegralImage,
    LayoutConstraint,
    OutOfBounds,
    ScoreBreakdown,
    ScoreWeights,
    build_integral,
    crop_scorer,
    region_sum,
    score_crop,
    total_score,
    v_aesth_heatmap,
    v_layout,
    v_rod,
    v_roi,
)
from .proposals import (
    EmptyProposalSet,
    ProposalSet,
    StepPair,
    exhaustive_search,
    generate_proposals,
    get_step_size,
)
from .optimizer import (
    InfeasibleSearchSpace,
    OptimizerConfig,
    SearchTrace,
    optimize,
)
from .heatmaps import (
    AnnotationRecord,
    CorruptFile,
    PixelImage,
    UnsupportedFormat,
    heuristic_saliency,
    load_heatmap,
    pseudo_heatmap,
    save_heatmap,
    synth_planted,
)
from .baselines import BinaryMask, EdgeMode, baseline_crop, threshold_mask
from .dataset import BenchmarkTuple, build_benchmark, layout_templates
from .bench import EvalReport, MissingHeatmap, evaluate, make_method, sweep

__version__ = "0.1.0"
