"""Aspect-ratio-exact proposal grids and the exhaustive search over them.

Candidate crops come from a family of sliding windows: a base (height,
width) step pair whose ratio matches the requested aspect ratio is scaled
by integer multiples k, and each size slides across the image with the base
step as the offset. Every generated box therefore satisfies the aspect
ratio by construction, and the whole set is small enough to score
exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .geometry import AspectRatio, CropBox, Dims
from .scoring import ScoreBreakdown

MIN_BASE_STEP = 12
DEFAULT_K_START = 14
DEFAULT_K_END = 28

# Offsets double beyond this ratio (or below its reciprocal): at 3:1 the
# short-side step makes windows along the long axis overlap by more than 90%.
EXTREME_RATIO = 3.0

# Base step search scans anchor sides up to this length before scaling.
_BASE_SEARCH_LIMIT = 64


class EmptyProposalSet(ValueError):
    """No proposal of the smallest size fits the image."""


@dataclass(frozen=True)
class StepPair:
    """Base height/width increments; their ratio approximates the target."""

    step_h: int
    step_w: int


@dataclass(frozen=True)
class ProposalSet:
    boxes: tuple[CropBox, ...]
    omega: float
    k_start: int
    k_end: int
    dims: Dims

    def __len__(self) -> int:
        return len(self.boxes)

    def dump_jsonl(self) -> str:
        import json

        return "\n".join(json.dumps(b.to_json(), separators=(",", ":")) for b in self.boxes)


def get_step_size(omega: AspectRatio | float) -> StepPair:
    """Find the integer (step_h, step_w) pair whose ratio best matches omega.

    Anchor one side at each integer length up to the search limit, round the
    other side from the ratio, and scale any pair whose short side falls
    under the minimum by the smallest integer factor that fixes it. Ties on
    ratio error break toward the smaller step_h.
    """
    w = float(omega)
    best: tuple[float, int, int] | None = None
    candidates: set[tuple[int, int]] = set()
    for anchor in range(1, _BASE_SEARCH_LIMIT + 1):
        for h, ww in ((anchor, round(anchor * w)), (round(anchor / w), anchor)):
            if h < 1 or ww < 1:
                continue
            short = min(h, ww)
            if short < MIN_BASE_STEP:
                factor = -(-MIN_BASE_STEP // short)  # ceil division
                h, ww = h * factor, ww * factor
            candidates.add((h, ww))
    for h, ww in candidates:
        err = abs(ww / h - w)
        key = (err, h, ww)
        if best is None or key < best:
            best = key
    assert best is not None
    return StepPair(best[1], best[2])


def proposal_offsets(steps: StepPair, omega: AspectRatio | float) -> tuple[int, int]:
    """Sliding-window offsets: the base steps, doubled at extreme ratios."""
    w = float(omega)
    if w >= EXTREME_RATIO or w <= 1.0 / EXTREME_RATIO:
        return steps.step_h * 2, steps.step_w * 2
    return steps.step_h, steps.step_w


def generate_proposals(
    dims: Dims,
    omega: AspectRatio | float,
    k_start: int = DEFAULT_K_START,
    k_end: int = DEFAULT_K_END,
) -> ProposalSet:
    """All sliding-window boxes of sizes k*step for k in [k_start, k_end].

    Boxes are emitted in deterministic order: increasing k, then row-major
    position. Sizes that do not fit the image are skipped; if nothing fits,
    EmptyProposalSet is raised.
    """
    if not (1 <= k_start <= k_end):
        raise ValueError(f"need 1 <= k_start <= k_end, got {k_start}..{k_end}")
    w = float(omega)
    steps = get_step_size(w)
    offset_h, offset_w = proposal_offsets(steps, w)
    boxes: list[CropBox] = []
    for k in range(k_start, k_end + 1):
        box_h = k * steps.step_h
        box_w = k * steps.step_w
        if box_h > dims.height or box_w > dims.width:
            continue
        for y in range(0, dims.height - box_h + 1, offset_h):
            for x in range(0, dims.width - box_w + 1, offset_w):
                boxes.append(CropBox(x, y, box_w, box_h))
    if not boxes:
        raise EmptyProposalSet(
            f"no {k_start}*({steps.step_h}x{steps.step_w}) box fits {dims.width}x{dims.height}"
        )
    return ProposalSet(tuple(boxes), w, k_start, k_end, dims)


def exhaustive_search(
    score: Callable[[CropBox], ScoreBreakdown],
    proposals: ProposalSet | Iterable[CropBox],
) -> tuple[CropBox, ScoreBreakdown]:
    """Argmax of the total score over a proposal set.

    Ties break toward the earliest-generated proposal, so results are
    deterministic and match a naive sequential scan exactly.
    """
    boxes = proposals.boxes if isinstance(proposals, ProposalSet) else tuple(proposals)
    if not boxes:
        raise EmptyProposalSet("cannot search an empty proposal set")
    best_box: CropBox | None = None
    best_bd: ScoreBreakdown | None = None
    for box in boxes:
        bd = score(box)
        if best_bd is None or bd.total > best_bd.total:
            best_box, best_bd = box, bd
    assert best_box is not None and best_bd is not None
    return best_box, best_bd
