"""Budgeted black-box search for the best crop of a fixed aspect ratio.

The search space is (position_x, position_y, step): a top-left corner plus
one size parameter, converted to a concrete box. Every candidate the solver
evaluates is feasible by construction, so the only question is how to spend
the evaluation budget. Three self-contained strategies are provided:

* random   - uniform over positions and quantized steps; the baseline.
* anneal   - Gaussian perturbation of the incumbent with a geometrically
             shrinking radius; coarse exploration early, pixel-level
             refinement late. The default.
* tpe-lite - keeps the top quantile of observations and samples near a
             randomly chosen good one, with bandwidths from that set.

Runs are deterministic given the seed. A single call owns its strategy
state; separate calls share nothing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import AspectRatio, CropBox, Dims, SearchPoint, convert_step, step_max
from .scoring import ScoreBreakdown

STRATEGIES = ("random", "anneal", "tpe-lite")


class InfeasibleSearchSpace(ValueError):
    """No valid crop of the requested ratio exists in the image."""


@dataclass(frozen=True)
class OptimizerConfig:
    iterations: int = 100
    strategy: str = "anneal"
    step_granularity: float = 32.0
    seed: int = 0
    initial_samples: int = 10

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.step_granularity < 1:
            raise ValueError("step_granularity must be at least 1")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}, expected one of {STRATEGIES}")
        if self.initial_samples < 1:
            raise ValueError("initial_samples must be at least 1")


@dataclass
class SearchTrace:
    """Every evaluated candidate in order, plus the incumbent's index."""

    evaluations: list[tuple[SearchPoint, CropBox, float]] = field(default_factory=list)
    best_index: int = -1

    def record(self, point: SearchPoint, box: CropBox, total: float) -> None:
        self.evaluations.append((point, box, total))
        if self.best_index < 0 or total > self.evaluations[self.best_index][2]:
            self.best_index = len(self.evaluations) - 1

    def to_jsonl(self) -> str:
        lines = []
        for i, (point, box, total) in enumerate(self.evaluations):
            lines.append(
                json.dumps(
                    {
                        "iteration": i,
                        "point": {
                            "x": point.position_x,
                            "y": point.position_y,
                            "step": point.step,
                        },
                        "box": box.to_json(),
                        "total": total,
                    },
                    separators=(",", ":"),
                )
            )
        return "\n".join(lines)


def _min_step(position_x: int, position_y: int, dims: Dims, omega: float) -> float:
    # Smallest step whose rounded sides are both >= 1 at this position.
    margin_x = dims.width - position_x
    margin_y = dims.height - position_y
    if margin_x / margin_y <= omega:
        return max(0.5, 0.5 / omega)
    return max(0.5, 0.5 * omega)


def _quantize_step(step: float, lo: float, hi: float, granularity: float) -> float:
    # Snap to multiples of the granularity inside [lo, hi]; when no multiple
    # fits, fall back to the feasible bound itself.
    g = granularity
    i_lo = max(1, math.ceil(lo / g - 1e-12))
    i_hi = math.floor(hi / g + 1e-12)
    if i_lo > i_hi:
        return hi
    i = min(max(round(step / g), i_lo), i_hi)
    return i * g


class _StrategyState:
    """Shared machinery: feasible-point sampling and incumbent tracking."""

    def __init__(self, dims: Dims, omega: float, config: OptimizerConfig):
        self.dims = dims
        self.omega = omega
        self.config = config
        self.iteration = 0
        self.best_point: SearchPoint | None = None
        self.best_total = -math.inf
        self.history: list[tuple[SearchPoint, float]] = []

    def observe(self, point: SearchPoint, total: float) -> None:
        self.history.append((point, total))
        if total > self.best_total:
            self.best_total = total
            self.best_point = point
        self.iteration += 1

    def _feasible_step_range(self, x: int, y: int) -> tuple[float, float]:
        lo = _min_step(x, y, self.dims, self.omega)
        hi = step_max(x, y, self.dims, self.omega)
        return lo, hi

    def uniform(self, rng: np.random.Generator) -> SearchPoint:
        g = self.config.step_granularity
        for _ in range(64):
            x = int(rng.integers(0, self.dims.width))
            y = int(rng.integers(0, self.dims.height))
            lo, hi = self._feasible_step_range(x, y)
            if hi < lo:
                continue
            i_hi = math.floor(hi / g + 1e-12)
            i_lo = max(1, math.ceil(lo / g - 1e-12))
            if i_lo <= i_hi:
                step = float(rng.integers(i_lo, i_hi + 1)) * g
            else:
                step = hi
            return SearchPoint(x, y, step)
        # Corner positions can be infeasible at extreme ratios; the origin
        # never is once the space passed the feasibility precheck.
        lo, hi = self._feasible_step_range(0, 0)
        return SearchPoint(0, 0, _quantize_step(hi, lo, hi, g))

    def near(self, rng: np.random.Generator, center: SearchPoint, radius: float) -> SearchPoint:
        g = self.config.step_granularity
        for _ in range(16):
            x = int(round(center.position_x + rng.normal(0.0, radius)))
            y = int(round(center.position_y + rng.normal(0.0, radius)))
            x = min(max(x, 0), self.dims.width - 1)
            y = min(max(y, 0), self.dims.height - 1)
            lo, hi = self._feasible_step_range(x, y)
            if hi < lo:
                continue
            step = center.step + rng.normal(0.0, max(radius, 0.5 * g))
            return SearchPoint(x, y, _quantize_step(min(max(step, lo), hi), lo, hi, g))
        return self.uniform(rng)

    def propose(self, rng: np.random.Generator) -> SearchPoint:
        raise NotImplementedError


class _RandomState(_StrategyState):
    def propose(self, rng: np.random.Generator) -> SearchPoint:
        return self.uniform(rng)


class _AnnealState(_StrategyState):
    """Gaussian perturbation of the incumbent with a geometrically cooling
    perturbation radius (the temperature): coarse moves early, pixel-level
    refinement late. Every tenth proposal is a fresh uniform probe so the
    search can escape local optima far from the incumbent."""

    FINAL_RADIUS = 0.6
    RESTART_EVERY = 10

    def __init__(self, dims: Dims, omega: float, config: OptimizerConfig):
        super().__init__(dims, omega, config)
        self.start_radius = 0.25 * max(dims.width, dims.height)

    def radius_at(self, iteration: int) -> float:
        warmup = min(self.config.initial_samples, self.config.iterations)
        span = max(1, self.config.iterations - warmup - 1)
        frac = min(1.0, max(0.0, (iteration - warmup) / span))
        return self.start_radius * (self.FINAL_RADIUS / self.start_radius) ** frac

    def propose(self, rng: np.random.Generator) -> SearchPoint:
        warmup = min(self.config.initial_samples, self.config.iterations)
        if self.iteration < warmup or self.best_point is None:
            return self.uniform(rng)
        if (self.iteration - warmup) % self.RESTART_EVERY == self.RESTART_EVERY - 1:
            return self.uniform(rng)
        return self.near(rng, self.best_point, self.radius_at(self.iteration))


class _TpeLiteState(_StrategyState):
    """Sample near the top quantile of past observations."""

    GAMMA = 0.25

    def propose(self, rng: np.random.Generator) -> SearchPoint:
        if self.iteration < self.config.initial_samples:
            return self.uniform(rng)
        ranked = sorted(self.history, key=lambda e: -e[1])
        good = ranked[: max(1, math.ceil(self.GAMMA * len(ranked)))]
        anchor = good[int(rng.integers(0, len(good)))][0]
        xs = np.array([p.position_x for p, _ in good], dtype=float)
        ys = np.array([p.position_y for p, _ in good], dtype=float)
        spread = max(float(xs.std()), float(ys.std()), 1.0)
        return self.near(rng, anchor, spread)


_STRATEGY_STATES = {
    "random": _RandomState,
    "anneal": _AnnealState,
    "tpe-lite": _TpeLiteState,
}


def sample_point(
    dims: Dims,
    omega: AspectRatio | float,
    rng: np.random.Generator,
    state: _StrategyState,
) -> SearchPoint:
    """Draw the next candidate from a strategy's proposal distribution."""
    assert state.dims == dims and state.omega == float(omega)
    return state.propose(rng)


def check_feasible(dims: Dims, omega: AspectRatio | float) -> None:
    """Raise InfeasibleSearchSpace unless a crop of ratio omega with both
    sides at least one pixel fits the image. The origin sees the full
    margins, so feasibility anywhere implies feasibility there."""
    w = float(omega)
    lo = _min_step(0, 0, dims, w)
    hi = step_max(0, 0, dims, w)
    if hi < lo:
        raise InfeasibleSearchSpace(
            f"no box of ratio {w} with sides >= 1 fits {dims.width}x{dims.height}"
        )


def make_strategy_state(dims: Dims, omega: AspectRatio | float, config: OptimizerConfig) -> _StrategyState:
    return _STRATEGY_STATES[config.strategy](dims, float(omega), config)


def optimize(
    score: Callable[[CropBox], ScoreBreakdown],
    dims: Dims,
    omega: AspectRatio | float,
    config: OptimizerConfig,
) -> tuple[CropBox, ScoreBreakdown, SearchTrace]:
    """Run the configured strategy for exactly `config.iterations` score
    evaluations and return the incumbent crop, its score breakdown, and the
    full trace. First incumbent wins on ties."""
    w = float(omega)
    check_feasible(dims, w)
    rng = np.random.default_rng(config.seed)
    state = make_strategy_state(dims, w, config)
    trace = SearchTrace()
    best_box: CropBox | None = None
    best_bd: ScoreBreakdown | None = None
    for _ in range(config.iterations):
        point = sample_point(dims, w, rng, state)
        box = convert_step(point, dims, w)
        bd = score(box)
        trace.record(point, box, bd.total)
        state.observe(point, bd.total)
        if best_bd is None or bd.total > best_bd.total:
            best_box, best_bd = box, bd
    assert best_box is not None and best_bd is not None
    return best_box, best_bd, trace
