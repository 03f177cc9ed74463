"""Router-count minimisation: remove one router, re-optimise, check coverage."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from meshplace.coverage import CoverState, Placement, metrics
from meshplace.region import Region
from meshplace.solver import SolverParams, init_placement, nr_init, nr_min, run_metropolis

RELATIVE_DROP = 0.01


class RemovalStrategy(enum.Enum):
    MIN_SINGLE_COVERAGE = "min-single"
    MIN_COVERAGE = "min-coverage"
    MAX_OVER_COVERAGE = "max-over"


class RouterScores(NamedTuple):
    single: int
    total: int
    over: int


def router_scores(
    state: CoverState, placement: Placement, index: int, interest_only: bool = True
) -> RouterScores:
    """Count the router's disc cells covered once, at all, and more than once.

    Only interest cells are counted unless ``interest_only`` is false.
    """
    if not 0 <= index < len(placement.positions):
        raise IndexError(f"router index {index} out of range for {len(placement)} routers")
    grid, st = state._disc_window(placement.positions[index])
    cells = state._mask[st]
    if interest_only:
        cells = cells & state._cover[grid]
    depth = state.depth[grid][cells]
    return RouterScores(
        single=int(np.count_nonzero(depth == 1)),
        total=int(np.count_nonzero(depth >= 1)),
        over=int(np.count_nonzero(depth >= 2)),
    )


def select_removal(
    state: CoverState, placement: Placement, strategy: RemovalStrategy, interest_only: bool = True
) -> int:
    """Index of the router to remove; ties go to the lowest index."""
    if not placement.positions:
        raise ValueError("cannot select a router to remove from an empty placement")
    scores = [router_scores(state, placement, i, interest_only) for i in range(len(placement))]
    if strategy is RemovalStrategy.MIN_SINGLE_COVERAGE:
        keys = [s.single for s in scores]
    elif strategy is RemovalStrategy.MIN_COVERAGE:
        keys = [s.total for s in scores]
    elif strategy is RemovalStrategy.MAX_OVER_COVERAGE:
        keys = [-s.over for s in scores]
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return min(range(len(keys)), key=keys.__getitem__)


@dataclass
class ReductionStep:
    router_count: int
    required_fraction: float
    optional_fraction: float
    f: int
    removed: tuple[int, int] | None
    strategy: RemovalStrategy
    satisfied: bool
    placement: Placement
    iterations: int


@dataclass
class ReductionReport:
    strategy: RemovalStrategy
    threshold: float
    nr_min: int
    nr_init: int
    nr_opt: int
    placement: Placement
    below_threshold: bool
    steps: list[ReductionStep] = field(default_factory=list)

    def step_at(self, router_count: int) -> ReductionStep | None:
        for step in self.steps:
            if step.router_count == router_count:
                return step
        return None

    @property
    def nr_max(self) -> int:
        """Smallest router count at which the curve reaches its best required fraction."""
        best = max(s.required_fraction for s in self.steps)
        return min(s.router_count for s in self.steps if s.required_fraction == best)


def optimize_router_count(
    region: Region,
    params: SolverParams,
    strategy: RemovalStrategy = RemovalStrategy.MIN_SINGLE_COVERAGE,
    threshold: float | None = None,
    rng: random.Random | None = None,
    curve_floor: int | None = None,
    interest_only: bool = True,
) -> ReductionReport:
    """Start at the initial router count and remove routers one at a time.

    ``threshold`` is an absolute required-coverage fraction; ``None`` means
    the best fraction reached at the initial count minus 0.01. The search
    stops at the first count that falls below the threshold, unless
    ``curve_floor`` asks to keep recording the curve down to that count.
    The returned placement is always the one recorded at ``nr_opt``.
    """
    if threshold is not None and not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    if rng is None:
        rng = random.Random(params.seed)
    n_min = nr_min(region, params.r)
    n_init = nr_init(n_min, params.init_factor)

    start = init_placement(region, n_init, rng, params.r)
    placement, state, trace = run_metropolis(region, start, params, rng)
    m = metrics(state, len(placement))
    if threshold is None:
        threshold = max(m.required_fraction - RELATIVE_DROP, 0.0)

    def record(removed):
        step = ReductionStep(
            router_count=len(placement),
            required_fraction=m.required_fraction,
            optional_fraction=m.optional_fraction,
            f=state.fitness,
            removed=removed,
            strategy=strategy,
            satisfied=m.required_fraction >= threshold,
            placement=placement.copy(),
            iterations=trace.iterations_run,
        )
        steps.append(step)
        return step

    steps: list[ReductionStep] = []
    first = record(None)
    best_step = first
    below = not first.satisfied
    violated = below
    while len(placement) > 1:
        if violated and (curve_floor is None or len(placement) <= curve_floor):
            break
        index = select_removal(state, placement, strategy, interest_only)
        removed = placement.positions[index]
        remaining = Placement(
            placement.positions[:index] + placement.positions[index + 1:], placement.radius
        )
        placement, state, trace = run_metropolis(region, remaining, params, rng)
        m = metrics(state, len(placement))
        step = record(removed)
        if not violated:
            if step.satisfied:
                best_step = step
            else:
                violated = True

    return ReductionReport(
        strategy=strategy,
        threshold=threshold,
        nr_min=n_min,
        nr_init=n_init,
        nr_opt=best_step.router_count,
        placement=best_step.placement.copy(),
        below_threshold=below,
        steps=steps,
    )
