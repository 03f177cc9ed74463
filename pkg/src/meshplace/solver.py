"""Constant-temperature Metropolis search over router positions.

One router moves per iteration, either by a unit step or by a jump to a random
eligible cell (cover=1 and place=1). Fitness changes are evaluated
incrementally on the two affected discs. The search stops once the best
fitness has not improved for ``nbtostop`` consecutive iterations.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

from meshplace.coverage import CoverState, Placement
from meshplace.region import Region

AcceptanceForm = Literal["paper", "canonical"]

EIGHT_NEIGHBOURS = ((-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1))
MAX_PROPOSAL_ATTEMPTS = 32
AREA_PI = 3.14


@dataclass(frozen=True)
class MoveConfig:
    step_moves: tuple[tuple[int, int], ...] = EIGHT_NEIGHBOURS
    jump_probability: float = 0.2

    def __post_init__(self):
        if not self.step_moves:
            raise ValueError("step_moves must not be empty")
        if not 0.0 <= self.jump_probability <= 1.0:
            raise ValueError("jump_probability must lie in [0, 1]")
        object.__setattr__(self, "step_moves", tuple(tuple(m) for m in self.step_moves))


@dataclass(frozen=True)
class SolverParams:
    T: float = 0.1
    nbtostop: int = 500
    r: int = 8
    init_factor: float = 1.4
    seed: int = 0
    move_config: MoveConfig = field(default_factory=MoveConfig)
    max_iterations: int = 1_000_000
    acceptance_form: AcceptanceForm = "paper"

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("temperature T must be > 0")
        if self.nbtostop < 1:
            raise ValueError("nbtostop must be >= 1")
        if self.r < 1:
            raise ValueError("radius r must be >= 1")
        if not 1.0 < self.init_factor < 2.0:
            raise ValueError("init_factor must lie strictly between 1 and 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.acceptance_form not in ("paper", "canonical"):
            raise ValueError(f"unknown acceptance_form {self.acceptance_form!r}")


class Move(NamedTuple):
    index: int
    target: tuple[int, int]
    kind: str  # "step", "jump" or "noop"


@dataclass
class SearchTrace:
    """Per-iteration record of a search run.

    ``f[i]`` is the current fitness after iteration ``i``; ``initial_f`` the
    fitness before the first iteration.
    """

    initial_f: int
    f: list[int] = field(default_factory=list)
    delta: list[int] = field(default_factory=list)
    accepted: list[bool] = field(default_factory=list)
    kind: list[str] = field(default_factory=list)
    router: list[int] = field(default_factory=list)
    target: list[tuple[int, int]] = field(default_factory=list)
    best_f: int = 0
    best_iteration: int = 0
    stopped_by: str = ""

    @property
    def iterations_run(self) -> int:
        return len(self.f)

    def best_curve(self) -> list[int]:
        out, best = [], self.initial_f
        for f in self.f:
            best = max(best, f)
            out.append(best)
        return out


def nr_min(region: Region, r: int) -> int:
    """Area lower bound on the router count, with the constant 3.14."""
    if r < 1:
        raise ValueError("radius must be >= 1")
    return math.ceil(region.interest_count / (r * r * AREA_PI))


def nr_init(nr_min: int, init_factor: float) -> int:
    """Starting router count strictly between ``nr_min`` and ``2 * nr_min``.

    The open window is empty for ``nr_min == 1``; that case returns 2.
    """
    if not 1.0 < init_factor < 2.0:
        raise ValueError(f"init_factor must lie strictly between 1 and 2, got {init_factor}")
    if nr_min < 1:
        raise ValueError("nr_min must be >= 1")
    if nr_min == 1:
        return 2
    n = math.ceil(init_factor * nr_min)
    return min(max(n, nr_min + 1), 2 * nr_min - 1)


def init_placement(region: Region, n: int, rng: random.Random, r: int = 8) -> Placement:
    """``n`` routers drawn uniformly, with replacement, from eligible cells."""
    if n < 1:
        raise ValueError("router count must be >= 1")
    cells = region.eligible_cells
    if not cells:
        raise ValueError("region has no eligible cell")
    return Placement([cells[rng.randrange(len(cells))] for _ in range(n)], r)


def propose_move(
    region: Region, placement: Placement, rng: random.Random, config: MoveConfig = MoveConfig()
) -> Move:
    if not placement.positions:
        raise ValueError("cannot move a router in an empty placement")
    index = rng.randrange(len(placement.positions))
    x, y = placement.positions[index]
    cells = region.eligible_cells
    for _ in range(MAX_PROPOSAL_ATTEMPTS):
        if config.jump_probability > 0 and rng.random() < config.jump_probability:
            return Move(index, cells[rng.randrange(len(cells))], "jump")
        dx, dy = config.step_moves[rng.randrange(len(config.step_moves))]
        if region.is_eligible(x + dx, y + dy):
            return Move(index, (x + dx, y + dy), "step")
    return Move(index, (x, y), "noop")


def accept(delta_f: int, T: float, rng: random.Random, form: AcceptanceForm = "paper") -> bool:
    """Metropolis test ``x < exp(T * delta_f)`` with ``x`` uniform in (0, 1).

    ``form="canonical"`` uses ``exp(delta_f / T)`` instead.
    """
    if delta_f >= 0:
        return True
    x = rng.random()
    while x == 0.0:
        x = rng.random()
    exponent = T * delta_f if form == "paper" else delta_f / T
    return x < math.exp(exponent)


def _search(region, placement, params, rng, accept_fn):
    state = CoverState.from_placement(region, placement)
    current = placement.copy()
    trace = SearchTrace(initial_f=state.fitness)
    best_f = state.fitness
    best_positions = list(current.positions)
    since_best = 0
    config = params.move_config
    # bound lookups hoisted out of the hot loop
    f_log, d_log, a_log = trace.f, trace.delta, trace.accepted
    k_log, r_log, t_log = trace.kind, trace.router, trace.target
    positions = current.positions

    while True:
        if since_best >= params.nbtostop:
            trace.stopped_by = "nbtostop"
            break
        if len(f_log) >= params.max_iterations:
            trace.stopped_by = "max_iterations"
            break
        move = propose_move(region, current, rng, config)
        src = positions[move.index]
        delta = state.move_delta(src, move.target)
        ok = accept_fn(delta)
        if ok and move.target != src:
            state.move_delta_apply(src, move.target)
            positions[move.index] = move.target
        f_log.append(state.fitness)
        d_log.append(delta)
        a_log.append(ok)
        k_log.append(move.kind)
        r_log.append(move.index)
        t_log.append(move.target)
        if state.fitness > best_f:
            best_f = state.fitness
            best_positions = list(positions)
            trace.best_iteration = len(f_log)
            since_best = 0
        else:
            since_best += 1

    trace.best_f = best_f
    best = Placement(best_positions, placement.radius)
    return best, CoverState.from_placement(region, best), trace


def run_metropolis(region: Region, placement: Placement, params: SolverParams, rng: random.Random):
    """Metropolis search from ``placement``; returns the best placement seen,
    its CoverState and the SearchTrace."""
    return _search(
        region, placement, params, rng,
        lambda d: accept(d, params.T, rng, params.acceptance_form),
    )


def run_hillclimb(region: Region, placement: Placement, params: SolverParams, rng: random.Random):
    """Same loop as :func:`run_metropolis`, accepting only non-worsening moves."""
    return _search(region, placement, params, rng, lambda d: d >= 0)
