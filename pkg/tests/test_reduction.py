import random

import numpy as np
import pytest

from meshplace.coverage import CoverState, Placement, depth_from_placement, metrics
from meshplace.reduction import (
    RemovalStrategy,
    optimize_router_count,
    router_scores,
    select_removal,
)
from meshplace.region import RegionGenParams, generate_region
from meshplace.solver import SolverParams

from conftest import make_region, random_region


@pytest.fixture(scope="module")
def small_region():
    return generate_region(RegionGenParams(60, 60, 5, (4, 8), 2, (2, 4), seed=3))


def test_scores_sole_router(all_interest_5x5):
    p = Placement([(2, 2)], 2)
    state = CoverState.from_placement(all_interest_5x5, p)
    s = router_scores(state, p, 0)
    assert (s.single, s.total, s.over) == (9, 9, 0)


def test_scores_colocated(all_interest_5x5):
    p = Placement([(2, 2), (2, 2)], 2)
    state = CoverState.from_placement(all_interest_5x5, p)
    for i in range(2):
        s = router_scores(state, p, i)
        assert (s.single, s.total, s.over) == (0, 9, 9)
    with pytest.raises(IndexError):
        router_scores(state, p, 2)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("interest_only", [True, False])
def test_scores_match_recount(seed, interest_only):
    region = random_region(np.random.default_rng(seed), 30, 25, 0.5, 0.9)
    rng = random.Random(seed)
    p = Placement([(rng.randrange(30), rng.randrange(25)) for _ in range(8)], 4)
    state = CoverState.from_placement(region, p)
    depth = depth_from_placement(region, p)
    for i, (px, py) in enumerate(p.positions):
        single = total = over = 0
        for y in range(region.height):
            for x in range(region.width):
                if (x - px) ** 2 + (y - py) ** 2 >= 16:
                    continue
                if interest_only and not region.cover[y, x]:
                    continue
                single += depth[y, x] == 1
                total += depth[y, x] >= 1
                over += depth[y, x] >= 2
        assert router_scores(state, p, i, interest_only) == (single, total, over)


def test_select_single_router(all_interest_5x5):
    p = Placement([(1, 1)], 2)
    state = CoverState.from_placement(all_interest_5x5, p)
    for strategy in RemovalStrategy:
        assert select_removal(state, p, strategy) == 0
    with pytest.raises(ValueError):
        select_removal(state, Placement([], 2), RemovalStrategy.MIN_COVERAGE)


def test_select_redundant_router():
    region = make_region(["I" * 12] * 4)
    # isolated router first so a lowest-index tie-break cannot explain the pick
    p = Placement([(10, 1), (2, 1), (2, 1)], 2)
    state = CoverState.from_placement(region, p)
    assert select_removal(state, p, RemovalStrategy.MIN_SINGLE_COVERAGE) == 1
    assert select_removal(state, p, RemovalStrategy.MAX_OVER_COVERAGE) == 1


def test_select_tie_break_lowest_index(all_interest_5x5):
    p = Placement([(1, 1), (3, 3)], 2)
    state = CoverState.from_placement(all_interest_5x5, p)
    for strategy in RemovalStrategy:
        assert select_removal(state, p, strategy) == 0


def test_select_min_coverage_prefers_edge_router():
    region = make_region(["I" * 9] * 9)
    p = Placement([(4, 4), (0, 0)], 3)
    state = CoverState.from_placement(region, p)
    assert select_removal(state, p, RemovalStrategy.MIN_COVERAGE) == 1


def check_report(report, region):
    counts = [s.router_count for s in report.steps]
    assert counts == list(range(report.nr_init, report.nr_init - len(counts), -1))
    opt_step = report.step_at(report.nr_opt)
    assert report.placement == opt_step.placement
    for step in report.steps:
        m = metrics(CoverState.from_placement(region, step.placement), step.router_count)
        assert m.required_fraction == step.required_fraction
        assert m.optional_fraction == step.optional_fraction
    if not report.below_threshold:
        assert opt_step.required_fraction >= report.threshold
        after = report.step_at(report.nr_opt - 1)
        assert after is None or not after.satisfied


def test_threshold_zero_runs_to_one_router(small_region):
    params = SolverParams(r=4, nbtostop=100, seed=1)
    report = optimize_router_count(small_region, params, threshold=0.0, rng=random.Random(1))
    assert report.nr_opt == 1
    assert report.steps[-1].router_count == 1
    assert all(s.satisfied for s in report.steps)
    check_report(report, small_region)


def test_relative_threshold_default(small_region):
    params = SolverParams(r=4, nbtostop=200, seed=4)
    report = optimize_router_count(small_region, params, rng=random.Random(4))
    assert report.threshold == pytest.approx(report.steps[0].required_fraction - 0.01)
    assert not report.below_threshold
    check_report(report, small_region)
    assert not report.steps[-1].satisfied


def test_full_coverage_threshold():
    # 3x9 strip needs three 3x3 discs (r=2) tiled exactly
    region = make_region(["o" * 11, "o" + "I" * 9 + "o", "o" + "I" * 9 + "o", "o" + "I" * 9 + "o", "o" * 11])
    params = SolverParams(r=2, nbtostop=500, seed=2)
    report = optimize_router_count(region, params, threshold=1.0, rng=random.Random(2))
    assert report.nr_init == 5
    check_report(report, region)
    assert not report.below_threshold
    assert report.steps[0].required_fraction == 1.0
    # three discs of 9 cells are the least that can cover 27 cells
    assert report.nr_opt in (3, 4)
    assert report.steps[-1].router_count == report.nr_opt - 1
    assert not report.steps[-1].satisfied


def test_below_threshold_flag():
    # the 'i' cell at the far corner can never be covered
    rows = ["IIII" + "o" * 12] * 3 + ["o" * 16] * 12 + ["o" * 15 + "i"]
    region = make_region(rows)
    params = SolverParams(r=3, nbtostop=100, seed=0)
    report = optimize_router_count(region, params, threshold=1.0, rng=random.Random(0))
    assert report.below_threshold
    assert report.nr_opt == report.nr_init
    assert len(report.steps) == 1


def test_curve_floor_extends_past_violation(small_region):
    params = SolverParams(r=4, nbtostop=200, seed=4)
    plain = optimize_router_count(small_region, params, rng=random.Random(4))
    floor = plain.nr_opt - 4
    extended = optimize_router_count(small_region, params, rng=random.Random(4), curve_floor=floor)
    assert extended.nr_opt == plain.nr_opt
    assert extended.placement == plain.placement
    assert extended.steps[-1].router_count == floor
    assert [s.router_count for s in extended.steps[: len(plain.steps)]] == [
        s.router_count for s in plain.steps
    ]
    check_report(extended, small_region)


@pytest.mark.parametrize("strategy", list(RemovalStrategy))
def test_reduction_deterministic(small_region, strategy):
    params = SolverParams(r=4, nbtostop=100, seed=7)
    a = optimize_router_count(small_region, params, strategy, rng=random.Random(7))
    b = optimize_router_count(small_region, params, strategy, rng=random.Random(7))
    assert a == b
    check_report(a, small_region)


def test_rejects_bad_threshold(small_region):
    with pytest.raises(ValueError):
        optimize_router_count(small_region, SolverParams(r=4), threshold=1.5)
