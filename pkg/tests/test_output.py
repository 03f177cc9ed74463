import numpy as np

from meshplace.coverage import CoverState, Placement
from meshplace.output import (
    DEPTH_ONE,
    DEPTH_THREE_PLUS,
    DEPTH_TWO,
    UNCOVERED_BLOCKED,
    UNCOVERED_INTEREST,
    UNCOVERED_OPTIONAL,
    curve_csv,
    depth_colors,
    emit_coverage_curve,
    parse_positions,
    read_ppm,
    read_positions,
    render_depth_image,
    write_positions,
)
from meshplace.reduction import ReductionReport, ReductionStep, RemovalStrategy

from conftest import make_region, random_region


def test_uncovered_optional_is_dark_gray(tmp_path):
    region = make_region(["oooo", "oooI", "oooo"])
    state = CoverState(region, 2)
    render_depth_image(region, state, tmp_path / "a.ppm")
    img = read_ppm((tmp_path / "a.ppm").read_bytes())
    assert img.shape == (3, 4, 3)
    optional = region.cover == 0
    assert (img[optional] == UNCOVERED_OPTIONAL).all()
    assert tuple(img[1, 3]) == UNCOVERED_INTEREST


def test_depth_two_interest_is_red():
    region = make_region(["IIIII"] * 3)
    state = CoverState.from_placement(region, Placement([(1, 1), (3, 1)], 2))
    img = depth_colors(region, state.depth)
    assert state.depth[1, 2] == 2
    assert tuple(img[1, 2]) == (255, 0, 0)
    assert tuple(img[1, 0]) == DEPTH_ONE


def test_ppm_header_and_size(tmp_path):
    region = make_region(["Iox", "ooo"])
    render_depth_image(region, CoverState(region, 1), tmp_path / "b.ppm")
    data = (tmp_path / "b.ppm").read_bytes()
    assert data.startswith(b"P6\n3 2\n255\n")
    assert len(data) == len(b"P6\n3 2\n255\n") + 3 * 2 * 3


def test_colors_recover_buckets():
    region = random_region(np.random.default_rng(0), 40, 30, 0.4, 0.7)
    rng = np.random.default_rng(1)
    cells = [(int(rng.integers(40)), int(rng.integers(30))) for _ in range(25)]
    state = CoverState.from_placement(region, Placement(cells, 5))
    img = depth_colors(region, state.depth)
    decode = {
        UNCOVERED_INTEREST: 0, UNCOVERED_OPTIONAL: 0, UNCOVERED_BLOCKED: 0,
        DEPTH_ONE: 1, DEPTH_TWO: 2, DEPTH_THREE_PLUS: 3,
    }
    assert len(decode) == 6
    buckets = np.array([[decode[tuple(px)] for px in row] for row in img])
    assert np.array_equal(buckets, np.minimum(state.depth, 3))
    uncovered = state.depth == 0
    cover = region.cover.astype(bool)
    place = region.place.astype(bool)
    assert (img[uncovered & cover] == UNCOVERED_INTEREST).all()
    assert (img[uncovered & ~cover & place] == UNCOVERED_OPTIONAL).all()
    assert (img[uncovered & ~cover & ~place] == UNCOVERED_BLOCKED).all()


def _report(counts):
    steps = [
        ReductionStep(n, 0.123456, 0.05, 10 * n, None, RemovalStrategy.MIN_COVERAGE, True,
                      Placement([(0, 0)] * n, 2), 0)
        for n in counts
    ]
    return ReductionReport(RemovalStrategy.MIN_COVERAGE, 0.1, 1, counts[0], counts[-1],
                           steps[-1].placement, False, steps)


def test_curve_single_step(tmp_path):
    emit_coverage_curve(_report([4]), tmp_path / "c.csv", seed=9)
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines == [
        "router_count,required_fraction,optional_fraction,f,strategy,seed",
        "4,0.1235,0.0500,40,min-coverage,9",
    ]


def test_curve_descending():
    rows = curve_csv(_report([5, 4, 3]), 1).splitlines()[1:]
    assert [int(r.split(",")[0]) for r in rows] == [5, 4, 3]


def test_positions_roundtrip(tmp_path):
    placements = [Placement([(1, 2), (30, 4)], 8), Placement([(0, 0)], 8), Placement([], 8)]
    write_positions(placements, tmp_path / "p.positions")
    assert (tmp_path / "p.positions").read_text().splitlines()[0] == "1,2 30,4"
    assert read_positions(tmp_path / "p.positions", 8) == placements
    assert parse_positions("3,4", 2) == Placement([(3, 4)], 2)
