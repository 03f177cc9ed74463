import numpy as np
import pytest

from meshplace.region import Region, RegionGenParams, generate_region


def make_region(rows):
    """Region from a list of row strings using the .region characters."""
    flags = {"I": (1, 1), "i": (1, 0), "o": (0, 1), "x": (0, 0)}
    cover = np.array([[flags[c][0] for c in row] for row in rows], dtype=np.uint8)
    place = np.array([[flags[c][1] for c in row] for row in rows], dtype=np.uint8)
    return Region(len(rows[0]), len(rows), cover, place)


def random_region(rng, width, height, p_interest=0.5, p_place=0.8):
    while True:
        cover = (rng.random((height, width)) < p_interest).astype(np.uint8)
        place = (rng.random((height, width)) < p_place).astype(np.uint8)
        if np.any(cover & place):
            return Region(width, height, cover, place)


@pytest.fixture
def all_interest_5x5():
    return make_region(["IIIII"] * 5)


@pytest.fixture(scope="session")
def region_200():
    return generate_region(RegionGenParams(seed=42))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
