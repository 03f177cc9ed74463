"""Writers for coverage curves, placement logs and depth images (binary PPM)."""

from __future__ import annotations

import csv
import io

import numpy as np

from meshplace.coverage import CoverState, Placement
from meshplace.region import Region

CURVE_HEADER = ("router_count", "required_fraction", "optional_fraction", "f", "strategy", "seed")

UNCOVERED_INTEREST = (0, 0, 0)
UNCOVERED_OPTIONAL = (64, 64, 64)
UNCOVERED_BLOCKED = (32, 32, 32)
DEPTH_ONE = (0, 0, 255)
DEPTH_TWO = (255, 0, 0)
DEPTH_THREE_PLUS = (255, 255, 255)


def depth_colors(region: Region, depth: np.ndarray) -> np.ndarray:
    """RGB image of shape (height, width, 3).

    Covered cells are coloured by depth (1 blue, 2 red, 3+ white); uncovered
    cells by class (interest black, optional placeable dark gray, optional
    blocked darker gray).
    """
    img = np.empty((region.height, region.width, 3), dtype=np.uint8)
    cover = region.cover.astype(bool)
    place = region.place.astype(bool)
    img[:] = UNCOVERED_OPTIONAL
    img[~cover & ~place] = UNCOVERED_BLOCKED
    img[cover] = UNCOVERED_INTEREST
    img[depth == 1] = DEPTH_ONE
    img[depth == 2] = DEPTH_TWO
    img[depth >= 3] = DEPTH_THREE_PLUS
    return img


def ppm_bytes(rgb: np.ndarray) -> bytes:
    h, w, _ = rgb.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(rgb, dtype=np.uint8).tobytes()


def read_ppm(data: bytes) -> np.ndarray:
    """Parse a P6 image as written by :func:`ppm_bytes`."""
    magic, dims, maxval, body = data.split(b"\n", 3)
    if magic != b"P6" or maxval != b"255":
        raise ValueError("not an 8-bit P6 image")
    w, h = map(int, dims.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3)


def render_depth_image(region: Region, state: CoverState, path) -> None:
    with open(path, "wb") as fh:
        fh.write(ppm_bytes(depth_colors(region, state.depth)))


def curve_csv(report, seed) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_HEADER)
    for step in sorted(report.steps, key=lambda s: -s.router_count):
        writer.writerow([
            step.router_count,
            f"{step.required_fraction:.4f}",
            f"{step.optional_fraction:.4f}",
            step.f,
            step.strategy.value,
            seed,
        ])
    return buf.getvalue()


def emit_coverage_curve(report, path, seed=0) -> None:
    if not report.steps:
        raise ValueError("report has no steps")
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(curve_csv(report, seed))


def format_positions(placement: Placement) -> str:
    return " ".join(f"{x},{y}" for x, y in placement.positions)


def parse_positions(line: str, radius: int) -> Placement:
    cells = []
    for tok in line.split():
        x, y = tok.split(",")
        cells.append((int(x), int(y)))
    return Placement(cells, radius)


def write_positions(placements, path) -> None:
    """One line per placement, space-separated ``x,y`` pairs."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for placement in placements:
            fh.write(format_positions(placement) + "\n")


def read_positions(path, radius: int) -> list[Placement]:
    with open(path, encoding="ascii") as fh:
        return [parse_positions(line, radius) for line in fh.read().splitlines()]
