"""Gridded region model, ``.region`` text format and a seeded blob generator.

Coordinates follow matrix indexing: ``x`` is the column, ``y`` the row, with
the origin in the top-left corner. Matrices are stored as ``[y, x]``.

File format::

    <width> <height>
    <row 0: width characters>
    ...
    <row height-1>

with one character per cell:

    ``I``  interest, placeable       (cover=1, place=1)
    ``i``  interest, not placeable   (cover=1, place=0)
    ``o``  optional, placeable       (cover=0, place=1)
    ``x``  optional, blocked         (cover=0, place=0)
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class RegionError(ValueError):
    """Raised for malformed region text or an unusable region."""


class CellClass(enum.Enum):
    INTEREST = "I"
    INTEREST_NO_PLACE = "i"
    OPTIONAL_PLACEABLE = "o"
    OPTIONAL_BLOCKED = "x"

    @property
    def cover(self) -> int:
        return int(self in (CellClass.INTEREST, CellClass.INTEREST_NO_PLACE))

    @property
    def place(self) -> int:
        return int(self in (CellClass.INTEREST, CellClass.OPTIONAL_PLACEABLE))

    @classmethod
    def from_flags(cls, cover: int, place: int) -> "CellClass":
        return _CLASS_BY_FLAGS[(int(cover), int(place))]


_CLASS_BY_FLAGS = {(c.cover, c.place): c for c in CellClass}
_CHAR_TO_FLAGS = {c.value: (c.cover, c.place) for c in CellClass}


@dataclass(frozen=True, eq=False)
class Region:
    """A ``width`` x ``height`` grid of elementary areas.

    ``cover`` and ``place`` are read-only uint8 arrays of shape
    ``(height, width)`` holding 0/1 flags.
    """

    width: int
    height: int
    cover: np.ndarray = field(repr=False)
    place: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise RegionError(f"grid must be at least 1x1, got {self.width}x{self.height}")
        shape = (self.height, self.width)
        cover = np.array(self.cover, dtype=np.uint8)
        place = np.array(self.place, dtype=np.uint8)
        if cover.shape != shape or place.shape != shape:
            raise RegionError(
                f"cover {cover.shape} / place {place.shape} do not match (height, width) = {shape}"
            )
        if cover.max(initial=0) > 1 or place.max(initial=0) > 1:
            raise RegionError("cover and place must hold only 0 or 1")
        if not np.any(cover & place):
            raise RegionError("region has no cell with cover=1 and place=1; no router can be placed")
        cover.setflags(write=False)
        place.setflags(write=False)
        object.__setattr__(self, "cover", cover)
        object.__setattr__(self, "place", place)

    def __eq__(self, other):
        if not isinstance(other, Region):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.cover, other.cover)
            and np.array_equal(self.place, other.place)
        )

    __hash__ = None

    @cached_property
    def eligible_cells(self) -> list[tuple[int, int]]:
        """Cells (x, y) where a router may sit: cover=1 and place=1, row-major."""
        ys, xs = np.nonzero(self.cover & self.place)
        return [(int(x), int(y)) for y, x in zip(ys, xs)]

    @cached_property
    def eligible_mask(self) -> np.ndarray:
        mask = (self.cover & self.place).astype(bool)
        mask.setflags(write=False)
        return mask

    @cached_property
    def interest_count(self) -> int:
        return int(self.cover.sum())

    @cached_property
    def optional_count(self) -> int:
        return self.width * self.height - self.interest_count

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def is_eligible(self, x: int, y: int) -> bool:
        return self.in_bounds(x, y) and bool(self.eligible_mask[y, x])


def cell_class(region: Region, x: int, y: int) -> CellClass:
    if not region.in_bounds(x, y):
        raise IndexError(f"cell ({x}, {y}) outside {region.width}x{region.height} grid")
    return CellClass.from_flags(region.cover[y, x], region.place[y, x])


def parse_region(text: str) -> Region:
    lines = text.splitlines()
    # a single trailing newline is tolerated by splitlines(); blank tails are not
    if not lines:
        raise RegionError("line 1: missing header 'width height'")
    header = lines[0].split()
    if len(header) != 2 or not all(tok.isdigit() for tok in header):
        raise RegionError(f"line 1: malformed header {lines[0]!r}, expected 'width height'")
    width, height = int(header[0]), int(header[1])
    if width < 1 or height < 1:
        raise RegionError(f"line 1: grid must be at least 1x1, got {width}x{height}")
    rows = lines[1:]
    if len(rows) != height:
        raise RegionError(f"line {len(lines) + 1}: expected {height} rows, found {len(rows)}")

    cover = np.zeros((height, width), dtype=np.uint8)
    place = np.zeros((height, width), dtype=np.uint8)
    for y, row in enumerate(rows):
        lineno = y + 2
        if len(row) != width:
            raise RegionError(f"line {lineno}: expected {width} characters, found {len(row)}")
        for x, ch in enumerate(row):
            try:
                cover[y, x], place[y, x] = _CHAR_TO_FLAGS[ch]
            except KeyError:
                raise RegionError(
                    f"line {lineno}, column {x + 1}: unknown cell character {ch!r}"
                ) from None
    return Region(width, height, cover, place)


def serialize_region(region: Region) -> str:
    chars = np.array([["x", "o"], ["i", "I"]])
    grid = chars[region.cover, region.place]
    rows = ["".join(row) for row in grid]
    return "\n".join([f"{region.width} {region.height}", *rows])


def load_region(path) -> Region:
    with open(path, encoding="ascii") as fh:
        return parse_region(fh.read())


def save_region(region: Region, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(serialize_region(region))
        fh.write("\n")


@dataclass(frozen=True)
class RegionGenParams:
    width: int = 200
    height: int = 200
    interest_blob_count: int = 12
    interest_blob_radius_range: tuple[int, int] = (8, 20)
    prohibited_blob_count: int = 5
    prohibited_blob_radius_range: tuple[int, int] = (4, 10)
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be positive")
        if self.interest_blob_count < 0 or self.prohibited_blob_count < 0:
            raise ValueError("blob counts must be >= 0")
        for name in ("interest_blob_radius_range", "prohibited_blob_radius_range"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ValueError(f"{name} must satisfy 0 < min <= max, got {(lo, hi)}")


def _stamp_disc(mask: np.ndarray, cx: int, cy: int, radius: int) -> None:
    h, w = mask.shape
    y0, y1 = max(cy - radius, 0), min(cy + radius + 1, h)
    x0, x1 = max(cx - radius, 0), min(cx + radius + 1, w)
    yy, xx = np.ogrid[y0:y1, x0:x1]
    mask[y0:y1, x0:x1] |= (xx - cx) ** 2 + (yy - cy) ** 2 < radius * radius


def generate_region(params: RegionGenParams) -> Region:
    """Random region: interest discs on an optional placeable background,
    then prohibited discs stamped on top (prohibited wins on overlap)."""
    rng = random.Random(params.seed)
    interest = np.zeros((params.height, params.width), dtype=bool)
    prohibited = np.zeros_like(interest)
    for count, (lo, hi), mask in (
        (params.interest_blob_count, params.interest_blob_radius_range, interest),
        (params.prohibited_blob_count, params.prohibited_blob_radius_range, prohibited),
    ):
        for _ in range(count):
            cx = rng.randrange(params.width)
            cy = rng.randrange(params.height)
            _stamp_disc(mask, cx, cy, rng.randint(lo, hi))

    cover = (interest & ~prohibited).astype(np.uint8)
    place = (~prohibited).astype(np.uint8)
    return Region(params.width, params.height, cover, place)
