"""Disc geometry, CoverDepth bookkeeping and incremental fitness.

A router at cell ``(x, y)`` covers every in-grid cell ``(x + dx, y + dy)``
with ``dx**2 + dy**2 < r**2`` (strict). ``CoverState.depth[y, x]`` counts
the routers covering each cell and ``CoverState.fitness`` the interest cells
covered at least once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from meshplace.region import Region

Cell = tuple[int, int]

_DEPTH_LIMIT = np.iinfo(np.int16).max


class ConsistencyError(RuntimeError):
    """CoverState bookkeeping would become invalid (a caller bug)."""


@dataclass(frozen=True)
class DiscOffsets:
    radius: int
    offsets: tuple[Cell, ...]

    def __len__(self):
        return len(self.offsets)

    def __contains__(self, item):
        return tuple(item) in self.offsets


def disc_offsets(r: int) -> DiscOffsets:
    """Lattice points of the open disc of radius ``r``, ordered by dy then dx."""
    if int(r) != r or r < 1:
        raise ValueError(f"radius must be an integer >= 1, got {r!r}")
    r = int(r)
    offsets = tuple(
        (dx, dy)
        for dy in range(-r + 1, r)
        for dx in range(-r + 1, r)
        if dx * dx + dy * dy < r * r
    )
    return DiscOffsets(r, offsets)


def disc_mask(r: int) -> np.ndarray:
    """Boolean ``(2r-1, 2r-1)`` stencil of the disc, centre at ``[r-1, r-1]``."""
    h = r - 1
    d = np.arange(-h, h + 1)
    return d[None, :] ** 2 + d[:, None] ** 2 < r * r


@dataclass
class Placement:
    """Router cells ``(x, y)`` in a fixed order, all sharing ``radius``."""

    positions: list[Cell]
    radius: int

    def __post_init__(self):
        self.positions = [(int(x), int(y)) for x, y in self.positions]

    def __len__(self):
        return len(self.positions)

    def copy(self) -> "Placement":
        return Placement(list(self.positions), self.radius)


@dataclass(frozen=True)
class CoverageMetrics:
    required_fraction: float
    optional_fraction: float
    covered_interest_cells: int
    router_count: int


@dataclass(eq=False)
class CoverState:
    region: Region
    radius: int
    depth: np.ndarray = field(init=False, repr=False)
    fitness: int = field(init=False, default=0)

    def __post_init__(self):
        self.offsets = disc_offsets(self.radius)
        self._half = self.radius - 1
        self._mask = disc_mask(self.radius)
        self._cover = self.region.cover.astype(bool)
        self.depth = np.zeros((self.region.height, self.region.width), dtype=np.int16)
        self._move_stencils: dict[Cell, np.ndarray] = {}
        # (src, dst, delta, grid, after) from the last move_delta, valid until
        # the next mutation
        self._pending = None

    @classmethod
    def from_placement(cls, region: Region, placement: Placement) -> "CoverState":
        state = cls(region, placement.radius)
        for pos in placement.positions:
            state.add_router(pos)
        return state

    def copy(self) -> "CoverState":
        other = CoverState(self.region, self.radius)
        other.depth = self.depth.copy()
        other.fitness = self.fitness
        return other

    def _check_bounds(self, pos: Cell) -> None:
        x, y = pos
        if not self.region.in_bounds(x, y):
            raise IndexError(
                f"router cell {pos} outside {self.region.width}x{self.region.height} grid"
            )

    def _window(self, x0: int, y0: int, x1: int, y1: int):
        """Clip the box [x0, x1) x [y0, y1) to the grid.

        Returns the grid slices and the matching slices into a stencil whose
        top-left corner sits at (x0, y0).
        """
        H, W = self.depth.shape
        cx0, cy0 = max(x0, 0), max(y0, 0)
        cx1, cy1 = min(x1, W), min(y1, H)
        grid = (slice(cy0, cy1), slice(cx0, cx1))
        stencil = (slice(cy0 - y0, cy1 - y0), slice(cx0 - x0, cx1 - x0))
        return grid, stencil

    def _disc_window(self, pos: Cell):
        x, y = pos
        h = self._half
        return self._window(x - h, y - h, x + h + 1, y + h + 1)

    def add_router(self, pos: Cell) -> int:
        """Account a router at ``pos``; returns the fitness gain (>= 0)."""
        self._check_bounds(pos)
        grid, st = self._disc_window(pos)
        mask = self._mask[st]
        depth = self.depth[grid]
        if depth.max(initial=0) >= _DEPTH_LIMIT:
            raise ConsistencyError("cover depth overflow")
        gained = int(np.count_nonzero(mask & (depth == 0) & self._cover[grid]))
        depth += mask
        self.fitness += gained
        self._pending = None
        return gained

    def remove_router(self, pos: Cell) -> int:
        """Remove a router accounted at ``pos``; returns the fitness change (<= 0)."""
        self._check_bounds(pos)
        grid, st = self._disc_window(pos)
        mask = self._mask[st]
        depth = self.depth[grid]
        if np.any(depth[mask] < 1):
            raise ConsistencyError(f"no router accounted at {pos}: depth would go negative")
        lost = int(np.count_nonzero(mask & (depth == 1) & self._cover[grid]))
        depth -= mask
        self.fitness -= lost
        self._pending = None
        return -lost

    def _stencil(self, dx: int, dy: int) -> np.ndarray:
        """+1 on the target disc, -1 on the source disc, over their bounding box."""
        key = (dx, dy)
        st = self._move_stencils.get(key)
        if st is None:
            n = 2 * self._half + 1
            st = np.zeros((n + abs(dy), n + abs(dx)), dtype=np.int16)
            fx, fy = max(-dx, 0), max(-dy, 0)
            tx, ty = max(dx, 0), max(dy, 0)
            st[fy:fy + n, fx:fx + n] -= self._mask
            st[ty:ty + n, tx:tx + n] += self._mask
            self._move_stencils[key] = st
        return st

    def _overlapping_move(self, src: Cell, dst: Cell):
        """Fitness change of src -> dst and the updated depth window."""
        (sx, sy), (tx, ty) = src, dst
        dx, dy = tx - sx, ty - sy
        h = self._half
        x0, y0 = min(sx, tx) - h, min(sy, ty) - h
        stencil = self._stencil(dx, dy)
        grid, st = self._window(x0, y0, x0 + stencil.shape[1], y0 + stencil.shape[0])
        before = self.depth[grid]
        after = before + stencil[st]
        cover = self._cover[grid]
        delta = int(np.count_nonzero(cover & (after > 0))) - int(
            np.count_nonzero(cover & (before > 0))
        )
        return delta, grid, after

    def _discs_disjoint(self, src: Cell, dst: Cell) -> bool:
        return max(abs(dst[0] - src[0]), abs(dst[1] - src[1])) > 2 * self._half

    def move_delta(self, src: Cell, dst: Cell) -> int:
        """Fitness change of moving one router ``src -> dst``, without mutating."""
        self._check_bounds(src)
        self._check_bounds(dst)
        if src == dst:
            return 0
        if self._discs_disjoint(src, dst):
            g_src, s_src = self._disc_window(src)
            g_dst, s_dst = self._disc_window(dst)
            lost = np.count_nonzero(
                self._mask[s_src] & (self.depth[g_src] == 1) & self._cover[g_src]
            )
            gained = np.count_nonzero(
                self._mask[s_dst] & (self.depth[g_dst] == 0) & self._cover[g_dst]
            )
            return int(gained) - int(lost)
        result = self._overlapping_move(src, dst)
        self._pending = (src, dst, *result)
        return result[0]

    def move_delta_apply(self, src: Cell, dst: Cell) -> int:
        """Move one router ``src -> dst`` touching only the two discs."""
        self._check_bounds(src)
        self._check_bounds(dst)
        if src == dst:
            grid, st = self._disc_window(src)
            if np.any(self.depth[grid][self._mask[st]] < 1):
                raise ConsistencyError(f"no router accounted at {src}")
            return 0
        if self._discs_disjoint(src, dst):
            return self.remove_router(src) + self.add_router(dst)
        pending, self._pending = self._pending, None
        if pending is not None and pending[0] == src and pending[1] == dst:
            delta, grid, after = pending[2:]
        else:
            delta, grid, after = self._overlapping_move(src, dst)
        if after.min(initial=0) < 0:
            raise ConsistencyError(f"no router accounted at {src}: depth would go negative")
        self.depth[grid] = after
        self.fitness += delta
        return delta


def fitness_full(state: CoverState) -> int:
    """Covered interest cells, recomputed from the depth matrix."""
    return int(np.count_nonzero(np.sign(state.depth * state.region.cover)))


def depth_from_placement(region: Region, placement: Placement) -> np.ndarray:
    """CoverDepth by direct per-cell distance tests; slow reference path."""
    depth = np.zeros((region.height, region.width), dtype=np.int64)
    yy, xx = np.mgrid[0:region.height, 0:region.width]
    r2 = placement.radius ** 2
    for px, py in placement.positions:
        depth += (xx - px) ** 2 + (yy - py) ** 2 < r2
    return depth


def metrics(state: CoverState, router_count: int) -> CoverageMetrics:
    region = state.region
    covered = state.depth > 0
    cover = state._cover
    covered_interest = int(np.count_nonzero(covered & cover))
    covered_optional = int(np.count_nonzero(covered & ~cover))
    required = covered_interest / region.interest_count if region.interest_count else 0.0
    optional = covered_optional / region.optional_count if region.optional_count else 0.0
    return CoverageMetrics(required, optional, covered_interest, router_count)


def connectivity_components(placement: Placement, link_radius: float | None = None) -> int:
    """Connected components when routers closer than ``link_radius`` are linked.

    Defaults to ``2 * radius``, i.e. overlapping discs. Diagnostic only; the
    solver does not enforce connectivity.
    """
    if link_radius is None:
        link_radius = 2 * placement.radius
    if link_radius < 1:
        raise ValueError("link_radius must be >= 1")
    n = len(placement)
    if n == 0:
        return 0
    pts = np.asarray(placement.positions, dtype=float)
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
    adjacency = csr_matrix(d2 < link_radius ** 2)
    count, _ = connected_components(adjacency, directed=False)
    return int(count)
