"""Exhaustive placement search for tiny instances (test ground truth).

Fitness is evaluated here with per-cell bitsets built from direct distance
tests, independently of :mod:`meshplace.coverage`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from meshplace.coverage import Placement
from meshplace.region import Region

MAX_CONFIGURATIONS = 10_000_000


class InstanceTooLarge(ValueError):
    def __init__(self, configurations: int):
        super().__init__(
            f"{configurations} configurations exceed the oracle limit of {MAX_CONFIGURATIONS}; "
            "use a smaller region or fewer routers"
        )
        self.configurations = configurations


@dataclass
class OracleResult:
    best_f: int
    best_placements: list[Placement] = field(default_factory=list)
    evaluated: int = 0


def configuration_count(eligible: int, n: int) -> int:
    """Multisets of size ``n`` drawn from ``eligible`` cells."""
    return math.comb(eligible + n - 1, n)


def interest_bitsets(region: Region, r: int) -> dict[tuple[int, int], int]:
    """For each eligible cell, the interest cells its disc covers, as a bitset."""
    interest = [
        (x, y)
        for y in range(region.height)
        for x in range(region.width)
        if region.cover[y, x]
    ]
    sets = {}
    for cx, cy in region.eligible_cells:
        bits = 0
        for bit, (x, y) in enumerate(interest):
            if (x - cx) ** 2 + (y - cy) ** 2 < r * r:
                bits |= 1 << bit
        sets[(cx, cy)] = bits
    return sets


def exhaustive_best(region: Region, n: int, r: int, cap: int = 16) -> OracleResult:
    if n < 0:
        raise ValueError("router count must be >= 0")
    cells = region.eligible_cells
    total = configuration_count(len(cells), n)
    if total > MAX_CONFIGURATIONS:
        raise InstanceTooLarge(total)
    bitsets = interest_bitsets(region, r)

    best_f, best, evaluated = -1, [], 0
    for combo in combinations_with_replacement(cells, n):
        bits = 0
        for cell in combo:
            bits |= bitsets[cell]
        f = bits.bit_count()
        evaluated += 1
        if f > best_f:
            best_f, best = f, [combo]
        elif f == best_f and len(best) < cap:
            best.append(combo)
    return OracleResult(best_f, [Placement(list(c), r) for c in best], evaluated)
