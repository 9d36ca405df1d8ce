"""Two-dimensional mesh geometry and X-Y (dimension-order) routing.

Nodes carry a 1-based ``(row, col)`` coordinate and a row-major integer id::

    id = (row - 1) * cols + (col - 1)

Routes resolve the column coordinate first, then the row coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class Coord(NamedTuple):
    row: int
    col: int


@dataclass(frozen=True)
class GridSpec:
    rows: int
    cols: int
    spacing: float = 1.0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid dimensions must be positive, got {self.rows}x{self.cols}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")


class Grid:
    """Immutable rows x cols mesh with unit-step neighbor relations."""

    def __init__(self, spec: GridSpec):
        self.spec = spec
        self.rows = spec.rows
        self.cols = spec.cols
        self.spacing = float(spec.spacing)
        self.n = spec.rows * spec.cols
        ids = np.arange(self.n)
        # 1-based coordinates, as in the mixed-radix labelling
        self._row = ids // self.cols + 1
        self._col = ids % self.cols + 1
        self._row.setflags(write=False)
        self._col.setflags(write=False)

    def __repr__(self):
        return f"Grid({self.rows}x{self.cols}, spacing={self.spacing})"

    @property
    def row_array(self) -> np.ndarray:
        return self._row

    @property
    def col_array(self) -> np.ndarray:
        return self._col

    def _check(self, node: int) -> int:
        node = int(node)
        if not 0 <= node < self.n:
            raise IndexError(f"node id {node} outside [0, {self.n})")
        return node

    def coord(self, node: int) -> Coord:
        node = self._check(node)
        return Coord(node // self.cols + 1, node % self.cols + 1)

    def node_id(self, coord) -> int:
        row, col = coord
        if not (1 <= row <= self.rows and 1 <= col <= self.cols):
            raise IndexError(f"coordinate {tuple(coord)} outside {self.rows}x{self.cols} grid")
        return (row - 1) * self.cols + (col - 1)

    def distance(self, a: int, b: int) -> float:
        ra, ca = self.coord(a)
        rb, cb = self.coord(b)
        return self.spacing * math.hypot(ra - rb, ca - cb)

    def manhattan(self, a: int, b: int) -> int:
        ra, ca = self.coord(a)
        rb, cb = self.coord(b)
        return abs(ra - rb) + abs(ca - cb)

    def neighbors(self, node: int) -> set[int]:
        row, col = self.coord(node)
        out = set()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            r, c = row + dr, col + dc
            if 1 <= r <= self.rows and 1 <= c <= self.cols:
                out.add((r - 1) * self.cols + (c - 1))
        return out

    def is_adjacent(self, a: int, b: int) -> bool:
        return self.manhattan(a, b) == 1

    def xy_route(self, src: int, dst: int) -> tuple[int, ...]:
        """Dimension-order path from `src` to `dst`, both endpoints included.

        All column moves come before any row move; each dimension is walked in
        the direction of the destination.
        """
        r0, c0 = self.coord(src)
        r1, c1 = self.coord(dst)
        cols = self.cols
        path = [(r0 - 1) * cols + (c0 - 1)]
        step = 1 if c1 > c0 else -1
        for c in range(c0 + step, c1 + step, step):
            path.append((r0 - 1) * cols + (c - 1))
        step = 1 if r1 > r0 else -1
        for r in range(r0 + step, r1 + step, step):
            path.append((r - 1) * cols + (c1 - 1))
        return tuple(path)

    def mean_pair_hops(self) -> float:
        """Exact mean hop count of X-Y routes over all ordered distinct node pairs.

        Per dimension of length L the mean |delta| over all L*L ordered index
        pairs is (L^2 - 1) / (3L); excluding the n self-pairs rescales by
        n^2 / (n^2 - n).
        """
        n = self.n
        if n < 2:
            raise ValueError("mean_pair_hops needs at least two nodes")
        per_dim = sum((L * L - 1) / (3 * L) for L in (self.rows, self.cols))
        return per_dim * n * n / (n * n - n)


def make_grid(spec: GridSpec) -> Grid:
    return Grid(spec)


def square_grid(side: int, spacing: float = 1.0) -> Grid:
    return Grid(GridSpec(side, side, spacing))
