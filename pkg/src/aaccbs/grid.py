"""Occupancy grids, disk line-of-sight and swept-cell stripes.

Coordinates are in cell-side units: the cell in column ``col`` and row ``row``
covers ``[col, col+1] x [row, row+1]`` and its vertex sits at the center
``(col + 0.5, row + 0.5)``.  Only free cells carry vertices.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

DEFAULT_RADIUS = math.sqrt(2.0) / 4.0
# distances within this band of the radius count as clearance (tangency is safe)
GEOM_EPS = 1e-9

Point = tuple[float, float]
Cell = tuple[int, int]


def euclid(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def _segment_box_distance(p0x, p0y, p1x, p1y, bx, by):
    """Vectorized distance between segments and unit boxes ``[bx,bx+1]x[by,by+1]``.

    All arguments broadcast against each other.
    """
    p0x, p0y, p1x, p1y, bx, by = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (p0x, p0y, p1x, p1y, bx, by)))
    dx = p1x - p0x
    dy = p1y - p0y

    # Liang-Barsky clip of the segment against the box.
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        tx0 = (bx - p0x) / dx
        tx1 = (bx + 1.0 - p0x) / dx
        ty0 = (by - p0y) / dy
        ty1 = (by + 1.0 - p0y) / dy
    inside_x = (p0x >= bx) & (p0x <= bx + 1.0)
    inside_y = (p0y >= by) & (p0y <= by + 1.0)
    zx = dx == 0.0
    zy = dy == 0.0
    enter_x = np.where(zx, np.where(inside_x, -np.inf, np.inf), np.minimum(tx0, tx1))
    exit_x = np.where(zx, np.where(inside_x, np.inf, -np.inf), np.maximum(tx0, tx1))
    enter_y = np.where(zy, np.where(inside_y, -np.inf, np.inf), np.minimum(ty0, ty1))
    exit_y = np.where(zy, np.where(inside_y, np.inf, -np.inf), np.maximum(ty0, ty1))
    t_lo = np.maximum(np.maximum(enter_x, enter_y), 0.0)
    t_hi = np.minimum(np.minimum(exit_x, exit_y), 1.0)
    hits = t_lo <= t_hi

    def point_box(px, py):
        ex = np.maximum(np.maximum(bx - px, px - bx - 1.0), 0.0)
        ey = np.maximum(np.maximum(by - py, py - by - 1.0), 0.0)
        return np.hypot(ex, ey)

    best = np.minimum(point_box(p0x, p0y), point_box(p1x, p1y))
    len2 = dx * dx + dy * dy
    safe_len2 = np.where(len2 > 0.0, len2, 1.0)
    for cx_off, cy_off in ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)):
        cx = bx + cx_off
        cy = by + cy_off
        t = np.clip(((cx - p0x) * dx + (cy - p0y) * dy) / safe_len2, 0.0, 1.0)
        t = np.where(len2 > 0.0, t, 0.0)
        best = np.minimum(best, np.hypot(p0x + t * dx - cx, p0y + t * dy - cy))
    return np.where(hits, 0.0, best)


def segment_cell_distance(p0: Point, p1: Point, cell: Cell) -> float:
    """Minimum distance between segment ``[p0, p1]`` and the closed square of ``cell``."""
    col, row = cell
    return float(_segment_box_distance(p0[0], p0[1], p1[0], p1[1], col, row))


class Grid:
    """Static occupancy raster.

    ``blocked`` is indexed ``[row, col]``.  Free cells are numbered in row-major
    order; that number is the vertex id used throughout the package.
    """

    def __init__(self, blocked: np.ndarray):
        blocked = np.asarray(blocked, dtype=bool)
        if blocked.ndim != 2 or blocked.shape[0] == 0 or blocked.shape[1] == 0:
            raise ValueError(f"grid must be a non-empty 2D raster, got shape {blocked.shape}")
        self.blocked = blocked
        self.blocked.setflags(write=False)
        self.height, self.width = blocked.shape
        rows, cols = np.nonzero(~blocked)
        self.cells = np.stack([cols, rows], axis=1)  # (N, 2) as (col, row)
        self.positions = self.cells.astype(float) + 0.5
        self.vertex_at = np.full(blocked.shape, -1, dtype=np.int64)
        self.vertex_at[rows, cols] = np.arange(len(rows))
        brows, bcols = np.nonzero(blocked)
        self.blocked_cells = np.stack([bcols, brows], axis=1)
        # Blocked cells 8-adjacent to a free cell.  For radii <= 0.5 only these
        # can be the first obstacle a segment between free centers touches.
        padded = np.pad(~blocked, 1, constant_values=False)
        near_free = np.zeros_like(blocked)
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                near_free |= padded[1 + dr:1 + dr + self.height, 1 + dc:1 + dc + self.width]
        frows, fcols = np.nonzero(blocked & near_free)
        self.frontier_cells = np.stack([fcols, frows], axis=1)

    @classmethod
    def empty(cls, width: int, height: int) -> "Grid":
        return cls(np.zeros((height, width), dtype=bool))

    @classmethod
    def from_rows(cls, rows: Sequence[str], blocked_chars: str = "@OTW#") -> "Grid":
        return cls(np.array([[ch in blocked_chars for ch in row] for row in rows], dtype=bool))

    def __repr__(self) -> str:
        return f"Grid({self.width}x{self.height}, blocked={len(self.blocked_cells)})"

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def num_vertices(self) -> int:
        return len(self.cells)

    def in_bounds(self, cell: Cell) -> bool:
        col, row = cell
        return 0 <= col < self.width and 0 <= row < self.height

    def is_free(self, cell: Cell) -> bool:
        col, row = cell
        return self.in_bounds(cell) and not self.blocked[row, col]

    def vertex(self, cell: Cell) -> int:
        col, row = cell
        if not self.in_bounds(cell) or self.vertex_at[row, col] < 0:
            raise ValueError(f"cell {cell} is not a free cell of {self!r}")
        return int(self.vertex_at[row, col])

    def cell(self, v: int) -> Cell:
        col, row = self.cells[v]
        return int(col), int(row)

    def position(self, v: int) -> Point:
        x, y = self.positions[v]
        return float(x), float(y)

    def euclid(self, u: int, v: int) -> float:
        return euclid(self.position(u), self.position(v))

    def obstacle_cells(self, radius: float) -> np.ndarray:
        return self.frontier_cells if radius <= 0.5 else self.blocked_cells


def _cells_near_segment(cells: np.ndarray, p0: Point, p1: Point, radius: float) -> np.ndarray:
    lo_x = min(p0[0], p1[0]) - radius - 1.0
    hi_x = max(p0[0], p1[0]) + radius
    lo_y = min(p0[1], p1[1]) - radius - 1.0
    hi_y = max(p0[1], p1[1]) + radius
    mask = ((cells[:, 0] >= lo_x) & (cells[:, 0] <= hi_x)
            & (cells[:, 1] >= lo_y) & (cells[:, 1] <= hi_y))
    return cells[mask]


def segment_clear(grid: Grid, p0: Point, p1: Point, radius: float) -> bool:
    """True iff a disk of ``radius`` swept along ``[p0, p1]`` touches no blocked cell."""
    near = _cells_near_segment(grid.obstacle_cells(radius), p0, p1, radius)
    if len(near) == 0:
        return True
    d = _segment_box_distance(p0[0], p0[1], p1[0], p1[1], near[:, 0], near[:, 1])
    return bool(np.all(d >= radius - GEOM_EPS))


def line_of_sight(grid: Grid, u: int, v: int, radius: float = DEFAULT_RADIUS) -> bool:
    # endpoints lie on the segment, so the stationary disks at u and v are covered too
    return segment_clear(grid, grid.position(u), grid.position(v), radius)


def swept_cells(grid: Grid, u: int, v: int, radius: float = DEFAULT_RADIUS) -> list[Cell]:
    """Free cells the agent's disk overlaps while moving from ``u`` to ``v``.

    A cell belongs to the stripe iff its distance to the segment is strictly
    below ``radius``.  Returned sorted by ``(row, col)``.
    """
    p0, p1 = grid.position(u), grid.position(v)
    c0 = max(int(math.floor(min(p0[0], p1[0]) - radius)), 0)
    c1 = min(int(math.floor(max(p0[0], p1[0]) + radius)), grid.width - 1)
    r0 = max(int(math.floor(min(p0[1], p1[1]) - radius)), 0)
    r1 = min(int(math.floor(max(p0[1], p1[1]) + radius)), grid.height - 1)
    cols, rows = np.meshgrid(np.arange(c0, c1 + 1), np.arange(r0, r1 + 1))
    cols = cols.ravel()
    rows = rows.ravel()
    free = ~grid.blocked[rows, cols]
    cols, rows = cols[free], rows[free]
    d = _segment_box_distance(p0[0], p0[1], p1[0], p1[1], cols, rows)
    keep = d < radius - GEOM_EPS
    return [(int(c), int(r)) for c, r in zip(cols[keep], rows[keep])]


def swept_vertices(grid: Grid, u: int, v: int, radius: float = DEFAULT_RADIUS) -> list[int]:
    return [grid.vertex(c) for c in swept_cells(grid, u, v, radius)]


class Roadmap:
    """The move graph of one agent type: a grid, a disk radius and a move model.

    Any-angle mode allows a move between every pair of vertices with line of
    sight; cardinal mode only between 4-adjacent ones.  Visibility rows and
    distance rows are computed lazily and cached, so one instance can be shared
    by every planner call of a solve.
    """

    _CHUNK = 512

    def __init__(self, grid: Grid, radius: float = DEFAULT_RADIUS, cardinal: bool = False):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.grid = grid
        self.radius = float(radius)
        self.cardinal = cardinal
        self._visible: dict[int, np.ndarray] = {}
        self._visible_mask: dict[int, np.ndarray] = {}
        self._dist: dict[int, np.ndarray] = {}
        pos = grid.positions
        self._stationary_ok = np.array(
            [segment_clear(grid, tuple(p), tuple(p), self.radius) for p in pos], dtype=bool)

    def __repr__(self) -> str:
        mode = "cardinal" if self.cardinal else "any-angle"
        return f"Roadmap({self.grid!r}, radius={self.radius:.6g}, {mode})"

    @property
    def num_vertices(self) -> int:
        return self.grid.num_vertices

    def dist_row(self, u: int) -> np.ndarray:
        row = self._dist.get(u)
        if row is None:
            # math.hypot so durations agree bit-for-bit with motion.make_move
            x, y = self.grid.position(u)
            row = np.array([math.hypot(px - x, py - y) for px, py in self.grid.positions.tolist()])
            row.setflags(write=False)
            self._dist[u] = row
        return row

    def dist(self, u: int, v: int) -> float:
        return float(self.dist_row(u)[v])

    def stationary_ok(self, v: int) -> bool:
        return bool(self._stationary_ok[v])

    def _compute_visible(self, u: int) -> np.ndarray:
        grid = self.grid
        n = grid.num_vertices
        mask = np.zeros(n, dtype=bool)
        if not self._stationary_ok[u]:
            return mask
        if self.cardinal:
            col, row = grid.cell(u)
            for dc, dr in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                c = (col + dc, row + dr)
                if grid.is_free(c):
                    v = grid.vertex(c)
                    mask[v] = line_of_sight(grid, u, v, self.radius)
            return mask
        obstacles = grid.obstacle_cells(self.radius)
        mask[:] = self._stationary_ok
        mask[u] = False
        if len(obstacles) == 0:
            return mask
        px, py = grid.positions[u]
        targets = np.nonzero(mask)[0]
        bx = obstacles[:, 0][None, :]
        by = obstacles[:, 1][None, :]
        for start in range(0, len(targets), self._CHUNK):
            chunk = targets[start:start + self._CHUNK]
            qx = grid.positions[chunk, 0][:, None]
            qy = grid.positions[chunk, 1][:, None]
            d = _segment_box_distance(px, py, qx, qy, bx, by)
            mask[chunk] = np.all(d >= self.radius - GEOM_EPS, axis=1)
        return mask

    def visible_mask(self, u: int) -> np.ndarray:
        mask = self._visible_mask.get(u)
        if mask is None:
            mask = self._compute_visible(u)
            mask.setflags(write=False)
            self._visible_mask[u] = mask
        return mask

    def neighbors(self, u: int) -> np.ndarray:
        """Vertex ids reachable from ``u`` by one valid move (``u`` excluded)."""
        nb = self._visible.get(u)
        if nb is None:
            nb = np.nonzero(self.visible_mask(u))[0]
            nb.setflags(write=False)
            self._visible[u] = nb
        return nb

    def is_valid_move(self, u: int, v: int) -> bool:
        if u == v:
            return self.stationary_ok(u)
        return bool(self.visible_mask(u)[v])

    def stripe(self, u: int, v: int) -> list[int]:
        return swept_vertices(self.grid, u, v, self.radius)

