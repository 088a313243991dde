import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aaccbs.grid import (DEFAULT_RADIUS, Grid, Roadmap, line_of_sight, segment_cell_distance,
                         swept_cells)
from oracles import brute_swept_cells, random_grid, sampled_segment_cell_distance

coords = st.floats(min_value=-2.0, max_value=10.0, allow_nan=False)


def test_cell_centers_and_vertex_numbering():
    g = Grid.from_rows(["..@", "@..", "..."])
    assert g.num_vertices == 7
    assert g.vertex((0, 0)) == 0 and g.vertex((1, 1)) == 2
    assert g.position(g.vertex((2, 2))) == (2.5, 2.5)
    assert g.cell(g.vertex((1, 0))) == (1, 0)
    with pytest.raises(ValueError):
        g.vertex((2, 0))
    with pytest.raises(ValueError):
        g.vertex((3, 0))


def test_default_radius():
    assert DEFAULT_RADIUS == pytest.approx(math.sqrt(2) / 4)


@given(coords, coords, coords, coords, st.integers(-1, 8), st.integers(-1, 8))
@settings(max_examples=300, deadline=None)
def test_segment_cell_distance_matches_sampling(x0, y0, x1, y1, col, row):
    exact = segment_cell_distance((x0, y0), (x1, y1), (col, row))
    sampled = sampled_segment_cell_distance((x0, y0), (x1, y1), col, row)
    spacing = math.hypot(x1 - x0, y1 - y0) / 4000
    assert exact <= sampled + 1e-9
    assert sampled <= exact + spacing + 1e-9


def test_los_open_grid_and_wall():
    g = Grid.empty(5, 5)
    assert line_of_sight(g, g.vertex((0, 0)), g.vertex((4, 3)))
    walled = Grid.from_rows([".....", "..@..", "....."])
    assert not line_of_sight(walled, walled.vertex((0, 1)), walled.vertex((4, 1)))
    assert line_of_sight(walled, walled.vertex((0, 0)), walled.vertex((4, 0)))


def test_diagonal_corner_cutting_is_blocked():
    # the disk must not squeeze between two diagonally touching obstacles
    g = Grid.from_rows([".@", "@."])
    assert not line_of_sight(g, g.vertex((0, 0)), g.vertex((1, 1)))


def test_tangent_disk_is_clear():
    # a horizontal move one row above an obstacle passes at distance 0.5 > r
    g = Grid.from_rows(["...", ".@."])
    assert line_of_sight(g, g.vertex((0, 0)), g.vertex((2, 0)), 0.5)
    assert not line_of_sight(g, g.vertex((0, 0)), g.vertex((2, 0)), 0.5 + 1e-6)


@pytest.mark.parametrize("seed", range(12))
def test_swept_cells_matches_brute_force(seed):
    rng = random.Random(seed)
    g = random_grid(rng, 7, 6, 0.15)
    radius = rng.choice([DEFAULT_RADIUS, 0.25, 0.5])
    for _ in range(6):
        u, v = rng.randrange(g.num_vertices), rng.randrange(g.num_vertices)
        got = set(swept_cells(g, u, v, radius))
        inside, outside = brute_swept_cells(g, u, v, radius)
        assert inside <= got
        assert not (got & outside)


def test_swept_cells_sorted_and_contains_endpoints():
    g = Grid.empty(6, 6)
    u, v = g.vertex((0, 5)), g.vertex((5, 1))
    cells = swept_cells(g, u, v)
    assert cells == sorted(cells, key=lambda c: (c[1], c[0]))
    assert (0, 5) in cells and (5, 1) in cells


@pytest.mark.parametrize("seed", range(5))
def test_roadmap_neighbors_agree_with_line_of_sight(seed):
    rng = random.Random(100 + seed)
    g = random_grid(rng, 6, 6, 0.2)
    rm = Roadmap(g)
    for u in range(g.num_vertices):
        want = [v for v in range(g.num_vertices)
                if v != u and rm.stationary_ok(u) and rm.stationary_ok(v) and line_of_sight(g, u, v)]
        assert rm.neighbors(u).tolist() == want


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_line_of_sight_is_symmetric(seed):
    rng = random.Random(seed)
    g = random_grid(rng, 6, 5, 0.2)
    u, v = rng.randrange(g.num_vertices), rng.randrange(g.num_vertices)
    assert line_of_sight(g, u, v) == line_of_sight(g, v, u)


def test_cardinal_roadmap_has_four_neighbors_in_open_space():
    g = Grid.empty(5, 5)
    rm = Roadmap(g, cardinal=True)
    center = g.vertex((2, 2))
    got = {g.cell(v) for v in rm.neighbors(center).tolist()}
    assert got == {(1, 2), (3, 2), (2, 1), (2, 3)}
    assert rm.is_valid_move(center, g.vertex((3, 2)))
    assert not rm.is_valid_move(center, g.vertex((3, 3)))


def test_roadmap_distance_is_euclidean():
    g = Grid.empty(4, 4)
    rm = Roadmap(g)
    u, v = g.vertex((0, 0)), g.vertex((3, 2))
    assert rm.dist(u, v) == math.hypot(3, 2)
    assert np.all(rm.dist_row(u) >= 0)


def test_stripe_of_straight_move():
    g = Grid.empty(6, 3)
    rm = Roadmap(g)
    got = {g.cell(v) for v in rm.stripe(g.vertex((0, 1)), g.vertex((5, 1)))}
    assert got == {(c, 1) for c in range(6)}
