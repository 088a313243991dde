"""Independent solution checker.

Deliberately shares no geometry with the solver: closest approach is solved
here from scratch, line of sight is checked by sampling points along each
segment, and every pair of agents is also cross-checked by dense time
sampling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

SAMPLE_DT = 1e-3
SEPARATION_TOL = 1e-6
TIME_TOL = 1e-6
LOS_STEP = 1e-3


@dataclass(frozen=True)
class Step:
    """One explicit timed action of a plan, as found in a trace."""

    kind: str
    source: int
    target: int
    start: float
    duration: float


@dataclass
class Report:
    valid: bool = True
    violations: list[str] = field(default_factory=list)
    costs: list[float] = field(default_factory=list)
    soc: float = 0.0
    min_separation: float = math.inf

    def fail(self, message: str) -> None:
        self.valid = False
        self.violations.append(message)


def steps_from_plan(plan) -> list[Step]:
    """Explicit steps of a solver plan, waits included, terminal wait omitted."""
    out = []
    t = 0.0
    v = plan.start_vertex
    for mv in plan.moves:
        if mv.start > t:
            out.append(Step("wait", v, v, t, mv.start - t))
        out.append(Step("move", mv.source, mv.target, mv.start, mv.duration))
        t = mv.start + mv.duration
        v = mv.target
    return out


def _as_steps(plan) -> list[Step]:
    if hasattr(plan, "moves"):
        return steps_from_plan(plan)
    return [s if isinstance(s, Step) else Step(**s) for s in plan]


def _point_box_dist(px, py, col, row):
    ex = np.maximum(np.maximum(col - px, px - col - 1.0), 0.0)
    ey = np.maximum(np.maximum(row - py, py - row - 1.0), 0.0)
    return np.hypot(ex, ey)


def _segment_blocked(grid, p0, p1, radius) -> Optional[tuple[int, int]]:
    """A blocked cell the sampled disk sweep overlaps, or None."""
    length = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
    n = max(2, int(math.ceil(length / LOS_STEP)) + 1)
    s = np.linspace(0.0, 1.0, n)
    xs = p0[0] + s * (p1[0] - p0[0])
    ys = p0[1] + s * (p1[1] - p0[1])
    reach = int(math.ceil(radius)) + 1
    c_lo = max(int(math.floor(min(p0[0], p1[0]))) - reach, 0)
    c_hi = min(int(math.floor(max(p0[0], p1[0]))) + reach, grid.width - 1)
    r_lo = max(int(math.floor(min(p0[1], p1[1]))) - reach, 0)
    r_hi = min(int(math.floor(max(p0[1], p1[1]))) + reach, grid.height - 1)
    for row, col in np.argwhere(grid.blocked[r_lo:r_hi + 1, c_lo:c_hi + 1]).tolist():
        row, col = row + r_lo, col + c_lo
        if np.min(_point_box_dist(xs, ys, col, row)) < radius - SEPARATION_TOL:
            return col, row
    return None


def _closest_approach(pa, va, pb, vb, t0, t1) -> float:
    """Minimum distance on [t0, t1] between two points moving linearly.

    ``pa``/``pb`` are positions at ``t0``, ``va``/``vb`` velocities.
    """
    dx, dy = pa[0] - pb[0], pa[1] - pb[1]
    wx, wy = va[0] - vb[0], va[1] - vb[1]
    ww = wx * wx + wy * wy
    span = t1 - t0
    s = 0.0 if ww == 0.0 else min(max(-(dx * wx + dy * wy) / ww, 0.0), span)
    return math.hypot(dx + wx * s, dy + wy * s)


def action_separation(p0a, p1a, start_a: float, dur_a: float,
                      p0b, p1b, start_b: float, dur_b: float) -> float:
    """Minimum distance between two timed straight-line actions while both run.

    Waits have ``p0 == p1``; ``dur`` may be infinite for a wait.  Windows are
    closed, so a zero-length rest still counts.  Returns inf when the windows
    do not meet.
    """
    lo = max(start_a, start_b)
    hi = min(start_a + dur_a, start_b + dur_b)
    if hi < lo:
        return math.inf

    def vel(p0, p1, d):
        if d == math.inf or d == 0 or (p0[0] == p1[0] and p0[1] == p1[1]):
            return 0.0, 0.0
        return (p1[0] - p0[0]) / d, (p1[1] - p0[1]) / d
    va, vb = vel(p0a, p1a, dur_a), vel(p0b, p1b, dur_b)
    pa = (p0a[0] + va[0] * (lo - start_a), p0a[1] + va[1] * (lo - start_a))
    pb = (p0b[0] + vb[0] * (lo - start_b), p0b[1] + vb[1] * (lo - start_b))
    if hi == math.inf:
        if va == (0.0, 0.0) and vb == (0.0, 0.0):
            hi = lo
        else:
            raise ValueError("an unbounded action must be a wait")
    return _closest_approach(pa, va, pb, vb, lo, hi)


class _Track:
    """Piecewise-linear trajectory of one agent over ``[0, inf)``."""

    def __init__(self, grid, start: int, steps: Sequence[Step]):
        self.pieces = []  # (t0, t1, p0, velocity)
        t = 0.0
        p = _center(grid, start)
        for st in steps:
            q = _center(grid, st.target)
            if st.start > t:
                self.pieces.append((t, st.start, p, (0.0, 0.0)))
            d = st.duration
            vel = (0.0, 0.0) if d == 0 else ((q[0] - p[0]) / d, (q[1] - p[1]) / d)
            self.pieces.append((st.start, st.start + d, p, vel))
            t = st.start + d
            p = q
        self.pieces.append((t, math.inf, p, (0.0, 0.0)))
        self.end = t

    def positions(self, ts: np.ndarray) -> np.ndarray:
        out = np.empty((len(ts), 2))
        for t0, t1, p, v in self.pieces:
            m = (ts >= t0) & (ts <= t1)
            dt = ts[m] - t0
            out[m, 0] = p[0] + v[0] * dt
            out[m, 1] = p[1] + v[1] * dt
        return out


def _center(grid, v: int) -> tuple[float, float]:
    col, row = grid.cells[v]
    return float(col) + 0.5, float(row) + 0.5


def _pair_min_analytic(a: _Track, b: _Track) -> tuple[float, float]:
    """Exact minimum separation of two tracks and a time at which it occurs."""
    best, best_t = math.inf, 0.0
    i = j = 0
    pa, pb = a.pieces, b.pieces
    while i < len(pa) and j < len(pb):
        a0, a1, ap, av = pa[i]
        b0, b1, bp, bv = pb[j]
        lo, hi = max(a0, b0), min(a1, b1)
        if lo <= hi:
            if hi == math.inf:
                hi = lo  # both stationary from here on
            pa_lo = (ap[0] + av[0] * (lo - a0), ap[1] + av[1] * (lo - a0))
            pb_lo = (bp[0] + bv[0] * (lo - b0), bp[1] + bv[1] * (lo - b0))
            d = _closest_approach(pa_lo, av, pb_lo, bv, lo, hi)
            if d < best:
                best, best_t = d, lo
        if a1 <= b1:
            i += 1
        else:
            j += 1
    return best, best_t


def validate(instance, plans: Sequence, radii: Optional[Sequence[float]] = None,
             sample: bool = True) -> Report:
    """Check ``plans`` (solver plans or lists of trace steps) against ``instance``."""
    grid = instance.grid
    n = len(instance.starts)
    if radii is None:
        radii = [instance.radius] * n
    rep = Report()
    if len(plans) != n:
        rep.fail(f"expected {n} plans, got {len(plans)}")
        return rep
    tracks = []
    for a, plan in enumerate(plans):
        steps = _as_steps(plan)
        cost = _check_plan(rep, grid, a, instance.starts[a], instance.goals[a], steps, radii[a])
        rep.costs.append(cost)
        tracks.append(_Track(grid, instance.starts[a], steps))
    rep.soc = sum(rep.costs)

    horizon = max((tr.end for tr in tracks), default=0.0) + 1.0
    ts = np.arange(0.0, horizon + SAMPLE_DT, SAMPLE_DT) if sample else None
    sampled = [tr.positions(ts) for tr in tracks] if sample else None
    for i in range(n):
        for j in range(i + 1, n):
            limit = radii[i] + radii[j]
            d, t = _pair_min_analytic(tracks[i], tracks[j])
            rep.min_separation = min(rep.min_separation, d)
            if d < limit - SEPARATION_TOL:
                rep.fail(f"agents {i} and {j} collide near t={t:.6f} (separation {d:.6f} < {limit:.6f})")
            elif sample:
                sep = np.hypot(*(sampled[i] - sampled[j]).T)
                k = int(np.argmin(sep))
                if sep[k] < limit - SEPARATION_TOL:
                    rep.fail(f"agents {i} and {j} collide at sampled t={ts[k]:.3f} "
                             f"(separation {sep[k]:.6f}) missed by the analytic check")
    return rep


def _check_plan(rep: Report, grid, a: int, start: int, goal: int, steps: Sequence[Step],
                radius: float) -> float:
    t = 0.0
    v = start
    cost = 0.0
    for k, st in enumerate(steps):
        where = f"agent {a} step {k}"
        if st.source != v:
            rep.fail(f"{where}: starts at vertex {st.source}, previous step ended at {v}")
        if st.start < t - TIME_TOL:
            rep.fail(f"{where}: starts at {st.start:.6f} before the previous step ends at {t:.6f}")
        if st.kind == "wait":
            if st.source != st.target:
                rep.fail(f"{where}: wait changes vertex")
            if not st.duration >= 0:
                rep.fail(f"{where}: negative wait")
        elif st.kind == "move":
            p0, p1 = _center(grid, st.source), _center(grid, st.target)
            length = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
            if abs(st.duration - length) > TIME_TOL:
                rep.fail(f"{where}: duration {st.duration:.6f} but distance {length:.6f} (unit speed)")
            hit = _segment_blocked(grid, p0, p1, radius)
            if hit is not None:
                rep.fail(f"{where}: move {st.source}->{st.target} sweeps blocked cell {hit}")
            cost = st.start + st.duration
        else:
            rep.fail(f"{where}: unknown kind {st.kind!r}")
        t = st.start + st.duration
        v = st.target
    if v != goal:
        rep.fail(f"agent {a}: ends at vertex {v}, goal is {goal}")
    for w in {start, v}:
        hit = _segment_blocked(grid, _center(grid, w), _center(grid, w), radius)
        if hit is not None:
            rep.fail(f"agent {a}: resting disk at vertex {w} overlaps blocked cell {hit}")
    return cost
