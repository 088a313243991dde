"""Timed actions, plans and continuous-time collision checks between disk agents.

Agents move at unit speed along straight segments.  Two timed actions collide
when, at some moment both are active, the disk centers come strictly closer
than the sum of the radii.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator, Optional, Sequence

INF = math.inf
# time tolerance; constraint interval ends are padded by this much
EPS_T = 1e-9
# separation tolerance: distance >= r_a + r_b - EPS_D counts as no contact
EPS_D = 1e-9
UNSAFE_PRECISION = 1e-8


class KernelContractError(RuntimeError):
    """The single-interval assumption behind unsafe-interval search was violated."""


@dataclass(frozen=True, slots=True)
class TimedAction:
    """A move (``source != target``) or a wait, started at ``start``.

    ``p0`` and ``p1`` are the source and target positions; waits have
    ``p0 == p1`` and may last forever (``duration == inf``).
    """

    source: int
    target: int
    start: float
    duration: float
    p0: tuple[float, float]
    p1: tuple[float, float]

    @property
    def is_wait(self) -> bool:
        return self.source == self.target

    @property
    def kind(self) -> str:
        return "wait" if self.is_wait else "move"

    @property
    def end(self) -> float:
        return self.start + self.duration

    def at(self, start: float) -> "TimedAction":
        return replace(self, start=start)

    def position(self, t: float) -> tuple[float, float]:
        if self.is_wait or self.duration == 0:
            return self.p0
        s = min(max(t - self.start, 0.0), self.duration) / self.duration
        return (self.p0[0] + s * (self.p1[0] - self.p0[0]),
                self.p0[1] + s * (self.p1[1] - self.p0[1]))

    def key(self) -> tuple:
        """Identity of the action template, independent of its start time."""
        return (self.source, self.target, self.duration)


def make_move(grid, u: int, v: int, start: float) -> TimedAction:
    p0, p1 = grid.position(u), grid.position(v)
    return TimedAction(u, v, start, math.hypot(p1[0] - p0[0], p1[1] - p0[1]), p0, p1)


def make_wait(grid, v: int, start: float, duration: float) -> TimedAction:
    p = grid.position(v)
    return TimedAction(v, v, start, duration, p, p)


@dataclass(frozen=True)
class Plan:
    """An individual plan: moves only, waits implicit, terminal wait at the goal forever."""

    start_vertex: int
    goal_vertex: int
    moves: tuple[TimedAction, ...]
    start_position: tuple[float, float]

    @property
    def cost(self) -> float:
        if not self.moves:
            return 0.0
        return self.moves[-1].end

    def timeline(self) -> list[TimedAction]:
        """Explicit action sequence covering ``[0, inf)``, waits included."""
        out: list[TimedAction] = []
        t = 0.0
        v, p = self.start_vertex, self.start_position
        for mv in self.moves:
            if mv.start > t:
                out.append(TimedAction(v, v, t, mv.start - t, p, p))
            out.append(mv)
            t = mv.end
            v, p = mv.target, mv.p1
        out.append(TimedAction(v, v, t, INF, p, p))
        return out

    def stays(self) -> Iterator[tuple[int, float, float]]:
        """``(vertex, arrival, departure)`` for every residence, including zero-length ones."""
        t = 0.0
        v = self.start_vertex
        for mv in self.moves:
            yield v, t, mv.start
            t = mv.end
            v = mv.target
        yield v, t, INF


def _relative(a: TimedAction, ta: float, b: TimedAction):
    """Overlap window and relative motion of ``a`` started at ``ta`` against ``b``."""
    lo = ta if ta > b.start else b.start
    a_end = ta + a.duration
    b_end = b.end
    hi = a_end if a_end < b_end else b_end
    if not hi > lo:
        return None
    if a.duration > 0 and a.duration != INF and not a.is_wait:
        avx = (a.p1[0] - a.p0[0]) / a.duration
        avy = (a.p1[1] - a.p0[1]) / a.duration
    else:
        avx = avy = 0.0
    if b.duration > 0 and b.duration != INF and not b.is_wait:
        bvx = (b.p1[0] - b.p0[0]) / b.duration
        bvy = (b.p1[1] - b.p0[1]) / b.duration
    else:
        bvx = bvy = 0.0
    dx = (a.p0[0] + avx * (lo - ta)) - (b.p0[0] + bvx * (lo - b.start))
    dy = (a.p0[1] + avy * (lo - ta)) - (b.p0[1] + bvy * (lo - b.start))
    return lo, hi, dx, dy, avx - bvx, avy - bvy


def _min_dist_sq(rel) -> float:
    lo, hi, dx, dy, vx, vy = rel
    vv = vx * vx + vy * vy
    if vv <= 1e-18:
        return dx * dx + dy * dy
    s = -(dx * vx + dy * vy) / vv
    span = hi - lo
    if s < 0.0:
        s = 0.0
    elif s > span:
        s = span
    ex = dx + vx * s
    ey = dy + vy * s
    return ex * ex + ey * ey


def _conflict_at(a: TimedAction, ta: float, b: TimedAction, rsum: float) -> bool:
    rel = _relative(a, ta, b)
    if rel is None:
        return False
    lim = rsum - EPS_D
    return _min_dist_sq(rel) < lim * lim


def segment_pair_conflict(a: TimedAction, r_a: float, b: TimedAction, r_b: float) -> bool:
    """True iff executing ``a`` and ``b`` at their start times brings the disks into contact."""
    return _conflict_at(a, a.start, b, r_a + r_b)


def collision_time(a: TimedAction, r_a: float, b: TimedAction, r_b: float) -> Optional[float]:
    """Earliest moment of contact between ``a`` and ``b``, or None."""
    rel = _relative(a, a.start, b)
    if rel is None:
        return None
    lim = r_a + r_b - EPS_D
    lim2 = lim * lim
    if _min_dist_sq(rel) >= lim2:
        return None
    lo, hi, dx, dy, vx, vy = rel
    c = dx * dx + dy * dy - lim2
    if c < 0.0:
        return lo
    vv = vx * vx + vy * vy
    bq = 2.0 * (dx * vx + dy * vy)
    disc = bq * bq - 4.0 * vv * c
    s = (-bq - math.sqrt(max(disc, 0.0))) / (2.0 * vv)
    return lo + min(max(s, 0.0), hi - lo)


def unsafe_interval(a: TimedAction, t_ref: float, b: TimedAction,
                    r_a: float, r_b: float) -> tuple[float, float]:
    """Start times ``[t_ref, t')`` at which action template ``a`` collides with ``b``.

    Returns the empty interval ``(t_ref, t_ref)`` when ``a`` started at
    ``t_ref`` is already safe.  The conflicting start delays form one interval
    (the contact region is convex in the start time), so ``t'`` is located by
    bisection to ``UNSAFE_PRECISION``; the returned end is always on the safe
    side.
    """
    rsum = r_a + r_b
    if not _conflict_at(a, t_ref, b, rsum):
        return t_ref, t_ref
    if b.end == INF:
        # b never ends and a's footprint is translation invariant
        return t_ref, INF
    hi = b.end
    if hi <= t_ref or _conflict_at(a, hi, b, rsum):
        raise KernelContractError(
            f"conflict persists at the window bound {hi!r} for {a} vs {b}")
    lo = t_ref
    while hi - lo > UNSAFE_PRECISION:
        mid = 0.5 * (lo + hi)
        if _conflict_at(a, mid, b, rsum):
            lo = mid
        else:
            hi = mid
    return t_ref, hi


def unsafe_end(a: TimedAction, t_ref: float, b: TimedAction, rsum: float,
               cap: float = INF) -> float:
    """``min(cap, t')`` for the unsafe interval of ``a`` at ``t_ref`` against ``b``.

    Cheaper than :func:`unsafe_interval` when only the smaller end matters:
    the bisection is skipped whenever ``a`` still collides at ``cap``.
    """
    if not _conflict_at(a, t_ref, b, rsum):
        return t_ref
    if cap != INF and cap > t_ref and _conflict_at(a, cap, b, rsum):
        return cap
    end = unsafe_interval(a, t_ref, b, rsum, 0.0)[1]
    return min(end, cap)


@dataclass(frozen=True)
class Conflict:
    agent_i: int
    agent_j: int
    action_i: TimedAction
    action_j: TimedAction
    time: float

    @property
    def t_i(self) -> float:
        return self.action_i.start

    @property
    def t_j(self) -> float:
        return self.action_j.start


def first_conflict(plan_i: Plan, r_i: float, plan_j: Plan, r_j: float,
                   agent_i: int = 0, agent_j: int = 1,
                   timeline_i: Optional[Sequence[TimedAction]] = None,
                   timeline_j: Optional[Sequence[TimedAction]] = None) -> Optional[Conflict]:
    """Earliest collision between two plans, as the pair of actions involved."""
    ti = timeline_i if timeline_i is not None else plan_i.timeline()
    tj = timeline_j if timeline_j is not None else plan_j.timeline()
    best: Optional[Conflict] = None
    best_t = INF
    i = j = 0
    while i < len(ti) and j < len(tj):
        a, b = ti[i], tj[j]
        lo = max(a.start, b.start)
        if lo >= best_t:
            break
        t = collision_time(a, r_i, b, r_j)
        if t is not None and t < best_t:
            best_t = t
            best = Conflict(agent_i, agent_j, a, b, t)
        if a.end <= b.end:
            i += 1
        else:
            j += 1
    return best
