"""Conflict splitting: the pairs of constraint bundles a conflict node branches on.

Every strategy returns two bundles such that no collision-free solution can
violate both.  The multi-constraint builders rely on one geometric fact: for a
fixed pair of action templates, whether they collide depends only on the
difference of their start times, and the colliding differences form an
interval.  Hence if ``a`` is unsafe on ``[t_a, T_a)`` against ``b@t_b`` and
``b`` is unsafe on ``[t_b, T_b)`` against ``a@t_a``, every start pair from
those two intervals collides.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .constraints import MultiConstraint, NegConstraint, PosConstraint
from .grid import Roadmap
from .motion import (EPS_T, INF, Conflict, TimedAction, _conflict_at, make_move,
                     unsafe_end, unsafe_interval)

STRATEGIES = ("vanilla", "mc1", "mc2", "mc3", "ds", "ds_mc3")

NegativeItem = Union[NegConstraint, MultiConstraint]


@dataclass(frozen=True)
class Bundle:
    """Constraints one child adds: negative ones (possibly grouped) and landmarks."""

    negative: tuple[NegativeItem, ...] = ()
    positive: tuple[PosConstraint, ...] = ()

    def flat(self) -> list:
        out: list = []
        for item in self.negative:
            if isinstance(item, MultiConstraint):
                out.extend(item.members)
            else:
                out.append(item)
        out.extend(self.positive)
        return out

    def agents(self) -> set[int]:
        return {c.agent for c in self.negative} | {c.agent for c in self.positive}


@dataclass(frozen=True)
class SplitResult:
    children: tuple[Bundle, Bundle]


def pad_end(t: float) -> float:
    """Round a constraint interval end up so it never under-covers."""
    return t if t == INF else t + EPS_T


def _neg(agent: int, action: TimedAction, end: float) -> NegConstraint:
    return NegConstraint(agent, action, action.start, pad_end(end))


def _pair_ends(c: Conflict, r_i: float, r_j: float) -> tuple[float, float]:
    t1 = unsafe_interval(c.action_i, c.t_i, c.action_j, r_i, r_j)[1]
    t2 = unsafe_interval(c.action_j, c.t_j, c.action_i, r_j, r_i)[1]
    return t1, t2


def split_vanilla(c: Conflict, r_i: float, r_j: float) -> SplitResult:
    t1, t2 = _pair_ends(c, r_i, r_j)
    return SplitResult((Bundle((_neg(c.agent_i, c.action_i, t1),)),
                        Bundle((_neg(c.agent_j, c.action_j, t2),))))


# ---------------------------------------------------------------------------
# candidate generation

def _projection_key(action: TimedAction, roadmap: Roadmap):
    (x0, y0), (x1, y1) = action.p0, action.p1
    dx, dy = x1 - x0, y1 - y0

    def key(v: int):
        px, py = roadmap.grid.position(v)
        return ((px - x0) * dx + (py - y0) * dy, v)
    return key


def stripe_candidates(action: TimedAction, roadmap: Roadmap, same_target: bool = False) -> list[TimedAction]:
    """Moves from ``action``'s source to vertices of its stripe, original first.

    With ``same_target`` the moves from stripe vertices into ``action``'s
    target are appended.  All candidates start at ``action.start``.
    """
    if action.is_wait:
        return [action]
    grid = roadmap.grid
    u, v, t = action.source, action.target, action.start
    stripe = sorted(roadmap.stripe(u, v), key=_projection_key(action, roadmap))
    out = [action]
    for w in stripe:
        if w != u and w != v and roadmap.is_valid_move(u, w):
            out.append(make_move(grid, u, w, t))
    if same_target:
        for w in stripe:
            if w != u and w != v and roadmap.is_valid_move(w, v):
                out.append(make_move(grid, w, v, t))
    return out


def zip_alternate(xs: Sequence, ys: Sequence) -> list:
    """``x0, y0, x1, y1, ...`` with the tail of the longer sequence appended."""
    out = []
    for k in range(max(len(xs), len(ys))):
        if k < len(xs):
            out.append(xs[k])
        if k < len(ys):
            out.append(ys[k])
    return out


# ---------------------------------------------------------------------------
# multi-constraints

def _members(agent: int, side: Sequence[TimedAction], opposite: Sequence[TimedAction],
             rsum: float, known: dict | None = None) -> tuple[NegConstraint, ...]:
    """Each action's interval is the intersection of its unsafe intervals
    against every opposite action; empty ones are dropped."""
    out = []
    for a in side:
        t_a = a.start
        t_min = known.get(id(a), INF) if known else INF
        for b in opposite:
            if t_min <= t_a:
                break
            t_min = unsafe_end(a, t_a, b, rsum, cap=t_min)
        if t_min > t_a:
            out.append(_neg(agent, a, t_min))
    return tuple(out)


def _keeps_interval(a: TimedAction, opp: TimedAction, opp_end: float, rsum: float) -> bool:
    """True iff ``a`` conflicts with ``opp`` without trimming its unsafe end ``opp_end``."""
    if not _conflict_at(a, a.start, opp, rsum):
        return False
    return unsafe_end(opp, opp.start, a, rsum, cap=opp_end) >= opp_end


def _build_stripe_mc(c: Conflict, roadmap: Roadmap, r_i: float, r_j: float,
                     same_target: bool) -> tuple[MultiConstraint, MultiConstraint]:
    rsum = r_i + r_j
    t1, t2 = _pair_ends(c, r_i, r_j)
    cand_i = stripe_candidates(c.action_i, roadmap, same_target)
    cand_j = stripe_candidates(c.action_j, roadmap, same_target)
    kept = {0: [], 1: []}
    opp = {0: (c.action_j, t2), 1: (c.action_i, t1)}
    tagged = zip_alternate([(0, a) for a in cand_i], [(1, b) for b in cand_j])
    for side, a in tagged:
        if a is (cand_i, cand_j)[side][0] or _keeps_interval(a, *opp[side], rsum):
            kept[side].append(a)
    kept_i, kept_j = kept[0], kept[1]
    # the filter pins the originals' intervals to their vanilla ends
    mi = _members(c.agent_i, kept_i, kept_j, rsum, {id(c.action_i): t1})
    mj = _members(c.agent_j, kept_j, kept_i, rsum, {id(c.action_j): t2})
    return MultiConstraint(c.agent_i, mi), MultiConstraint(c.agent_j, mj)


def build_mc2(c: Conflict, roadmap: Roadmap, r_i: float, r_j: float) -> tuple[MultiConstraint, MultiConstraint]:
    return _build_stripe_mc(c, roadmap, r_i, r_j, same_target=False)


def build_mc3(c: Conflict, roadmap: Roadmap, r_i: float, r_j: float) -> tuple[MultiConstraint, MultiConstraint]:
    return _build_stripe_mc(c, roadmap, r_i, r_j, same_target=True)


def _mc1_candidates(action: TimedAction, roadmap: Roadmap) -> list[TimedAction]:
    if action.is_wait:
        return [action]
    grid = roadmap.grid
    u, v, t = action.source, action.target, action.start
    others = [w for w in roadmap.neighbors(u).tolist() if w != v]
    others.sort(key=lambda w: (roadmap.dist(w, v), w))
    return [action] + [make_move(grid, u, w, t) for w in others]


def build_mc1(c: Conflict, roadmap: Roadmap, r_i: float, r_j: float) -> tuple[MultiConstraint, MultiConstraint]:
    """Greedy mutually conflicting same-source sets, closest targets first."""
    rsum = r_i + r_j
    cand_i = _mc1_candidates(c.action_i, roadmap)
    cand_j = _mc1_candidates(c.action_j, roadmap)
    adm_i = [c.action_i]
    adm_j = [c.action_j]
    for k in range(1, max(len(cand_i), len(cand_j))):
        if k < len(cand_i):
            a = cand_i[k]
            if all(_conflict_at(a, a.start, b, rsum) for b in adm_j):
                adm_i.append(a)
        if k < len(cand_j):
            b = cand_j[k]
            if all(_conflict_at(b, b.start, a, rsum) for a in adm_i):
                adm_j.append(b)
    mi = _members(c.agent_i, adm_i, adm_j, rsum)
    mj = _members(c.agent_j, adm_j, adm_i, rsum)
    return MultiConstraint(c.agent_i, mi), MultiConstraint(c.agent_j, mj)


def _split_mc(builder, c, roadmap, r_i, r_j) -> SplitResult:
    mi, mj = builder(c, roadmap, r_i, r_j)
    return SplitResult((Bundle((mi,)), Bundle((mj,))))


# ---------------------------------------------------------------------------
# disjoint splitting

def _oriented(c: Conflict) -> Conflict | None:
    """The conflict with the landmark side first, or None if both sides wait."""
    if not c.action_i.is_wait:
        return c
    if not c.action_j.is_wait:
        return Conflict(c.agent_j, c.agent_i, c.action_j, c.action_i, c.time)
    return None


def split_ds(c: Conflict, r_i: float, r_j: float) -> SplitResult:
    o = _oriented(c)
    if o is None:
        return split_vanilla(c, r_i, r_j)
    if o is not c:
        r_i, r_j = r_j, r_i
    t1, t2 = _pair_ends(o, r_i, r_j)
    neg_i = _neg(o.agent_i, o.action_i, t1)
    pos_i = PosConstraint(o.agent_i, o.action_i, o.t_i, pad_end(t1))
    neg_j = _neg(o.agent_j, o.action_j, t2)
    return SplitResult((Bundle((neg_i,)), Bundle((neg_j,), (pos_i,))))


def split_ds_mc3(c: Conflict, roadmap: Roadmap, r_i: float, r_j: float) -> SplitResult:
    """Disjoint split whose second child constrains the other agent with a
    multi-constraint built against the landmark action alone."""
    o = _oriented(c)
    if o is None:
        return split_vanilla(c, r_i, r_j)
    if o is not c:
        r_i, r_j = r_j, r_i
    rsum = r_i + r_j
    t1, t2 = _pair_ends(o, r_i, r_j)
    a_i = o.action_i
    cand_j = stripe_candidates(o.action_j, roadmap, same_target=True)
    kept_j = [cand_j[0]] + [b for b in cand_j[1:] if _keeps_interval(b, a_i, t1, rsum)]
    mj = _members(o.agent_j, kept_j, [a_i], rsum, {id(o.action_j): t2})
    neg_i = _neg(o.agent_i, a_i, t1)
    pos_i = PosConstraint(o.agent_i, a_i, o.t_i, pad_end(t1))
    return SplitResult((Bundle((neg_i,)), Bundle((MultiConstraint(o.agent_j, mj),), (pos_i,))))


def split(strategy: str, c: Conflict, roadmap: Roadmap, r_i: float, r_j: float) -> SplitResult:
    if strategy == "vanilla":
        return split_vanilla(c, r_i, r_j)
    if strategy == "mc1":
        return _split_mc(build_mc1, c, roadmap, r_i, r_j)
    if strategy == "mc2":
        return _split_mc(build_mc2, c, roadmap, r_i, r_j)
    if strategy == "mc3":
        return _split_mc(build_mc3, c, roadmap, r_i, r_j)
    if strategy == "ds":
        return split_ds(c, r_i, r_j)
    if strategy == "ds_mc3":
        return split_ds_mc3(c, roadmap, r_i, r_j)
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
