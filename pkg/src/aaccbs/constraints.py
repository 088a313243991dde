"""Constraint records and the per-agent constraint index used by the planner."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .motion import EPS_T, INF, Plan, TimedAction

Interval = tuple[float, float]


@dataclass(frozen=True)
class NegConstraint:
    """The agent must not start ``action`` at any time in ``[start, end)``.

    For a wait (``action.is_wait``) the agent must not arrive at the vertex
    before ``end`` and still be there at ``start + duration``; this includes
    residing there through ``[tau, tau + duration]`` for any ``tau`` in range.
    """

    agent: int
    action: TimedAction
    start: float
    end: float

    @property
    def is_wait(self) -> bool:
        return self.action.is_wait


@dataclass(frozen=True)
class PosConstraint:
    """The agent must start move ``action`` at some time in ``[start, end)``."""

    agent: int
    action: TimedAction
    start: float
    end: float

    def __post_init__(self):
        if self.action.is_wait:
            raise ValueError("positive constraints are only defined for moves")


@dataclass(frozen=True)
class PresenceConstraint:
    """The agent must not be at ``vertex`` at any moment of ``[start, end)``."""

    agent: int
    vertex: int
    start: float
    end: float


Constraint = Union[NegConstraint, PosConstraint, PresenceConstraint]


@dataclass(frozen=True)
class MultiConstraint:
    agent: int
    members: tuple[NegConstraint, ...]


def merge_intervals(intervals: Iterable[Interval]) -> list[Interval]:
    out: list[list[float]] = []
    for lo, hi in sorted(i for i in intervals if i[1] > i[0]):
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


@dataclass(frozen=True)
class Landmark:
    source: int
    target: int
    start: float
    end: float


@dataclass
class ConstraintSet:
    """Index of one agent's constraints, in the form the planner consumes.

    ``moves``: ``(u, v) -> merged forbidden departure intervals``.
    ``presence``: ``v -> merged forbidden residence intervals``.
    ``stays``: ``v -> [(t, t_end, duration)]`` forbidden wait templates.
    ``landmarks``: positive constraints ordered by window start, then insertion,
    without those implied by a narrower window on the same move.
    """

    moves: dict[tuple[int, int], list[Interval]] = field(default_factory=dict)
    presence: dict[int, list[Interval]] = field(default_factory=dict)
    stays: dict[int, list[tuple[float, float, float]]] = field(default_factory=dict)
    landmarks: list[Landmark] = field(default_factory=list)

    @classmethod
    def from_constraints(cls, constraints: Iterable[Constraint]) -> "ConstraintSet":
        moves: dict[tuple[int, int], list[Interval]] = {}
        presence: dict[int, list[Interval]] = {}
        stays: dict[int, list[tuple[float, float, float]]] = {}
        landmarks: list[Landmark] = []
        for c in constraints:
            if isinstance(c, PresenceConstraint):
                presence.setdefault(c.vertex, []).append((c.start, c.end))
            elif isinstance(c, PosConstraint):
                lm = Landmark(c.action.source, c.action.target, c.start, c.end)
                if lm not in landmarks:
                    landmarks.append(lm)
            elif c.is_wait:
                stays.setdefault(c.action.source, []).append((c.start, c.end, c.action.duration))
            else:
                moves.setdefault((c.action.source, c.action.target), []).append((c.start, c.end))
        landmarks = [lm for lm in landmarks if not any(_implies(o, lm) for o in landmarks)]
        landmarks.sort(key=lambda lm: lm.start)  # stable: ties keep insertion order
        return cls(
            moves={k: merge_intervals(v) for k, v in moves.items()},
            presence={k: merge_intervals(v) for k, v in presence.items()},
            stays=stays,
            landmarks=landmarks,
        )

    def is_special(self, v: int) -> bool:
        return v in self.presence or v in self.stays


def _implies(a: "Landmark", b: "Landmark") -> bool:
    """Every execution satisfying ``a`` also satisfies ``b`` (and a != b)."""
    return (a != b and (a.source, a.target) == (b.source, b.target)
            and b.start <= a.start and a.end <= b.end)


def build_safe_intervals(vertex: int, constraints: ConstraintSet) -> list[Interval]:
    """Complement of the forbidden residence intervals at ``vertex`` within ``[0, inf)``."""
    out: list[Interval] = []
    t = 0.0
    for lo, hi in constraints.presence.get(vertex, ()):
        if hi <= 0.0:
            continue
        if lo > t:
            out.append((t, lo))
        t = max(t, hi)
    if t < INF:
        out.append((t, INF))
    return out


@dataclass(frozen=True, slots=True)
class ArrivalNode:
    """One search node at a vertex.

    Arrivals in ``[arr_lo, arr_hi)`` land here; the agent must depart before
    ``dep_hi``; ``final_ok`` tells whether it may stay forever.
    """

    vertex: int
    arr_lo: float
    arr_hi: float
    dep_hi: float
    final_ok: bool


def _stay_rules(stays) -> list[tuple[float, float, float]]:
    """Arrival-window rules ``(a_lo, a_hi, deadline)`` for forbidden waits.

    A forbidden wait (t, t', d) at a vertex rules out every residence that
    starts before ``t'`` and lasts until ``t + d``: arrivals before ``t'``
    must leave before ``t + d``.  This covers every start of the wait
    template in ``[t, t')`` and, unlike the template alone, also the same
    wait shifted to a later arrival, so a split cannot be dodged by arriving
    a hair later.  ``d == inf`` forbids staying forever.
    """
    rules = []
    for t, t_end, d in stays:
        deadline = INF if d == INF else t + d - EPS_T
        rules.append((-INF, t_end, deadline))
    return rules


def vertex_nodes(vertex: int, constraints: ConstraintSet) -> list[ArrivalNode]:
    safe = build_safe_intervals(vertex, constraints)
    rules = _stay_rules(constraints.stays.get(vertex, ()))
    nodes: list[ArrivalNode] = []
    for lo, hi in safe:
        cuts = {lo, hi}
        for a_lo, a_hi, _ in rules:
            for c in (a_lo, a_hi):
                if lo < c < hi:
                    cuts.add(c)
        cuts = sorted(cuts)
        for x, y in zip(cuts, cuts[1:]):
            dep = hi
            final = hi == INF
            for a_lo, a_hi, deadline in rules:
                if a_lo <= x and y <= a_hi:
                    dep = min(dep, deadline)
                    final = False
            eff = min(y, dep)
            if x < eff:
                nodes.append(ArrivalNode(vertex, x, eff, dep, final))
    return nodes


def violations(plan: Plan, constraints: Iterable[Constraint]) -> list[Constraint]:
    """Constraints ``plan`` breaks, under the same semantics the planner enforces."""
    bad: list[Constraint] = []
    stays = list(plan.stays())
    for c in constraints:
        if isinstance(c, PresenceConstraint):
            # residence [a, b] is closed: the agent is still there at its departure instant
            if any(v == c.vertex and a < c.end and b >= c.start for v, a, b in stays):
                bad.append(c)
        elif isinstance(c, PosConstraint):
            if not any(m.source == c.action.source and m.target == c.action.target
                       and c.start <= m.start < c.end for m in plan.moves):
                bad.append(c)
        elif c.is_wait:
            rules = _stay_rules([(c.start, c.end, c.action.duration)])
            for v, a, b in stays:
                if v != c.action.source:
                    continue
                if any(a_lo <= a < a_hi and b >= deadline for a_lo, a_hi, deadline in rules):
                    bad.append(c)
                    break
        else:
            if any(m.source == c.action.source and m.target == c.action.target
                   and c.start <= m.start < c.end for m in plan.moves):
                bad.append(c)
    return bad


def first_violation(plan: Plan, constraints: Iterable[Constraint]) -> Optional[Constraint]:
    v = violations(plan, constraints)
    return v[0] if v else None
