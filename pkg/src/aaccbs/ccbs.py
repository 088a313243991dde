"""Conflict-tree search over per-agent constraint sets.

``w == 1`` expands nodes best-first on sum of costs; ``w > 1`` expands from
the focal list of nodes within ``w`` times the cheapest open cost, preferring
fewer conflicting pairs and then more constraints.
"""
from __future__ import annotations

import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Optional

from .constraints import ConstraintSet, violations
from .grid import DEFAULT_RADIUS, Grid, Roadmap
from .motion import Conflict, Plan, TimedAction, first_conflict
from .sipp import PlannerStats, SearchTimeout, plan as plan_path
from .splitting import STRATEGIES, split

log = logging.getLogger(__name__)


class SolveError(Exception):
    pass


class InfeasibleInstanceError(SolveError):
    """Some agent has no individual plan even without other agents."""


class NoSolutionError(SolveError):
    """The conflict tree was exhausted: the instance has no collision-free solution."""


@dataclass(frozen=True)
class Instance:
    grid: Grid
    starts: tuple[int, ...]
    goals: tuple[int, ...]
    radius: float = DEFAULT_RADIUS

    def __post_init__(self):
        if len(self.starts) != len(self.goals):
            raise ValueError("starts and goals differ in length")
        n = self.grid.num_vertices
        for v in (*self.starts, *self.goals):
            if not 0 <= v < n:
                raise ValueError(f"vertex {v} is not a free cell")
        if len(set(self.starts)) != len(self.starts) or len(set(self.goals)) != len(self.goals):
            raise ValueError("starts and goals must be pairwise distinct")

    @classmethod
    def from_cells(cls, grid: Grid, starts, goals, radius: float = DEFAULT_RADIUS) -> "Instance":
        return cls(grid, tuple(grid.vertex(c) for c in starts),
                   tuple(grid.vertex(c) for c in goals), radius)

    @property
    def num_agents(self) -> int:
        return len(self.starts)

    def prefix(self, k: int) -> "Instance":
        return Instance(self.grid, self.starts[:k], self.goals[:k], self.radius)


@dataclass
class SolveStats:
    iterations: int = 0  # conflict-tree nodes expanded
    generated: int = 0
    lowlevel_calls: int = 0
    lowlevel_expansions: int = 0
    wall_time: float = 0.0
    root_conflicts: int = 0


@dataclass
class Solution:
    plans: tuple[Plan, ...]
    soc: float
    stats: SolveStats

    @property
    def costs(self) -> list[float]:
        return [p.cost for p in self.plans]


@dataclass
class CTNode:
    constraints: tuple[tuple, ...]
    plans: tuple[Plan, ...]
    timelines: tuple[tuple[TimedAction, ...], ...]
    conflicts: dict[tuple[int, int], Conflict]
    cost: float
    seq: int
    parent: Optional["CTNode"] = field(default=None, repr=False)

    @property
    def conflict_count(self) -> int:
        return len(self.conflicts)

    @property
    def constraint_count(self) -> int:
        return sum(len(cs) for cs in self.constraints)

    def best_first_key(self) -> tuple:
        return (self.cost, self.conflict_count, self.constraint_count, self.seq)

    def focal_key(self) -> tuple:
        return (self.conflict_count, -self.constraint_count, self.seq)


def select_conflict(node: CTNode) -> Conflict:
    """Earliest collision; ties by agent pair."""
    pair = min(node.conflicts, key=lambda p: (node.conflicts[p].time, p))
    return node.conflicts[pair]


def focal_pop(open_nodes: list[CTNode], w: float) -> CTNode:
    """Linear-scan reference for the focal rule; removes and returns the choice."""
    f_min = min(n.cost for n in open_nodes)
    focal = [n for n in open_nodes if n.cost <= w * f_min]
    best = min(focal, key=CTNode.focal_key)
    open_nodes.remove(best)
    return best


class _BestFirst:
    def __init__(self):
        self._heap: list = []

    def push(self, node: CTNode) -> None:
        heapq.heappush(self._heap, (node.best_first_key(), node))

    def pop(self) -> CTNode:
        return heapq.heappop(self._heap)[1]

    def __len__(self) -> int:
        return len(self._heap)


class _Focal:
    """Focal list kept incrementally; valid because the cheapest open cost never decreases."""

    def __init__(self, w: float):
        self.w = w
        self._open: list = []      # (cost, seq) over every open node
        self._pending: list = []   # nodes not yet inside the focal bound
        self._focal: list = []
        self._closed: set[int] = set()

    def push(self, node: CTNode) -> None:
        heapq.heappush(self._open, (node.cost, node.seq))
        heapq.heappush(self._pending, (node.cost, node.seq, node))

    def pop(self) -> CTNode:
        while self._open[0][1] in self._closed:
            heapq.heappop(self._open)
        bound = self.w * self._open[0][0]
        while self._pending and self._pending[0][0] <= bound:
            node = heapq.heappop(self._pending)[2]
            heapq.heappush(self._focal, (node.focal_key(), node))
        node = heapq.heappop(self._focal)[1]
        self._closed.add(node.seq)
        return node

    def __len__(self) -> int:
        return len(self._focal) + len(self._pending)


def _conflicts_for(plans, timelines, radii, agents, base=None) -> dict:
    """Pairwise first conflicts, recomputing only pairs that touch ``agents``."""
    n = len(plans)
    out = {} if base is None else {p: c for p, c in base.items()
                                   if p[0] not in agents and p[1] not in agents}
    for i in range(n):
        for j in range(i + 1, n):
            if base is not None and i not in agents and j not in agents:
                continue
            c = first_conflict(plans[i], radii[i], plans[j], radii[j], i, j,
                               timelines[i], timelines[j])
            if c is not None:
                out[(i, j)] = c
    return out


def solve(instance: Instance, strategy: str = "vanilla", w: float = 1.0,
          time_limit: Optional[float] = None, cardinal: bool = False,
          roadmap: Optional[Roadmap] = None, stats: Optional[SolveStats] = None) -> Optional[Solution]:
    """Collision-free plans minimizing sum of costs (within factor ``w``).

    Returns None when ``time_limit`` seconds pass first.  Search counters go
    into ``stats`` when given, so they survive a timeout.  Raises
    :class:`InfeasibleInstanceError` if some agent cannot reach its goal
    alone and :class:`NoSolutionError` if the search space is exhausted.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if w < 1.0:
        raise ValueError("suboptimality factor must be >= 1")
    t0 = time.monotonic()
    deadline = None if time_limit is None else t0 + time_limit
    if roadmap is None:
        roadmap = Roadmap(instance.grid, instance.radius, cardinal)
    n = instance.num_agents
    radii = [instance.radius] * n
    stats = SolveStats() if stats is None else stats
    pstats = PlannerStats()
    seq = itertools.count()

    def finish(result):
        stats.lowlevel_calls = pstats.calls
        stats.lowlevel_expansions = pstats.expansions
        stats.wall_time = time.monotonic() - t0
        return result

    try:
        plans = []
        for a in range(n):
            p = plan_path(roadmap, instance.starts[a], instance.goals[a], (), deadline, pstats)
            if p is None:
                raise InfeasibleInstanceError(f"agent {a} cannot reach its goal")
            plans.append(p)
        timelines = tuple(tuple(p.timeline()) for p in plans)
        root = CTNode(tuple(() for _ in range(n)), tuple(plans), timelines,
                      _conflicts_for(plans, timelines, radii, set(range(n))),
                      sum(p.cost for p in plans), next(seq))
        stats.generated = 1
        stats.root_conflicts = root.conflict_count
        frontier = _Focal(w) if w > 1.0 else _BestFirst()
        frontier.push(root)

        while len(frontier):
            if deadline is not None and time.monotonic() > deadline:
                return finish(None)
            node = frontier.pop()
            stats.iterations += 1
            if not node.conflicts:
                return finish(Solution(node.plans, node.cost, stats))
            conflict = select_conflict(node)
            result = split(strategy, conflict, roadmap,
                           radii[conflict.agent_i], radii[conflict.agent_j])
            for bundle in result.children:
                child = _make_child(node, bundle, roadmap, instance, radii, deadline, pstats, next(seq))
                if child is not None:
                    stats.generated += 1
                    frontier.push(child)
    except SearchTimeout:
        return finish(None)
    finish(None)
    raise NoSolutionError("conflict tree exhausted")


def _make_child(node: CTNode, bundle, roadmap, instance, radii, deadline, pstats, seq) -> Optional[CTNode]:
    added: dict[int, list] = {}
    for c in bundle.flat():
        added.setdefault(c.agent, []).append(c)
    constraints = list(node.constraints)
    plans = list(node.plans)
    timelines = list(node.timelines)
    changed = set()
    for agent, new in added.items():
        have = set(constraints[agent])
        fresh = [c for c in new if c not in have]
        if not fresh:
            continue
        constraints[agent] = constraints[agent] + tuple(fresh)
        changed.add(agent)
        if not violations(plans[agent], fresh):
            continue  # still optimal: feasible and the bound only tightened
        p = plan_path(roadmap, instance.starts[agent], instance.goals[agent],
                      ConstraintSet.from_constraints(constraints[agent]), deadline, pstats)
        if p is None:
            return None
        plans[agent] = p
        timelines[agent] = tuple(p.timeline())
    if not changed:
        log.debug("split added no new constraint; child rejected")
        return None
    replanned = {a for a in changed if plans[a] is not node.plans[a]}
    conflicts = (_conflicts_for(plans, timelines, radii, replanned, node.conflicts)
                 if replanned else dict(node.conflicts))
    return CTNode(tuple(constraints), tuple(plans), tuple(timelines), conflicts,
                  sum(p.cost for p in plans), seq, node)
