"""Optimal any-angle planning over safe intervals.

Every ``(vertex, arrival window)`` node is materialized up front from the
agent's constraints, then the search settles the earliest arrival of each node
in best-first order of ``g + euclidean distance to go``.  A node whose ``g``
later improves is simply reopened.

Positive constraints (landmarks) split the node space into layers, one per
set of landmarks already satisfied.  A landmark move departing at ``tau``
satisfies every landmark on that move whose window contains ``tau``, so the
landmarks may be met in any order and one execution may meet several.  Layers
are created when first reached.
"""
from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .constraints import (ArrivalNode, Constraint, ConstraintSet, Interval,
                          build_safe_intervals, vertex_nodes)
from .grid import Roadmap
from .motion import INF, Plan, TimedAction

__all__ = [
    "SearchTimeout", "PlannerStats", "build_safe_intervals", "earliest_transition", "plan",
]


class SearchTimeout(Exception):
    pass


@dataclass
class PlannerStats:
    calls: int = 0
    expansions: int = 0


def _depart(g: float, dep_hi: float, d: float, arr_lo: float, arr_hi: float,
            forbidden: Sequence[Interval] = (), win_lo: float = -INF,
            win_hi: float = INF) -> Optional[float]:
    tau = g
    if arr_lo - d > tau:
        tau = arr_lo - d
        while tau + d < arr_lo:  # land inside the window despite rounding
            tau = math.nextafter(tau, INF)
    if win_lo > tau:
        tau = win_lo
    for f_lo, f_hi in forbidden:
        if f_hi <= tau:
            continue
        if f_lo > tau:
            break
        tau = f_hi
    if tau < dep_hi and tau < win_hi and tau + d < arr_hi:
        return tau
    return None


def earliest_transition(g: float, dep_hi: float, d: float, to_node: ArrivalNode,
                        forbidden: Sequence[Interval] = ()) -> Optional[float]:
    """Earliest departure for a move of duration ``d`` from a node reached at ``g``.

    The departure must come before ``dep_hi`` (the agent waits at the source
    until then), avoid the ``forbidden`` start intervals of this move, and
    land inside ``to_node``'s arrival window.  None if impossible.
    """
    return _depart(g, dep_hi, d, to_node.arr_lo, to_node.arr_hi, forbidden)


class _Layered:
    """Node table shared by all layers of one planner call."""

    def __init__(self, roadmap: Roadmap, cs: ConstraintSet):
        n = roadmap.num_vertices
        self.n = n
        self.plain = np.ones(n, dtype=bool)
        self.vertex_of: list[int] = list(range(n))
        self.by_vertex: dict[int, list[int]] = {}
        special = set(cs.presence) | set(cs.stays)
        for v in special:
            if 0 <= v < n:
                self.plain[v] = False
        # ids < n are the single unconstrained node of each plain vertex
        self.dep_hi = [INF] * n
        self.final_ok = [True] * n
        self.arr_lo = [0.0] * n
        self.arr_hi = [INF] * n
        for v in sorted(special):
            if not 0 <= v < n:
                continue
            ids = []
            for node in vertex_nodes(v, cs):
                ids.append(len(self.vertex_of))
                self.vertex_of.append(v)
                self.dep_hi.append(node.dep_hi)
                self.final_ok.append(node.final_ok)
                self.arr_lo.append(node.arr_lo)
                self.arr_hi.append(node.arr_hi)
            self.by_vertex[v] = ids
        self.size = len(self.vertex_of)

    def ids(self, v: int) -> list[int]:
        if self.plain[v]:
            return [v]
        return self.by_vertex.get(v, [])


def plan(roadmap: Roadmap, start: int, goal: int,
         constraints: ConstraintSet | Sequence[Constraint] = (),
         deadline: Optional[float] = None,
         stats: Optional[PlannerStats] = None) -> Optional[Plan]:
    """Minimal-arrival plan from ``start`` (at time 0) to ``goal`` under ``constraints``.

    The returned plan reaches the goal in a residence that may last forever.
    Returns None if no such plan exists (including unreachable landmarks).
    Raises :class:`SearchTimeout` once ``time.monotonic()`` passes ``deadline``.
    """
    cs = constraints if isinstance(constraints, ConstraintSet) else ConstraintSet.from_constraints(constraints)
    if stats is not None:
        stats.calls += 1
    if not roadmap.stationary_ok(start) or not roadmap.stationary_ok(goal):
        return None

    table = _Layered(roadmap, cs)
    landmarks = cs.landmarks
    K = len(landmarks)
    full = (1 << K) - 1
    lm_from: dict[int, list[tuple[int, int, float, float, float]]] = {}
    for k, lm in enumerate(landmarks):
        if not roadmap.is_valid_move(lm.source, lm.target):
            return None
        lm_from.setdefault(lm.source, []).append(
            (k, lm.target, lm.start, lm.end, roadmap.dist(lm.source, lm.target)))

    goal_row = roadmap.dist_row(goal)
    # lower bound through each landmark: reach its source, execute it, then the goal
    via = [roadmap.dist_row(lm.source) + roadmap.dist(lm.source, lm.target) + goal_row[lm.target]
           for lm in landmarks]

    size = table.size
    layer_of: dict[int, int] = {}
    masks: list[int] = []
    G: list[np.ndarray] = []
    parent: list[np.ndarray] = []
    parent_layer: list[np.ndarray] = []
    dep_time: list[np.ndarray] = []
    heur_np: list[np.ndarray] = []
    heur_ls: list[list[float]] = []

    def layer_index(mask: int) -> int:
        li = layer_of.get(mask)
        if li is None:
            li = layer_of[mask] = len(masks)
            masks.append(mask)
            G.append(np.full(size, INF))
            parent.append(np.full(size, -1, dtype=np.int64))
            parent_layer.append(np.full(size, -1, dtype=np.int64))
            dep_time.append(np.full(size, INF))
            rows = [via[k] for k in range(K) if not mask >> k & 1]
            h = np.ascontiguousarray(np.max(rows, axis=0) if rows else goal_row)
            heur_np.append(h)
            heur_ls.append(h.tolist())
        return li

    start_id = None
    for nid in table.ids(start):
        if table.arr_lo[nid] <= 0.0 < table.arr_hi[nid]:
            start_id = nid
            break
    if start_id is None:
        return None

    moves_from: dict[int, dict[int, list[Interval]]] = {}
    for (u, v), ivs in cs.moves.items():
        moves_from.setdefault(u, {})[v] = ivs
    special_arr = np.array(sorted(table.by_vertex), dtype=np.int64)

    heap: list = []
    counter = 0
    first = layer_index(0)
    G[first][start_id] = 0.0
    heapq.heappush(heap, (heur_ls[first][start], 0.0, counter, first, start_id))
    pops = 0
    vertex_of = table.vertex_of
    dep_hi_of = table.dep_hi
    final_of = table.final_ok

    def relax(layer, nid, arrival, from_layer, from_id, tau):
        nonlocal counter
        if arrival < G[layer][nid]:
            G[layer][nid] = arrival
            parent[layer][nid] = from_id
            parent_layer[layer][nid] = from_layer
            dep_time[layer][nid] = tau
            counter += 1
            heapq.heappush(heap, (arrival + heur_ls[layer][vertex_of[nid]], -arrival, counter, layer, nid))

    while heap:
        f, neg_g, _, layer, nid = heapq.heappop(heap)
        g = 0.0 - neg_g
        if g > G[layer][nid]:
            continue
        pops += 1
        if deadline is not None and pops % 256 == 1 and time.monotonic() > deadline:
            raise SearchTimeout()
        u = vertex_of[nid]
        mask = masks[layer]
        if mask == full and u == goal and final_of[nid]:
            if stats is not None:
                stats.expansions += pops
            return _reconstruct(roadmap, start, goal, layer, nid, parent, parent_layer, dep_time, vertex_of)
        dep_hi = dep_hi_of[nid]
        nb = roadmap.neighbors(u)
        drow = roadmap.dist_row(u)
        cons = moves_from.get(u)

        # unconstrained targets: depart immediately, one node per vertex
        if cons:
            allowed = table.plain.copy()
            allowed[list(cons)] = False
            tp = nb[allowed[nb]]
        else:
            tp = nb[table.plain[nb]]
        if len(tp):
            arr = g + drow[tp]
            Gl = G[layer]
            better = arr < Gl[tp]
            if better.any():
                tb = tp[better]
                ab = arr[better]
                Gl[tb] = ab
                parent[layer][tb] = nid
                parent_layer[layer][tb] = layer
                dep_time[layer][tb] = g
                fb = ab + heur_np[layer][tb]
                for v, a, fv in zip(tb.tolist(), ab.tolist(), fb.tolist()):
                    counter += 1
                    heapq.heappush(heap, (fv, -a, counter, layer, v))

        # constrained targets
        scalar_targets: set[int] = set()
        if len(special_arr):
            scalar_targets.update(special_arr[roadmap.visible_mask(u)[special_arr]].tolist())
        if cons:
            scalar_targets.update(v for v in cons if roadmap.is_valid_move(u, v))
        for v in scalar_targets:
            d = float(drow[v])
            forb = cons.get(v, ()) if cons else ()
            for vid in table.ids(v):
                tau = _depart(g, dep_hi, d, table.arr_lo[vid], table.arr_hi[vid], forb)
                if tau is not None:
                    relax(layer, vid, tau + d, layer, nid, tau)

        # landmark moves: the earliest departure inside each unmet window
        # meets every landmark of that move whose window holds it
        here = lm_from.get(u)
        if here:
            for k, v, lo, hi, d in here:
                if mask >> k & 1:
                    continue
                forb = cons.get(v, ()) if cons else ()
                for vid in table.ids(v):
                    tau = _depart(g, dep_hi, d, table.arr_lo[vid], table.arr_hi[vid], forb, lo, hi)
                    if tau is None:
                        continue
                    met = mask
                    for k2, v2, lo2, hi2, _ in here:
                        if v2 == v and lo2 <= tau < hi2:
                            met |= 1 << k2
                    relax(layer_index(met), vid, tau + d, layer, nid, tau)
    if stats is not None:
        stats.expansions += pops
    return None


def _reconstruct(roadmap, start, goal, layer, nid, parent, parent_layer, dep_time, vertex_of) -> Plan:
    grid = roadmap.grid
    moves: list[TimedAction] = []
    while parent[layer][nid] >= 0:
        pid = int(parent[layer][nid])
        pl = int(parent_layer[layer][nid])
        tau = float(dep_time[layer][nid])
        u, v = vertex_of[pid], vertex_of[nid]
        moves.append(TimedAction(u, v, tau, roadmap.dist(u, v), grid.position(u), grid.position(v)))
        layer, nid = pl, pid
    moves.reverse()
    return Plan(start, goal, tuple(moves), grid.position(start))
