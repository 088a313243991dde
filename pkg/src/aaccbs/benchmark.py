"""Run records, the incremental-agents protocol, plan traces and SVG plots."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, fields
from typing import Callable, Iterable, Optional, Sequence

from .ccbs import Instance, SolveError, Solution, SolveStats, solve
from .grid import DEFAULT_RADIUS, Grid, Roadmap
from .movingai import ScenarioEntry
from .validator import Step, steps_from_plan

CSV_HEADER = ("map", "scen", "agents", "strategy", "w", "solved", "soc",
              "iterations", "lowlevel_calls", "wall_ms")


@dataclass(frozen=True)
class RunRecord:
    map: str
    scen: str
    agents: int
    strategy: str
    w: float
    solved: bool
    soc: Optional[float]
    iterations: int
    lowlevel_calls: int
    wall_ms: float

    def __post_init__(self):
        if self.solved and not (self.soc is not None and 0 < self.soc < math.inf):
            raise ValueError("a solved record needs a positive finite SOC")

    @property
    def trivial(self) -> bool:
        """The root plans were already conflict-free."""
        return self.solved and self.iterations == 1

    def to_row(self) -> list[str]:
        return [self.map, self.scen, str(self.agents), self.strategy, repr(self.w),
                "1" if self.solved else "0", "" if self.soc is None else repr(self.soc),
                str(self.iterations), str(self.lowlevel_calls), repr(self.wall_ms)]

    @classmethod
    def from_row(cls, row: Sequence[str]) -> "RunRecord":
        m, scen, agents, strategy, w, solved, soc, iters, calls, wall = row
        return cls(m, scen, int(agents), strategy, float(w), solved == "1",
                   None if soc == "" else float(soc), int(iters), int(calls), float(wall))

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        data = json.loads(text)
        return cls(**{f.name: data[f.name] for f in fields(cls)})


def records_to_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(r.to_row())
    return buf.getvalue()


def records_from_csv(text: str) -> list[RunRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"CSV header must be {','.join(CSV_HEADER)}")
    return [RunRecord.from_row(r) for r in rows[1:] if r]


def records_to_jsonl(records: Iterable[RunRecord]) -> str:
    return "".join(r.to_json() + "\n" for r in records)


def records_from_jsonl(text: str) -> list[RunRecord]:
    return [RunRecord.from_json(line) for line in text.splitlines() if line.strip()]


def instance_from_entries(grid: Grid, entries: Sequence[ScenarioEntry], k: int,
                          radius: float = DEFAULT_RADIUS) -> Instance:
    """The first ``k`` scenario entries as agents."""
    chosen = entries[:k]
    return Instance.from_cells(grid, [e.start for e in chosen], [e.goal for e in chosen], radius)


def run_protocol(grid: Grid, entries: Sequence[ScenarioEntry], strategy: str, w: float = 1.0,
                 time_limit: Optional[float] = 300.0, radius: float = DEFAULT_RADIUS,
                 cardinal: bool = False, map_name: str = "", scen_name: str = "",
                 first: int = 2, on_record: Optional[Callable[[RunRecord], None]] = None
                 ) -> list[RunRecord]:
    """Solve with 2, 3, ... agents until a run fails; one record per run."""
    roadmap = Roadmap(grid, radius, cardinal)
    records = []
    for k in range(first, len(entries) + 1):
        sol: Optional[Solution] = None
        stats = SolveStats()
        t0 = time.monotonic()
        try:
            inst = instance_from_entries(grid, entries, k, radius)
            sol = solve(inst, strategy, w, time_limit, cardinal, roadmap=roadmap, stats=stats)
        except (SolveError, ValueError):
            sol = None
        wall = time.monotonic() - t0
        rec = RunRecord(map_name, scen_name, k, strategy, w, sol is not None,
                        None if sol is None else sol.soc, stats.iterations, stats.lowlevel_calls,
                        round(wall * 1000.0, 3))
        records.append(rec)
        if on_record is not None:
            on_record(rec)
        if sol is None:
            break
    return records


# ---------------------------------------------------------------------------
# traces

def emit_trace(solution: Solution, instance: Instance, map_name: str = "") -> list[dict]:
    """Trace records: one header, then one record per explicit action of each agent.

    Waits are explicit; the final rest at the goal is implied.
    """
    grid = instance.grid
    out: list[dict] = [{
        "type": "instance", "map": map_name, "radius": instance.radius,
        "starts": [list(grid.cell(v)) for v in instance.starts],
        "goals": [list(grid.cell(v)) for v in instance.goals],
    }]
    for agent, plan in enumerate(solution.plans):
        for st in steps_from_plan(plan):
            out.append({"type": "action", "agent": agent, "kind": st.kind,
                        "source": list(grid.cell(st.source)), "target": list(grid.cell(st.target)),
                        "start": st.start, "duration": st.duration})
    return out


def trace_to_jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r) + "\n" for r in records)


def read_trace(text: str, grid: Grid) -> tuple[Instance, list[list[Step]]]:
    """Parse a JSON-lines trace into an instance and per-agent steps."""
    records = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not records or records[0].get("type") != "instance":
        raise ValueError("trace must start with an instance record")
    head = records[0]
    inst = Instance.from_cells(grid, [tuple(c) for c in head["starts"]],
                               [tuple(c) for c in head["goals"]], float(head["radius"]))
    steps: list[list[Step]] = [[] for _ in inst.starts]
    for r in records[1:]:
        if r.get("type") != "action":
            raise ValueError(f"unknown trace record type {r.get('type')!r}")
        a = int(r["agent"])
        if not 0 <= a < len(steps):
            raise ValueError(f"trace names agent {a}, instance has {len(steps)}")
        steps[a].append(Step(r["kind"], grid.vertex(tuple(r["source"])), grid.vertex(tuple(r["target"])),
                             float(r["start"]), float(r["duration"])))
    return inst, steps


# ---------------------------------------------------------------------------
# SVG

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
            "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f")


def render_svg(grid: Grid, starts: Sequence[int], goals: Sequence[int],
               steps: Sequence[Sequence[Step]], radius: float = DEFAULT_RADIUS,
               cell_px: int = 24) -> str:
    """Static picture of the map with every agent's path, start disk and goal."""
    w, h = grid.width * cell_px, grid.height * cell_px
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
           f'<rect width="{w}" height="{h}" fill="white"/>']
    for col, row in grid.blocked_cells.tolist():
        out.append(f'<rect x="{col * cell_px}" y="{row * cell_px}" width="{cell_px}" '
                   f'height="{cell_px}" fill="#444"/>')
    for k in range(grid.width + 1):
        out.append(f'<line x1="{k * cell_px}" y1="0" x2="{k * cell_px}" y2="{h}" stroke="#ddd" stroke-width="0.5"/>')
    for k in range(grid.height + 1):
        out.append(f'<line x1="0" y1="{k * cell_px}" x2="{w}" y2="{k * cell_px}" stroke="#ddd" stroke-width="0.5"/>')

    def px(v: int) -> tuple[float, float]:
        x, y = grid.position(v)
        return x * cell_px, y * cell_px

    for a, agent_steps in enumerate(steps):
        color = _PALETTE[a % len(_PALETTE)]
        pts = [px(starts[a])] + [px(s.target) for s in agent_steps if s.kind == "move"]
        path = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
        sx, sy = px(starts[a])
        out.append(f'<circle cx="{sx:.2f}" cy="{sy:.2f}" r="{radius * cell_px:.2f}" fill="{color}" '
                   f'fill-opacity="0.6"/>')
        gx, gy = px(goals[a])
        half = radius * cell_px
        out.append(f'<rect x="{gx - half:.2f}" y="{gy - half:.2f}" width="{2 * half:.2f}" '
                   f'height="{2 * half:.2f}" fill="none" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{sx:.2f}" y="{sy + 4:.2f}" font-size="{cell_px // 2}" '
                   f'text-anchor="middle" fill="black">{a}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
