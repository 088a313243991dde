"""
Any-angle moves versus the 4-neighborhood
=========================================

Two agents cross a small room with a pillar in the middle.  With any-angle
moves each agent walks a straight segment whenever the swept disk clears the
walls; restricted to unit cardinal moves the same agents pay for every
corner.  The pictures land next to this script as SVG files.
"""
from pathlib import Path

from aaccbs import Grid, Instance, render_svg, solve, validate
from aaccbs.validator import steps_from_plan

here = Path(__file__).parent

# '@' is a wall; cells are addressed as (col, row)
grid = Grid.from_rows([
    "..........",
    "..........",
    "..........",
    "....@@....",
    "....@@....",
    "..........",
    "..........",
    "..........",
])
inst = Instance.from_cells(grid, starts=[(0, 0), (9, 1)], goals=[(9, 7), (0, 6)])

for cardinal in (False, True):
    sol = solve(inst, "ds_mc3", time_limit=60, cardinal=cardinal)
    label = "cardinal" if cardinal else "any-angle"
    # an independent check of the returned plans, sampling time densely
    report = validate(inst, sol.plans)
    print(f"{label:>9}: soc={sol.soc:.4f} per-agent={[round(c, 3) for c in sol.costs]} "
          f"iterations={sol.stats.iterations} valid={report.valid}")
    svg = render_svg(grid, inst.starts, inst.goals, [steps_from_plan(p) for p in sol.plans])
    (here / f"room-{label}.svg").write_text(svg)
