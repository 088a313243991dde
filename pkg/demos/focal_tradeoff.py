"""
Trading cost for search effort with a focal list
================================================

With ``w > 1`` the high level expands, among all nodes within a factor ``w``
of the cheapest, the one with the fewest conflicts.  The returned cost stays
within ``w`` of the optimum while the number of expanded nodes usually drops.
"""
import numpy as np

from aaccbs import Grid, Instance, SolveStats, solve

rng = np.random.default_rng(1)
grid = Grid.empty(6, 6)
cells = [(c, r) for r in range(6) for c in range(6)]
picks = rng.choice(len(cells), size=8, replace=False)
inst = Instance.from_cells(grid, [cells[i] for i in picks[:4]], [cells[i] for i in picks[4:]])

optimum = None
for w in (1.0, 1.01, 1.1, 1.25, 1.5):
    stats = SolveStats()
    sol = solve(inst, "mc3", w=w, time_limit=120, stats=stats)
    if sol is None:
        print(f"w={w:<5} timeout after {stats.iterations} iterations")
        continue
    optimum = optimum or sol.soc
    print(f"w={w:<5} soc={sol.soc:.4f} ({100 * (sol.soc / optimum - 1):+.2f}% vs optimum) "
          f"iterations={stats.iterations}")

# the search is deterministic: the same instance expands the same nodes
a, b = SolveStats(), SolveStats()
solve(inst, "mc3", time_limit=120, stats=a)
solve(inst, "mc3", time_limit=120, stats=b)
print("deterministic:", a.iterations == b.iterations)
