"""Any-angle continuous-time conflict-based search for disk agents on grids."""
from .benchmark import (CSV_HEADER, RunRecord, emit_trace, read_trace, records_from_csv,
                        records_from_jsonl, records_to_csv, records_to_jsonl, render_svg,
                        run_protocol, trace_to_jsonl)
from .ccbs import (InfeasibleInstanceError, Instance, NoSolutionError, Solution, SolveError,
                   SolveStats, solve)
from .constraints import ConstraintSet, MultiConstraint, NegConstraint, PosConstraint
from .grid import DEFAULT_RADIUS, Grid, Roadmap, line_of_sight, swept_cells
from .motion import (Conflict, Plan, TimedAction, collision_time, first_conflict, make_move,
                     make_wait, segment_pair_conflict, unsafe_interval)
from .movingai import ParseError, ScenarioEntry, parse_map, parse_scen, read_map, read_scen
from .sipp import plan
from .splitting import STRATEGIES, split
from .validator import Report, validate

__all__ = [
    "CSV_HEADER",
    "RunRecord",
    "emit_trace",
    "read_trace",
    "records_from_csv",
    "records_from_jsonl",
    "records_to_csv",
    "records_to_jsonl",
    "render_svg",
    "run_protocol",
    "trace_to_jsonl",
    "InfeasibleInstanceError",
    "Instance",
    "NoSolutionError",
    "Solution",
    "SolveError",
    "SolveStats",
    "solve",
    "ConstraintSet",
    "MultiConstraint",
    "NegConstraint",
    "PosConstraint",
    "DEFAULT_RADIUS",
    "Grid",
    "Roadmap",
    "line_of_sight",
    "swept_cells",
    "Conflict",
    "Plan",
    "TimedAction",
    "collision_time",
    "first_conflict",
    "make_move",
    "make_wait",
    "segment_pair_conflict",
    "unsafe_interval",
    "ParseError",
    "ScenarioEntry",
    "parse_map",
    "parse_scen",
    "read_map",
    "read_scen",
    "plan",
    "STRATEGIES",
    "split",
    "Report",
    "validate",
]

__version__ = "0.1.0"
