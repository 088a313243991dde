"""Command-line driver: ``solve``, ``bench`` and ``validate``."""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .benchmark import (RunRecord, emit_trace, instance_from_entries, read_trace,
                        records_to_csv, records_to_jsonl, render_svg, run_protocol,
                        trace_to_jsonl)
from .ccbs import SolveError, SolveStats, solve
from .grid import DEFAULT_RADIUS
from .movingai import ParseError, check_entries, read_map, read_scen
from .validator import steps_from_plan, validate

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ALGOS = {"vanilla": "vanilla", "mc1": "mc1", "mc2": "mc2", "mc3": "mc3",
         "ds": "ds", "ds+mc3": "ds_mc3"}
DEFAULT_TIME_LIMIT = 300.0


def _algo(name: str) -> str:
    key = name.replace("_", "+")
    if key not in ALGOS:
        raise argparse.ArgumentTypeError(f"unknown algorithm {name!r}; choose from {', '.join(ALGOS)}")
    return ALGOS[key]


def _positive(kind):
    def parse(text: str):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def _weight(text: str) -> float:
    value = float(text)
    if not value >= 1.0:
        raise argparse.ArgumentTypeError(f"w must be >= 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aaccbs", description="Any-angle continuous-time conflict-based search.")
    sub = p.add_subparsers(dest="command")

    s = sub.add_parser("solve", help="solve one instance built from the first K scenario entries")
    s.add_argument("--map", required=True, type=Path)
    s.add_argument("--scen", required=True, type=Path)
    s.add_argument("--agents", required=True, type=_positive(int))
    s.add_argument("--algo", required=True, type=_algo, metavar="{" + "|".join(ALGOS) + "}")
    s.add_argument("--w", type=_weight, default=1.0)
    s.add_argument("--radius", type=_positive(float), default=DEFAULT_RADIUS)
    s.add_argument("--time-limit", type=_positive(float), default=DEFAULT_TIME_LIMIT)
    s.add_argument("--cardinal", action="store_true", help="restrict moves to the 4-neighborhood")
    s.add_argument("--out", type=Path, help="write the run record as CSV")
    s.add_argument("--trace", type=Path, help="write the plans as a JSON-lines trace")
    s.add_argument("--svg", type=Path, help="draw the plans as SVG")

    b = sub.add_parser("bench", help="incremental-agents protocol over every scenario of a map")
    b.add_argument("--map", required=True, type=Path)
    b.add_argument("--scen-dir", required=True, type=Path)
    b.add_argument("--algo", required=True, nargs="+", type=_algo, metavar="ALGO")
    b.add_argument("--w", nargs="+", type=_weight, default=[1.0])
    b.add_argument("--radius", type=_positive(float), default=DEFAULT_RADIUS)
    b.add_argument("--time-limit", type=_positive(float), default=DEFAULT_TIME_LIMIT)
    b.add_argument("--cardinal", action="store_true")
    b.add_argument("--jobs", type=_positive(int), default=1)
    b.add_argument("--out", type=Path, help="CSV results (default: stdout)")
    b.add_argument("--jsonl", type=Path, help="also write JSON-lines results")
    b.add_argument("--no-timing", action="store_true",
                   help="write wall_ms as 0 so result files are byte-reproducible")

    v = sub.add_parser("validate", help="check a JSON-lines trace against a map")
    v.add_argument("--map", required=True, type=Path)
    v.add_argument("--trace", required=True, type=Path)
    v.add_argument("--radius", type=_positive(float), default=None,
                   help="agent radius (default: the one recorded in the trace)")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return {"solve": _cmd_solve, "bench": _cmd_bench, "validate": _cmd_validate}[args.command](args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def _cmd_solve(args) -> int:
    grid = read_map(args.map)
    entries = read_scen(args.scen)
    check_entries(grid, entries)
    if args.agents > len(entries):
        print(f"error: {args.scen} has {len(entries)} entries, {args.agents} agents requested",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        inst = instance_from_entries(grid, entries, args.agents, args.radius)
    except ValueError as e:
        print(f"error: {args.scen}: {e}", file=sys.stderr)
        return EXIT_USAGE
    stats = SolveStats()
    try:
        sol = solve(inst, args.algo, args.w, args.time_limit, args.cardinal, stats=stats)
        reason = "time limit reached"
    except SolveError as e:
        sol, reason = None, str(e)
    if args.out:
        rec = RunRecord(args.map.name, args.scen.name, args.agents, args.algo, args.w, sol is not None,
                        sol.soc if sol else None, stats.iterations, stats.lowlevel_calls,
                        round(stats.wall_time * 1000.0, 3))
        args.out.write_text(records_to_csv([rec]))
    if sol is None:
        print(f"unsolved: {reason}")
        return EXIT_FAIL
    print(f"solved agents={args.agents} algo={args.algo} soc={sol.soc!r} "
          f"iterations={sol.stats.iterations} lowlevel_calls={sol.stats.lowlevel_calls}")
    if args.trace:
        args.trace.write_text(trace_to_jsonl(emit_trace(sol, inst, args.map.name)))
    if args.svg:
        args.svg.write_text(render_svg(grid, inst.starts, inst.goals,
                                       [steps_from_plan(p) for p in sol.plans], args.radius))
    return EXIT_OK


def _scen_files(map_path: Path, scen_dir: Path) -> list[Path]:
    files = sorted(scen_dir.glob("*.scen"))
    own = [f for f in files if f.name.startswith(map_path.stem + "-") or f.name.startswith(map_path.stem + ".")]
    return own or files


def _bench_task(task) -> list[RunRecord]:
    map_path, scen_path, algo, w, time_limit, radius, cardinal = task
    grid = read_map(map_path)
    entries = read_scen(scen_path)
    check_entries(grid, entries)
    return run_protocol(grid, entries, algo, w, time_limit, radius, cardinal,
                        map_name=map_path.name, scen_name=scen_path.name)


def _cmd_bench(args) -> int:
    if not args.scen_dir.is_dir():
        print(f"error: {args.scen_dir}: not a directory", file=sys.stderr)
        return EXIT_USAGE
    read_map(args.map)  # fail early on a bad map
    scens = _scen_files(args.map, args.scen_dir)
    if not scens:
        print(f"error: {args.scen_dir}: no .scen files", file=sys.stderr)
        return EXIT_USAGE
    tasks = [(args.map, s, a, w, args.time_limit, args.radius, args.cardinal)
             for s in scens for a in args.algo for w in args.w]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            batches = list(pool.map(_bench_task, tasks))
    else:
        batches = [_bench_task(t) for t in tasks]
    records = [r for batch in batches for r in batch]
    if args.no_timing:
        records = [replace(r, wall_ms=0.0) for r in records]
    text = records_to_csv(records)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    if args.jsonl:
        args.jsonl.write_text(records_to_jsonl(records))
    solved = {}
    for r in records:
        solved[r.strategy, r.w] = solved.get((r.strategy, r.w), 0) + r.solved
    for (algo, w), n in solved.items():
        print(f"coverage {algo} w={w}: {n}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args) -> int:
    grid = read_map(args.map)
    try:
        text = args.trace.read_text()
    except OSError as e:
        print(f"error: {args.trace}: cannot read file: {e.strerror}", file=sys.stderr)
        return EXIT_USAGE
    try:
        inst, steps = read_trace(text, grid)
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as e:
        print(f"error: {args.trace}: malformed trace: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.radius is not None:
        inst = replace(inst, radius=args.radius)
    report = validate(inst, steps)
    if report.valid:
        print(f"valid agents={len(steps)} soc={report.soc!r}")
        return EXIT_OK
    for msg in report.violations:
        print(f"violation: {msg}")
    print(f"invalid: {len(report.violations)} violation(s)")
    return EXIT_FAIL
