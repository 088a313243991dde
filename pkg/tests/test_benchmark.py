import json
import math
import xml.etree.ElementTree as ET
from pathlib import Path
from types import SimpleNamespace

import pytest
from hypothesis import given, settings, strategies as st

from aaccbs.benchmark import (CSV_HEADER, RunRecord, emit_trace, instance_from_entries, read_trace,
                              records_from_csv, records_from_jsonl, records_to_csv,
                              records_to_jsonl, render_svg, run_protocol, trace_to_jsonl)
from aaccbs.ccbs import Instance, solve
from aaccbs.grid import Grid
from aaccbs.motion import Plan, make_move
from aaccbs.movingai import ScenarioEntry, read_map, read_scen
from aaccbs.validator import steps_from_plan, validate

DATA = Path(__file__).parent / "data"

# file names: no control characters
names = st.text(st.characters(blacklist_categories=("Cs", "Cc")), max_size=12)
finite = st.floats(allow_nan=False, allow_infinity=False)


@st.composite
def records(draw):
    solved = draw(st.booleans())
    soc = draw(st.floats(min_value=1e-9, max_value=1e9)) if solved else draw(st.none() | finite)
    return RunRecord(draw(names), draw(names), draw(st.integers(0, 10**4)),
                     draw(st.sampled_from(["vanilla", "mc1", "ds_mc3"])), draw(st.floats(1.0, 10.0)),
                     solved, soc, draw(st.integers(0, 10**9)), draw(st.integers(0, 10**9)),
                     draw(st.floats(0, 1e9)))


@given(st.lists(records(), max_size=10))
@settings(max_examples=150, deadline=None)
def test_records_round_trip_csv_and_jsonl(rs):
    assert records_from_csv(records_to_csv(rs)) == rs
    assert records_from_jsonl(records_to_jsonl(rs)) == rs


def test_csv_header_is_fixed():
    text = records_to_csv([])
    assert text == "map,scen,agents,strategy,w,solved,soc,iterations,lowlevel_calls,wall_ms\n"
    assert ",".join(CSV_HEADER) + "\n" == text
    with pytest.raises(ValueError):
        records_from_csv("map,scen\n")


def test_solved_record_needs_finite_positive_soc():
    for soc in (None, 0.0, math.inf):
        with pytest.raises(ValueError):
            RunRecord("m", "s", 2, "ds", 1.0, True, soc, 1, 2, 0.0)
    assert RunRecord("m", "s", 2, "ds", 1.0, True, 3.0, 1, 2, 0.0).trivial
    assert not RunRecord("m", "s", 2, "ds", 1.0, True, 3.0, 4, 9, 0.0).trivial


def corridor_entries():
    # agents 0 and 1 in separate rows; agent 2 must cross both
    return [ScenarioEntry(0, "e.map", 8, 8, (0, 0), (7, 0), 7.0),
            ScenarioEntry(0, "e.map", 8, 8, (0, 7), (7, 7), 7.0),
            ScenarioEntry(0, "e.map", 8, 8, (3, 7), (4, 0), 7.1)]


def test_protocol_records_every_k_when_all_solve():
    g = Grid.empty(8, 8)
    recs = run_protocol(g, corridor_entries(), "ds", time_limit=30, map_name="e.map", scen_name="x")
    assert [r.agents for r in recs] == [2, 3]
    assert all(r.solved and r.map == "e.map" and r.scen == "x" for r in recs)
    assert recs[0].trivial
    assert recs[0].soc == pytest.approx(14.0)


def test_protocol_stops_at_first_failure():
    g = Grid.empty(8, 8)
    entries = corridor_entries()
    entries.insert(1, ScenarioEntry(0, "e.map", 8, 8, (0, 0), (5, 5), 1.0))  # duplicate start
    recs = run_protocol(g, entries, "vanilla", time_limit=30)
    assert [(r.agents, r.solved) for r in recs] == [(2, False)]
    assert recs[0].soc is None


def test_protocol_timeout_gives_one_unsolved_record():
    g = read_map(DATA / "empty-16-16.map")
    entries = read_scen(DATA / "empty-16-16-generated-1.scen")
    seen = []
    recs = run_protocol(g, entries, "vanilla", time_limit=1e-6, on_record=seen.append)
    assert len(recs) == 1 and not recs[0].solved and seen == recs


def waiting_solution():
    g = Grid.from_rows(["......", "......", "......"])
    inst = Instance.from_cells(g, [(0, 1), (5, 1)], [(5, 1), (0, 1)])
    return inst, solve(inst, "ds_mc3", time_limit=60)


def test_trace_single_move():
    g = Grid.empty(5, 5)
    inst = Instance.from_cells(g, [(0, 0)], [(4, 3)])
    recs = emit_trace(solve(inst), inst, "e.map")
    assert recs[0]["type"] == "instance" and recs[0]["starts"] == [[0, 0]]
    assert len(recs) == 2
    assert recs[1] == {"type": "action", "agent": 0, "kind": "move", "source": [0, 0],
                       "target": [4, 3], "start": 0.0, "duration": 5.0}


def test_trace_round_trip_preserves_soc_and_waits():
    inst, sol = waiting_solution()
    text = trace_to_jsonl(emit_trace(sol, inst))
    assert all(json.loads(line) for line in text.splitlines())
    inst2, steps = read_trace(text, inst.grid)
    assert inst2 == inst
    rep = validate(inst2, steps)
    assert rep.valid, rep.violations
    assert rep.soc == pytest.approx(sol.soc, abs=1e-9)
    for plan, agent_steps in zip(sol.plans, steps):
        assert agent_steps == steps_from_plan(plan)


def test_trace_with_wait_lists_it_explicitly():
    g = Grid.empty(5, 3)
    inst = Instance.from_cells(g, [(0, 1)], [(4, 1)])
    m = make_move(g, inst.starts[0], inst.goals[0], 2.5)
    plan = Plan(inst.starts[0], inst.goals[0], (m,), g.position(inst.starts[0]))
    recs = emit_trace(SimpleNamespace(plans=[plan]), inst)
    assert [(r["kind"], r["start"], r["duration"]) for r in recs[1:]] == [("wait", 0.0, 2.5),
                                                                          ("move", 2.5, 4.0)]


def test_read_trace_rejects_malformed():
    g = Grid.empty(3, 3)
    with pytest.raises(ValueError):
        read_trace('{"type": "action"}\n', g)
    head = json.dumps({"type": "instance", "radius": 0.3, "starts": [[0, 0]], "goals": [[2, 2]]})
    with pytest.raises(ValueError):
        read_trace(head + '\n{"type": "action", "agent": 4, "kind": "move", "source": [0, 0], '
                   '"target": [1, 1], "start": 0, "duration": 1.4}\n', g)


def test_instance_from_entries_prefix():
    g = Grid.empty(8, 8)
    inst = instance_from_entries(g, corridor_entries(), 2)
    assert inst.starts == (g.vertex((0, 0)), g.vertex((0, 7)))


def test_svg_is_well_formed():
    inst, sol = waiting_solution()
    svg = render_svg(inst.grid, inst.starts, inst.goals, [steps_from_plan(p) for p in sol.plans])
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert len([e for e in root if e.tag.endswith("polyline")]) == 2
    walls = Grid.from_rows([".@.", "..."])
    svg = render_svg(walls, [0], [1], [[]])
    assert svg.count('fill="#444"') == 1
