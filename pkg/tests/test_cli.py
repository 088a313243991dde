import json
import subprocess
import sys
import time
from pathlib import Path

import pytest

from aaccbs.benchmark import records_from_csv, records_from_jsonl
from aaccbs.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from aaccbs.movingai import ScenarioEntry, serialize_scen

DATA = Path(__file__).parent / "data"
MAP = DATA / "empty-16-16.map"
SCEN = DATA / "empty-16-16-generated-1.scen"


@pytest.fixture
def small(tmp_path):
    """An 8x8 map and a scen file whose prefixes all solve in well under a second."""
    m = tmp_path / "tiny-8-8.map"
    m.write_text("type octile\nheight 8\nwidth 8\nmap\n" + "........\n" * 3 + "...@@...\n"
                 + "........\n" * 4)
    cells = [((1, 2), (1, 7)), ((3, 1), (3, 6)), ((4, 7), (0, 3))]
    es = [ScenarioEntry(0, m.name, 8, 8, s, g, 10.0) for s, g in cells]
    d = tmp_path / "scen"
    d.mkdir()
    (d / "tiny-8-8-1.scen").write_text(serialize_scen(es))
    (d / "tiny-8-8-2.scen").write_text(serialize_scen(es[::-1]))
    return m, d


def test_solve_one_agent_prints_soc(small, capsys):
    m, d = small
    assert main(["solve", "--map", str(m), "--scen", str(d / "tiny-8-8-1.scen"), "--agents", "1",
                 "--algo", "vanilla"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "soc=" in out and "solved" in out


def test_solve_writes_record_trace_and_svg_then_validates(small, tmp_path, capsys):
    m, d = small
    out, trace, svg = tmp_path / "r.csv", tmp_path / "t.jsonl", tmp_path / "p.svg"
    assert main(["solve", "--map", str(m), "--scen", str(d / "tiny-8-8-1.scen"), "--agents", "3",
                 "--algo", "ds+mc3", "--out", str(out), "--trace", str(trace), "--svg", str(svg)]) == EXIT_OK
    (rec,) = records_from_csv(out.read_text())
    assert rec.solved and rec.agents == 3 and rec.strategy == "ds_mc3"
    assert svg.read_text().startswith("<svg")
    capsys.readouterr()
    assert main(["validate", "--map", str(m), "--trace", str(trace)]) == EXIT_OK
    line = capsys.readouterr().out
    assert float(line.split("soc=")[1]) == pytest.approx(rec.soc, abs=1e-9)


def test_validate_tampered_trace_exits_1(small, tmp_path, capsys):
    m, d = small
    trace = tmp_path / "t.jsonl"
    main(["solve", "--map", str(m), "--scen", str(d / "tiny-8-8-1.scen"), "--agents", "2",
          "--algo", "ds", "--trace", str(trace)])
    recs = [json.loads(x) for x in trace.read_text().splitlines()]
    moves = [r for r in recs if r.get("kind") == "move"]
    moves[0]["source"] = [3, 6]  # teleport
    trace.write_text("".join(json.dumps(r) + "\n" for r in recs))
    capsys.readouterr()
    assert main(["validate", "--map", str(m), "--trace", str(trace)]) == EXIT_FAIL
    out = capsys.readouterr().out
    assert "violation:" in out and "invalid" in out


def test_usage_and_parse_errors_exit_2(small, tmp_path, capsys):
    m, d = small
    scen = str(d / "tiny-8-8-1.scen")
    assert main([]) == EXIT_USAGE
    assert main(["solve", "--map", str(m)]) == EXIT_USAGE
    assert main(["solve", "--map", str(m), "--scen", scen, "--agents", "2", "--algo", "mc9"]) == EXIT_USAGE
    assert main(["solve", "--map", str(m), "--scen", scen, "--agents", "2", "--algo", "ds",
                 "--w", "0.5"]) == EXIT_USAGE
    assert main(["solve", "--map", str(m), "--scen", scen, "--agents", "9", "--algo", "ds"]) == EXIT_USAGE
    capsys.readouterr()
    missing = tmp_path / "missing.map"
    assert main(["solve", "--map", str(missing), "--scen", scen, "--agents", "1", "--algo", "ds"]) == EXIT_USAGE
    assert str(missing) in capsys.readouterr().err
    bad = tmp_path / "bad.jsonl"
    bad.write_text("not json\n")
    assert main(["validate", "--map", str(m), "--trace", str(bad)]) == EXIT_USAGE
    assert str(bad) in capsys.readouterr().err


def test_algo_spellings(small):
    m, d = small
    for algo in ("ds+mc3", "ds_mc3", "mc1", "mc2"):
        assert main(["solve", "--map", str(m), "--scen", str(d / "tiny-8-8-1.scen"), "--agents", "2",
                     "--algo", algo]) == EXIT_OK


def test_unsolved_exits_1(tmp_path):
    assert main(["solve", "--map", str(MAP), "--scen", str(SCEN), "--agents", "12", "--algo", "vanilla",
                 "--time-limit", "0.2"]) == EXIT_FAIL


def test_bench_is_byte_reproducible(small, tmp_path, capsys):
    m, d = small
    outs = []
    for jobs in ("1", "2", "1"):
        out, jl = tmp_path / f"b{len(outs)}.csv", tmp_path / f"b{len(outs)}.jsonl"
        assert main(["bench", "--map", str(m), "--scen-dir", str(d), "--algo", "vanilla", "ds+mc3",
                     "--w", "1", "1.1", "--jobs", jobs, "--no-timing", "--time-limit", "60",
                     "--out", str(out), "--jsonl", str(jl)]) == EXIT_OK
        outs.append((out.read_bytes(), jl.read_bytes()))
    assert outs[0] == outs[1] == outs[2]
    recs = records_from_csv(outs[0][0].decode())
    assert records_from_jsonl(outs[0][1].decode()) == recs
    # 2 scen files x 2 algos x 2 weights, each solving k = 2 and 3
    assert len(recs) == 16 and all(r.solved for r in recs)
    assert "coverage" in capsys.readouterr().err


def test_bench_errors(small, tmp_path):
    m, _ = small
    assert main(["bench", "--map", str(m), "--scen-dir", str(tmp_path / "none"), "--algo", "ds"]) == EXIT_USAGE
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["bench", "--map", str(m), "--scen-dir", str(empty), "--algo", "ds"]) == EXIT_USAGE


def test_time_limit_overshoot_within_5_percent(tmp_path):
    limit = 4.0
    t0 = time.monotonic()
    code = main(["solve", "--map", str(MAP), "--scen", str(SCEN), "--agents", "10", "--algo", "vanilla",
                 "--time-limit", str(limit)])
    elapsed = time.monotonic() - t0
    assert code == EXIT_FAIL
    assert elapsed <= 1.05 * limit, elapsed


def test_module_entry_point(small):
    m, d = small
    res = subprocess.run([sys.executable, "-m", "aaccbs", "solve", "--map", str(m), "--scen",
                          str(d / "tiny-8-8-1.scen"), "--agents", "1", "--algo", "ds"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "soc=" in res.stdout
