"""MovingAI ``.map`` and ``.scen`` text formats."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .grid import Grid

FREE_CHARS = ".G"
BLOCKED_CHARS = "@OTW"


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = ""
        if path:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.message = message
        self.line = line
        self.path = path


@dataclass(frozen=True)
class MapFile:
    """A parsed map that keeps the original characters for exact re-serialization."""

    kind: str
    rows: tuple[str, ...]

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def to_grid(self) -> Grid:
        return Grid(np.array([[ch in BLOCKED_CHARS for ch in row] for row in self.rows], dtype=bool))

    def serialize(self) -> str:
        head = f"type {self.kind}\nheight {self.height}\nwidth {self.width}\nmap\n"
        return head + "".join(row + "\n" for row in self.rows)


def _header_value(line: str, key: str, lineno: int) -> str:
    parts = line.split()
    if len(parts) != 2 or parts[0] != key:
        raise ParseError(f"expected '{key} <value>', got {line!r}", lineno)
    return parts[1]


def parse_map_file(text: str) -> MapFile:
    lines = text.splitlines()
    if len(lines) < 4:
        raise ParseError("truncated header", len(lines) + 1)
    kind = _header_value(lines[0], "type", 1)
    try:
        height = int(_header_value(lines[1], "height", 2))
        width = int(_header_value(lines[2], "width", 3))
    except ValueError as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError("height and width must be integers", 2) from None
    if height <= 0 or width <= 0:
        raise ParseError("height and width must be positive", 2)
    if lines[3].strip() != "map":
        raise ParseError(f"expected 'map', got {lines[3]!r}", 4)
    body = lines[4:]
    while body and body[-1] == "":
        body.pop()
    if len(body) != height:
        raise ParseError(f"expected {height} rows, found {len(body)}", 5 + min(len(body), height))
    allowed = FREE_CHARS + BLOCKED_CHARS
    for k, row in enumerate(body):
        lineno = 5 + k
        if len(row) != width:
            raise ParseError(f"row has {len(row)} cells, expected {width}", lineno)
        for col, ch in enumerate(row):
            if ch not in allowed:
                raise ParseError(f"unknown map character {ch!r} at column {col}", lineno)
    return MapFile(kind, tuple(body))


def parse_map(text: str) -> Grid:
    return parse_map_file(text).to_grid()


@dataclass(frozen=True)
class ScenarioEntry:
    bucket: int
    map_name: str
    map_width: int
    map_height: int
    start: tuple[int, int]  # (col, row)
    goal: tuple[int, int]
    length: float

    def to_line(self) -> str:
        return "\t".join([str(self.bucket), self.map_name, str(self.map_width), str(self.map_height),
                          str(self.start[0]), str(self.start[1]), str(self.goal[0]), str(self.goal[1]),
                          f"{self.length:.8f}"])


@dataclass(frozen=True)
class Scenario:
    version: str
    entries: tuple[ScenarioEntry, ...]

    def serialize(self) -> str:
        return f"version {self.version}\n" + "".join(e.to_line() + "\n" for e in self.entries)


def parse_scenario(text: str) -> Scenario:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("version"):
        raise ParseError("missing 'version' header", 1)
    version = _header_value(lines[0], "version", 1)
    entries = []
    for k, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 9:
            parts = line.split()
        if len(parts) != 9:
            raise ParseError(f"expected 9 fields, got {len(parts)}", k)
        try:
            entries.append(ScenarioEntry(int(parts[0]), parts[1], int(parts[2]), int(parts[3]),
                                         (int(parts[4]), int(parts[5])), (int(parts[6]), int(parts[7])),
                                         float(parts[8])))
        except ValueError:
            raise ParseError(f"malformed field in {line!r}", k) from None
    return Scenario(version, tuple(entries))


def parse_scen(text: str) -> list[ScenarioEntry]:
    return list(parse_scenario(text).entries)


def serialize_scen(entries: Sequence[ScenarioEntry], version: str = "1") -> str:
    return Scenario(version, tuple(entries)).serialize()


def check_entries(grid: Grid, entries: Sequence[ScenarioEntry]) -> None:
    """Raise ParseError if an entry leaves the map, stands on a blocked cell,
    disagrees with the map size or claims a length below the straight line."""
    for k, e in enumerate(entries):
        if (e.map_width, e.map_height) != (grid.width, grid.height):
            raise ParseError(f"entry {k}: declares a {e.map_width}x{e.map_height} map, "
                             f"got {grid.width}x{grid.height}")
        for cell in (e.start, e.goal):
            if not grid.is_free(cell):
                raise ParseError(f"entry {k}: cell {cell} is not a free cell of the map")
        straight = math.hypot(e.goal[0] - e.start[0], e.goal[1] - e.start[1])
        if e.length < straight - 1e-6:
            raise ParseError(f"entry {k}: reference length {e.length} is below "
                             f"the straight-line distance {straight:.8f}")


def read_map(path: str | Path) -> Grid:
    return _read(path, parse_map)


def read_scen(path: str | Path) -> list[ScenarioEntry]:
    return _read(path, parse_scen)


def _read(path, parser):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read file: {e.strerror}", path=str(path)) from None
    try:
        return parser(text)
    except ParseError as e:
        raise ParseError(e.message, e.line, str(path)) from None
