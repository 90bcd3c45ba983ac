"""Text formats: permutations, gridding matrices, gridded permutations, DIMACS.

Permutation: one line of space-separated values (``1 5 3 4 2``); an empty
line is the empty permutation. A single token of several digits is read as
one digit per entry (``15342``).

Matrix: one line per row, top row first, tokens ``.`` ``+`` ``-``
``Av(321)`` ``F{12;21}``. ``Av(...)!`` declares the class to have bounded
grid-width. Lines starting with ``#`` are ignored.

Gridded permutation: the permutation line, ``cols: c_1 ... c_{k-1}``,
``rows: r_1 ... r_{l-1}`` (interior cuts), then optionally ``matrix:``
followed by matrix lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .exceptions import FormatError
from .grid import DEC, EMPTY, INC, GriddedPermutation, Gridding, GriddingMatrix, av, finite
from .perm import Permutation


def _perm_from_tokens(tokens: list[tuple[int, str]], line_no: int) -> Permutation:
    if len(tokens) == 1 and len(tokens[0][1]) > 1 and tokens[0][1].isdigit():
        col, tok = tokens[0]
        tokens = [(col + t, ch) for t, ch in enumerate(tok)]
    values = []
    seen: dict = {}
    for col, tok in tokens:
        if not tok.isdigit():
            raise FormatError(f"expected a positive integer, found {tok!r}", line_no, col)
        v = int(tok)
        if v in seen:
            raise FormatError(f"repeated value {v}", line_no, col)
        seen[v] = col
        values.append(v)
    n = len(values)
    for col, tok in tokens:
        if not 1 <= int(tok) <= n:
            raise FormatError(f"value {tok} outside 1..{n}", line_no, col)
    return Permutation(values)


def _tokens(line: str) -> list[tuple[int, str]]:
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]


def parse_perm(text: str) -> Permutation:
    lines = [(no, ln) for no, ln in enumerate(text.splitlines(), start=1) if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        return Permutation()
    if len(lines) > 1:
        raise FormatError("a permutation file holds a single line", lines[1][0], 1)
    no, line = lines[0]
    return _perm_from_tokens(_tokens(line), no)


def format_perm(p) -> str:
    return " ".join(map(str, p)) + "\n"


_AV = re.compile(r"Av\(([0-9,]+)\)(!?)$")
_FIN = re.compile(r"F\{([0-9,;]*)\}$")


def _basis(body: str) -> list[int]:
    if "," in body:
        return [int(t) for t in body.split(",") if t]
    return [int(ch) for ch in body]


def parse_entry(token: str, line_no: Optional[int] = None, col: Optional[int] = None):
    if token == ".":
        return EMPTY
    if token == "+":
        return INC
    if token == "-":
        return DEC
    try:
        m = _AV.match(token)
        if m:
            return av(Permutation(_basis(m.group(1))), bounded_gw=True if m.group(2) else None)
        m = _FIN.match(token)
        if m:
            body = m.group(1)
            perms = [Permutation(_basis(part)) for part in body.split(";")] if body else []
            return finite(perms)
    except ValueError as exc:
        raise FormatError(f"bad entry {token!r}: {exc}", line_no, col) from None
    raise FormatError(f"unknown matrix entry {token!r}", line_no, col)


def parse_matrix_lines(lines: list[tuple[int, str]]) -> GriddingMatrix:
    rows = []
    width = None
    for no, line in lines:
        toks = _tokens(line)
        if width is None:
            width = len(toks)
        elif len(toks) != width:
            raise FormatError(f"row has {len(toks)} entries, expected {width}", no, 1)
        rows.append([parse_entry(tok, no, col) for col, tok in toks])
    if not rows:
        raise FormatError("empty matrix", 1, 1)
    return GriddingMatrix.from_rows(rows)


def _content_lines(text: str, start: int = 1) -> list[tuple[int, str]]:
    return [
        (no, ln)
        for no, ln in enumerate(text.splitlines(), start=start)
        if ln.strip() and not ln.lstrip().startswith("#")
    ]


def parse_matrix(text: str) -> GriddingMatrix:
    return parse_matrix_lines(_content_lines(text))


def format_matrix(m: GriddingMatrix) -> str:
    return str(m) + "\n"


@dataclass(frozen=True)
class GriddedData:
    perm: Permutation
    gridding: Gridding
    matrix: Optional[GriddingMatrix]

    def with_matrix(self, m: Optional[GriddingMatrix] = None, check: bool = True) -> GriddedPermutation:
        m = m if m is not None else self.matrix
        if m is None:
            raise FormatError("no matrix given for the gridded permutation")
        return GriddedPermutation(self.perm, m, self.gridding, check=check)


def _cuts(no: int, line: str, key: str) -> list[int]:
    head, _, rest = line.partition(":")
    if head.strip() != key:
        raise FormatError(f"expected '{key}:'", no, 1)
    offset = len(head) + 2
    out = []
    for col, tok in _tokens(rest):
        if not tok.isdigit():
            raise FormatError(f"cut positions are nonnegative integers, found {tok!r}", no, offset + col - 1)
        out.append(int(tok))
    return out


def parse_gridded(text: str) -> GriddedData:
    raw = text.splitlines()
    lines = [(no, ln) for no, ln in enumerate(raw, start=1) if not ln.lstrip().startswith("#")]
    # the permutation line may be empty; skip leading blank lines only if more follow
    while len(lines) > 3 and not lines[0][1].strip():
        lines.pop(0)
    if len(lines) < 3:
        raise FormatError("a gridded permutation needs a permutation line, 'cols:' and 'rows:'", len(raw) or 1, 1)
    no, line = lines[0]
    perm = _perm_from_tokens(_tokens(line), no) if line.strip() else Permutation()
    cols = _cuts(*lines[1], "cols")
    rows = _cuts(*lines[2], "rows")
    n = len(perm)
    try:
        gridding = Gridding.from_interior(n, cols, rows)
    except ValueError as exc:
        raise FormatError(str(exc), lines[1][0], 1) from None
    matrix = None
    rest = [(no, ln) for no, ln in lines[3:] if ln.strip()]
    if rest:
        no, head = rest[0]
        if head.strip() != "matrix:":
            raise FormatError("expected 'matrix:' or end of file", no, 1)
        matrix = parse_matrix_lines(rest[1:])
        if matrix.shape != gridding.shape:
            raise FormatError(f"matrix shape {matrix.shape} does not match the cuts {gridding.shape}", no, 1)
    return GriddedData(perm, gridding, matrix)


def format_gridded(g: GriddedPermutation, include_matrix: bool = True) -> str:
    gr = g.gridding
    out = [
        " ".join(map(str, g.perm)),
        ("cols: " + " ".join(map(str, gr.column_cuts[1:-1]))).rstrip(),
        ("rows: " + " ".join(map(str, gr.row_cuts[1:-1]))).rstrip(),
    ]
    if include_matrix:
        out.append("matrix:")
        out.append(str(g.matrix))
    return "\n".join(out) + "\n"


def gridded_json(g: GriddedPermutation) -> dict:
    return {
        "perm": list(g.perm),
        "cols": list(g.gridding.column_cuts[1:-1]),
        "rows": list(g.gridding.row_cuts[1:-1]),
        "matrix": str(g.matrix).split("\n"),
    }


@dataclass(frozen=True)
class Cnf:
    variables: int
    clauses: tuple

    @property
    def clause_count(self) -> int:
        return len(self.clauses)


def parse_cnf(text: str) -> Cnf:
    """DIMACS CNF: ``c`` comments, a ``p cnf V C`` header, 0-terminated clauses."""
    header = None
    clauses = []
    current: list[int] = []
    for no, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("c"):
            continue
        if s.startswith("%"):
            break
        if s.startswith("p"):
            parts = s.split()
            if header is not None:
                raise FormatError("repeated problem line", no, 1)
            if len(parts) != 4 or parts[1] != "cnf" or not parts[2].isdigit() or not parts[3].isdigit():
                raise FormatError("problem line must read 'p cnf <variables> <clauses>'", no, 1)
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise FormatError("clause before the problem line", no, 1)
        for col, tok in _tokens(line):
            try:
                lit = int(tok)
            except ValueError:
                raise FormatError(f"bad literal {tok!r}", no, col) from None
            if abs(lit) > header[0]:
                raise FormatError(f"literal {lit} exceeds {header[0]} variables", no, col)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if header is None:
        raise FormatError("missing 'p cnf' problem line", 1, 1)
    if current:
        clauses.append(tuple(current))
    if len(clauses) != header[1]:
        raise FormatError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return Cnf(header[0], tuple(clauses))


def read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def load(path, kind: str):
    """Parse a file as ``perm``, ``matrix``, ``gridded`` or ``cnf``."""
    parsers = {"perm": parse_perm, "matrix": parse_matrix, "gridded": parse_gridded, "cnf": parse_cnf}
    if kind not in parsers:
        raise ValueError(f"unknown input kind {kind!r}")
    return parsers[kind](read_text(path))


def data_path(name: str) -> Path:
    return Path(__file__).with_name("data") / name
