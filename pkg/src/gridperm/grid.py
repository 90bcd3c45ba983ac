"""Gridding matrices, class entries and griddings of permutations.

Matrices use Cartesian addressing: cell ``(i, j)`` is column ``i`` (from the
left) and row ``j`` (from the bottom), both 1-based.
"""

from __future__ import annotations

import itertools
import random
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .perm import Permutation, Point, contains, pattern_of, standardize

Cell = tuple[int, int]


def _down_closure(perms: Iterable[Permutation]) -> frozenset:
    out = set()
    for p in perms:
        if p in out:
            continue
        for r in range(len(p) + 1):
            for idx in itertools.combinations(range(1, len(p) + 1), r):
                out.add(pattern_of(p, idx))
    return frozenset(out)


def _maximal(perms: frozenset) -> tuple:
    ordered = sorted(perms, key=lambda q: (-len(q), tuple(q)))
    tops: list[Permutation] = []
    for q in ordered:
        if not any(contains(q, t) for t in tops):
            tops.append(q)
    return tuple(sorted(tops, key=lambda q: (len(q), tuple(q))))


@dataclass(frozen=True)
class ClassEntry:
    """One cell class: ``empty``, ``inc``, ``dec``, ``av`` (with ``basis``) or
    ``finite`` (with its downward-closed ``members``).

    ``bounded_gw`` is user metadata about grid-width: True, False or None
    (unknown). Monotone and finite entries are always bounded.
    """

    kind: str
    basis: Optional[Permutation] = None
    members: frozenset = field(default=frozenset(), compare=False, repr=False)
    generators: tuple = ()
    bounded_gw: Optional[bool] = None

    def __post_init__(self):
        if self.kind not in ("empty", "inc", "dec", "av", "finite"):
            raise ValueError(f"unknown entry kind {self.kind!r}")
        if self.kind == "av" and (self.basis is None or len(self.basis) < 1):
            raise ValueError("Av(sigma) needs a nonempty sigma")

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"

    @property
    def is_infinite(self) -> bool:
        if self.kind in ("inc", "dec"):
            return True
        return self.kind == "av" and len(self.basis) >= 2

    @property
    def is_monotone(self) -> bool:
        return self.kind in ("inc", "dec")

    @property
    def monotone_kind(self) -> Optional[str]:
        """``inc``/``dec`` if the class equals Inc/Dec (also Av(21)/Av(12))."""
        if self.is_monotone:
            return self.kind
        if self.kind == "av" and tuple(self.basis) == (2, 1):
            return "inc"
        if self.kind == "av" and tuple(self.basis) == (1, 2):
            return "dec"
        return None

    def contains(self, p: Sequence[int]) -> bool:
        n = len(p)
        if self.kind == "empty":
            return n == 0
        if self.kind == "inc":
            return all(p[i] < p[i + 1] for i in range(n - 1))
        if self.kind == "dec":
            return all(p[i] > p[i + 1] for i in range(n - 1))
        if self.kind == "av":
            return len(self.basis) > n or not contains(self.basis, p)
        return Permutation(p) in self.members

    def reverse(self) -> "ClassEntry":
        return self._map(Permutation.reverse, swap=True)

    def complement(self) -> "ClassEntry":
        return self._map(Permutation.complement, swap=True)

    def inverse(self) -> "ClassEntry":
        return self._map(Permutation.inverse, swap=False)

    def _map(self, fn, swap: bool) -> "ClassEntry":
        if self.kind in ("inc", "dec"):
            if not swap:
                return self
            return DEC if self.kind == "inc" else INC
        if self.kind == "av":
            return av(fn(self.basis), bounded_gw=self.bounded_gw)
        if self.kind == "finite":
            return finite(fn(q) for q in self.generators)
        return self

    def token(self) -> str:
        if self.kind == "empty":
            return "."
        if self.kind == "inc":
            return "+"
        if self.kind == "dec":
            return "-"
        if self.kind == "av":
            sep = "," if len(self.basis) >= 10 else ""
            mark = "!" if self.bounded_gw and len(self.basis) > 2 else ""
            return f"Av({sep.join(map(str, self.basis))}){mark}"
        sep = ";"
        return "F{" + sep.join(",".join(map(str, q)) if len(q) >= 10 else str(q) for q in self.generators) + "}"

    def __str__(self) -> str:
        return self.token()


EMPTY = ClassEntry("empty", bounded_gw=True)
INC = ClassEntry("inc", bounded_gw=True)
DEC = ClassEntry("dec", bounded_gw=True)


def av(sigma, bounded_gw: Optional[bool] = None) -> ClassEntry:
    """The class of permutations avoiding ``sigma``.

    Av(1), Av(12) and Av(21) are known to have bounded grid-width; for longer
    bases the flag stays as given (None = unknown).
    """
    if isinstance(sigma, int):
        sigma = str(sigma)
    sigma = Permutation(sigma)
    if len(sigma) <= 2 and bounded_gw is None:
        bounded_gw = True
    return ClassEntry("av", basis=sigma, bounded_gw=bounded_gw)


def finite(perms: Iterable) -> ClassEntry:
    """The downward closure of the given permutations."""
    members = _down_closure(Permutation(q) for q in perms)
    if members <= {Permutation()}:
        return EMPTY
    return ClassEntry("finite", members=members, generators=_maximal(members), bounded_gw=True)


def entry_contains(e: ClassEntry, p: Sequence[int]) -> bool:
    return e.contains(p)


class GriddingMatrix:
    """A ``k x l`` matrix of class entries; ``m[i, j]`` is column i, row j."""

    def __init__(self, columns: Sequence[Sequence[ClassEntry]]):
        cols = tuple(tuple(c) for c in columns)
        if not cols or not cols[0]:
            raise ValueError("a gridding matrix needs at least one row and one column")
        if any(len(c) != len(cols[0]) for c in cols):
            raise ValueError("ragged matrix")
        for c in cols:
            for e in c:
                if not isinstance(e, ClassEntry):
                    raise TypeError(f"matrix entries must be ClassEntry, got {e!r}")
        self._cols = cols

    @classmethod
    def from_rows(cls, rows_top_down: Sequence[Sequence[ClassEntry]]) -> "GriddingMatrix":
        """Build from rows as written: first row is the top one."""
        rows = list(rows_top_down)[::-1]
        return cls([[rows[j][i] for j in range(len(rows))] for i in range(len(rows[0]))])

    @classmethod
    def filled(cls, k: int, l: int, cells: dict) -> "GriddingMatrix":
        """A ``k x l`` matrix that is empty except for ``cells``."""
        cols = [[EMPTY] * l for _ in range(k)]
        for (i, j), e in cells.items():
            cols[i - 1][j - 1] = e
        return cls(cols)

    @property
    def width(self) -> int:
        return len(self._cols)

    @property
    def height(self) -> int:
        return len(self._cols[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.width, self.height

    def __getitem__(self, cell: Cell) -> ClassEntry:
        i, j = cell
        if not (1 <= i <= self.width and 1 <= j <= self.height):
            raise IndexError(f"cell {cell} outside a {self.width}x{self.height} matrix")
        return self._cols[i - 1][j - 1]

    def cells(self) -> Iterator[Cell]:
        """All cells, column-major."""
        for i in range(1, self.width + 1):
            for j in range(1, self.height + 1):
                yield i, j

    def nonempty_cells(self) -> list[Cell]:
        return [c for c in self.cells() if not self[c].is_empty]

    def infinite_cells(self) -> list[Cell]:
        return [c for c in self.cells() if self[c].is_infinite]

    def is_monotone(self) -> bool:
        return all(self[c].kind in ("empty", "inc", "dec") for c in self.cells())

    def replace(self, updates: dict) -> "GriddingMatrix":
        cols = [list(c) for c in self._cols]
        for (i, j), e in updates.items():
            cols[i - 1][j - 1] = e
        return GriddingMatrix(cols)

    def submatrix(self, columns: Sequence[int], rows: Sequence[int]) -> "GriddingMatrix":
        return GriddingMatrix([[self[i, j] for j in rows] for i in columns])

    def rows_top_down(self) -> list[list[ClassEntry]]:
        return [[self[i, j] for i in range(1, self.width + 1)] for j in range(self.height, 0, -1)]

    def __eq__(self, other) -> bool:
        return isinstance(other, GriddingMatrix) and self._cols == other._cols

    def __hash__(self) -> int:
        return hash(self._cols)

    def __str__(self) -> str:
        return "\n".join(" ".join(e.token() for e in row) for row in self.rows_top_down())

    def __repr__(self) -> str:
        return f"GriddingMatrix.from_rows({self.rows_top_down()!r})"


def monotone_matrix(rows_top_down: Sequence[str]) -> GriddingMatrix:
    """Shorthand: ``monotone_matrix(["+ -", ". +"])``."""
    table = {".": EMPTY, "+": INC, "-": DEC}
    return GriddingMatrix.from_rows([[table[t] for t in row.split()] for row in rows_top_down])


@dataclass(frozen=True)
class Gridding:
    """Column cuts ``0 = c_0 <= ... <= c_k = n`` and row cuts likewise.

    Column ``i`` is the x-interval ``(c_{i-1}, c_i]``; rows are analogous.
    """

    column_cuts: tuple
    row_cuts: tuple

    def __post_init__(self):
        object.__setattr__(self, "column_cuts", tuple(int(c) for c in self.column_cuts))
        object.__setattr__(self, "row_cuts", tuple(int(r) for r in self.row_cuts))
        for cuts in (self.column_cuts, self.row_cuts):
            if len(cuts) < 2 or cuts[0] != 0:
                raise ValueError(f"cuts must start at 0 and have at least two entries: {cuts}")
            if any(a > b for a, b in zip(cuts, cuts[1:])):
                raise ValueError(f"cuts must be nondecreasing: {cuts}")
        if self.column_cuts[-1] != self.row_cuts[-1]:
            raise ValueError("column and row cuts must end at the same n")

    @classmethod
    def from_interior(cls, n: int, cols: Sequence[int], rows: Sequence[int]) -> "Gridding":
        return cls((0, *cols, n), (0, *rows, n))

    @property
    def n(self) -> int:
        return self.column_cuts[-1]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.column_cuts) - 1, len(self.row_cuts) - 1

    def column_of(self, x: int) -> int:
        return bisect_left(self.column_cuts, x)

    def row_of(self, y: int) -> int:
        return bisect_left(self.row_cuts, y)

    def cell_of(self, point: Point) -> Cell:
        return self.column_of(point[0]), self.row_of(point[1])

    def column_interval(self, i: int) -> range:
        return range(self.column_cuts[i - 1] + 1, self.column_cuts[i] + 1)

    def row_interval(self, j: int) -> range:
        return range(self.row_cuts[j - 1] + 1, self.row_cuts[j] + 1)


def _check_shapes(p: Sequence[int], m: GriddingMatrix, g: Gridding):
    if g.shape != m.shape:
        raise ValueError(f"gridding shape {g.shape} does not match matrix shape {m.shape}")
    if g.n != len(p):
        raise ValueError(f"gridding is for n={g.n}, permutation has length {len(p)}")


def cell_contents(p: Sequence[int], g: Gridding) -> dict:
    """Map each cell to the list of points of ``p`` inside it."""
    out: dict = {}
    for x, y in enumerate(p, start=1):
        out.setdefault(g.cell_of((x, y)), []).append((x, y))
    return out


def validate_gridding(p: Sequence[int], m: GriddingMatrix, g: Gridding) -> bool:
    """True iff every cell restriction of ``p`` belongs to its entry class."""
    _check_shapes(p, m, g)
    contents = cell_contents(p, g)
    for cell in m.cells():
        pts = contents.get(cell, [])
        if not m[cell].contains(standardize(pts)):
            return False
    return True


def find_gridding(p: Sequence[int], m: GriddingMatrix) -> Optional[Gridding]:
    """First valid M-gridding of ``p``, searching column cuts then row cuts,
    each lexicographically smallest first; None if ``p`` is not griddable.

    Exhaustive: ``O(n^(k+l-2))`` candidate griddings in the worst case.
    """
    p = tuple(p)
    n = len(p)
    k, l = m.shape
    for inner_cols in itertools.combinations_with_replacement(range(n + 1), k - 1):
        col_cuts = (0, *inner_cols, n)
        col_of = [bisect_left(col_cuts, x) for x in range(n + 1)]
        if not _columns_feasible(p, m, col_cuts):
            continue
        row_cuts = _find_rows(p, m, col_of, n, l)
        if row_cuts is not None:
            return Gridding(col_cuts, row_cuts)
    return None


def _columns_feasible(p, m, col_cuts) -> bool:
    # an all-empty column must receive no points
    for i in range(1, m.width + 1):
        if col_cuts[i] > col_cuts[i - 1] and all(m[i, j].is_empty for j in range(1, m.height + 1)):
            return False
    return True


def _find_rows(p, m, col_of, n, l):
    # depth-first over row cuts; row j is checked as soon as its top cut is fixed
    by_value = sorted(range(1, n + 1), key=lambda x: p[x - 1])  # positions ordered by value
    cuts = [0]

    def row_ok(j, lo, hi):
        cols: dict = {}
        for y in range(lo + 1, hi + 1):
            x = by_value[y - 1]
            cols.setdefault(col_of[x], []).append((x, y))
        for i in range(1, m.width + 1):
            if not m[i, j].contains(standardize(cols.get(i, []))):
                return False
        return True

    def search(j):
        lo = cuts[-1]
        if j == l:
            return row_ok(j, lo, n)
        for hi in range(lo, n + 1):
            if row_ok(j, lo, hi):
                cuts.append(hi)
                if search(j + 1):
                    return True
                cuts.pop()
        return False

    if search(1):
        return tuple(cuts) + (n,)
    return None


class GriddedPermutation:
    """A permutation together with a valid M-gridding."""

    def __init__(self, perm, matrix: GriddingMatrix, gridding: Gridding, check: bool = True):
        self.perm = Permutation(perm)
        self.matrix = matrix
        self.gridding = gridding
        _check_shapes(self.perm, matrix, gridding)
        if check and not validate_gridding(self.perm, matrix, gridding):
            raise ValueError("gridding does not respect the matrix entries")

    def __len__(self) -> int:
        return len(self.perm)

    def points(self) -> list[Point]:
        return self.perm.points()

    def cell_of_position(self, x: int) -> Cell:
        return self.gridding.cell_of((x, self.perm[x - 1]))

    def cell_labels(self) -> list[Cell]:
        return [self.cell_of_position(x) for x in range(1, len(self.perm) + 1)]

    def cell_points(self, i: int, j: int) -> frozenset:
        return cell_points(self, i, j)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GriddedPermutation)
            and self.perm == other.perm
            and self.matrix == other.matrix
            and self.gridding == other.gridding
        )

    def __repr__(self) -> str:
        g = self.gridding
        return f"GriddedPermutation({str(self.perm)!r}, cols={g.column_cuts}, rows={g.row_cuts})"


def cell_points(g: GriddedPermutation, i: int, j: int) -> frozenset:
    """Points of ``g`` inside the ``(i, j)``-cell."""
    k, l = g.matrix.shape
    if not (1 <= i <= k and 1 <= j <= l):
        raise IndexError(f"cell ({i}, {j}) outside a {k}x{l} gridding")
    xs = g.gridding.column_interval(i)
    ys = g.gridding.row_interval(j)
    return frozenset((x, g.perm[x - 1]) for x in xs if g.perm[x - 1] in ys)


def assemble(column_orders: Sequence[Sequence], row_orders: Sequence[Sequence]):
    """Lay out labelled points from their left-to-right order inside each
    column and bottom-to-top order inside each row.

    Every label must appear exactly once among the columns and once among the
    rows. Returns ``(perm, gridding, coords)`` with ``coords[label] = (x, y)``.
    """
    xs, ys = {}, {}
    x = 0
    col_cuts = [0]
    for order in column_orders:
        for label in order:
            x += 1
            xs[label] = x
        col_cuts.append(x)
    y = 0
    row_cuts = [0]
    for order in row_orders:
        for label in order:
            y += 1
            ys[label] = y
        row_cuts.append(y)
    if len(xs) != x or len(ys) != y or xs.keys() != ys.keys():
        raise ValueError("labels must appear exactly once in the columns and once in the rows")
    values = [0] * x
    for label, px in xs.items():
        values[px - 1] = ys[label]
    coords = {label: (xs[label], ys[label]) for label in xs}
    return Permutation(values), Gridding(col_cuts, row_cuts), coords


def layout_cells(shape: tuple[int, int], contents: dict, column_orders=None, row_orders=None, rng=None):
    """Place per-cell patterns into a gridded permutation.

    ``contents[cell]`` is the standardized pattern for that cell. Inside each
    column the cells' points are interleaved per ``column_orders[i]`` (a list
    of cell labels, one per point), randomly if ``rng`` is given, else stacked
    bottom cell first. Returns ``(perm, gridding)``.
    """
    k, l = shape
    cols: list[list] = []
    for i in range(1, k + 1):
        if column_orders is not None:
            seq = list(column_orders[i - 1])
        else:
            seq = [c for j in range(1, l + 1) for c in [(i, j)] * len(contents.get((i, j), ()))]
            if rng is not None:
                rng.shuffle(seq)
        seen: dict = {}
        col = []
        for c in seq:
            t = seen.get(c, 0) + 1
            seen[c] = t
            col.append((c, t))
        cols.append(col)
    rows: list[list] = []
    for j in range(1, l + 1):
        if row_orders is not None:
            seq = list(row_orders[j - 1])
        else:
            seq = [c for i in range(1, k + 1) for c in [(i, j)] * len(contents.get((i, j), ()))]
            if rng is not None:
                rng.shuffle(seq)
        seen = {}
        row = []
        for c in seq:
            s = seen.get(c, 0) + 1
            seen[c] = s
            # the s-th lowest point of the cell is its (rho^-1)(s)-th from the left
            row.append((c, Permutation(contents[c]).inverse()[s - 1]))
        rows.append(row)
    perm, gridding, _ = assemble(cols, rows)
    return perm, gridding


def _sample_member(e: ClassEntry, size: int, rng: random.Random) -> Optional[Permutation]:
    kind = e.monotone_kind
    if size == 0:
        return Permutation()
    if kind == "inc":
        return Permutation.identity(size)
    if kind == "dec":
        return Permutation.identity(size).reverse()
    if e.kind == "finite":
        options = [q for q in e.members if len(q) == size]
        return rng.choice(sorted(options)) if options else None
    if e.kind == "av":
        if len(e.basis) == 1:
            return None
        for _ in range(200):
            vals = list(range(1, size + 1))
            rng.shuffle(vals)
            if e.contains(vals):
                return Permutation(vals)
        ident = Permutation.identity(size)
        return ident if e.contains(ident) else ident.reverse()
    return None


def random_gridded(
    m: GriddingMatrix,
    n: int,
    rng: random.Random | int | None = None,
    min_per_cell: int = 0,
) -> GriddedPermutation:
    """A random M-gridded permutation with ``n`` points.

    Points are spread uniformly over the infinite cells (finite cells get a
    random member, possibly empty); inside each column and row the cells'
    points are interleaved uniformly at random.
    """
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    inf_cells = m.infinite_cells()
    finite_cells = [c for c in m.cells() if m[c].kind == "finite"]
    if not inf_cells and n > 0 and not finite_cells:
        raise ValueError("matrix has no nonempty cells")
    sizes = {c: 0 for c in m.nonempty_cells()}
    remaining = n
    for c in finite_cells:
        pick = rng.choice(sorted(m[c].members, key=lambda q: (len(q), tuple(q))))
        if len(pick) <= remaining - min_per_cell * len(inf_cells):
            sizes[c] = len(pick)
            remaining -= len(pick)
    if inf_cells:
        if remaining < min_per_cell * len(inf_cells):
            raise ValueError("not enough points for min_per_cell")
        for c in inf_cells:
            sizes[c] += min_per_cell
        remaining -= min_per_cell * len(inf_cells)
        for _ in range(remaining):
            sizes[rng.choice(inf_cells)] += 1
    elif remaining:
        raise ValueError(f"cannot place {n} points in finite cells only")
    contents = {}
    for c, s in sizes.items():
        member = _sample_member(m[c], s, rng)
        if member is None:
            raise ValueError(f"no member of size {s} in cell {c}")
        contents[c] = member
    perm, gridding = layout_cells(m.shape, contents, rng=rng)
    return GriddedPermutation(perm, m, gridding)
