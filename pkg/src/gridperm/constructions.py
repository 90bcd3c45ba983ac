"""Staircases, lanes, confining, (f, g)-transforms, anchors, the hardness
pipeline and path witnesses of large grid-width."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .analysis import (
    build_cell_graph,
    consistent_orientation,
    find_cycle,
    is_proper_turning,
    path_matrix,
    path_order,
    shared_line,
)
from .grid import (
    EMPTY,
    INC,
    ClassEntry,
    GriddedPermutation,
    GriddingMatrix,
    assemble,
    av,
)
from .perm import Permutation, lis_length, longest_monotone_length


def staircase_matrix(k: int, c: ClassEntry, d: ClassEntry) -> GriddingMatrix:
    """St^k(C, D): C in every (i, i)-cell, D in every (i + 1, i)-cell."""
    if k < 1:
        raise ValueError("a staircase needs at least one step")
    if c.is_empty or d.is_empty:
        raise ValueError("staircase entries must be nonempty")
    cells = {}
    for i in range(1, k + 1):
        cells[i, i] = c
        cells[i + 1, i] = d
    return GriddingMatrix.filled(k + 1, k, cells)


def staircase_steps(m: GriddingMatrix) -> Optional[int]:
    """``k`` if ``m`` has the nonempty pattern of a k-step staircase, else None."""
    k = m.height
    if m.width != k + 1:
        return None
    want = {(i, i) for i in range(1, k + 1)} | {(i + 1, i) for i in range(1, k + 1)}
    return k if set(m.nonempty_cells()) == want else None


def _line_orders(g: GriddedPermutation):
    """Positions of ``g`` per column (left to right) and per row (bottom to top)."""
    k, l = g.matrix.shape
    cols = [[] for _ in range(k)]
    rows = [[] for _ in range(l)]
    for x in range(1, len(g.perm) + 1):
        i, j = g.cell_of_position(x)
        cols[i - 1].append(x)
    by_value = sorted(range(1, len(g.perm) + 1), key=lambda x: g.perm[x - 1])
    for x in by_value:
        _, j = g.cell_of_position(x)
        rows[j - 1].append(x)
    return cols, rows


# --- lanes and confining ---------------------------------------------------------

def _lane_orders(k: int):
    # two points per staircase cell, labelled (i, j, 0) lower and (i, j, 1) upper;
    # below-above neighbours in a column give 1342, left-right in a row give 1423
    cols = []
    for i in range(1, k + 2):
        here = []
        bottom = (i, i - 1) if i >= 2 else None
        top = (i, i) if i <= k else None
        if bottom and top:
            here = [(*bottom, 0), (*top, 0), (*top, 1), (*bottom, 1)]
        else:
            c = bottom or top
            here = [(*c, 0), (*c, 1)]
        cols.append(here)
    rows = []
    for t in range(1, k + 1):
        left, right = (t, t), (t + 1, t)
        rows.append([(*left, 0), (*right, 0), (*right, 1), (*left, 1)])
    return cols, rows


def make_lane(k: int) -> GriddedPermutation:
    """The lane of ``k`` steps over St^k(Inc, Inc), two points per cell."""
    if k < 1:
        raise ValueError("a lane needs at least one step")
    cols, rows = _lane_orders(k)
    perm, gridding, _ = assemble(cols, rows)
    return GriddedPermutation(perm, staircase_matrix(k, INC, INC), gridding)


def confine(g: GriddedPermutation) -> GriddedPermutation:
    """Wrap a staircase-gridded permutation between two lanes.

    Each column becomes: the lower lane's part, the original part, the upper
    lane's part (left to right); rows likewise bottom to top. This is the
    3 x 3 diagonal block expansion with each block unified back into one cell.
    Entries must be closed under direct sums with an increasing run on either
    side (true for Inc and Av(321), false for Dec).
    """
    k = staircase_steps(g.matrix)
    if k is None:
        raise ValueError("confining needs a staircase-gridded permutation")
    lane_cols, lane_rows = _lane_orders(k)
    cols, rows = _line_orders(g)
    col_orders = [
        [("L", lab) for lab in lane_cols[i]] + [("P", x) for x in cols[i]] + [("U", lab) for lab in lane_cols[i]]
        for i in range(k + 1)
    ]
    row_orders = [
        [("L", lab) for lab in lane_rows[j]] + [("P", x) for x in rows[j]] + [("U", lab) for lab in lane_rows[j]]
        for j in range(k)
    ]
    perm, gridding, _ = assemble(col_orders, row_orders)
    try:
        return GriddedPermutation(perm, g.matrix, gridding)
    except ValueError:
        raise ValueError("confined permutation leaves the staircase class; entries must be sum-closed") from None


def confined_lane_positions(g: GriddedPermutation) -> tuple:
    """Positions in ``confine(g)`` of the original points, in original order."""
    k = staircase_steps(g.matrix)
    if k is None:
        raise ValueError("confining needs a staircase-gridded permutation")
    lane_cols, _ = _lane_orders(k)
    cols, _ = _line_orders(g)
    out = []
    x = 0
    for i in range(k + 1):
        x += len(lane_cols[i])
        for _ in cols[i]:
            x += 1
            out.append(x)
        x += len(lane_cols[i])
    return tuple(out)


# --- signed permutations and transforms ------------------------------------------------

@dataclass(frozen=True)
class SignedPermutation:
    perm: Permutation
    signs: tuple

    def __post_init__(self):
        object.__setattr__(self, "perm", Permutation(self.perm))
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))
        if len(self.signs) != len(self.perm):
            raise ValueError("one sign per entry is required")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @classmethod
    def from_signed(cls, values: Sequence[int]) -> "SignedPermutation":
        """From signed integers, e.g. ``[2, -1, 3]``."""
        values = [int(v) for v in values]
        if any(v == 0 for v in values):
            raise ValueError("signed entries must be nonzero")
        return cls(Permutation(abs(v) for v in values), tuple(1 if v > 0 else -1 for v in values))

    @classmethod
    def identity(cls, n: int) -> "SignedPermutation":
        return cls(Permutation.identity(n), (1,) * n)

    def __len__(self) -> int:
        return len(self.perm)

    def __call__(self, i: int) -> int:
        return self.signs[i - 1] * self.perm[i - 1]

    def to_list(self) -> list[int]:
        return [self(i) for i in range(1, len(self) + 1)]

    def inverse(self) -> "SignedPermutation":
        vals = [0] * len(self)
        for i in range(1, len(self) + 1):
            v = self(i)
            vals[abs(v) - 1] = i if v > 0 else -i
        return SignedPermutation.from_signed(vals)

    def __str__(self) -> str:
        return " ".join(map(str, self.to_list()))


def _flip(e: ClassEntry, col_negative: bool, row_negative: bool) -> ClassEntry:
    if col_negative:
        e = e.reverse()
    if row_negative:
        e = e.complement()
    return e


def fg_transform(x, f: SignedPermutation, g: SignedPermutation):
    """The (f, g)-transform of a matrix or of a gridded permutation.

    Column ``i`` of the result is column ``|f(i)|`` of ``x``, reversed when
    ``f(i) < 0``; row ``j`` is row ``|g(j)|``, complemented when ``g(j) < 0``.
    """
    if isinstance(x, GriddedPermutation):
        return _fg_gridded(x, f, g)
    if not isinstance(x, GriddingMatrix):
        raise TypeError("fg_transform takes a GriddingMatrix or a GriddedPermutation")
    if (len(f), len(g)) != x.shape:
        raise ValueError(f"signed permutations of lengths {(len(f), len(g))} do not fit a {x.shape} matrix")
    cols = []
    for i in range(1, len(f) + 1):
        a = abs(f(i))
        cols.append([_flip(x[a, abs(g(j))], f(i) < 0, g(j) < 0) for j in range(1, len(g) + 1)])
    return GriddingMatrix(cols)


def _fg_gridded(x: GriddedPermutation, f, g) -> GriddedPermutation:
    matrix = fg_transform(x.matrix, f, g)
    cols, rows = _line_orders(x)
    col_orders = []
    for i in range(1, len(f) + 1):
        seq = cols[abs(f(i)) - 1]
        col_orders.append(seq[::-1] if f(i) < 0 else list(seq))
    row_orders = []
    for j in range(1, len(g) + 1):
        seq = rows[abs(g(j)) - 1]
        row_orders.append(seq[::-1] if g(j) < 0 else list(seq))
    perm, gridding, _ = assemble(col_orders, row_orders)
    return GriddedPermutation(perm, matrix, gridding, check=False)


def path_visits(m_path: GriddingMatrix) -> tuple[list, list, list]:
    """``(cells, s, t)`` for a proper turning path whose first step is along
    a row: the cells in path order and the columns and rows in visit order."""
    graph = build_cell_graph(m_path)
    order = path_order(graph)
    if order is None or not is_proper_turning(order):
        raise ValueError("cell graph is not a proper turning path")
    if len(order) >= 2 and shared_line(order[0], order[1]) != "row":
        order = order[::-1]
    if len(order) < 2 or len(order) % 2 or shared_line(order[0], order[1]) != "row":
        raise ValueError("path must have an even number of cells and start with a row step")
    s = [order[0][0]] + [order[2 * b - 1][0] for b in range(1, len(order) // 2 + 1)]
    t = [order[2 * b - 2][1] for b in range(1, len(order) // 2 + 1)]
    return order, s, t


def derive_fg(m_path: GriddingMatrix, o) -> tuple[SignedPermutation, SignedPermutation]:
    """Signed permutations carrying the staircase onto ``m_path``.

    With ``s_a`` and ``t_b`` the columns and rows in path order, column
    ``s_a`` takes staircase column ``a`` and row ``t_b`` takes staircase row
    ``b``; signs come from the orientation of those same lines.
    """
    order, s, t = path_visits(m_path)
    K = len(order) // 2
    if m_path.shape != (K + 1, K) or sorted(s) != list(range(1, K + 2)) or sorted(t) != list(range(1, K + 1)):
        raise ValueError(f"a {len(order)}-cell path needs a {(K + 1, K)} matrix spanned by the path")
    f = [0] * (K + 1)
    for a, col in enumerate(s, start=1):
        f[col - 1] = o.c(col) * a
    g = [0] * K
    for b, row in enumerate(t, start=1):
        g[row - 1] = o.r(row) * b
    return SignedPermutation.from_signed(f), SignedPermutation.from_signed(g)


def trim_path_matrix(mp: GriddingMatrix, steps: int) -> GriddingMatrix:
    """Keep ``2 * steps`` consecutive path cells starting with a row step and
    drop the rows and columns they do not use: a ``(steps+1) x steps`` matrix."""
    graph = build_cell_graph(mp)
    order = path_order(graph)
    if order is None or not is_proper_turning(order):
        raise ValueError("cell graph is not a proper turning path")
    need = 2 * steps
    for orient in (order, order[::-1]):
        for start in range(len(orient) - need + 1):
            window = orient[start:start + need]
            if shared_line(window[0], window[1]) == "row":
                cols = sorted({c[0] for c in window})
                rows = sorted({c[1] for c in window})
                keep = set(window)
                blank = mp.replace({c: EMPTY for c in mp.cells() if c not in keep})
                return blank.submatrix(cols, rows)
    raise ValueError(f"path has no {need}-cell window starting with a row step")


# --- anchors -----------------------------------------------------------------------

def anchor_gridded(gp: GriddedPermutation, cell, length: int, kind: str) -> GriddedPermutation:
    """Insert two monotone anchors of ``length`` points at corners of ``cell``.

    ``kind='inc'``: increasing anchors at the lower-left and upper-right
    corners. ``kind='dec'``: decreasing anchors at the upper-left and
    lower-right corners.
    """
    i, j = cell
    if not gp.cell_points(i, j):
        raise ValueError(f"cell {cell} holds no points")
    cols, rows = _line_orders(gp)
    first = [("A", t) for t in range(1, length + 1)]
    last = [("B", t) for t in range(1, length + 1)]
    cols[i - 1] = first + cols[i - 1] + last
    if kind == "inc":
        rows[j - 1] = first + rows[j - 1] + last
    elif kind == "dec":
        rows[j - 1] = last[::-1] + rows[j - 1] + first[::-1]
    else:
        raise ValueError(f"unknown anchor kind {kind!r}")
    perm, gridding, _ = assemble(cols, rows)
    return GriddedPermutation(perm, gp.matrix, gridding, check=False)


def anchor_length(t: GriddedPermutation) -> int:
    """One more than the longest monotone subsequence of the text."""
    return longest_monotone_length(t.perm) + 1


def add_anchors_gridded(p: GriddedPermutation, t: GriddedPermutation, cell):
    kind = p.matrix[cell].monotone_kind
    if kind is None:
        raise ValueError(f"anchor cell {cell} must be Inc or Dec in the pattern matrix")
    if p.matrix.shape != t.matrix.shape:
        raise ValueError("pattern and text matrices differ in shape")
    if not p.cell_points(*cell) or not t.cell_points(*cell):
        raise ValueError(f"cell {cell} must be nonempty in both inputs")
    length = anchor_length(t)
    return anchor_gridded(p, cell, length, kind), anchor_gridded(t, cell, length, kind)


def add_anchors(p: GriddedPermutation, t: GriddedPermutation, cell) -> tuple[Permutation, Permutation]:
    """``(pi*, tau*)``: both inputs with anchors of length ``p + 1`` at
    ``cell``, where ``p`` is the longest monotone subsequence of ``t``."""
    a, b = add_anchors_gridded(p, t, cell)
    return a.perm, b.perm


# --- hardness pipeline ---------------------------------------------------------------

def matrix_rows(m: GriddingMatrix) -> list[str]:
    return str(m).split("\n")


@dataclass
class HardnessInstance:
    pattern_star: Permutation
    text_star: Permutation
    provenance: dict
    pattern_gridded: Optional[GriddedPermutation] = field(default=None, repr=False, compare=False)
    text_gridded: Optional[GriddedPermutation] = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        return {
            "pattern": list(self.pattern_star),
            "text": list(self.text_star),
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, data: dict) -> "HardnessInstance":
        return cls(Permutation(data["pattern"]), Permutation(data["text"]), dict(data["provenance"]))


def cell_lis(g: GriddedPermutation, cell) -> int:
    pts = sorted(g.cell_points(*cell))
    return lis_length([y for _, y in pts])


def build_hardness_instance(
    m: GriddingMatrix,
    base_pattern: GriddedPermutation,
    base_text: GriddedPermutation,
    variables: Optional[int] = None,
) -> HardnessInstance:
    """Turn a staircase base pair into an ungridded pair for ``Grid(m)``.

    Steps: confine both; cut a proper turning path of ``2K`` cells out of the
    path matrix of ``m`` (``K`` = staircase steps); transform both by the
    derived ``(f, g)``; add anchors at the first path cell. The text contains
    the pattern iff the base text has a grid-preserving copy of the base
    pattern.
    """
    K = staircase_steps(base_pattern.matrix)
    if K is None or staircase_steps(base_text.matrix) != K:
        raise ValueError("base pattern and text must be gridded by staircases with the same number of steps")
    if base_pattern.matrix != staircase_matrix(K, INC, INC):
        raise ValueError("base pattern must be gridded by St^K(Inc, Inc)")
    if not m.is_monotone():
        raise ValueError("source matrix must be monotone")
    if find_cycle(build_cell_graph(m)) is None:
        raise ValueError("source matrix has an acyclic cell graph")
    if variables is not None:
        for name, g in (("pattern", base_pattern), ("text", base_text)):
            if cell_lis(g, (1, 1)) != 2 * variables:
                raise ValueError(f"base {name} (1,1)-cell has LIS {cell_lis(g, (1, 1))}, expected {2 * variables}")
    conf_p = confine(base_pattern)
    conf_t = confine(base_text)
    mp = path_matrix(m, 2 * K + 1)
    m_prime = trim_path_matrix(mp, K)
    o = consistent_orientation(m_prime)
    f, g = derive_fg(m_prime, o)
    p1 = fg_transform(conf_p, f, g)
    t1 = fg_transform(conf_t, f, g)
    if p1.matrix != m_prime:
        raise RuntimeError("transformed staircase does not match the path matrix")
    order, s, t = path_visits(m_prime)
    cell = order[0]
    p_star, t_star = add_anchors_gridded(p1, t1, cell)
    provenance = {
        "source_matrix": matrix_rows(m),
        "steps": K,
        "path_matrix_shape": list(mp.shape),
        "path_matrix": matrix_rows(m_prime),
        "text_matrix": matrix_rows(t1.matrix),
        "path": [list(c) for c in order],
        "orientation": {"cols": list(o.cols), "rows": list(o.rows)},
        "f": f.to_list(),
        "g": g.to_list(),
        "anchor_cell": list(cell),
        "anchor_length": anchor_length(t1),
        "transforms": ["confine", "path_matrix", "fg_transform", "add_anchors"],
        "sizes": {
            "base_pattern": len(base_pattern.perm),
            "base_text": len(base_text.perm),
            "pattern_star": len(p_star.perm),
            "text_star": len(t_star.perm),
        },
    }
    return HardnessInstance(p_star.perm, t_star.perm, provenance, p_star, t_star)


def text_staircase(K: int) -> GriddingMatrix:
    return staircase_matrix(K, av(321), INC)


def steps_for_clauses(clauses: int) -> int:
    return 2 * clauses + 1


# --- path witness ------------------------------------------------------------------

def path_witness(m: GriddingMatrix) -> GriddedPermutation:
    """A permutation of length ``k^3`` in ``Grid(m)`` for a path of ``k`` cells,
    with ``k^2`` points per cell and alternations between path neighbours.

    Inside a column the points of the column's cells are dealt round-robin
    from left to right, top cell first; inside a row they are dealt
    round-robin from bottom to top, rightmost cell first. Any two cells of
    one line then form a strict alternation.
    """
    graph = build_cell_graph(m)
    order = path_order(graph)
    if order is None:
        raise ValueError("cell graph is not a path")
    if set(m.nonempty_cells()) != set(order):
        raise ValueError("every nonempty cell must lie on the path")
    for c in order:
        if m[c].monotone_kind is None:
            raise ValueError(f"cell {c} is not monotone")
    k = len(order)
    size = k * k
    on_path = set(order)
    col_orders = []
    for i in range(1, m.width + 1):
        cells = sorted((c for c in on_path if c[0] == i), key=lambda c: -c[1])
        col_orders.append([(c, t) for t in range(1, size + 1) for c in cells])
    row_orders = []
    for j in range(1, m.height + 1):
        cells = sorted((c for c in on_path if c[1] == j), key=lambda c: -c[0])
        seq = []
        for r in range(1, size + 1):
            for c in cells:
                # the r-th lowest point of a cell is its r-th (Inc) or (size+1-r)-th (Dec) from the left
                seq.append((c, r if m[c].monotone_kind == "inc" else size + 1 - r))
        row_orders.append(seq)
    perm, gridding, _ = assemble(col_orders, row_orders)
    return GriddedPermutation(perm, m, gridding)
