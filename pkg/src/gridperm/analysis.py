"""Cell graphs, structural predicates and the complexity dichotomy."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .grid import DEC, EMPTY, INC, Cell, ClassEntry, GriddingMatrix, find_gridding
from .perm import Permutation


@dataclass(frozen=True)
class CellGraph:
    vertices: tuple
    edges: frozenset  # of sorted (u, v) pairs
    adjacency: dict = field(compare=False, repr=False)

    def neighbours(self, v: Cell) -> tuple:
        return self.adjacency.get(v, ())

    def __len__(self) -> int:
        return len(self.vertices)


def shared_line(u: Cell, v: Cell) -> Optional[str]:
    if u[0] == v[0]:
        return "column"
    if u[1] == v[1]:
        return "row"
    return None


def build_cell_graph(m: GriddingMatrix) -> CellGraph:
    """Vertices are the infinite cells; two are adjacent when they share a
    line and every cell strictly between them is finite or empty."""
    verts = m.infinite_cells()
    vset = set(verts)
    edges = set()
    for i in range(1, m.width + 1):
        col = [(i, j) for j in range(1, m.height + 1) if (i, j) in vset]
        edges.update(zip(col, col[1:]))
    for j in range(1, m.height + 1):
        row = [(i, j) for i in range(1, m.width + 1) if (i, j) in vset]
        edges.update(zip(row, row[1:]))
    adj: dict = {v: [] for v in verts}
    for u, v in sorted(edges):
        adj[u].append(v)
        adj[v].append(u)
    return CellGraph(tuple(verts), frozenset(edges), {v: tuple(sorted(n)) for v, n in adj.items()})


def components(g: CellGraph) -> list[list[Cell]]:
    seen = set()
    out = []
    for v in g.vertices:
        if v in seen:
            continue
        comp = []
        queue = deque([v])
        seen.add(v)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w in g.neighbours(u):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        out.append(sorted(comp))
    return out


def find_cycle(g: CellGraph) -> Optional[list[Cell]]:
    """Some cycle of ``g`` as a vertex list, or None if ``g`` is a forest."""
    parent: dict = {}
    for root in g.vertices:
        if root in parent:
            continue
        parent[root] = None
        stack = [(root, iter(g.neighbours(root)))]
        depth = {root: 0}
        while stack:
            u, it = stack[-1]
            w = next(it, None)
            if w is None:
                stack.pop()
                continue
            if w == parent[u]:
                continue
            if w in parent:
                if depth[w] < depth[u]:
                    cycle = [u]
                    while cycle[-1] != w:
                        cycle.append(parent[cycle[-1]])
                    return cycle[::-1]
                continue
            parent[w] = u
            depth[w] = depth[u] + 1
            stack.append((w, iter(g.neighbours(w))))
    return None


def tree_path(g: CellGraph, a: Cell, b: Cell) -> Optional[list[Cell]]:
    """The BFS path from ``a`` to ``b`` (the unique one when ``g`` is a forest)."""
    prev = {a: None}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if u == b:
            break
        for w in g.neighbours(u):
            if w not in prev:
                prev[w] = u
                queue.append(w)
    if b not in prev:
        return None
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def is_proper_turning(path: Sequence[Cell]) -> bool:
    """No three consecutive cells of ``path`` share a row or a column."""
    for a, b, c in zip(path, path[1:], path[2:]):
        if a[0] == b[0] == c[0] or a[1] == b[1] == c[1]:
            return False
    return True


def path_order(g: CellGraph) -> Optional[list[Cell]]:
    """The vertices of ``g`` in path order if ``g`` is a (nonempty) path.

    Starts from the lexicographically smaller endpoint.
    """
    if not g.vertices:
        return None
    if len(g.vertices) == 1:
        return [g.vertices[0]]
    if len(g.edges) != len(g.vertices) - 1:
        return None
    ends = [v for v in g.vertices if len(g.neighbours(v)) == 1]
    if len(ends) != 2 or any(len(g.neighbours(v)) > 2 for v in g.vertices):
        return None
    order = [min(ends)]
    prev = None
    while len(order) < len(g.vertices):
        nxt = [w for w in g.neighbours(order[-1]) if w != prev]
        if not nxt:
            return None
        prev = order[-1]
        order.append(nxt[0])
    return order


@dataclass(frozen=True)
class StructureReport:
    is_forest: bool
    cycle: Optional[tuple]
    components: tuple

    def to_json(self) -> dict:
        return {
            "is_forest": self.is_forest,
            "cycle": [list(c) for c in self.cycle] if self.cycle else None,
            "components": [[list(c) for c in comp] for comp in self.components],
        }


def analyze_structure(g: CellGraph) -> StructureReport:
    cycle = find_cycle(g)
    return StructureReport(
        is_forest=cycle is None,
        cycle=tuple(cycle) if cycle else None,
        components=tuple(tuple(c) for c in components(g)),
    )


# --- bumpers ---------------------------------------------------------------

_MONO = (("inc", INC), ("dec", DEC))
_JUXTA_ORDER = [(INC, INC), (INC, DEC), (DEC, INC), (DEC, DEC)]


def juxtaposition_matrix(first: ClassEntry, second: ClassEntry, axis: str) -> GriddingMatrix:
    """``Grid(first second)`` side by side (horizontal) or ``first`` below
    ``second`` (vertical)."""
    if axis == "horizontal":
        return GriddingMatrix([[first], [second]])
    if axis == "vertical":
        return GriddingMatrix([[first, second]])
    raise ValueError(f"unknown axis {axis!r}")


def contained_juxtaposition(e: ClassEntry, axis: str) -> Optional[tuple]:
    """A monotone juxtaposition ``(C, D)`` contained in the class, if any.

    Only Av(sigma) entries can contain one: Av(sigma) contains Grid(C D)
    exactly when sigma itself is not (C D)-griddable.
    """
    if e.kind != "av" or e.monotone_kind is not None or len(e.basis) < 2:
        return None
    for first, second in _JUXTA_ORDER:
        if find_gridding(e.basis, juxtaposition_matrix(first, second, axis)) is None:
            return first, second
    return None


def hpw_unbounded(e: ClassEntry, axis: str = "horizontal") -> bool:
    """Whether the class has unbounded horizontal (or vertical) path-width."""
    if axis not in ("horizontal", "vertical"):
        raise ValueError(f"unknown axis {axis!r}")
    return contained_juxtaposition(e, axis) is not None


def is_bumper(m: GriddingMatrix, p: Cell, q: Cell) -> bool:
    if p == q:
        return False
    line = shared_line(p, q)
    if line == "column":
        return hpw_unbounded(m[q], "horizontal")
    if line == "row":
        return hpw_unbounded(m[q], "vertical")
    return False


def find_bumper_ended_path(m: GriddingMatrix) -> Optional[list[Cell]]:
    """Some path ``p_1..p_k`` with bumpers ``(p_2, p_1)`` and ``(p_{k-1}, p_k)``.

    Requires a forest cell graph; ends are scanned in lexicographic order.
    """
    g = build_cell_graph(m)
    if find_cycle(g) is not None:
        raise ValueError("cell graph contains a cycle")
    # a bumper end must hold a class with unbounded horizontal or vertical path-width
    candidates = [v for v in g.vertices if hpw_unbounded(m[v], "horizontal") or hpw_unbounded(m[v], "vertical")]
    for a in candidates:
        for b in candidates:
            if a == b:
                continue
            path = tree_path(g, a, b)
            if path is None:
                continue
            if is_bumper(m, path[1], path[0]) and is_bumper(m, path[-2], path[-1]):
                return path
    return None


# --- orientation and refinement --------------------------------------------

@dataclass(frozen=True)
class Orientation:
    cols: tuple  # c(1..k), each +1 or -1
    rows: tuple  # r(1..l)

    def c(self, i: int) -> int:
        return self.cols[i - 1]

    def r(self, j: int) -> int:
        return self.rows[j - 1]


def _slope(e: ClassEntry) -> int:
    kind = e.monotone_kind
    if kind == "inc":
        return 1
    if kind == "dec":
        return -1
    if e.is_empty:
        return 0
    raise ValueError(f"non-monotone entry {e.token()}")


def is_consistent_orientation(m: GriddingMatrix, o: Orientation) -> bool:
    if len(o.cols) != m.width or len(o.rows) != m.height:
        return False
    for cell in m.cells():
        s = _slope(m[cell])
        if s and o.c(cell[0]) * o.r(cell[1]) != s:
            return False
    return True


class ParityUnionFind:
    """Union-find tracking the parity of each element relative to its root."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.parity = [0] * n

    def find(self, x: int) -> tuple[int, int]:
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root, acc = x, 0
        for y in reversed(path):
            acc ^= self.parity[y]
            self.parity[y] = acc
            self.parent[y] = root
        return root, (self.parity[path[0]] if path else 0)

    def union(self, a: int, b: int, odd: int) -> bool:
        """Require ``parity(a) xor parity(b) == odd``; False on contradiction."""
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            return (pa ^ pb) == odd
        self.parent[rb] = ra
        self.parity[rb] = pa ^ pb ^ odd
        return True


def consistent_orientation(m: GriddingMatrix) -> Optional[Orientation]:
    """Signs ``c``, ``r`` with ``c(i) r(j)`` equal to each cell's slope, or None.

    The smallest variable of every constraint component (columns before rows)
    gets ``+1``.
    """
    k, l = m.shape
    uf = ParityUnionFind(k + l)
    for i, j in m.cells():
        s = _slope(m[i, j])
        if s and not uf.union(i - 1, k + j - 1, 0 if s > 0 else 1):
            return None
    anchor: dict = {}
    signs = []
    for v in range(k + l):
        root, par = uf.find(v)
        if root not in anchor:
            anchor[root] = par
        signs.append(1 if par == anchor[root] else -1)
    return Orientation(tuple(signs[:k]), tuple(signs[k:]))


def refine(m: GriddingMatrix, q: int) -> GriddingMatrix:
    """The ``q``-fold refinement: Inc becomes a q x q diagonal of Inc, Dec an
    anti-diagonal of Dec, empty cells an empty block."""
    if q < 1:
        raise ValueError("refinement factor must be at least 1")
    cells = {}
    for i, j in m.cells():
        s = _slope(m[i, j])
        for a in range(1, q + 1):
            if s > 0:
                cells[(i - 1) * q + a, (j - 1) * q + a] = INC
            elif s < 0:
                cells[(i - 1) * q + a, (j - 1) * q + q + 1 - a] = DEC
    return GriddingMatrix.filled(m.width * q, m.height * q, cells)


# --- derived matrices --------------------------------------------------------

def _line_graph_cycle(cells: Sequence[Cell]) -> Optional[list[Cell]]:
    """Shortest cycle of the column/row incidence graph, as its turn cells.

    Nodes are columns and rows; each cell is an edge. A shortest cycle is
    chordless, so its cells form a proper turning cycle in the cell graph once
    every other cell is blanked.
    """
    adj: dict = {}
    for i, j in cells:
        adj.setdefault(("c", i), []).append(("r", j))
        adj.setdefault(("r", j), []).append(("c", i))
    best = None
    for root in sorted(adj):
        dist = {root: 0}
        par = {root: None}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in sorted(adj[u]):
                if w == par[u]:
                    continue
                if w in dist:
                    cyc = _close_cycle(par, u, w)
                    if cyc is not None and (best is None or len(cyc) < len(best)):
                        best = cyc
                    continue
                dist[w] = dist[u] + 1
                par[w] = u
                queue.append(w)
    if best is None:
        return None
    out = []
    for a, b in zip(best, best[1:] + best[:1]):
        col, row = (a, b) if a[0] == "c" else (b, a)
        out.append((col[1], row[1]))
    return out


def _close_cycle(par, u, w):
    up = [u]
    while par[up[-1]] is not None:
        up.append(par[up[-1]])
    wp = [w]
    while par[wp[-1]] is not None:
        wp.append(par[wp[-1]])
    common = set(up) & set(wp)
    lca_u = next(i for i, x in enumerate(up) if x in common)
    lca = up[lca_u]
    lca_w = wp.index(lca)
    cyc = up[: lca_u + 1] + wp[:lca_w][::-1]
    return cyc if len(cyc) >= 4 and len(set(cyc)) == len(cyc) else None


def proper_turning_cycle(m: GriddingMatrix) -> Optional[list[Cell]]:
    """Cells of a proper turning cycle of the cell graph, or None."""
    return _line_graph_cycle(m.infinite_cells())


def _keep_only(m: GriddingMatrix, keep) -> GriddingMatrix:
    keep = set(keep)
    return GriddingMatrix.filled(m.width, m.height, {c: m[c] for c in keep})


def oriented_cycle_matrix(m: GriddingMatrix) -> tuple[GriddingMatrix, Orientation]:
    """A matrix whose only cells form an oriented proper turning cycle and whose
    grid class lies inside ``Grid(m)``: ``m`` itself restricted to a shortest
    cycle, or a cycle inside its 2-fold refinement when that is unorientable."""
    cycle = proper_turning_cycle(m)
    if cycle is None:
        raise ValueError("cell graph has no cycle")
    base = _keep_only(m, cycle)
    o = consistent_orientation(base)
    if o is None:
        doubled = refine(base, 2)
        base = _keep_only(doubled, proper_turning_cycle(doubled))
        o = consistent_orientation(base)
    return base, o


def path_matrix(m: GriddingMatrix, p: int) -> GriddingMatrix:
    """A matrix whose cell graph is a proper turning path of at least ``p``
    cells and whose grid class is a subclass of ``Grid(m)``.

    The cycle matrix is refined ``p`` times; each of the ``p`` resulting copies
    of the cycle is labelled by the orientation, and the block of the first
    nonempty cell is replaced by its diagonal shifted by one label, which
    chains the copies into one path.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    if not all(m[c].monotone_kind or m[c].is_empty for c in m.cells()):
        raise ValueError("path_matrix needs a monotone matrix")
    base, o = oriented_cycle_matrix(m)
    k, l = base.shape
    col_label = {}
    for i in range(1, k + 1):
        for a in range(1, p + 1):
            col_label[(i - 1) * p + a] = a if o.c(i) > 0 else p + 1 - a
    row_pos = {}
    for j in range(1, l + 1):
        for b in range(1, p + 1):
            lab = b if o.r(j) > 0 else p + 1 - b
            row_pos[j, lab] = (j - 1) * p + b
    refined = refine(base, p)
    si, sj = min(base.nonempty_cells())
    entry = base[si, sj]
    updates = {}
    for a in range(1, p + 1):
        for b in range(1, p + 1):
            updates[(si - 1) * p + a, (sj - 1) * p + b] = EMPTY
    for a in range(1, p + 1):
        x = (si - 1) * p + a
        s = col_label[x]
        if s < p:
            updates[x, row_pos[sj, s + 1]] = INC if entry.monotone_kind == "inc" else DEC
    return refined.replace(updates)


def monotone_subclass(e: ClassEntry, probe: int = 8) -> ClassEntry:
    """Inc if the class contains the increasing permutation of length
    ``probe``, else Dec."""
    return INC if e.contains(Permutation.identity(probe)) else DEC


def bumper_cycle_matrix(m: GriddingMatrix, path: Sequence[Cell]) -> GriddingMatrix:
    """A monotone ``2k x 2l`` matrix with a cyclic cell graph and
    ``Grid(result) ⊆ Grid(m)``, built from a bumper-ended path.

    Interior path cells become the 2-fold refinement of a monotone subclass;
    each end cell becomes the juxtaposition it contains, laid along the line
    it shares with its neighbour; everything else is empty.
    """
    path = [tuple(c) for c in path]
    g = build_cell_graph(m)
    if len(path) < 2 or len(set(path)) != len(path):
        raise ValueError("a bumper-ended path needs at least two distinct cells")
    for u, v in zip(path, path[1:]):
        if v not in g.neighbours(u):
            raise ValueError(f"{u} and {v} are not adjacent in the cell graph")
    if not (is_bumper(m, path[1], path[0]) and is_bumper(m, path[-2], path[-1])):
        raise ValueError("path is not bumper-ended")
    cells = {}
    for pos, (i, j) in enumerate(path):
        if 0 < pos < len(path) - 1:
            sub = monotone_subclass(m[i, j])
            if sub.kind == "inc":
                cells[2 * i - 1, 2 * j - 1] = INC
                cells[2 * i, 2 * j] = INC
            else:
                cells[2 * i - 1, 2 * j] = DEC
                cells[2 * i, 2 * j - 1] = DEC
            continue
        nbr = path[1] if pos == 0 else path[-2]
        axis = "horizontal" if shared_line((i, j), nbr) == "column" else "vertical"
        first, second = contained_juxtaposition(m[i, j], axis)
        cells[2 * i - 1, 2 * j - 1] = first
        if axis == "horizontal":
            cells[2 * i, 2 * j - 1] = second
        else:
            cells[2 * i - 1, 2 * j] = second
    return GriddingMatrix.filled(2 * m.width, 2 * m.height, cells)


# --- classification ----------------------------------------------------------

POLYNOMIAL = "PolynomialTime"
NP_COMPLETE = "NPComplete"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DichotomyVerdict:
    verdict: str
    witness: Optional[tuple]
    reason: str

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": [list(c) for c in self.witness] if self.witness else None,
            "reason": self.reason,
        }


def strip_finite(m: GriddingMatrix) -> GriddingMatrix:
    return m.replace({c: EMPTY for c in m.cells() if not m[c].is_infinite and not m[c].is_empty})


def classify(m: GriddingMatrix) -> DichotomyVerdict:
    """Complexity of pattern matching with patterns from ``Grid(m)``.

    A cycle or a bumper-ended path in the cell graph (finite entries removed)
    gives NP-completeness outright; otherwise the class is polynomial provided
    every entry is known to have bounded grid-width, and Inconclusive if not.
    """
    m = strip_finite(m)
    g = build_cell_graph(m)
    cycle = find_cycle(g)
    if cycle is not None:
        return DichotomyVerdict(NP_COMPLETE, tuple(cycle), "cell graph contains a cycle")
    path = find_bumper_ended_path(m)
    if path is not None:
        return DichotomyVerdict(NP_COMPLETE, tuple(path), "cell graph contains a bumper-ended path")
    unknown = [c for c in g.vertices if m[c].bounded_gw is not True]
    if unknown:
        cells = ", ".join(f"{c} {m[c].token()}" for c in unknown)
        return DichotomyVerdict(
            INCONCLUSIVE,
            None,
            f"cell graph is a forest without bumper-ended paths, but grid-width is not known to be bounded for {cells}",
        )
    return DichotomyVerdict(POLYNOMIAL, None, "cell graph is a forest without bumper-ended paths")
