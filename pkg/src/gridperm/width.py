"""Intervalicity, grid-complexity, path-width and grid-width.

Orderings are permutations ``sigma`` of the positions of ``p``: the point
``(sigma_i, p[sigma_i])`` is the i-th point to be taken.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .analysis import (
    build_cell_graph,
    components,
    find_bumper_ended_path,
    find_cycle,
    is_bumper,
    is_consistent_orientation,
    shared_line,
    tree_path,
)
from .exceptions import ResourceLimitError
from .grid import EMPTY, GriddedPermutation
from .perm import Permutation, Point, check_point_set, standardize

DEFAULT_MAX_N = 8


def intervalicity(a: Iterable[int]) -> int:
    """Number of maximal runs of consecutive integers in ``a``."""
    s = set(a)
    return sum(1 for v in s if v - 1 not in s)


def grid_complexity(points: Iterable[Point]) -> int:
    pts = check_point_set(points)
    return max(intervalicity(x for x, _ in pts), intervalicity(y for _, y in pts))


def _check_ordering(p: Sequence[int], sigma: Sequence[int]):
    if len(p) != len(sigma):
        raise ValueError(f"ordering has length {len(sigma)}, permutation has length {len(p)}")
    Permutation(sigma)


def prefix_complexities(p: Sequence[int], sigma: Sequence[int]) -> list[int]:
    """Grid-complexity of each prefix ``{(sigma_1, .), ..., (sigma_i, .)}``."""
    _check_ordering(p, sigma)
    xs: set = set()
    ys: set = set()
    rx = ry = 0
    out = []
    for x in sigma:
        y = p[x - 1]
        # a new element opens a run, extends one, or glues two together
        rx += 1 - (x - 1 in xs) - (x + 1 in xs)
        ry += 1 - (y - 1 in ys) - (y + 1 in ys)
        xs.add(x)
        ys.add(y)
        out.append(max(rx, ry))
    return out


def pw_under_ordering(p: Sequence[int], sigma: Sequence[int]) -> int:
    return max(prefix_complexities(p, sigma), default=0)


def horizontal_pw(p: Sequence[int]) -> int:
    return pw_under_ordering(p, range(1, len(p) + 1))


def vertical_pw(p: Sequence[int]) -> int:
    return pw_under_ordering(p, Permutation(p).inverse())


@dataclass(frozen=True)
class PwOrdering:
    ordering: Permutation
    achieved_width: int

    def to_json(self) -> dict:
        return {"ordering": list(self.ordering), "achieved_width": self.achieved_width}


def make_ordering(p: Sequence[int], sigma: Sequence[int]) -> PwOrdering:
    return PwOrdering(Permutation(sigma), pw_under_ordering(p, sigma))


# --- grid trees ----------------------------------------------------------------

class GridTree:
    """Binary tree whose leaves carry points; internal nodes have two children."""

    __slots__ = ("point", "left", "right")

    def __init__(self, point: Optional[Point] = None, left: "GridTree" = None, right: "GridTree" = None):
        if point is None and (left is None or right is None):
            raise ValueError("an internal node needs two children")
        if point is not None and (left is not None or right is not None):
            raise ValueError("a leaf has no children")
        self.point = None if point is None else (int(point[0]), int(point[1]))
        self.left = left
        self.right = right

    @classmethod
    def leaf(cls, point: Point) -> "GridTree":
        return cls(point=point)

    @classmethod
    def node(cls, left: "GridTree", right: "GridTree") -> "GridTree":
        return cls(left=left, right=right)

    @property
    def is_leaf(self) -> bool:
        return self.point is not None

    def leaves(self) -> list[Point]:
        out = []
        stack = [self]
        while stack:
            t = stack.pop()
            if t.is_leaf:
                out.append(t.point)
            else:
                stack.append(t.right)
                stack.append(t.left)
        return out

    def postorder(self) -> list["GridTree"]:
        out = []
        stack = [self]
        while stack:
            t = stack.pop()
            out.append(t)
            if not t.is_leaf:
                stack.append(t.left)
                stack.append(t.right)
        return out[::-1]

    def is_caterpillar(self) -> bool:
        return all(t.is_leaf or t.left.is_leaf or t.right.is_leaf for t in self.postorder())

    def replace_leaves(self, mapping: dict) -> "GridTree":
        """Copy with each leaf whose point is a key replaced by ``mapping[point]``."""
        built: dict = {}
        for t in self.postorder():
            if t.is_leaf:
                built[id(t)] = mapping.get(t.point, t)
            else:
                built[id(t)] = GridTree.node(built[id(t.left)], built[id(t.right)])
        return built[id(self)]

    def to_json(self):
        built: dict = {}
        for t in self.postorder():
            if t.is_leaf:
                built[id(t)] = list(t.point)
            else:
                built[id(t)] = {"l": built[id(t.left)], "r": built[id(t.right)]}
        return built[id(self)]

    @classmethod
    def from_json(cls, data) -> "GridTree":
        if isinstance(data, dict):
            return cls.node(cls.from_json(data["l"]), cls.from_json(data["r"]))
        if isinstance(data, (list, tuple)) and len(data) == 2:
            return cls.leaf((data[0], data[1]))
        raise ValueError(f"not a grid tree: {data!r}")

    def __eq__(self, other) -> bool:
        return isinstance(other, GridTree) and self.to_json() == other.to_json()

    def __repr__(self) -> str:
        return f"GridTree({self.to_json()!r})"


def is_grid_tree_of(t: GridTree, p: Sequence[int]) -> bool:
    leaves = t.leaves()
    return len(leaves) == len(set(leaves)) and set(leaves) == set(Permutation(p).points())


def tree_width_of(t: GridTree) -> int:
    """Maximum grid-complexity over the leaf sets of all nodes of ``t``."""
    sets: dict = {}
    best = 0
    for node in t.postorder():
        if node.is_leaf:
            s = (frozenset([node.point[0]]), frozenset([node.point[1]]))
        else:
            a, b = sets.pop(id(node.left)), sets.pop(id(node.right))
            s = (a[0] | b[0], a[1] | b[1])
        sets[id(node)] = s
        best = max(best, intervalicity(s[0]), intervalicity(s[1]))
    return best


def caterpillar(items: Sequence[GridTree]) -> GridTree:
    """Caterpillar whose top-to-bottom leaves (subtrees) are ``items``."""
    if not items:
        raise ValueError("a caterpillar needs at least one leaf")
    t = items[-1]
    for item in reversed(items[:-1]):
        t = GridTree.node(item, t)
    return t


def caterpillar_from_ordering(p: Sequence[int], sigma: Sequence[int]) -> GridTree:
    """The caterpillar whose spine nodes are exactly the prefixes of ``sigma``."""
    _check_ordering(p, sigma)
    if not sigma:
        raise ValueError("the empty permutation has no grid tree")
    t = GridTree.leaf((sigma[0], p[sigma[0] - 1]))
    for x in sigma[1:]:
        t = GridTree.node(t, GridTree.leaf((x, p[x - 1])))
    return t


# --- exact oracles ---------------------------------------------------------------

def _mask_complexity(p: Sequence[int]):
    n = len(p)
    full = 1 << n
    ymask = [0] * full
    for mask in range(1, full):
        low = mask & -mask
        i = low.bit_length() - 1
        ymask[mask] = ymask[mask ^ low] | (1 << (p[i] - 1))

    def runs(bits: int) -> int:
        return bin(bits & ~(bits << 1)).count("1")

    return [max(runs(m), runs(ymask[m])) for m in range(full)]


def _guard(p: Sequence[int], max_n: int):
    if len(p) > max_n:
        raise ResourceLimitError(f"exact width oracle is capped at n <= {max_n}, got n = {len(p)}")


def _pathwidth_table(p: Sequence[int]):
    n = len(p)
    gc = _mask_complexity(p)
    best = [0] * (1 << n)
    for mask in range(1, 1 << n):
        sub = min(best[mask ^ (1 << i)] for i in range(n) if mask >> i & 1)
        best[mask] = max(gc[mask], sub)
    return best


def optimal_ordering(p: Sequence[int], max_n: int = DEFAULT_MAX_N) -> PwOrdering:
    """An ordering attaining the path-width (caterpillar search over subsets)."""
    _guard(p, max_n)
    n = len(p)
    best = _pathwidth_table(p)
    mask = (1 << n) - 1
    rev = []
    while mask:
        # the last point of an optimal ordering of ``mask``
        i = min((i for i in range(n) if mask >> i & 1), key=lambda i: best[mask ^ (1 << i)])
        rev.append(i + 1)
        mask ^= 1 << i
    sigma = rev[::-1]
    return PwOrdering(Permutation(sigma), best[(1 << n) - 1])


def _gridwidth_table(p: Sequence[int]):
    n = len(p)
    gc = _mask_complexity(p)
    best = [0] * (1 << n)
    split = [0] * (1 << n)
    for mask in range(1, 1 << n):
        if mask & (mask - 1) == 0:
            best[mask] = 1
            continue
        low = mask & -mask
        rest = mask ^ low
        top, arg = None, 0
        # enumerate the part containing the lowest point; the other part is nonempty
        sub = rest
        while True:
            a = sub | low
            b = mask ^ a
            if b:
                val = max(best[a], best[b])
                if top is None or val < top:
                    top, arg = val, a
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[mask] = max(gc[mask], top)
        split[mask] = arg
    return best, split


def optimal_grid_tree(p: Sequence[int], max_n: int = DEFAULT_MAX_N) -> GridTree:
    _guard(p, max_n)
    if not p:
        raise ValueError("the empty permutation has no grid tree")
    best, split = _gridwidth_table(p)

    def build(mask: int) -> GridTree:
        if mask & (mask - 1) == 0:
            i = mask.bit_length() - 1
            return GridTree.leaf((i + 1, p[i]))
        a = split[mask]
        return GridTree.node(build(a), build(mask ^ a))

    return build((1 << len(p)) - 1)


def exact_width_oracle(p: Sequence[int], mode: str = "pathwidth", max_n: int = DEFAULT_MAX_N) -> int:
    """Exact path-width or grid-width by exhaustive search over point subsets."""
    if mode not in ("pathwidth", "gridwidth"):
        raise ValueError(f"unknown mode {mode!r}; expected pathwidth or gridwidth")
    _guard(p, max_n)
    full = (1 << len(p)) - 1
    if mode == "pathwidth":
        return _pathwidth_table(p)[full]
    return _gridwidth_table(p)[0][full]


def brute_force_pathwidth(p: Sequence[int], max_n: int = DEFAULT_MAX_N) -> int:
    """Minimum of ``pw_under_ordering`` over all n! orderings."""
    _guard(p, max_n)
    if not p:
        return 0
    return min(pw_under_ordering(p, s) for s in itertools.permutations(range(1, len(p) + 1)))


def greedy_ordering(p: Sequence[int]) -> Permutation:
    """Repeatedly take the point keeping the prefix complexity smallest."""
    n = len(p)
    xs: set = set()
    ys: set = set()
    rx = ry = 0
    left = set(range(1, n + 1))
    out = []
    while left:
        def cost(x):
            y = p[x - 1]
            dx = 1 - (x - 1 in xs) - (x + 1 in xs)
            dy = 1 - (y - 1 in ys) - (y + 1 in ys)
            return max(rx + dx, ry + dy), x

        x = min(left, key=cost)
        y = p[x - 1]
        rx += 1 - (x - 1 in xs) - (x + 1 in xs)
        ry += 1 - (y - 1 in ys) - (y + 1 in ys)
        xs.add(x)
        ys.add(y)
        left.remove(x)
        out.append(x)
    return Permutation(out)


def heuristic_ordering(p: Sequence[int]) -> PwOrdering:
    """Best of the left-to-right, bottom-to-top and greedy orderings."""
    p = Permutation(p)
    cands = [Permutation.identity(len(p)), p.inverse(), greedy_ordering(p)]
    return min((make_ordering(p, s) for s in cands), key=lambda o: o.achieved_width)


def good_ordering(p: Sequence[int], exact_up_to: int = DEFAULT_MAX_N) -> PwOrdering:
    if len(p) <= exact_up_to:
        return optimal_ordering(p, max_n=exact_up_to)
    return heuristic_ordering(p)


# --- forest ordering -------------------------------------------------------------

def forest_pw_ordering(g: GriddedPermutation, o) -> PwOrdering:
    """An ordering of width at most ``max(k, l)`` for a permutation gridded by
    a monotone matrix whose cell graph is a forest.

    Points are peeled off one at a time. Every column and row offers its
    extremal remaining point (rightmost or leftmost, topmost or bottommost by
    the orientation); each line's path in the cell graph is oriented toward
    the cell holding that point, and the lexicographically smallest sink whose
    column and row both still hold points gives a point extremal in both.
    The reversed removal order is returned.
    """
    m = g.matrix
    for cell in m.cells():
        if not (m[cell].is_empty or m[cell].monotone_kind):
            raise ValueError(f"forest ordering needs a monotone matrix, cell {cell} is {m[cell].token()}")
    if not is_consistent_orientation(m, o):
        raise ValueError("orientation is not consistent with the matrix")
    graph = build_cell_graph(m)
    if find_cycle(graph) is not None:
        raise ValueError("cell graph is not a forest")
    k, l = m.shape
    perm = g.perm
    cols = [[] for _ in range(k + 1)]
    rows = [[] for _ in range(l + 1)]
    for x in range(1, len(perm) + 1):
        i, j = g.cell_of_position(x)
        cols[i].append((x, perm[x - 1]))
    for i in range(1, k + 1):
        for pt in cols[i]:
            rows[g.gridding.row_of(pt[1])].append(pt)
    for r in rows:
        r.sort(key=lambda pt: pt[1])
    # lists are kept so the extremal point sits at the end
    for i in range(1, k + 1):
        if o.c(i) < 0:
            cols[i].reverse()
    for j in range(1, l + 1):
        if o.r(j) < 0:
            rows[j].reverse()
    vertices = sorted(graph.vertices)
    removed = []
    for _ in range(len(perm)):
        pick = None
        for i, j in vertices:
            # (i, j) is a sink with both lines alive iff it holds both extremal points
            if cols[i] and rows[j]:
                cx, cy = cols[i][-1]
                rx, ry = rows[j][-1]
                if g.gridding.row_of(cy) == j and g.gridding.column_of(rx) == i:
                    if (cx, cy) != (rx, ry):
                        raise RuntimeError("extremal points disagree; orientation inconsistent")
                    pick = (i, j)
                    break
        if pick is None:
            raise RuntimeError("no admissible sink found")
        i, j = pick
        pt = cols[i].pop()
        rows[j].pop()
        removed.append(pt[0])
    sigma = removed[::-1]
    return make_ordering(perm, sigma)


# --- general grid trees ------------------------------------------------------------

TreeProvider = Callable[[Permutation], GridTree]


def default_tree_provider(q: Permutation) -> GridTree:
    """Optimal tree for small cells, otherwise the best simple caterpillar."""
    if len(q) <= DEFAULT_MAX_N:
        return optimal_grid_tree(q)
    o = heuristic_ordering(q)
    return caterpillar_from_ordering(q, o.ordering)


@dataclass
class GridTreeBuild:
    tree: GridTree
    bound: int
    roots: tuple
    h: dict = field(repr=False)
    root_width: dict = field(repr=False)

    def to_json(self) -> dict:
        return {
            "tree": self.tree.to_json(),
            "bound": self.bound,
            "roots": [list(r) for r in self.roots],
            "width": tree_width_of(self.tree),
        }


def _pick_root(m, graph, comp):
    for r in comp:
        ok = True
        for q in comp:
            if q == r:
                continue
            path = tree_path(graph, r, q)
            if is_bumper(m, path[-2], q):
                ok = False
                break
        if ok:
            return r
    raise ValueError("no admissible root: the component has a bumper-ended path")


def _component_tree(g, m, graph, comp, provider, points_in):
    r = _pick_root(m, graph, comp)
    parent: dict = {}
    line: dict = {}
    for v in comp:
        if v == r:
            continue
        path = tree_path(graph, v, r)
        idx = max(t for t in range(1, len(path)) if shared_line(v, path[t]) is not None)
        parent[v] = path[idx]
        line[v] = shared_line(v, path[idx])
        if m[v].monotone_kind is None:
            raise ValueError(f"non-root cell {v} holds a non-monotone class {m[v].token()}")
    children: dict = {v: [] for v in comp}
    for v, w in parent.items():
        children[w].append(v)
    h: dict = {}

    def weight(v):
        if v not in h:
            # every non-root entry is monotone, so each propagation constant is 1
            h[v] = 1 + sum(weight(w) for w in children[v])
        return h[v]

    weight(r)
    # parent links between points
    pparent: dict = {}
    for v, w in parent.items():
        targets = points_in[w]
        if line[v] == "column":
            ordered = sorted(targets)
            for pt in points_in[v]:
                right = [q for q in ordered if q[0] > pt[0]]
                pparent[pt] = right[0] if right else ordered[-1]
        else:
            ordered = sorted(targets, key=lambda q: q[1])
            for pt in points_in[v]:
                above = [q for q in ordered if q[1] > pt[1]]
                pparent[pt] = above[0] if above else ordered[-1]
    cell_of = {pt: v for v in comp for pt in points_in[v]}
    kids_col: dict = {}
    kids_row: dict = {}
    for pt, par in pparent.items():
        if shared_line(cell_of[pt], cell_of[par]) == "column":
            kids_col.setdefault(par, []).append(pt)
        else:
            kids_row.setdefault(par, []).append(pt)
    subtree: dict = {}

    def depth(v):
        d = 0
        while v in parent:
            v = parent[v]
            d += 1
        return d

    # children before parents: deeper cells of the cell tree first
    order = sorted(comp, key=depth, reverse=True)
    for v in order:
        for pt in points_in[v]:
            col_kids = kids_col.get(pt, [])
            row_kids = kids_row.get(pt, [])
            t_row = None
            if row_kids:
                items = sorted(row_kids + [pt], key=lambda q: -q[1])
                t_row = caterpillar([subtree[q] if q != pt else GridTree.leaf(pt) for q in items])
            own = t_row if t_row is not None else GridTree.leaf(pt)
            if col_kids:
                items = sorted(col_kids + [pt], key=lambda q: q[0])
                subtree[pt] = caterpillar([subtree[q] if q != pt else own for q in items])
            else:
                subtree[pt] = own
    root_pts = sorted(points_in[r])
    q = standardize(root_pts)
    t_r = provider(q)
    if not is_grid_tree_of(t_r, q):
        raise ValueError(f"tree provider returned an invalid tree for cell {r}")
    width = tree_width_of(t_r)
    # the t-th standardized point is the t-th root point from the left
    mapping = {(t, q[t - 1]): subtree[root_pts[t - 1]] for t in range(1, len(q) + 1)}
    return t_r.replace_leaves(mapping), 4 * width * h[r], r, h, width


def build_general_grid_tree(
    g: GriddedPermutation,
    entry_trees: Optional[dict | TreeProvider] = None,
) -> GridTreeBuild:
    """A grid tree of ``g.perm`` whose width is at most ``4 * w * h(r)``.

    ``w`` is the width of the tree supplied for the root cell ``r`` and ``h``
    the weight from the cell tree. ``entry_trees`` maps cells to tree
    providers (or is a single provider); a provider receives a standardized
    cell permutation and returns a grid tree of it. Cells of the matrix that
    hold no points are treated as empty. Several components are joined by a
    balanced pairing, which adds at most ``max(k, l)`` to the bound.
    """
    m = g.matrix
    for c in m.nonempty_cells():
        if not m[c].is_infinite:
            raise ValueError(f"cell {c} holds a finite class {m[c].token()}; remove finite entries first")
    if len(g.perm) == 0:
        raise ValueError("the empty permutation has no grid tree")
    points_in: dict = {}
    for x in range(1, len(g.perm) + 1):
        points_in.setdefault(g.cell_of_position(x), []).append((x, g.perm[x - 1]))
    m_eff = m.replace({c: EMPTY for c in m.nonempty_cells() if c not in points_in})
    graph = build_cell_graph(m_eff)
    if find_cycle(graph) is not None:
        raise ValueError("cell graph contains a cycle")
    if find_bumper_ended_path(m_eff) is not None:
        raise ValueError("cell graph contains a bumper-ended path")

    def provider_for(cell) -> TreeProvider:
        if entry_trees is None:
            return default_tree_provider
        if callable(entry_trees):
            return entry_trees
        return entry_trees.get(cell, default_tree_provider)

    trees, bounds, roots, hs, widths = [], [], [], {}, {}
    for comp in components(graph):
        root = _pick_root(m_eff, graph, comp)
        t, b, r, h, w = _component_tree(g, m_eff, graph, comp, provider_for(root), points_in)
        trees.append(t)
        bounds.append(b)
        roots.append(r)
        hs.update(h)
        widths[r] = w
    bound = max(bounds)
    if len(trees) > 1:
        bound += max(m.shape)
    while len(trees) > 1:
        paired = [GridTree.node(a, b) for a, b in zip(trees[::2], trees[1::2])]
        if len(trees) % 2:
            paired.append(trees[-1])
        trees = paired
    return GridTreeBuild(trees[0], bound, tuple(roots), hs, widths)
