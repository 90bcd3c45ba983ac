"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Lines are printed immediately (visible with ``-s``) and repeated in the
terminal summary.
"""

import itertools
import random
import time

import networkx as nx

from conftest import ACCEPTANCE_LINES
from gridperm.analysis import (
    build_cell_graph,
    classify,
    consistent_orientation,
    is_consistent_orientation,
    is_proper_turning,
    path_matrix,
    path_order,
    refine,
    shared_line,
)
from gridperm.constructions import (
    SignedPermutation,
    add_anchors,
    cell_lis,
    confine,
    fg_transform,
    make_lane,
    path_witness,
    staircase_matrix,
)
from gridperm.grid import DEC, EMPTY, INC, GriddingMatrix, av, find_gridding, finite, monotone_matrix, random_gridded, validate_gridding
from gridperm.matcher import dp_match, grid_preserving_match
from gridperm.perm import Permutation, contains, contains_brute, is_alternation, iter_occurrences, standardize
from gridperm.width import (
    brute_force_pathwidth,
    caterpillar_from_ordering,
    exact_width_oracle,
    forest_pw_ordering,
    good_ordering,
    heuristic_ordering,
    tree_width_of,
)


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def all_monotone_matrices(max_dim=3):
    for k in range(1, max_dim + 1):
        for l in range(1, max_dim + 1):
            for entries in itertools.product((INC, DEC, EMPTY), repeat=k * l):
                yield GriddingMatrix.from_rows([list(entries[r * k:(r + 1) * k]) for r in range(l)])


def oracle_has_cycle(m):
    """Cycle check on an independently built networkx cell graph."""
    g = nx.Graph()
    cells = m.infinite_cells()
    g.add_nodes_from(cells)
    for line_of in (lambda c: ("col", c[0]), lambda c: ("row", c[1])):
        groups = {}
        for c in cells:
            groups.setdefault(line_of(c), []).append(c)
        for members in groups.values():
            members.sort()
            g.add_edges_from(zip(members, members[1:]))
    try:
        nx.find_cycle(g)
        return True
    except nx.NetworkXNoCycle:
        return False


# --- 1 ---------------------------------------------------------------------

def _A():
    return av(321, True)


# hand-derived verdicts: bumper ends need both endpoints to hold Av(321)
AV321_SUITE = [
    ("column A/Inc/A", lambda: GriddingMatrix.from_rows([[_A()], [INC], [_A()]]), "NPComplete"),
    ("row A Inc A", lambda: GriddingMatrix.from_rows([[_A(), INC, _A()]]), "NPComplete"),
    ("row A Inc", lambda: GriddingMatrix.from_rows([[_A(), INC]]), "PolynomialTime"),
    ("row A . A", lambda: GriddingMatrix.from_rows([[_A(), EMPTY, _A()]]), "NPComplete"),
    ("diagonal A A", lambda: GriddingMatrix.from_rows([[_A(), EMPTY], [EMPTY, _A()]]), "PolynomialTime"),
    ("A with Inc arms", lambda: GriddingMatrix.from_rows([[_A(), INC], [INC, EMPTY]]), "PolynomialTime"),
    ("A-Inc-A corner", lambda: GriddingMatrix.from_rows([[_A(), INC], [EMPTY, _A()]]), "NPComplete"),
    ("2x2 cycle with A", lambda: GriddingMatrix.from_rows([[_A(), INC], [INC, INC]]), "NPComplete"),
    ("finite between two A", lambda: GriddingMatrix.from_rows([[_A()], [finite([Permutation("1")])], [_A()]]), "NPComplete"),
    ("undeclared A Inc", lambda: GriddingMatrix.from_rows([[av(321), INC]]), "Inconclusive"),
]


def test_criterion_1_dichotomy():
    start = time.perf_counter()
    count = mismatches = 0
    for m in all_monotone_matrices():
        count += 1
        if (classify(m).verdict == "NPComplete") != oracle_has_cycle(m):
            mismatches += 1
    elapsed = time.perf_counter() - start
    wrong = [name for name, make, want in AV321_SUITE if classify(make()).verdict != want]
    report(
        1,
        "dichotomy fidelity",
        mismatches == 0 and not wrong and elapsed < 60,
        f"{count} monotone matrices, {mismatches} mismatches, {elapsed:.1f}s; Av(321) suite wrong: {wrong or 'none'}",
    )


# --- 2 ---------------------------------------------------------------------

FOREST_MATRICES = [
    ["+ - .", ". + +"],
    ["- + . .", "+ . - +"],
    [". + -", "+ . .", "- + ."],
    ["+ + + +"],
    ["+ . . .", "- + . .", ". - + .", ". . - +"],
]


def test_criterion_2_forest_bound():
    rng = random.Random(2)
    start = time.perf_counter()
    violations = total = 0
    for rows in FOREST_MATRICES:
        m = monotone_matrix(rows)
        o = consistent_orientation(m)
        assert o is not None and classify(m).verdict == "PolynomialTime"
        for _ in range(200):
            gp = random_gridded(m, rng.randint(1, 40), rng)
            res = forest_pw_ordering(gp, o)
            total += 1
            if res.achieved_width > max(m.shape) or sorted(res.ordering) != list(range(1, len(gp.perm) + 1)):
                violations += 1
    elapsed = time.perf_counter() - start
    report(2, "forest ordering width <= max(k, l)", violations == 0 and elapsed < 30,
           f"{total} gridded permutations, {violations} violations, {elapsed:.1f}s")


# --- 3 ---------------------------------------------------------------------

def caterpillar_pathwidth(p):
    """Minimum width over all caterpillar grid trees, built explicitly."""
    n = len(p)
    if n == 0:
        return 0
    best = None
    for sigma in itertools.permutations(range(1, n + 1)):
        if n >= 2 and sigma[0] > sigma[1]:
            continue  # the two deepest leaves are interchangeable
        w = tree_width_of(caterpillar_from_ordering(p, sigma))
        best = w if best is None else min(best, w)
    return best


def test_criterion_3_orderings_equal_caterpillars():
    checked = mismatches = 0
    for n in range(1, 7):
        for p in itertools.permutations(range(1, n + 1)):
            checked += 1
            ordering_min = brute_force_pathwidth(p)
            if ordering_min != caterpillar_pathwidth(p) or ordering_min != exact_width_oracle(p):
                mismatches += 1
    report(3, "min over orderings equals caterpillar path-width", mismatches == 0 and checked == 873,
           f"{checked} permutations, {mismatches} mismatches")


# --- 4 ---------------------------------------------------------------------

def test_criterion_4_refinement_orientation():
    count = failures = 0
    for m in all_monotone_matrices():
        count += 1
        r = refine(m, 2)
        o = consistent_orientation(r)
        if o is None or not is_consistent_orientation(r, o):
            failures += 1
    base_none = consistent_orientation(monotone_matrix(["+ +", "+ -"])) is None
    report(4, "refinement by 2 is orientable", failures == 0 and base_none,
           f"{count} matrices, {failures} failures; three-Inc-one-Dec unorientable: {base_none}")


# --- 5 ---------------------------------------------------------------------

CYCLIC = [["+ +", "+ +"], ["+ +", "+ -"], ["+ - .", ". + +", "- . +"]]


def test_criterion_5_path_matrix():
    rng = random.Random(5)
    bad = []
    for rows in CYCLIC:
        src = monotone_matrix(rows)
        for p in range(1, 7):
            mp = path_matrix(src, p)
            order = path_order(build_cell_graph(mp))
            if order is None or not is_proper_turning(order) or len(order) < p:
                bad.append((rows, p, "path"))
                continue
            for _ in range(50):
                gp = random_gridded(mp, rng.randint(0, 14), rng)
                if find_gridding(gp.perm, src) is None:
                    bad.append((rows, p, list(gp.perm)))
                    break
    report(5, "path matrices are proper turning paths inside Grid(M)", not bad,
           f"3 matrices x p=1..6 x 50 samples, failures: {bad or 'none'}")


# --- 6 ---------------------------------------------------------------------

def test_criterion_6_solver_equivalence():
    orders = {}
    for k in range(1, 5):
        for p in itertools.permutations(range(1, k + 1)):
            orders[p] = good_ordering(p).ordering
    pairs = disagreements = 0
    for n in range(1, 8):
        for t in itertools.permutations(range(1, n + 1)):
            for p, sigma in orders.items():
                if len(p) > n:
                    continue
                pairs += 1
                occ, _ = dp_match(p, t, sigma)
                if (occ is not None) != (contains_brute(p, t) is not None):
                    disagreements += 1
    rng = random.Random(6)
    for _ in range(500):
        k = rng.randint(1, 7)
        n = rng.randint(k, 14)
        p = rng.sample(range(1, k + 1), k)
        t = rng.sample(range(1, n + 1), n)
        pairs += 1
        occ, _ = dp_match(p, t, good_ordering(p).ordering)
        if (occ is not None) != contains(p, t):
            disagreements += 1
    # width-2 pattern of length 12: a merge of two increasing runs
    left = sorted(rng.sample(range(1, 13), 6))
    pattern = Permutation(left + [v for v in range(1, 13) if v not in left])
    ordering = heuristic_ordering(pattern)
    text = rng.sample(range(1, 51), 50)
    start = time.perf_counter()
    dp_match(pattern, text, ordering.ordering)
    elapsed = time.perf_counter() - start
    report(6, "dp and brute force agree", disagreements == 0 and ordering.achieved_width <= 2 and elapsed < 10,
           f"{pairs} pairs, {disagreements} disagreements; width-{ordering.achieved_width} length-12 in 50 took {elapsed:.2f}s")


# --- 7 ---------------------------------------------------------------------

def _lane_ok(k):
    lane = make_lane(k)
    for i in range(1, k + 1):
        if standardize(lane.cell_points(i, i) | lane.cell_points(i + 1, i)) != Permutation("1423"):
            return False
        if i < k and standardize(lane.cell_points(i + 1, i) | lane.cell_points(i + 1, i + 1)) != Permutation("1342"):
            return False
    return True


def _base_pair(rng, k, n_p, n_t):
    while True:
        p = random_gridded(staircase_matrix(k, INC, INC), n_p, rng)
        t = random_gridded(staircase_matrix(k, av(321), INC), n_t, rng)
        if p.cell_points(1, 1) and t.cell_points(1, 1) and cell_lis(p, (1, 1)) == cell_lis(t, (1, 1)):
            return p, t


def test_criterion_7_gadgets():
    rng = random.Random(7)
    lanes = all(_lane_ok(k) for k in range(1, 7))

    # forcing: every occurrence fixing the first cell is grid-preserving
    forcing_viol = occurrences = 0
    for k in (1, 2):
        for _ in range(40):
            p, t = _base_pair(rng, k, rng.randint(1, 3), rng.randint(2, 6))
            cp, ct = confine(p), confine(t)
            pl, tl = cp.cell_labels(), ct.cell_labels()
            first = [x for x in range(1, len(ct.perm) + 1) if tl[x - 1] == (1, 1)]
            allowed = [first if pl[j] == (1, 1) else None for j in range(len(cp.perm))]
            for occ in iter_occurrences(cp.perm, ct.perm, allowed):
                occurrences += 1
                if any(pl[j] != tl[occ[j] - 1] for j in range(len(occ))):
                    forcing_viol += 1

    # fg micro-suite: all sign combinations of length-2 signed permutations
    signed = [SignedPermutation.from_signed(v) for v in
              ([1, 2], [2, 1], [-1, 2], [1, -2], [-1, -2], [-2, 1], [2, -1], [-2, -1])]
    m = GriddingMatrix.from_rows([[INC, DEC], [DEC, INC]])
    fg_bad = fg_checks = fg_yes = 0
    for _ in range(40):
        p = random_gridded(m, rng.randint(1, 3), rng)
        t = random_gridded(m, rng.randint(3, 5), rng)
        expected = grid_preserving_match(p, t) is not None
        fg_yes += expected
        for f in signed:
            for g in signed:
                fg_checks += 1
                if (grid_preserving_match(fg_transform(p, f, g), fg_transform(t, f, g)) is not None) != expected:
                    fg_bad += 1

    # anchors: tau* contains pi* iff a grid-preserving copy exists
    anchor_bad = anchor_checks = anchor_yes = 0
    for entry in (INC, DEC):
        mm = GriddingMatrix.from_rows([[entry, INC]])
        tm = GriddingMatrix.from_rows([[entry, av(321)]])
        target = anchor_checks + 40
        while anchor_checks < target:
            p = random_gridded(mm, rng.randint(2, 3), rng, min_per_cell=1)
            t = random_gridded(tm, rng.randint(2, 4), rng, min_per_cell=1)
            ps, ts = add_anchors(p, t, (1, 1))
            if len(ts) > 12:
                continue
            anchor_checks += 1
            expected = grid_preserving_match(p, t) is not None
            anchor_yes += expected
            if contains(ps, ts) != expected:
                anchor_bad += 1

    ok = lanes and forcing_viol == 0 and fg_bad == 0 and anchor_bad == 0
    report(7, "construction gadget audits", ok,
           f"lanes k<=6 {'ok' if lanes else 'broken'}; forcing {occurrences} occurrences, {forcing_viol} violations; "
           f"fg {fg_checks} checks ({fg_yes}/40 base pairs positive), {fg_bad} failures; "
           f"anchors {anchor_checks} instances ({anchor_yes} positive), {anchor_bad} failures")


# --- 8 ---------------------------------------------------------------------

PATHS = {
    1: ["+"],
    2: ["+ +"],
    3: ["+ -", ". +"],
    4: [". + +", "+ + ."],
    5: [". . +", ". + +", "+ + ."],
}


def test_criterion_8_path_witness():
    problems = []
    for k, rows in PATHS.items():
        m = monotone_matrix(rows)
        order = path_order(build_cell_graph(m))
        assert order is not None and len(order) == k
        w = path_witness(m)
        if len(w.perm) != k ** 3 or not validate_gridding(w.perm, m, w.gridding):
            problems.append((k, "size or gridding"))
        for a, b in zip(order, order[1:]):
            axis = "horizontal" if shared_line(a, b) == "row" else "vertical"
            if not is_alternation(standardize(w.cell_points(*a) | w.cell_points(*b)), axis):
                problems.append((k, a, b))
    gw2 = exact_width_oracle(path_witness(monotone_matrix(PATHS[2])).perm, "gridwidth")
    report(8, "path witnesses", not problems and gw2 >= 1,
           f"k=1..5, problems: {problems or 'none'}; k=2 grid-width {gw2} >= 1")
