import json

import pytest

from gridperm.analysis import build_cell_graph, consistent_orientation, is_proper_turning, path_matrix, path_order, shared_line
from gridperm.constructions import (
    HardnessInstance,
    SignedPermutation,
    add_anchors,
    anchor_length,
    build_hardness_instance,
    cell_lis,
    confine,
    derive_fg,
    fg_transform,
    make_lane,
    path_visits,
    path_witness,
    staircase_matrix,
    staircase_steps,
    steps_for_clauses,
    trim_path_matrix,
)
from gridperm.grid import DEC, INC, GriddedPermutation, Gridding, av, monotone_matrix, validate_gridding
from gridperm.io import data_path, load
from gridperm.matcher import grid_preserving_match
from gridperm.perm import Permutation, contains, is_alternation, lis_length, standardize

P = Permutation


def _fixture(name):
    return load(data_path(name), "gridded").with_matrix()


def test_staircase():
    m = staircase_matrix(2, INC, DEC)
    assert str(m) == ". + -\n+ - ."
    assert staircase_steps(m) == 2
    assert staircase_steps(monotone_matrix(["+ +", "+ +"])) is None
    assert steps_for_clauses(1) == 3 and steps_for_clauses(3) == 7


def test_lanes():
    assert make_lane(1).perm == P("1423")
    assert make_lane(3).perm == P([1, 4, 2, 5, 8, 3, 6, 9, 12, 7, 10, 11])
    lane = make_lane(4)
    for i in range(1, 5):
        row = lane.cell_points(i, i) | lane.cell_points(i + 1, i)
        assert standardize(row) == P("1423")


def test_signed_permutation():
    f = SignedPermutation.from_signed([-2, 1])
    assert (f(1), f(2)) == (-2, 1)
    assert f.inverse().to_list() == [2, -1]
    with pytest.raises(ValueError):
        SignedPermutation.from_signed([1, -1])


def test_fg_on_matrix():
    f = SignedPermutation.from_signed([-2, 1])
    out = fg_transform(monotone_matrix(["+ -", ". +"]), f, SignedPermutation.identity(2))
    assert str(out) == "+ +\n- ."


def test_fg_round_trip(rng):
    from gridperm.grid import random_gridded

    m = monotone_matrix(["+ -", "- +"])
    f = SignedPermutation.from_signed([-2, 1])
    g = SignedPermutation.from_signed([2, -1])
    for _ in range(10):
        gp = random_gridded(m, rng.randint(0, 8), rng)
        out = fg_transform(gp, f, g)
        assert validate_gridding(out.perm, out.matrix, out.gridding)
        assert fg_transform(out, f.inverse(), g.inverse()) == gp


def test_confine_fixture():
    c = confine(_fixture("base_pattern.grid"))
    assert c.perm == P([1, 4, 5, 7, 8, 11, 2, 3, 6, 9, 10])
    assert c.gridding == Gridding.from_interior(11, [6], [])


def test_confine_rejects_non_sum_closed():
    g = GriddedPermutation(P("21"), staircase_matrix(1, DEC, INC), Gridding.from_interior(2, [1], []))
    with pytest.raises(ValueError):
        confine(g)


def test_trim_and_derive():
    mp = path_matrix(monotone_matrix(["+ +", "+ +"]), 5)
    t = trim_path_matrix(mp, 2)
    assert str(t) == ". + +\n+ . +"
    assert path_visits(t) == ([(1, 1), (3, 1), (3, 2), (2, 2)], [1, 3, 2], [1, 2])
    f, g = derive_fg(t, consistent_orientation(t))
    assert (f.to_list(), g.to_list()) == ([1, 3, 2], [1, 2])
    assert fg_transform(staircase_matrix(2, INC, INC), f, g) == t


def test_anchors_sizes():
    p, t = _fixture("base_pattern.grid"), _fixture("base_text_yes.grid")
    assert anchor_length(t) == 4
    ps, ts = add_anchors(p, t, (1, 1))
    assert len(ps) == len(p.perm) + 8 and len(ts) == len(t.perm) + 8
    assert lis_length(ts) >= 4


def test_anchor_rejects_empty_cell():
    t = _fixture("base_text_yes.grid")
    # every point sits in the second column, so cell (1, 1) is empty
    p = GriddedPermutation(P("12"), t.matrix, Gridding.from_interior(2, [0], []))
    with pytest.raises(ValueError):
        add_anchors(p, t, (1, 1))


@pytest.mark.parametrize("name,expected", [("base_text_yes.grid", True), ("base_text_no.grid", False)])
def test_fixture_pipeline(name, expected):
    p, t = _fixture("base_pattern.grid"), _fixture(name)
    assert (grid_preserving_match(p, t) is not None) == expected
    inst = build_hardness_instance(monotone_matrix(["+ +", "+ +"]), p, t, variables=1)
    assert contains(inst.pattern_star, inst.text_star) == expected
    data = json.loads(json.dumps(inst.to_json()))
    assert set(data) == {"pattern", "text", "provenance"}
    back = HardnessInstance.from_json(data)
    assert back.pattern_star == inst.pattern_star and back.provenance == inst.provenance


def test_pipeline_rejects_forest():
    p, t = _fixture("base_pattern.grid"), _fixture("base_text_yes.grid")
    with pytest.raises(ValueError):
        build_hardness_instance(monotone_matrix(["+ -"]), p, t)


def test_path_witness_small():
    w = path_witness(staircase_matrix(1, INC, INC))
    assert w.perm == P("24681357")
    assert is_alternation(w.perm, "horizontal")
    with pytest.raises(ValueError):
        path_witness(monotone_matrix(["+ +", "+ +"]))


def test_path_witness_blocks():
    m = monotone_matrix(["+ -", ". +"])
    w = path_witness(m)
    assert len(w.perm) == 27 and validate_gridding(w.perm, m, w.gridding)
    order = path_order(build_cell_graph(m))
    for a, b in zip(order, order[1:]):
        axis = "horizontal" if shared_line(a, b) == "row" else "vertical"
        assert is_alternation(standardize(w.cell_points(*a) | w.cell_points(*b)), axis)
