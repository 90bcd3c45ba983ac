import pytest

from gridperm.exceptions import FormatError
from gridperm.grid import DEC, EMPTY, INC, av
from gridperm.io import (
    format_matrix,
    parse_cnf,
    parse_entry,
    parse_gridded,
    parse_matrix,
    parse_perm,
)
from gridperm.perm import Permutation


def test_parse_perm_forms():
    assert parse_perm("1 5 3 4 2\n") == Permutation("15342")
    assert parse_perm("15342") == Permutation([1, 5, 3, 4, 2])
    assert parse_perm("# comment\n\n2 1\n") == Permutation("21")
    assert parse_perm("") == Permutation()


@pytest.mark.parametrize(
    "text,where,msg",
    [
        ("1 1 2", "line 1, column 3", "repeated value 1"),
        ("1 4 2", "line 1, column 3", "outside 1..3"),
        ("1 x", "line 1, column 3", "expected a positive integer"),
        ("1 2\n2 1", "line 2, column 1", "single line"),
    ],
)
def test_parse_perm_errors(text, where, msg):
    with pytest.raises(FormatError) as err:
        parse_perm(text)
    assert where in str(err.value) and msg in str(err.value)


def test_matrix_cartesian_flip():
    m = parse_matrix("+ -\n. +\n")
    assert m[(1, 2)] == INC and m[(2, 2)] == DEC and m[(1, 1)] == EMPTY and m[(2, 1)] == INC
    assert format_matrix(m) == "+ -\n. +\n"


def test_entries():
    assert parse_entry("Av(321)") == av(321)
    assert parse_entry("Av(321)!").bounded_gw is True
    assert parse_entry("Av(10,2,1,3,4,5,6,7,8,9)").basis == Permutation([10, 2, 1, 3, 4, 5, 6, 7, 8, 9])
    f = parse_entry("F{12;21}")
    assert not f.is_infinite and Permutation("21") in f.members
    with pytest.raises(FormatError):
        parse_entry("Av(3 21)")
    with pytest.raises(FormatError):
        parse_entry("Av(322)")


def test_matrix_errors():
    with pytest.raises(FormatError) as err:
        parse_matrix("+ +\n+ ? \n")
    assert "line 2, column 3" in str(err.value)
    with pytest.raises(FormatError):
        parse_matrix("+ +\n+\n")
    with pytest.raises(FormatError):
        parse_matrix("# nothing\n")


def test_gridded():
    d = parse_gridded("3 1 5 2 4\ncols: 1\nrows: 4\nmatrix:\n+ +\n+ +\n")
    assert d.perm == Permutation("31524")
    assert d.gridding.column_cuts == (0, 1, 5) and d.gridding.row_cuts == (0, 4, 5)
    assert d.matrix.shape == (2, 2)
    assert parse_gridded("2 1\ncols:\nrows: 1\n").matrix is None


def test_gridded_errors():
    with pytest.raises(FormatError):
        parse_gridded("1 2\nrows:\ncols:\n")
    with pytest.raises(FormatError):
        parse_gridded("1 2\ncols: 1\nrows:\nmatrix:\n+\n")
    with pytest.raises(FormatError) as err:
        parse_gridded("1 2\ncols: a\nrows:\n")
    assert "line 2" in str(err.value)
    with pytest.raises(FormatError):
        parse_gridded("1 2\ncols: 3\nrows:\n")


def test_cnf():
    cnf = parse_cnf("c demo\np cnf 3 2\n1 -3 0\n2 3\n-1 0\n")
    assert cnf.variables == 3 and cnf.clauses == ((1, -3), (2, 3, -1))
    assert cnf.clause_count == 2
    for bad in ("1 2 0\n", "p cnf 1 1\n2 0\n", "p cnf 2 2\n1 0\n", "p dnf 1 1\n1 0\n"):
        with pytest.raises(FormatError):
            parse_cnf(bad)
