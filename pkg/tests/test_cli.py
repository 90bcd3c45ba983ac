import json
import subprocess
import sys
from pathlib import Path

import pytest

from gridperm.cli import run_command
from gridperm.io import data_path, format_gridded, format_matrix, format_perm, load

GOLDEN = Path(__file__).parent / "golden"
INPUTS = GOLDEN / "inputs"
CASES = json.loads((GOLDEN / "cases.json").read_text())


@pytest.fixture
def in_inputs(monkeypatch):
    monkeypatch.chdir(INPUTS)


@pytest.mark.parametrize("case", CASES, ids=[c["name"] for c in CASES])
def test_golden(case, in_inputs):
    res = run_command(case["argv"])
    assert res.exit_code == case["exit"], res.stderr
    assert res.stdout == (GOLDEN / f"{case['name']}.out").read_text()


def test_every_subcommand_has_a_golden_case():
    commands = {"classify", "match", "gridcheck", "width", "gen", "transform", "reduce"}
    covered = {a for c in CASES for a in c["argv"] if a in commands}
    assert covered == commands
    modes = {(c["argv"][i], c["argv"][i + 1]) for c in CASES for i, a in enumerate(c["argv"]) if a in ("width", "gen", "transform")}
    for cmd, kinds in (
        ("width", ["pw", "gw", "pw-order", "hpw", "vpw"]),
        ("gen", ["staircase", "lane", "alternation", "path-witness"]),
        ("transform", ["refine", "fg", "confine", "anchor", "path-matrix", "bumper-cycle"]),
    ):
        for k in kinds:
            assert (cmd, k) in modes


@pytest.mark.parametrize("case", [c for c in CASES if "--seed" in c["argv"] or c["argv"][0] == "--json"], ids=lambda c: c["name"])
def test_deterministic(case, in_inputs):
    assert run_command(case["argv"]).stdout == run_command(case["argv"]).stdout


def test_jobs_do_not_change_output(in_inputs):
    argv = ["classify", "-m", "cyc.grm", "forest.grm", "bumper.grm"]
    assert run_command(argv).stdout == run_command(["--jobs", "3"] + argv).stdout


def test_json_has_format_field(in_inputs):
    for case in CASES:
        if "--json" in case["argv"]:
            assert json.loads((GOLDEN / f"{case['name']}.out").read_text())["format"] == 1


@pytest.mark.parametrize(
    "path,kind,fmt",
    [(p, "perm", format_perm) for p in INPUTS.glob("*.perm")]
    + [(p, "matrix", format_matrix) for p in INPUTS.glob("*.grm")]
    + [(p, "gridded", lambda d: format_gridded(d.with_matrix(check=False))) for p in INPUTS.glob("*.grid")]
    + [(data_path(n), "gridded", lambda d: format_gridded(d.with_matrix())) for n in ("base_pattern.grid", "base_text_yes.grid", "base_text_no.grid")],
    ids=lambda v: v.name if isinstance(v, Path) else None,
)
def test_round_trip(path, kind, fmt):
    assert fmt(load(path, kind)) == path.read_text()


def test_generated_outputs_round_trip(in_inputs, tmp_path):
    for name in ("gen_lane", "gen_random", "gen_path_witness", "transform_confine", "gridcheck_find"):
        text = (GOLDEN / f"{name}.out").read_text()
        f = tmp_path / "x.grid"
        f.write_text(text)
        assert format_gridded(load(f, "gridded").with_matrix()) == text


def test_error_exit_codes(in_inputs, tmp_path):
    bad = tmp_path / "bad.perm"
    bad.write_text("1 1 2\n")
    res = run_command(["match", "-p", str(bad), "-t", "21.perm"])
    assert res.exit_code == 2 and "line 1, column 3: repeated value 1" in res.stderr
    badm = tmp_path / "bad.grm"
    badm.write_text("+ +\n+\n")
    res = run_command(["classify", "-m", str(badm)])
    assert res.exit_code == 2 and "line 2" in res.stderr
    assert run_command(["frobnicate"]).exit_code == 2
    assert run_command([]).exit_code == 2
    assert run_command(["match", "-p", "missing.perm", "-t", "21.perm"]).exit_code == 2
    assert run_command(["gen", "path-witness", "-m", "cyc.grm"]).exit_code == 2


def test_resource_limits(in_inputs):
    res = run_command(["--max-states", "2", "match", "-p", "231.perm", "-t", "15342.perm"])
    assert res.exit_code == 3 and "resource limit" in res.stderr
    res = run_command(["width", "pw", "-p", "31524.perm", "--max-n", "4"])
    assert res.exit_code == 3


def test_reduce_checks_cnf_size(in_inputs):
    res = run_command(["reduce", "-m", "cyc.grm", "--cnf", "one.cnf"])
    assert res.exit_code == 2 and "3 staircase steps" in res.stderr


def test_reduce_with_explicit_base(in_inputs):
    argv = ["reduce", "-m", "cyc.grm", "--base-pattern", str(data_path("base_pattern.grid")),
            "--base-text", str(data_path("base_text_yes.grid")), "--json"]
    res = run_command(argv)
    assert res.exit_code == 0
    data = json.loads(res.stdout)
    assert set(data) == {"format", "pattern", "text", "provenance"}
    fixture = json.loads((GOLDEN / "reduce_fixture_yes.out").read_text().split("provenance: ")[1])
    assert data["provenance"]["sizes"] == fixture["sizes"]


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "gridperm.cli", "match", "-p", "12.perm", "-t", "21.perm"],
        cwd=INPUTS, capture_output=True, text=True,
    )
    assert out.returncode == 1 and out.stdout == "not contained\n"
