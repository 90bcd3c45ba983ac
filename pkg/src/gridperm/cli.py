"""Command-line interface: ``gridperm <command> ...``.

Exit codes: 0 yes/success, 1 no, 2 usage or format error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import io as fmt
from .analysis import bumper_cycle_matrix, classify, consistent_orientation, find_bumper_ended_path, path_matrix, refine
from .constructions import (
    SignedPermutation,
    add_anchors,
    build_hardness_instance,
    confine,
    fg_transform,
    make_lane,
    path_witness,
    staircase_matrix,
    staircase_steps,
    steps_for_clauses,
)
from .exceptions import FormatError, ResourceLimitError
from .grid import GriddedPermutation, find_gridding, random_gridded, validate_gridding
from .matcher import DEFAULT_MAX_STATES, MatchRequest, match
from .perm import Permutation, extract_monotone_alternation, horizontal_alternation
from .width import (
    build_general_grid_tree,
    exact_width_oracle,
    forest_pw_ordering,
    horizontal_pw,
    make_ordering,
    optimal_grid_tree,
    optimal_ordering,
    tree_width_of,
    vertical_pw,
)

JSON_FORMAT = 1


@dataclass
class CommandResult:
    exit_code: int
    stdout: str
    stderr: str


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Usage(f"{self.prog}: error: {message}")


def _common(parser: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--json", action="store_true", default=d(False), help="structured output")
    parser.add_argument("--seed", type=int, default=d(0), help="seed for all randomized generation")
    parser.add_argument("--max-states", type=int, default=d(DEFAULT_MAX_STATES), help="DP state budget")
    parser.add_argument("--max-n", type=int, default=d(8), help="size cap for exact width oracles")
    parser.add_argument("--jobs", type=int, default=d(1), help="workers for batch inputs")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="gridperm", description="Grid classes of permutations.")
    _common(top, suppress=False)
    sub = top.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _common(p, suppress=True)
        return p

    p = add("classify", "complexity of Grid(M) pattern matching")
    p.add_argument("-m", "--matrix", nargs="+", required=True)

    p = add("match", "does the text contain the pattern")
    p.add_argument("-p", "--pattern", required=True)
    p.add_argument("-t", "--text", nargs="+", required=True)
    p.add_argument("--solver", choices=["brute", "dp"], default="dp")
    p.add_argument("--ordering", help="pattern ordering for the dp solver, e.g. '2 1 3'")

    p = add("gridcheck", "find or validate a gridding")
    p.add_argument("-m", "--matrix")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("-p", "--perm")
    g.add_argument("-g", "--gridded")

    p = add("width", "width parameters")
    p.add_argument("mode", choices=["pw", "gw", "pw-order", "hpw", "vpw", "grid-tree"])
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("-p", "--perm")
    g.add_argument("-g", "--gridded")
    p.add_argument("-m", "--matrix")

    p = add("gen", "generate objects")
    p.add_argument("kind", choices=["staircase", "lane", "alternation", "path-witness", "random"])
    p.add_argument("-k", type=int, default=1)
    p.add_argument("--c", default="+", help="staircase diagonal entry")
    p.add_argument("--d", default="+", help="staircase off-diagonal entry")
    p.add_argument("--axis", choices=["horizontal", "vertical"], default="horizontal")
    p.add_argument("--shuffle", action="store_true", help="random alternation (uses --seed)")
    p.add_argument("--monotone", action="store_true", help="extract a monotone alternation")
    p.add_argument("-m", "--matrix")
    p.add_argument("-n", type=int, default=10)
    p.add_argument("--min-per-cell", type=int, default=0)

    p = add("transform", "matrix and gridded-permutation transforms")
    p.add_argument("kind", choices=["refine", "fg", "confine", "anchor", "path-matrix", "bumper-cycle"])
    p.add_argument("-m", "--matrix")
    p.add_argument("-g", "--gridded")
    p.add_argument("-q", type=int, default=2)
    p.add_argument("-p", type=int, default=3, help="path length for path-matrix")
    p.add_argument("--f", dest="fsig")
    p.add_argument("--g", dest="gsig")
    p.add_argument("--pattern")
    p.add_argument("--text")
    p.add_argument("--cell", nargs=2, type=int, default=[1, 1])

    p = add("reduce", "hardness pipeline from a staircase base pair")
    p.add_argument("-m", "--matrix", required=True)
    p.add_argument("--base-pattern")
    p.add_argument("--base-text")
    p.add_argument("--fixture", choices=["yes", "no"], default="yes")
    p.add_argument("--cnf")
    p.add_argument("--variables", type=int)
    return top


# --- helpers -----------------------------------------------------------------------------

def _load_gridded(path, matrix_path=None) -> GriddedPermutation:
    data = fmt.load(path, "gridded")
    m = fmt.load(matrix_path, "matrix") if matrix_path else None
    return data.with_matrix(m)


def _matrix_out(m, as_json):
    if as_json:
        return {"matrix": str(m).split("\n"), "shape": list(m.shape)}
    return fmt.format_matrix(m)


def _gridded_out(g, as_json):
    if as_json:
        return fmt.gridded_json(g)
    return fmt.format_gridded(g)


def _need(value, flag):
    if not value:
        raise _Usage(f"missing {flag}")
    return value


def _pmap(fn, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# --- commands ---------------------------------------------------------------------------

def cmd_classify(a):
    mats = [fmt.load(path, "matrix") for path in a.matrix]
    verdicts = _pmap(classify, mats, a.jobs)
    if a.json:
        if len(verdicts) == 1:
            return 0, verdicts[0].to_json()
        return 0, {"results": [dict(input=path, **v.to_json()) for path, v in zip(a.matrix, verdicts)]}
    out = []
    for path, v in zip(a.matrix, verdicts):
        if len(verdicts) > 1:
            out.append(f"{path}:")
        out.append(v.verdict)
        if v.witness:
            out.append("witness: " + " ".join(f"({i},{j})" for i, j in v.witness))
        out.append(f"reason: {v.reason}")
    return 0, "\n".join(out) + "\n"


def cmd_match(a):
    pattern = fmt.load(a.pattern, "perm")
    texts = [fmt.load(path, "perm") for path in a.text]
    ordering = None
    if a.ordering:
        try:
            ordering = make_ordering(pattern, Permutation(a.ordering))
        except ValueError as exc:
            raise FormatError(f"bad --ordering: {exc}") from None

    def run(text):
        return match(MatchRequest(pattern, text, a.solver, ordering, True, a.max_states))

    results = _pmap(run, texts, a.jobs)
    code = 0 if all(r.contained for r in results) else 1
    if a.json:
        if len(results) == 1:
            return code, results[0].to_json()
        return code, {"results": [dict(input=path, **r.to_json()) for path, r in zip(a.text, results)]}
    out = []
    for path, r in zip(a.text, results):
        prefix = f"{path}: " if len(results) > 1 else ""
        out.append(prefix + ("contained" if r.contained else "not contained"))
        if r.witness is not None:
            out.append("witness: " + " ".join(map(str, r.witness)))
    return code, "\n".join(out) + "\n"


def cmd_gridcheck(a):
    if a.perm:
        p = fmt.load(a.perm, "perm")
        m = fmt.load(_need(a.matrix, "-m/--matrix"), "matrix")
        g = find_gridding(p, m)
        if g is None:
            return 1, {"griddable": False} if a.json else "not griddable\n"
        gp = GriddedPermutation(p, m, g)
        if a.json:
            return 0, {"griddable": True, "gridding": fmt.gridded_json(gp)}
        return 0, fmt.format_gridded(gp)
    data = fmt.load(a.gridded, "gridded")
    m = fmt.load(a.matrix, "matrix") if a.matrix else data.matrix
    if m is None:
        raise _Usage("the gridded file has no matrix; pass -m/--matrix")
    if m.shape != data.gridding.shape:
        raise FormatError(f"matrix shape {m.shape} does not match the cuts {data.gridding.shape}")
    ok = validate_gridding(data.perm, m, data.gridding)
    return (0 if ok else 1), ({"valid": ok} if a.json else ("valid\n" if ok else "invalid\n"))


def cmd_width(a):
    if a.mode in ("pw-order", "grid-tree"):
        gp = _load_gridded(_need(a.gridded, "-g/--gridded"), a.matrix)
        if a.mode == "pw-order":
            o = consistent_orientation(gp.matrix)
            if o is None:
                raise ValueError("matrix has no consistent orientation")
            res = forest_pw_ordering(gp, o)
            if a.json:
                return 0, res.to_json()
            return 0, f"width: {res.achieved_width}\nordering: {' '.join(map(str, res.ordering))}\n"
        build = build_general_grid_tree(gp)
        if a.json:
            return 0, build.to_json()
        return 0, f"width: {tree_width_of(build.tree)}\nbound: {build.bound}\ntree: {json.dumps(build.tree.to_json())}\n"
    p = fmt.load(a.perm, "perm") if a.perm else _load_gridded(a.gridded, a.matrix).perm
    if a.mode == "hpw":
        val = horizontal_pw(p)
    elif a.mode == "vpw":
        val = vertical_pw(p)
    elif a.mode == "pw":
        o = optimal_ordering(p, max_n=a.max_n)
        if a.json:
            return 0, {"mode": "pw", "value": o.achieved_width, "ordering": list(o.ordering)}
        return 0, f"{o.achieved_width}\nordering: {' '.join(map(str, o.ordering))}\n"
    else:
        val = exact_width_oracle(p, "gridwidth", max_n=a.max_n)
        if a.json:
            tree = optimal_grid_tree(p, max_n=a.max_n).to_json() if len(p) else None
            return 0, {"mode": "gw", "value": val, "tree": tree}
    return 0, ({"mode": a.mode, "value": val} if a.json else f"{val}\n")


def cmd_gen(a, rng):
    if a.kind == "staircase":
        m = staircase_matrix(a.k, fmt.parse_entry(a.c), fmt.parse_entry(a.d))
        return 0, _matrix_out(m, a.json)
    if a.kind == "lane":
        return 0, _gridded_out(make_lane(a.k), a.json)
    if a.kind == "alternation":
        if a.k < 1:
            raise ValueError("alternation size needs k >= 1")
        left = list(range(1, a.k + 1))
        right = list(range(1, a.k + 1))
        if a.shuffle:
            rng.shuffle(left)
            rng.shuffle(right)
        p = horizontal_alternation(left, right)
        if a.monotone:
            p = extract_monotone_alternation(p)
        if a.axis == "vertical":
            p = p.inverse()
        return 0, ({"perm": list(p)} if a.json else fmt.format_perm(p))
    m = fmt.load(_need(a.matrix, "-m/--matrix"), "matrix")
    if a.kind == "path-witness":
        return 0, _gridded_out(path_witness(m), a.json)
    return 0, _gridded_out(random_gridded(m, a.n, rng, min_per_cell=a.min_per_cell), a.json)


def _signed(text, flag):
    try:
        return SignedPermutation.from_signed(text.replace(",", " ").split())
    except ValueError as exc:
        raise FormatError(f"bad {flag}: {exc}") from None


def cmd_transform(a):
    k = a.kind
    if k in ("refine", "path-matrix", "bumper-cycle"):
        m = fmt.load(_need(a.matrix, "-m/--matrix"), "matrix")
        if k == "refine":
            return 0, _matrix_out(refine(m, a.q), a.json)
        if k == "path-matrix":
            return 0, _matrix_out(path_matrix(m, a.p), a.json)
        path = find_bumper_ended_path(m)
        if path is None:
            return 1, {"path": None} if a.json else "no bumper-ended path\n"
        out = bumper_cycle_matrix(m, path)
        if a.json:
            return 0, dict(_matrix_out(out, True), path=[list(c) for c in path])
        return 0, fmt.format_matrix(out)
    if k == "fg":
        f = _signed(_need(a.fsig, "--f"), "--f")
        g = _signed(_need(a.gsig, "--g"), "--g")
        if a.gridded:
            return 0, _gridded_out(fg_transform(_load_gridded(a.gridded, a.matrix), f, g), a.json)
        m = fmt.load(_need(a.matrix, "-m/--matrix or -g/--gridded"), "matrix")
        return 0, _matrix_out(fg_transform(m, f, g), a.json)
    if k == "confine":
        return 0, _gridded_out(confine(_load_gridded(_need(a.gridded, "-g/--gridded"), a.matrix)), a.json)
    p = _load_gridded(_need(a.pattern, "--pattern"))
    t = _load_gridded(_need(a.text, "--text"))
    ps, ts = add_anchors(p, t, tuple(a.cell))
    if a.json:
        return 0, {"pattern": list(ps), "text": list(ts)}
    return 0, f"pattern: {' '.join(map(str, ps))}\ntext: {' '.join(map(str, ts))}\n"


def cmd_reduce(a):
    m = fmt.load(a.matrix, "matrix")
    if bool(a.base_pattern) != bool(a.base_text):
        raise _Usage("--base-pattern and --base-text go together")
    if a.base_pattern:
        bp = _load_gridded(a.base_pattern)
        bt = _load_gridded(a.base_text)
        variables = a.variables
    else:
        bp = _load_gridded(fmt.data_path("base_pattern.grid"))
        bt = _load_gridded(fmt.data_path(f"base_text_{a.fixture}.grid"))
        variables = a.variables if a.variables is not None else 1
    if a.cnf:
        cnf = fmt.load(a.cnf, "cnf")
        want = steps_for_clauses(cnf.clause_count)
        have = staircase_steps(bp.matrix)
        if have != want:
            raise FormatError(
                f"{cnf.clause_count} clauses need a base pair with {want} staircase steps, got {have}; "
                "supply a matching base pair with --base-pattern/--base-text"
            )
    inst = build_hardness_instance(m, bp, bt, variables=variables)
    if a.json:
        return 0, inst.to_json()
    return 0, (
        f"pattern: {' '.join(map(str, inst.pattern_star))}\n"
        f"text: {' '.join(map(str, inst.text_star))}\n"
        f"provenance: {json.dumps(inst.provenance, sort_keys=True)}\n"
    )


def _dispatch(a):
    rng = random.Random(a.seed)
    cmd = a.command
    if cmd == "classify":
        return cmd_classify(a)
    if cmd == "match":
        return cmd_match(a)
    if cmd == "gridcheck":
        return cmd_gridcheck(a)
    if cmd == "width":
        return cmd_width(a)
    if cmd == "gen":
        return cmd_gen(a, rng)
    if cmd == "transform":
        return cmd_transform(a)
    return cmd_reduce(a)


def run_command(argv) -> CommandResult:
    """Run one command and capture its exit code, stdout and stderr."""
    err = io.StringIO()
    parser = build_parser()
    with contextlib.redirect_stderr(err):
        try:
            args = parser.parse_args(list(argv))
        except _Usage as exc:
            return CommandResult(2, "", err.getvalue() + f"{exc}\n")
        except SystemExit as exc:  # --help
            code = exc.code if isinstance(exc.code, int) else 0
            return CommandResult(code, "", err.getvalue())
    try:
        code, payload = _dispatch(args)
    except _Usage as exc:
        return CommandResult(2, "", f"error: {exc}\n")
    except FormatError as exc:
        return CommandResult(2, "", f"error: {exc}\n")
    except ResourceLimitError as exc:
        return CommandResult(3, "", f"resource limit: {exc}\n")
    except ValueError as exc:
        return CommandResult(2, "", f"error: {exc}\n")
    if args.json:
        if not isinstance(payload, dict):
            payload = {"output": payload}
        text = json.dumps({"format": JSON_FORMAT, **payload}, indent=2) + "\n"
    else:
        text = payload
    return CommandResult(code, text, err.getvalue())


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    if any(flag in argv for flag in ("-h", "--help")):
        build_parser().parse_args(argv)
    res = run_command(argv)
    sys.stdout.write(res.stdout)
    sys.stderr.write(res.stderr)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
