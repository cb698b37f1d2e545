"""Command-line front end: ``analyze``, ``solve`` and ``verify``.

Exit codes: 0 success (an inconsistent problem is a successful analysis),
1 a verification oracle failed, 2 invalid input or configuration,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import oracles
from .characteristic import characteristic_matrix, fredholm_analysis
from .errors import BvpError, NoApplicableOracle
from .fundamental import MIN_GRID, fundamental_matrix
from .problem import encode_array, load_problem
from .sobolev import function_norm
from .solver import solve

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _grid(text):
    value = int(text)
    if value < MIN_GRID:
        raise argparse.ArgumentTypeError(f"grid size must be at least {MIN_GRID}")
    return value


def _positive(text):
    value = float(text)
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError("tolerance must be a positive number")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fredholm-bvp",
        description="Fredholm analysis and solution of linear boundary-value problems.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=_grid, default=1024, help="uniform grid intervals")
    common.add_argument("--rank-tol", type=_positive, default=None,
                        help="absolute singular-value threshold for the rank")
    common.add_argument("--consistency-tol", type=_positive, default=None,
                        help="relative consistency tolerance for the reduced system")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--output", default=None, help="write the report here instead of stdout")
    common.add_argument("--norms", action="store_true",
                        help="include Sobolev-Slobodetsky norms of the solution")
    common.add_argument("--samples", action="store_true",
                        help="analyze: include fundamental-matrix samples")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="characteristic matrix and Fredholm numbers")
    p.add_argument("input")
    p = sub.add_parser("solve", parents=[common], help="solve and classify the problem")
    p.add_argument("input")
    p = sub.add_parser("verify", parents=[common], help="run the verification oracles")
    p.add_argument("input", nargs="?")
    p.add_argument("--corpus", action="store_true", help="use the built-in random corpus")
    p.add_argument("--corpus-size", type=int, default=200)
    p.add_argument("--seed", type=int, default=20240611)
    return parser


# {{{ commands


def _solution_norms(problem, sol, grid):
    if sol.solution is None:
        return None
    norms = function_norm(sol.solution, problem.a, problem.b, problem.space.s,
                          problem.space.p, grid_size=grid)
    return {
        "s": problem.space.s,
        "p": problem.space.p,
        "components": [n.to_dict() for n in norms],
        "total": float(sum(n.total for n in norms)),
    }


def run_analyze(args):
    problem = load_problem(args.input)
    Y = fundamental_matrix(problem, args.grid)
    M = characteristic_matrix(Y, problem.boundary, problem, args.rank_tol)
    report = fredholm_analysis(M)
    doc = {
        "command": "analyze",
        "m": problem.m,
        "r": problem.r,
        "report": report.to_dict(),
        "characteristic_matrix": encode_array(M.entries),
    }
    if args.samples:
        doc["fundamental_matrix"] = {
            "grid": [float(t) for t in Y.grid],
            "values": encode_array(Y.values),
        }
    return EXIT_OK, doc


def run_solve(args):
    problem = load_problem(args.input)
    sol = solve(problem, args.grid, args.rank_tol, args.consistency_tol)
    doc = {"command": "solve", "m": problem.m, "r": problem.r}
    doc.update(sol.to_dict(samples=True))
    if args.norms:
        doc["norms"] = _solution_norms(problem, sol, args.grid)
    return EXIT_OK, doc


def run_verify(args):
    reports = []
    doc = {"command": "verify"}
    if args.corpus or args.input is None:
        problems = oracles.builtin_corpus(args.corpus_size, args.seed)
        reports = oracles.run_corpus(problems, args.grid, args.rank_tol)
        doc["corpus_size"] = len(problems)
        doc["seed"] = args.seed
    if args.input is not None:
        problem = load_problem(args.input)
        try:
            reports.append(oracles.cross_check(problem, args.grid, args.rank_tol))
        except NoApplicableOracle as exc:
            doc["cross_check"] = f"not applicable: {exc}"
        reports.append(oracles.column_identity_check(problem, grid_size=args.grid))
        reports.append(oracles.continuity_probe(problem, [1e-2, 1e-3, 1e-4], grid_size=args.grid))
        if args.norms:
            sol = solve(problem, args.grid, args.rank_tol, args.consistency_tol)
            doc["norms"] = _solution_norms(problem, sol, args.grid)
    failed = [r for r in reports if not r.passed]
    doc["passed"] = not failed
    doc["n_reports"] = len(reports)
    doc["n_failed"] = len(failed)
    # full detail only for failures keeps corpus output readable
    doc["reports"] = [
        r.to_dict() if not r.passed else {k: v for k, v in r.to_dict().items() if k != "details"}
        for r in reports
    ]
    return (EXIT_OK if not failed else EXIT_VERIFY_FAILED), doc


COMMANDS = {"analyze": run_analyze, "solve": run_solve, "verify": run_verify}


# }}}

# {{{ output


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    return x


def render(doc, fmt):
    if fmt == "json":
        return json.dumps(_jsonable(doc), indent=2) + "\n"
    lines = [f"command: {doc['command']}"]
    report = doc.get("report")
    if report:
        lines.append(f"m = {doc['m']}, r = {doc['r']}")
        lines.append(
            f"rank {report['rank']}, dim ker {report['dim_kernel']}, "
            f"dim coker {report['dim_cokernel']}, index {report['index']}, "
            f"invertible {report['invertible']}"
        )
        if report["rank_uncertain"]:
            lines.append("warning: a singular value lies close to the rank threshold")
    if "status" in doc:
        lines.append(f"status: {doc['status']}")
        lines.append(f"reduced residual: {doc['reduced_residual']:.3e}")
        if doc.get("ode_residual") is not None:
            lines.append(f"ode residual: {doc['ode_residual']:.3e}")
            lines.append(f"boundary residual: {doc['boundary_residual']:.3e}")
        if doc["kernel_basis"]:
            lines.append(f"kernel basis vectors: {len(doc['kernel_basis'])}")
    if doc["command"] == "verify":
        lines.append(f"reports: {doc['n_reports']}, failed: {doc['n_failed']}")
        for r in doc["reports"]:
            mark = "PASS" if r["pass"] else "FAIL"
            lines.append(f"  {mark} {r['oracle_name']}: {r['max_abs_error']:.3e} (tol {r['tolerance']:.1e})")
    if doc.get("norms"):
        lines.append(f"Sobolev-Slobodetsky norm: {doc['norms']['total']:.6g}")
    return "\n".join(lines) + "\n"


# }}}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, doc = COMMANDS[args.command](args)
    except BvpError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = render(doc, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
