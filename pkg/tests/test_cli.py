import copy
import json
import subprocess
import sys

import numpy as np
import pytest

from fredholm_bvp import errors
from fredholm_bvp.boundary import caputo_derivative
from fredholm_bvp.cli import main
from fredholm_bvp.functions import DataFunction
from fredholm_bvp.sobolev import sobolev_slobodetsky_norm
from fredholm_bvp.solver import evaluate_solution, solve

from conftest import FIXTURES, load_fixture, make_problem


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(argv, capsys):
    code, out, err = run(argv, capsys)
    return code, (json.loads(out) if out else None), err


def write(tmp_path, doc, name="problem.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return path


def test_analyze_identity(capsys):
    code, doc, _ = run_json(["analyze", FIXTURES / "identity2.json", "--grid", 64], capsys)
    assert code == 0
    assert doc["report"]["index"] == 0 and doc["report"]["invertible"]
    assert doc["characteristic_matrix"] == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]


def test_analyze_overdetermined(capsys):
    code, doc, _ = run_json(["analyze", FIXTURES / "overdetermined.json", "--grid", 128], capsys)
    assert code == 0
    assert doc["r"] == 3 and doc["m"] == 2
    assert doc["report"]["index"] == -1


def test_analyze_with_samples(capsys):
    code, doc, _ = run_json(["analyze", FIXTURES / "exponential.json", "--grid", 16, "--samples"], capsys)
    assert code == 0
    assert len(doc["fundamental_matrix"]["grid"]) == 17


def test_malformed_file_names_path(tmp_path, capsys):
    doc = load_fixture("identity2.json")
    doc["coefficient"]["data"][1][0] = "x"
    code, out, err = run(["analyze", write(tmp_path, doc)], capsys)
    assert code == 2 and out == ""
    assert "coefficient.data[1][0]" in err


def test_invalid_json(tmp_path, capsys):
    code, _, err = run(["analyze", write(tmp_path, "{not json")], capsys)
    assert code == 2 and "ProblemSyntaxError" in err


def test_missing_file(tmp_path, capsys):
    code, _, err = run(["analyze", tmp_path / "absent.json"], capsys)
    assert code == 2


@pytest.mark.parametrize("flags", [["--grid", "8"], ["--rank-tol", "-1"], ["--format", "xml"]])
def test_bad_flags(flags, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", str(FIXTURES / "identity2.json"), *flags])
    assert exc.value.code == 2


def test_solve_unique(capsys):
    code, doc, _ = run_json(["solve", FIXTURES / "exponential.json"], capsys)
    assert code == 0 and doc["status"] == "Unique"
    assert len(doc["samples"]) == 1025
    re, im = doc["samples"][-1][0]
    assert abs(re - np.exp(-1)) < 1e-6 and im == 0


def test_solve_inconsistent_exits_zero(capsys):
    code, doc, _ = run_json(["solve", FIXTURES / "contradictory.json"], capsys)
    assert code == 0 and doc["status"] == "Inconsistent"
    assert "samples" not in doc


def test_solve_family(capsys):
    code, doc, _ = run_json(["solve", FIXTURES / "family.json"], capsys)
    assert code == 0 and doc["status"] == "Family"
    assert len(doc["kernel_basis"]) >= 1


def test_solve_sampled_coefficients(capsys):
    code, doc, _ = run_json(["solve", FIXTURES / "sampled.json", "--grid", 256], capsys)
    assert code == 0 and doc["status"] == "Unique"


def test_text_format_and_output_file(tmp_path, capsys):
    out_path = tmp_path / "report.txt"
    code, out, _ = run(["solve", FIXTURES / "exponential.json", "--format", "text",
                        "--output", out_path, "--norms"], capsys)
    assert code == 0 and out == ""
    text = out_path.read_text()
    assert "status: Unique" in text and "Sobolev-Slobodetsky norm" in text


def test_verify_corpus(capsys):
    code, doc, _ = run_json(["verify", "--corpus", "--corpus-size", 30, "--grid", 64], capsys)
    assert code == 0 and doc["passed"] and doc["n_failed"] == 0


def test_verify_corpus_absurd_rank_tolerance(capsys):
    code, doc, _ = run_json(["verify", "--corpus", "--corpus-size", 10, "--grid", 64,
                             "--rank-tol", "1e3"], capsys)
    assert code == 1 and doc["n_failed"] > 0
    failed = [r for r in doc["reports"] if not r["pass"]]
    assert all("details" in r for r in failed)


def test_verify_file_with_norms(capsys):
    code, doc, _ = run_json(["verify", FIXTURES / "linear_solution.json", "--norms", "--grid", 256], capsys)
    assert code == 0
    (comp,) = doc["norms"]["components"]
    assert comp["seminorm"] == 0.0
    assert abs(comp["total"] - (np.sqrt(1 / 3) + 1)) < 1e-6


def test_verify_file_without_oracle(capsys):
    code, doc, _ = run_json(["verify", FIXTURES / "overdetermined.json", "--grid", 128], capsys)
    assert code == 0
    assert doc["cross_check"].startswith("not applicable")


@pytest.mark.parametrize("name", ["identity2.json", "overdetermined.json", "family.json"])
@pytest.mark.parametrize("command", ["analyze", "solve"])
def test_deterministic_output(name, command, capsys):
    argv = [command, FIXTURES / name, "--grid", 64]
    first = run(argv, capsys)[1]
    second = run(argv, capsys)[1]
    assert first == second and first


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fredholm_bvp", "analyze", str(FIXTURES / "identity2.json"), "--grid", "16"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["report"]["rank"] == 2


# {{{ exit-code contract


def _mutate(fn):
    doc = load_fixture("identity2.json")
    fn(doc)
    return doc


def _set(path, value):
    def fn(doc):
        node = doc
        for key in path[:-1]:
            node = node[key]
        node[path[-1]] = value
    return fn


CLI_CASES = {
    "ProblemSyntaxError": _mutate(_set(["dimension"], "two")),
    "DimensionMismatch": _mutate(_set(["boundary_rhs"], [0, 0, 0])),
    "InvalidOrder": _mutate(_set(["boundary", "point_terms", 0, "order"], 1.0)),
    "InvalidSpace": _mutate(_set(["space", "s"], 2.0)),
    "EmptyInterval": _mutate(_set(["interval"], {"a": 1.0, "b": 1.0})),
    "OutOfDomain": _mutate(_set(["boundary", "point_terms", 0, "t"], 3.0)),
}


def _unsupported_order_doc():
    doc = load_fixture("sampled.json")
    doc["space"]["s"] = 4.5
    doc["boundary"]["point_terms"][0]["order"] = 3
    return doc


@pytest.mark.parametrize("name", sorted(CLI_CASES))
def test_validation_errors_exit_2(name, tmp_path, capsys):
    code, _, err = run(["analyze", write(tmp_path, CLI_CASES[name])], capsys)
    assert code == 2 == errors.EXIT_CODES[name]
    assert name in err


@pytest.mark.parametrize("fixture, name", [("stiff.json", "NonFiniteValue"),
                                           ("singular.json", "SingularFundamental")])
def test_numerical_errors_exit_3(fixture, name, capsys):
    code, _, err = run(["analyze", FIXTURES / fixture], capsys)
    assert code == 3 == errors.EXIT_CODES[name]
    assert name in err


def test_unsupported_order_exit_3(tmp_path, capsys):
    code, _, err = run(["analyze", write(tmp_path, _unsupported_order_doc()), "--grid", 64], capsys)
    assert code == 3 and "UnsupportedOrder" in err


def test_tolerance_conflict_exit_2(capsys):
    code, _, err = run(["solve", FIXTURES / "exponential.json", "--rank-tol", "10"], capsys)
    assert code == 2 and "ToleranceConflict" in err


def _raise_no_applicable():
    from fredholm_bvp.oracles import cross_check
    cross_check(make_problem([[1.0]], terms=[(0.5, 0.5, [[1.0]])]))


LIBRARY_CASES = {
    "IntegerOrder": lambda: caputo_derivative(DataFunction.constant(np.ones(1), 0, 1), 1.0, 0.5, 0.0),
    "MissingDerivatives": lambda: sobolev_slobodetsky_norm([np.ones(5)], 0.0, 1.0, 1.5, 2.0),
    "NoSolution": lambda: evaluate_solution(
        solve(make_problem([[0.0]], terms=[(0.0, 0, [[1.0], [1.0]])], c=[0.0, 1.0]), 32), 0.5),
    "NoApplicableOracle": _raise_no_applicable,
}


@pytest.mark.parametrize("name", sorted(LIBRARY_CASES))
def test_library_errors(name):
    cls = getattr(errors, name)
    with pytest.raises(cls) as exc:
        LIBRARY_CASES[name]()
    assert exc.value.exit_code == errors.EXIT_CODES[name]


def test_exit_code_table_is_total():
    covered = set(CLI_CASES) | set(LIBRARY_CASES) | {
        "NonFiniteValue", "SingularFundamental", "UnsupportedOrder", "ToleranceConflict"}
    assert covered == set(errors.EXIT_CODES)
    for name, code in errors.EXIT_CODES.items():
        cls = getattr(errors, name)
        expected = 2 if issubclass(cls, errors.ValidationError) else 3
        assert code == expected == cls.exit_code


# }}}
