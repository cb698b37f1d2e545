import json
from pathlib import Path

import numpy as np
import pytest

from fredholm_bvp import _jit
from fredholm_bvp.boundary import BoundaryOperator, IntegralTerm, PointTerm
from fredholm_bvp.functions import DataFunction
from fredholm_bvp.problem import Interval, ProblemSpec, SpaceParams

FIXTURES = Path(__file__).parent / "fixtures"


def make_problem(A, f=None, terms=(), c=None, a=0.0, b=1.0, s=1.5, p=2.0,
                 kernels=(), r=None):
    """Build a problem from plain arrays.

    ``A`` is an ``(m, m)`` array (constant) or a ``DataFunction``; ``terms``
    are ``(t0, order, alpha)`` triples.
    """
    if not isinstance(A, DataFunction):
        A = DataFunction.constant(np.atleast_2d(A), a, b)
    m = A.value_shape[0]
    if f is None:
        f = DataFunction.constant(np.zeros(m), a, b)
    elif not isinstance(f, DataFunction):
        f = DataFunction.constant(np.atleast_1d(f), a, b)
    point_terms = [PointTerm(t0, order, np.atleast_2d(alpha)) for t0, order, alpha in terms]
    integral_terms = [IntegralTerm(K) for K in kernels]
    if r is None:
        shapes = [pt.alpha.shape[0] for pt in point_terms]
        shapes += [K.value_shape[0] for K in kernels]
        r = shapes[0] if shapes else len(c)
    c = np.zeros(r) if c is None else np.atleast_1d(c)
    return ProblemSpec(
        m, Interval(a, b), SpaceParams(s, p), A, f,
        BoundaryOperator(r, m, point_terms, integral_terms), c,
    )


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text())


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    if request.param == "numba" and not _jit.HAVE_NUMBA:
        pytest.skip("numba not installed")
    monkeypatch.setattr(_jit, "USE_NUMBA", request.param == "numba")
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
