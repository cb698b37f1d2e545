import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from fredholm_bvp import oracles
from fredholm_bvp.errors import (
    NonFiniteValue,
    OutOfDomain,
    SingularFundamental,
    UnsupportedOrder,
)
from fredholm_bvp.functions import DataFunction
from fredholm_bvp.fundamental import (
    derivative_of_column,
    evaluate_Y,
    fundamental_matrix,
    particular_solution,
)
from fredholm_bvp.problem import parse_problem

from conftest import load_fixture, make_problem

# frozen from scipy solve_ivp (DOP853, rtol 1e-13)
Y_AT_1_FOR_A_EQ_T = 0.6065306597126312
YP_AT_1_FOR_A1_F1 = 0.6321205588285564


def ramp(a=0.0, b=1.0):
    return DataFunction.polynomial(np.array([[[a]], [[1.0]]]), a, b)


def test_zero_coefficient_gives_identity():
    Y = fundamental_matrix(make_problem(np.zeros((3, 3)), c=np.zeros(3), r=3), 64)
    assert np.array_equal(Y.values, np.broadcast_to(np.eye(3), Y.values.shape))


def test_constant_scalar():
    Y = fundamental_matrix(make_problem([[1.0]], c=[0.0], r=1), 64)
    assert abs(Y.values[-1, 0, 0] - math.exp(-1)) < 1e-8


def test_time_dependent_scalar_matches_frozen_oracle(backend):
    Y = fundamental_matrix(make_problem(ramp(), c=[0.0], r=1), 1024)
    assert Y.method == "rk4"
    assert abs(Y.values[-1, 0, 0] - Y_AT_1_FOR_A_EQ_T) < 1e-6
    # closed form exp(-t^2/2) at every node
    assert np.max(np.abs(Y.values[:, 0, 0] - np.exp(-Y.grid**2 / 2))) < 1e-6


def test_rk4_path_matches_expm_for_constant_matrix(rng, backend):
    A = rng.normal(size=(3, 3))
    poly = DataFunction.polynomial(A[None], 0.0, 1.0)
    Y = fundamental_matrix(make_problem(poly, c=np.zeros(3), r=3), 256)
    ref = expm(-A)
    assert np.max(np.abs(Y.values[-1] - ref)) < 1e-8


def test_evaluate_at_nodes_and_midpoints(rng):
    A = rng.normal(size=(2, 2))
    Y = fundamental_matrix(make_problem(A, c=np.zeros(2), r=2), 256)
    assert np.array_equal(evaluate_Y(Y, 0.0), np.eye(2))
    assert np.array_equal(evaluate_Y(Y, Y.grid[17]), Y.values[17])
    mids = Y.grid[:-1] + Y.step / 2
    ref = expm(-mids[:, None, None] * A[None])
    assert np.max(np.abs(evaluate_Y(Y, mids) - ref)) < 1e-7


def test_evaluate_outside_interval_raises():
    Y = fundamental_matrix(make_problem([[1.0]], c=[0.0], r=1), 32)
    with pytest.raises(OutOfDomain):
        evaluate_Y(Y, 1.5)


def test_grid_size_minimum():
    with pytest.raises(ValueError):
        fundamental_matrix(make_problem([[1.0]], c=[0.0], r=1), 8)


def test_column_derivatives_constant(rng):
    A = rng.normal(size=(3, 3))
    Y = fundamental_matrix(make_problem(A, c=np.zeros(3), r=3), 64)
    for j in range(3):
        e = np.eye(3)[:, j]
        assert np.max(np.abs(derivative_of_column(Y, Y_problem(A), j, 1, 0.0) + A @ e)) < 1e-12
        assert np.max(np.abs(derivative_of_column(Y, Y_problem(A), j, 2, 0.0) - A @ A @ e)) < 1e-12


def Y_problem(A):
    return make_problem(A, c=np.zeros(A.shape[0]), r=A.shape[0])


@pytest.mark.parametrize("k", [1, 2, 5])
def test_column_derivatives_vanish_for_zero_coefficient(k):
    P = Y_problem(np.zeros((2, 2)))
    Y = fundamental_matrix(P, 32)
    assert np.all(derivative_of_column(Y, P, 1, k, 0.3) == 0)


def test_column_derivatives_time_dependent():
    # y = exp(-t^2/2): y' = -t y, y'' = (t^2 - 1) y, y''' = (3t - t^3) y
    P = make_problem(ramp(), c=[0.0], r=1)
    Y = fundamental_matrix(P, 1024)
    t = 0.7
    y = math.exp(-t * t / 2)
    expected = {1: -t * y, 2: (t * t - 1) * y, 3: (3 * t - t**3) * y}
    for k, ref in expected.items():
        assert abs(derivative_of_column(Y, P, 0, k, t)[0] - ref) < 1e-6


def test_sampled_coefficient_limits_derivative_order():
    nodes = np.linspace(0, 1, 33)
    A = DataFunction.sampled(nodes, nodes[:, None, None] * np.ones((1, 1)), 0.0, 1.0, order=1)
    P = make_problem(A, c=[0.0], r=1)
    Y = fundamental_matrix(P, 64)
    t = 0.4
    y = math.exp(-t * t / 2)
    assert abs(derivative_of_column(Y, P, 0, 2, t)[0] - (t * t - 1) * y) < 1e-5
    with pytest.raises(UnsupportedOrder):
        derivative_of_column(Y, P, 0, 3, t)


def test_semigroup(rng):
    A = rng.normal(size=(2, 2))
    t1, t2 = 0.4, 0.9
    Y = fundamental_matrix(make_problem(A, c=np.zeros(2), r=2), 512)
    shifted = fundamental_matrix(make_problem(A, c=np.zeros(2), r=2, a=t1, b=1.0), 512)
    lhs = evaluate_Y(Y, t2)
    rhs = evaluate_Y(shifted, t2) @ evaluate_Y(Y, t1)
    assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_rk4_fourth_order(backend):
    A = DataFunction.polynomial(
        np.array([[[0.0, 1.0], [-4.0, 0.0]], [[2.0, 0.0], [0.0, 1.0]], [[0.0, 3.0], [0.0, 0.0]]]),
        0.0, 2.0,
    )
    P = make_problem(A, c=np.zeros(2), r=2, b=2.0)
    runs = {n: fundamental_matrix(P, n).values for n in (16, 32, 64)}

    def err(n):
        return np.max(np.abs(runs[n] - runs[2 * n][::2]))

    assert err(16) / err(32) >= 8


def test_wronskian_stays_away_from_zero():
    rng = np.random.default_rng(7)
    for _ in range(20):
        P = oracles.random_general(rng)
        Y = fundamental_matrix(P, 256)
        assert np.min(np.abs(np.linalg.det(Y.values))) >= 1e-30


def test_particular_solution_zero_forcing():
    P = make_problem([[1.0]], c=[0.0], r=1)
    yp = particular_solution(fundamental_matrix(P, 64), P)
    assert np.all(yp.values == 0)


def test_particular_solution_linear():
    P = make_problem([[0.0]], f=[1.0], c=[0.0], r=1)
    yp = particular_solution(fundamental_matrix(P, 64), P)
    assert np.max(np.abs(yp.values[:, 0] - yp.grid)) < 1e-12


def test_particular_solution_exponential():
    P = make_problem([[1.0]], f=[1.0], c=[0.0], r=1)
    yp = particular_solution(fundamental_matrix(P, 1024), P)
    assert abs(yp.values[-1, 0] - YP_AT_1_FOR_A1_F1) < 1e-6
    assert yp.values[0, 0] == 0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_particular_solution_residual(seed):
    P = oracles.random_general(np.random.default_rng(seed))
    yp = particular_solution(fundamental_matrix(P, 512), P)
    fmax = float(np.max(np.abs(P.f(yp.grid))))
    assert yp.ode_residual() <= 1e-4 * (1 + fmax)


def test_overflow_is_reported():
    P = parse_problem(load_fixture("stiff.json"))
    with pytest.raises(NonFiniteValue, match="overflowed"):
        fundamental_matrix(P, 1024)


def test_singular_is_reported():
    P = parse_problem(load_fixture("singular.json"))
    with pytest.raises(SingularFundamental):
        fundamental_matrix(P, 1024)
