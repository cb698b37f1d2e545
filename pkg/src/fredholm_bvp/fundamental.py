"""Fundamental matrix of ``y' + A(t) y = 0`` and variation of constants.

``Y`` solves ``Y' + A Y = 0`` with ``Y(a) = I``. Constant ``A`` uses the
matrix exponential ``Y(t) = expm(-A (t - a))`` at every node; any other
coefficient is integrated with fixed-step classical RK4.

Between nodes all grid functions are evaluated by cubic Hermite
interpolation with node derivatives taken from the ODE itself. Higher
derivatives come from differentiating the ODE:
``y^(k) = C_k(t) y + g_k(t)`` with ``C_0 = I``, ``g_0 = 0``,
``C_{k+1} = C_k' - C_k A`` and ``g_{k+1} = g_k' + C_k f``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import kernels
from .errors import NonFiniteValue, SingularFundamental, UnsupportedOrder
from .functions import DataFunction, check_domain
from .quadrature import hermite_eval

log = logging.getLogger(__name__)

DEFAULT_GRID = 1024
MIN_GRID = 16
#: largest acceptable condition number of Y(t_i)
COND_CAP = 1e14


# {{{ derivative recursion


def _jets(func, order, t):
    """``[func^(i)(t) for i in 0..order]`` stacked on axis 0."""
    return np.stack([func.derivative(i, t) for i in range(order + 1)])


def ode_derivative_operators(A, f, k, t):
    """``(C_k(t), g_k(t))`` for ``t`` a 1-d array; ``g_k`` is None when ``f`` is.

    Uses Leibniz products of the Taylor jets of ``A`` and ``f`` up to order
    ``k - 1``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    m = A.value_shape[0]
    nt = t.shape[0]
    eye = np.broadcast_to(np.eye(m, dtype=np.complex128), (nt, m, m))
    if k == 0:
        return eye.copy(), (None if f is None else np.zeros((nt, m), dtype=np.complex128))

    need = k - 1
    for name, func in (("coefficient", A), ("rhs", f)):
        if func is not None and need > func.max_derivative_order:
            raise UnsupportedOrder(
                f"derivative of order {k} needs the {need}-th derivative of the "
                f"{name}, which its {func.kind} representation does not provide"
            )
    if A.kind == "constant" and (f is None or f.kind == "constant"):
        # jets collapse to a single term; skip the Leibniz bookkeeping
        negA = -np.asarray(A.payload)
        ck = np.linalg.matrix_power(negA, k)
        C = np.broadcast_to(ck, (nt, m, m)).copy()
        if f is None:
            return C, None
        g = np.broadcast_to(np.linalg.matrix_power(negA, k - 1) @ np.asarray(f.payload), (nt, m)).copy()
        return C, g

    A_jet = _jets(A, need, t)
    f_jet = None if f is None else _jets(f, need, t)

    # C_jet[i] = C_j^(i), g_jet[i] = g_j^(i), kept up to order k - j
    C_jet = np.zeros((k + 1, nt, m, m), dtype=np.complex128)
    C_jet[0] = eye
    g_jet = np.zeros((k + 1, nt, m), dtype=np.complex128)
    for j in range(k):
        top = k - j - 1
        new_C = np.empty((top + 1, nt, m, m), dtype=np.complex128)
        new_g = np.empty((top + 1, nt, m), dtype=np.complex128)
        for i in range(top + 1):
            acc = C_jet[i + 1].copy()
            gacc = g_jet[i + 1].copy()
            for l in range(i + 1):
                coef = math.comb(i, l)
                acc -= coef * np.einsum("nij,njk->nik", C_jet[l], A_jet[i - l])
                if f_jet is not None:
                    gacc += coef * np.einsum("nij,nj->ni", C_jet[l], f_jet[i - l])
            new_C[i] = acc
            new_g[i] = gacc
        C_jet, g_jet = new_C, new_g
    return C_jet[0], (None if f is None else g_jet[0])


# }}}

# {{{ dense state functions


@dataclass(frozen=True, eq=False)
class StateFunction:
    """A grid solution of ``y' + A y = forcing`` with dense evaluation.

    ``values`` has shape ``(N + 1, m)`` for a vector solution or
    ``(N + 1, m, k)`` for ``k`` solutions side by side (matrix-valued).
    ``forcing`` is None for the homogeneous equation.
    """

    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    A: DataFunction
    forcing: DataFunction | None = None

    @classmethod
    def from_values(cls, grid, values, A, forcing=None):
        values = np.asarray(values, dtype=np.complex128)
        Ag = A(grid)
        derivs = -np.einsum("nij,nj...->ni...", Ag, values)
        if forcing is not None:
            fg = forcing(grid)
            derivs = derivs + (fg if values.ndim == 2 else fg[..., None])
        for x in (values, derivs):
            x.flags.writeable = False
        return cls(grid, values, derivs, A, forcing)

    @property
    def a(self):
        return float(self.grid[0])

    @property
    def b(self):
        return float(self.grid[-1])

    @property
    def grid_size(self):
        return self.grid.shape[0] - 1

    @property
    def step(self):
        return (self.b - self.a) / self.grid_size

    @property
    def max_derivative_order(self):
        orders = [self.A.max_derivative_order]
        if self.forcing is not None:
            orders.append(self.forcing.max_derivative_order)
        return min(orders) + 1

    def __call__(self, t):
        check_domain(t, self.a, self.b)
        return hermite_eval(self.grid, self.values, self.derivs, t)

    def derivative(self, k, t):
        k = int(k)
        if k == 0:
            return self(t)
        scalar = np.ndim(t) == 0
        t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
        y = np.asarray(self(t_arr))
        C, g = ode_derivative_operators(self.A, self.forcing, k, t_arr)
        out = np.einsum("nij,nj...->ni...", C, y)
        if g is not None:
            out = out + (g if y.ndim == 2 else g[..., None])
        return out[0] if scalar else out

    def column(self, j):
        return StateFunction(self.grid, self.values[:, :, j], self.derivs[:, :, j], self.A, self.forcing)

    def combine(self, q, other=None):
        """``self @ q (+ other)`` as a new state function.

        ``self`` is matrix-valued and homogeneous, ``q`` a vector, ``other``
        an optional vector state function (e.g. a particular solution).
        """
        values = self.values @ q
        derivs = self.derivs @ q
        forcing = None
        if other is not None:
            values = values + other.values
            derivs = derivs + other.derivs
            forcing = other.forcing
        return StateFunction(self.grid, values, derivs, self.A, forcing)

    def ode_residual(self):
        """Max-norm of ``y' + A y - f`` at interior nodes.

        ``y'`` comes from the fourth-order central stencil, so the estimate
        measures the stored samples rather than the stencil's own error.
        """
        h = self.step
        v = self.values
        if v.shape[0] < 5:
            return 0.0
        dy = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
        inner = self.grid[2:-2]
        res = dy + np.einsum("nij,nj...->ni...", self.A(inner), v[2:-2])
        if self.forcing is not None:
            fg = self.forcing(inner)
            res = res - (fg if self.values.ndim == 2 else fg[..., None])
        return float(np.max(np.abs(res))) if res.size else 0.0

    def to_data_function(self):
        """Node samples as a sampled :class:`DataFunction` (cubic)."""
        return DataFunction.sampled(self.grid, self.values, self.a, self.b, order=3)


# }}}

# {{{ fundamental matrix


@dataclass(frozen=True, eq=False)
class FundamentalMatrix:
    grid: np.ndarray
    values: np.ndarray
    inverses: np.ndarray
    derivs: np.ndarray
    A: DataFunction
    method: str

    @property
    def m(self):
        return self.values.shape[1]

    @property
    def a(self):
        return float(self.grid[0])

    @property
    def b(self):
        return float(self.grid[-1])

    @property
    def grid_size(self):
        return self.grid.shape[0] - 1

    @property
    def step(self):
        return (self.b - self.a) / self.grid_size

    def __call__(self, t):
        return evaluate_Y(self, t)

    def as_state(self):
        """All columns of ``Y`` as one matrix-valued :class:`StateFunction`."""
        return StateFunction(self.grid, self.values, self.derivs, self.A, None)

    def column(self, j):
        return self.as_state().column(j)


def _integrate(A, grid):
    n = grid.shape[0] - 1
    a = grid[0]
    if A.kind == "constant":
        negA = -np.asarray(A.payload)
        values = expm((grid - a)[:, None, None] * negA[None])
        return values, "expm"
    h = (grid[-1] - a) / n
    half = np.linspace(a, grid[-1], 2 * n + 1)
    return kernels.rk4_fundamental(A(half), h), "rk4"


def fundamental_matrix(problem, grid_size=DEFAULT_GRID):
    """Sample ``Y`` on ``grid_size`` uniform intervals of ``[a, b]``."""
    grid_size = int(grid_size)
    if grid_size < MIN_GRID:
        raise ValueError(f"grid_size must be at least {MIN_GRID}, got {grid_size}")
    A = problem.A
    grid = np.linspace(problem.a, problem.b, grid_size + 1)
    grid.flags.writeable = False
    m = problem.m

    with np.errstate(over="ignore", invalid="ignore"):
        values, method = _integrate(A, grid)
    if not np.all(np.isfinite(values)):
        bad = int(np.argmax(~np.all(np.isfinite(values), axis=(1, 2))))
        raise NonFiniteValue(
            f"fundamental matrix overflowed at t={grid[bad]:g}; the solution leaves "
            f"floating-point range or the grid ({grid_size} intervals) is too coarse"
        )
    values[0] = np.eye(m)

    cond = np.linalg.cond(values)
    if not np.all(cond < COND_CAP):
        bad = int(np.argmax(~(cond < COND_CAP)))
        raise SingularFundamental(
            f"Y(t) is numerically singular at t={grid[bad]:g} (cond {cond[bad]:.3g})"
        )
    try:
        inverses = np.linalg.inv(values)
    except np.linalg.LinAlgError as exc:
        raise SingularFundamental(str(exc)) from exc
    defect = np.max(np.abs(values @ inverses - np.eye(m)), axis=(1, 2))
    if np.any(defect > 1e-10 * np.maximum(cond, 1.0)):
        raise SingularFundamental("inverse check Y(t) Y(t)^-1 = I failed")

    derivs = -np.einsum("nij,njk->nik", A(grid), values)
    for x in (values, inverses, derivs):
        x.flags.writeable = False
    return FundamentalMatrix(grid, values, inverses, derivs, A, method)


def evaluate_Y(Y, t):
    """``Y(t)``; exact stored values at nodes, cubic Hermite in between."""
    check_domain(t, Y.a, Y.b)
    return hermite_eval(Y.grid, Y.values, Y.derivs, t)


def derivative_of_column(Y, problem, j, k, t):
    """``k``-th derivative of the ``j``-th column of ``Y`` at ``t``."""
    if k < 1:
        raise ValueError("derivative order must be at least 1")
    col = StateFunction(Y.grid, Y.values[:, :, j], Y.derivs[:, :, j], problem.A, None)
    return col.derivative(k, t)


# }}}

# {{{ particular solution


def particular_solution(Y, problem):
    """``y_p(t) = Y(t) int_a^t Y(tau)^-1 f(tau) dtau`` with ``y_p(a) = 0``.

    The integral is accumulated interval by interval with Simpson's rule,
    using the dense ``Y`` at interval midpoints.
    """
    f = problem.f
    grid = Y.grid
    h = Y.step
    if f.is_zero():
        values = np.zeros((grid.shape[0], Y.m), dtype=np.complex128)
        return StateFunction.from_values(grid, values, problem.A, f)

    mids = grid[:-1] + 0.5 * h
    try:
        Z_mid = np.linalg.inv(evaluate_Y(Y, mids))
    except np.linalg.LinAlgError as exc:
        raise SingularFundamental(str(exc)) from exc
    g_node = np.einsum("nij,nj->ni", Y.inverses, f(grid))
    g_mid = np.einsum("nij,nj->ni", Z_mid, f(mids))
    inc = h / 6.0 * (g_node[:-1] + 4.0 * g_mid + g_node[1:])
    integral = np.zeros_like(g_node)
    integral[1:] = np.cumsum(inc, axis=0)
    values = np.einsum("nij,nj->ni", Y.values, integral)
    values[0] = 0.0

    yp = StateFunction.from_values(grid, values, problem.A, f)
    residual = yp.ode_residual()
    fmax = float(np.max(np.abs(f(grid))))
    if residual > 1e-4 * (1.0 + fmax):
        log.warning("particular solution residual %.3e exceeds 1e-4 (1 + |f|)", residual)
    return yp


# }}}
