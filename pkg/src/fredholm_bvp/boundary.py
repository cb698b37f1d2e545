"""Boundary operators ``B: y -> C^r``.

An operator is a finite sum of point terms ``alpha @ D^beta y(t0)`` and
integral terms ``int_a^b K(t) y(t) dt``. Integer ``beta`` means a classical
derivative, fractional ``beta`` a Caputo derivative with lower terminal at the
left endpoint ``a``.

Any object with ``__call__(t)`` and ``derivative(k, t)`` (scalar or 1-d
array ``t``) can be fed to :func:`apply_boundary`; :class:`DataFunction`,
the dense solution objects in :mod:`fredholm_bvp.fundamental` and columns of
the fundamental matrix all qualify. Matrix-valued inputs of shape ``(m, k)``
are treated column by column and give an ``(r, k)`` result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, IntegerOrder, InvalidOrder, OutOfDomain
from .functions import DOMAIN_SLACK, DataFunction
from .quadrature import simpson

DEFAULT_GRID = 1024


def is_integer_order(beta):
    return float(beta).is_integer()


@dataclass(frozen=True, eq=False)
class PointTerm:
    t0: float
    order: float
    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=np.complex128)
        if alpha.ndim != 2:
            raise DimensionMismatch("point-term matrix must be two-dimensional")
        alpha.flags.writeable = False
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "order", float(self.order))
        if self.order < 0 or not math.isfinite(self.order):
            raise InvalidOrder(f"derivative order must be nonnegative, got {self.order}")

    def __eq__(self, other):
        if not isinstance(other, PointTerm):
            return NotImplemented
        return (
            self.t0 == other.t0
            and self.order == other.order
            and self.alpha.shape == other.alpha.shape
            and np.array_equal(self.alpha, other.alpha)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class IntegralTerm:
    kernel: DataFunction

    def __eq__(self, other):
        if not isinstance(other, IntegralTerm):
            return NotImplemented
        return self.kernel == other.kernel

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BoundaryOperator:
    r: int
    m: int
    point_terms: tuple = ()
    integral_terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "point_terms", tuple(self.point_terms))
        object.__setattr__(self, "integral_terms", tuple(self.integral_terms))
        for i, term in enumerate(self.point_terms):
            if term.alpha.shape != (self.r, self.m):
                raise DimensionMismatch(
                    f"point term {i}: matrix shape {term.alpha.shape}, "
                    f"expected {(self.r, self.m)}"
                )
        for i, term in enumerate(self.integral_terms):
            if tuple(term.kernel.value_shape) != (self.r, self.m):
                raise DimensionMismatch(
                    f"integral term {i}: kernel shape {term.kernel.value_shape}, "
                    f"expected {(self.r, self.m)}"
                )

    def validate(self, a, b, s, p):
        """Check points against ``[a, b]`` and orders against ``s - 1/p``."""
        bound = s - 1.0 / p
        slack = DOMAIN_SLACK * max(1.0, b - a)
        for i, term in enumerate(self.point_terms):
            if not (a - slack <= term.t0 <= b + slack):
                raise OutOfDomain(f"point term {i}: t={term.t0} outside [{a}, {b}]")
            if not term.order < bound:
                raise InvalidOrder(
                    f"point term {i}: order {term.order} violates "
                    f"0 <= order < s - 1/p = {bound:g}"
                )
        for i, term in enumerate(self.integral_terms):
            if term.kernel.a != a or term.kernel.b != b:
                raise OutOfDomain(f"integral term {i}: kernel domain differs from [{a}, {b}]")

    def scaled(self, lam):
        return BoundaryOperator(
            self.r,
            self.m,
            [PointTerm(t.t0, t.order, lam * t.alpha) for t in self.point_terms],
            [IntegralTerm(t.kernel.map_payload(lambda x: lam * x))
             for t in self.integral_terms],
        )

    def __eq__(self, other):
        if not isinstance(other, BoundaryOperator):
            return NotImplemented
        return (
            self.r == other.r
            and self.m == other.m
            and len(self.point_terms) == len(other.point_terms)
            and len(self.integral_terms) == len(other.integral_terms)
            and all(x == y for x, y in zip(self.point_terms, other.point_terms))
            and all(x == y for x, y in zip(self.integral_terms, other.integral_terms))
        )

    __hash__ = None


def caputo_derivative(y, beta, t, a, grid_size=DEFAULT_GRID):
    """Caputo derivative of order ``beta`` at ``t`` with lower terminal ``a``.

    With ``n = ceil(beta)`` the integrand ``y^(n)`` is sampled on ``grid_size``
    uniform intervals of ``[a, t]`` and the weakly singular kernel
    ``(t - tau)^(n - beta - 1)`` is integrated exactly against its piecewise
    linear interpolant.
    """
    beta = float(beta)
    if is_integer_order(beta):
        raise IntegerOrder(f"order {beta} is an integer; use a plain derivative")
    if beta <= 0:
        raise ValueError(f"Caputo order must be positive, got {beta}")
    t = float(t)
    a = float(a)
    if t < a:
        raise OutOfDomain(f"t={t} lies left of the lower terminal {a}")
    n = math.ceil(beta)
    alpha = n - beta

    if t == a:
        shape = np.shape(y.derivative(n, a))
        return np.zeros(shape, dtype=np.complex128)

    tau = np.linspace(a, t, grid_size + 1)
    g = np.asarray(y.derivative(n, tau), dtype=np.complex128)
    w = kernels.caputo_weights(grid_size, alpha)
    h = (t - a) / grid_size
    return h**alpha / math.gamma(alpha + 2.0) * np.tensordot(w, g, axes=(0, 0))


def _grid_size_for(y, grid_size):
    if grid_size is not None:
        return int(grid_size)
    return int(getattr(y, "grid_size", DEFAULT_GRID))


def apply_boundary(B, y, problem=None, *, grid_size=None, interval=None):
    """Evaluate ``B y``.

    ``[a, b]`` comes from ``problem.interval`` or ``interval``. Integral terms
    use composite Simpson on ``grid_size`` uniform intervals, as do Caputo
    terms on ``[a, t0]``; the default is ``y.grid_size`` when present.
    """
    if problem is not None:
        a, b = problem.interval.a, problem.interval.b
    elif interval is not None:
        a, b = interval
    else:
        a, b = y.a, y.b
    n = _grid_size_for(y, grid_size)

    out = None

    def add(x):
        nonlocal out
        out = x if out is None else out + x

    for term in B.point_terms:
        if is_integer_order(term.order):
            k = int(term.order)
            v = y(term.t0) if k == 0 else y.derivative(k, term.t0)
        else:
            v = caputo_derivative(y, term.order, term.t0, a, grid_size=n)
        add(np.tensordot(term.alpha, v, axes=(1, 0)))

    if B.integral_terms:
        nodes = np.linspace(a, b, n + 1)
        values = np.asarray(y(nodes), dtype=np.complex128)
        for term in B.integral_terms:
            K = term.kernel(nodes)
            integrand = np.einsum("nrm,nm...->nr...", K, values)
            add(simpson(integrand, a, b))

    if out is None:
        tail = np.shape(y(a))[1:]
        out = np.zeros((B.r,) + tail, dtype=np.complex128)
    return np.asarray(out, dtype=np.complex128)
