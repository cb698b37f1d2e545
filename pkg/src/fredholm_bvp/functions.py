"""Finitely described functions on ``[a, b]``: constant, polynomial, sampled.

These back the coefficient ``A(t)``, the right-hand side ``f(t)`` and the
integral kernels of boundary operators. Values are complex arrays of a fixed
``value_shape`` (``(m, m)``, ``(m,)``, ``(r, m)`` or ``()``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline, make_interp_spline

from .errors import DimensionMismatch, OutOfDomain, UnsupportedOrder

KINDS = ("constant", "polynomial", "sampled")
INTERPOLATION_ORDERS = {1: "linear", 3: "cubic"}

#: relative slack when checking ``t`` against ``[a, b]``
DOMAIN_SLACK = 1e-12


def _frozen(x):
    x = np.array(x, dtype=np.complex128)
    x.flags.writeable = False
    return x


def check_domain(t, a, b):
    t = np.asarray(t, dtype=np.float64)
    slack = DOMAIN_SLACK * max(1.0, b - a)
    if np.any(t < a - slack) or np.any(t > b + slack) or not np.all(np.isfinite(t)):
        bad = t[(t < a - slack) | (t > b + slack) | ~np.isfinite(t)] if t.ndim else t
        raise OutOfDomain(f"t={np.ravel(bad)[0]!r} outside [{a}, {b}]")


@dataclass(frozen=True, eq=False)
class DataFunction:
    """A complex array-valued function of one real variable.

    * ``constant``: ``payload`` has ``value_shape``.
    * ``polynomial``: ``payload[k]`` multiplies ``(t - a)**k``.
    * ``sampled``: ``payload[i]`` is the value at ``nodes[i]``, interpolated
      with a spline of degree ``order`` (1 or 3).
    """

    kind: str
    payload: np.ndarray
    a: float
    b: float
    nodes: np.ndarray | None = None
    order: int = 3
    _spline: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        object.__setattr__(self, "payload", _frozen(self.payload))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if self.kind == "polynomial" and self.payload.shape[0] == 0:
            raise DimensionMismatch("polynomial needs at least one coefficient")
        if self.kind == "sampled":
            if self.order not in INTERPOLATION_ORDERS:
                raise ValueError(f"interpolation order must be 1 or 3, got {self.order}")
            nodes = np.array(self.nodes, dtype=np.float64)
            nodes.flags.writeable = False
            object.__setattr__(self, "nodes", nodes)
            if nodes.ndim != 1 or nodes.shape[0] != self.payload.shape[0]:
                raise DimensionMismatch("sampled nodes and values differ in length")
            if nodes.shape[0] < 2 or np.any(np.diff(nodes) <= 0):
                raise ValueError("sampled nodes must be strictly increasing")
            if nodes[0] > self.a or nodes[-1] < self.b:
                raise ValueError(f"sampled nodes do not cover [{self.a}, {self.b}]")
            if self.order == 3 and nodes.shape[0] >= 4:
                spline = CubicSpline(nodes, self.payload, axis=0)
            else:
                spline = make_interp_spline(nodes, self.payload, k=1, axis=0)
            object.__setattr__(self, "_spline", spline)

    # {{{ constructors

    @classmethod
    def constant(cls, value, a, b):
        return cls("constant", value, a, b)

    @classmethod
    def polynomial(cls, coefficients, a, b):
        return cls("polynomial", coefficients, a, b)

    @classmethod
    def sampled(cls, nodes, values, a, b, order=3):
        return cls("sampled", values, a, b, nodes=nodes, order=order)

    # }}}

    @property
    def value_shape(self):
        if self.kind == "constant":
            return self.payload.shape
        return self.payload.shape[1:]

    @property
    def max_derivative_order(self):
        """Highest derivative order this representation supports."""
        if self.kind == "sampled":
            return 1
        return math.inf

    def is_zero(self):
        return not np.any(self.payload)

    def map_payload(self, func):
        """Same kind and nodes, payload transformed by ``func``."""
        return DataFunction(
            self.kind, func(np.array(self.payload)), self.a, self.b,
            nodes=self.nodes, order=self.order,
        )

    def __call__(self, t):
        return self.derivative(0, t)

    def derivative(self, k, t):
        """``k``-th derivative at ``t`` (scalar or 1-d array)."""
        k = int(k)
        if k < 0:
            raise ValueError("derivative order must be nonnegative")
        check_domain(t, self.a, self.b)
        scalar = np.ndim(t) == 0
        t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
        shape = self.value_shape

        if self.kind == "constant":
            if k == 0:
                out = np.broadcast_to(self.payload, t_arr.shape + shape).copy()
            else:
                out = np.zeros(t_arr.shape + shape, dtype=np.complex128)
        elif self.kind == "polynomial":
            coeffs = np.array(self.payload)
            deg = coeffs.shape[0] - 1
            if k > deg:
                out = np.zeros(t_arr.shape + shape, dtype=np.complex128)
            else:
                # d^k/dt^k (t-a)^j = j!/(j-k)! (t-a)^(j-k)
                j = np.arange(k, deg + 1)
                fact = np.array([math.perm(int(jj), k) for jj in j], dtype=np.float64)
                c = coeffs[k:] * fact.reshape((-1,) + (1,) * len(shape))
                x = t_arr - self.a
                out = np.zeros(t_arr.shape + shape, dtype=np.complex128)
                for ck in c[::-1]:  # Horner
                    out = out * x.reshape((-1,) + (1,) * len(shape)) + ck
        else:
            if k > self.max_derivative_order:
                raise UnsupportedOrder(
                    f"sampled data supports derivatives up to order "
                    f"{self.max_derivative_order}, requested {k}"
                )
            spline = self._spline if k == 0 else self._spline.derivative(k)
            out = np.asarray(spline(t_arr), dtype=np.complex128)
        return out[0] if scalar else out

    def __eq__(self, other):
        if not isinstance(other, DataFunction):
            return NotImplemented
        same_nodes = (self.nodes is None and other.nodes is None) or (
            self.nodes is not None
            and other.nodes is not None
            and np.array_equal(self.nodes, other.nodes)
        )
        return (
            self.kind == other.kind
            and self.a == other.a
            and self.b == other.b
            and self.order == other.order
            and same_nodes
            and self.payload.shape == other.payload.shape
            and np.array_equal(self.payload, other.payload)
        )

    __hash__ = None


def evaluate_coefficient(A, t):
    """Value of the coefficient ``A`` at ``t``."""
    return A(t)
