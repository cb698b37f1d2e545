"""Discrete Sobolev-Slobodetsky norm, used as a regularity diagnostic.

``|f|_{s,p} = |f|_{[s],p} + (int int |f^([s])(x) - f^([s])(y)|^p
/ |x - y|^(1 + {s} p) dx dy)^(1/p)``, where the integer-order part is the
sum of the ``L^p`` norms of ``f, f', ..., f^([s])``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidSpace, MissingDerivatives
from .quadrature import simpson_weights


@dataclass(frozen=True)
class NormBreakdown:
    integer_part_norm: float
    seminorm: float
    total: float
    grid_size: int

    def to_dict(self):
        return {
            "integer_part_norm": self.integer_part_norm,
            "seminorm": self.seminorm,
            "total": self.total,
            "grid_size": self.grid_size,
        }


def _check_space(s, p):
    if not math.isfinite(s) or s <= 1 or float(s).is_integer():
        raise InvalidSpace(f"s must be a non-integer greater than 1, got {s}")
    if not math.isfinite(p) or p < 1:
        raise InvalidSpace(f"p must satisfy 1 <= p < inf, got {p}")


def _lp_norm(g, w, a, b, p):
    n = g.shape[0] - 1
    return ((b - a) * (np.dot(w, np.abs(g) ** p) / (3 * n))) ** (1.0 / p)


def sobolev_slobodetsky_norm(samples, a, b, s, p):
    """Norm of a scalar function from uniform samples of its derivatives.

    ``samples[k]`` holds ``f^(k)`` at the ``N + 1`` uniform nodes of
    ``[a, b]`` for ``k = 0 .. [s]``.
    """
    s = float(s)
    p = float(p)
    _check_space(s, p)
    whole = math.floor(s)
    frac = s - whole
    if len(samples) < whole + 1:
        raise MissingDerivatives(
            f"need derivatives 0..{whole} for s={s}, got {len(samples)} sample arrays"
        )
    samples = [np.asarray(g) for g in samples[: whole + 1]]
    n = samples[0].shape[0] - 1
    if any(g.shape != (n + 1,) for g in samples):
        raise MissingDerivatives("derivative samples must share one grid")

    w = simpson_weights(n)
    integer_part = float(sum(_lp_norm(g, w, a, b, p) for g in samples))
    h = (b - a) / n
    seminorm = kernels.gagliardo_sum(samples[whole], h, p, frac) ** (1.0 / p)
    return NormBreakdown(integer_part, seminorm, integer_part + seminorm, n)


def function_norm(func, a, b, s, p, grid_size=1024):
    """Norm of each component of ``func`` (anything with ``derivative(k, t)``).

    Returns one breakdown per component of a vector-valued function, or a
    single breakdown for a scalar function.
    """
    _check_space(float(s), float(p))
    x = np.linspace(a, b, grid_size + 1)
    derivs = [np.asarray(func.derivative(k, x)) for k in range(math.floor(s) + 1)]
    if derivs[0].ndim == 1:
        return sobolev_slobodetsky_norm(derivs, a, b, s, p)
    return [
        sobolev_slobodetsky_norm([d[:, i] for d in derivs], a, b, s, p)
        for i in range(derivs[0].shape[1])
    ]
