"""Quadrature weights and cubic Hermite dense output on uniform grids."""

import numpy as np


def simpson_weights(n):
    """Integer-valued composite Simpson weights for ``n`` uniform intervals.

    The integral is ``(b - a) * (w @ g) / (3 n)`` for even ``n``. Odd ``n``
    uses Simpson on the first ``n - 3`` intervals and the 3/8 rule on the
    last three, so the weights are scaled to share the same normalization
    (they are no longer integers). Exact for cubics in both cases.
    """
    if n < 2:
        raise ValueError("Simpson quadrature needs at least two intervals")
    w = np.zeros(n + 1)
    body = n if n % 2 == 0 else n - 3
    if body > 0:
        w[:body + 1:2] += 2.0
        w[1:body:2] += 4.0
        w[0] -= 1.0
        w[body] -= 1.0
    if n % 2 == 1:
        # 3/8 rule: (3h/8)(1, 3, 3, 1) == (h/3) * (9/8)(1, 3, 3, 1)
        w[body:body + 4] += np.array([1.0, 3.0, 3.0, 1.0]) * 9.0 / 8.0
    return w


def simpson(values, a, b, axis=0):
    """Composite Simpson integral of uniform samples over ``[a, b]``."""
    values = np.moveaxis(np.asarray(values), axis, 0)
    n = values.shape[0] - 1
    w = simpson_weights(n)
    return (b - a) * (np.tensordot(w, values, axes=(0, 0)) / (3 * n))


def hermite_eval(grid, values, derivs, t):
    """Cubic Hermite interpolation of node ``values`` / ``derivs``.

    ``grid`` is strictly increasing; ``t`` may be a scalar or 1-d array.
    Node hits return the stored value exactly.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    n = grid.shape[0] - 1
    idx = np.clip(np.searchsorted(grid, t_arr, side="right") - 1, 0, n - 1)
    t0 = grid[idx]
    h = grid[idx + 1] - t0
    s = (t_arr - t0) / h
    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2

    extra = (None,) * (values.ndim - 1)

    def c(x):
        return x[(slice(None),) + extra]

    out = (
        c(h00) * values[idx]
        + c(h10 * h) * derivs[idx]
        + c(h01) * values[idx + 1]
        + c(h11 * h) * derivs[idx + 1]
    )
    # exact node values (the polynomial is exact there up to rounding)
    hit = s == 0.0
    if np.any(hit):
        out[hit] = values[idx[hit]]
    hit = s == 1.0
    if np.any(hit):
        out[hit] = values[idx[hit] + 1]
    if np.ndim(t) == 0:
        return out[0]
    return out
