"""Hot numeric loops.

Each kernel has a numba implementation (``*_numba``) and a numpy twin
(``*_numpy``) with identical semantics. The public name dispatches on
:data:`fredholm_bvp._jit.USE_NUMBA`.
"""

import numpy as np

from . import _jit
from ._jit import njit

# {{{ RK4 for the homogeneous matrix ODE  Y' = -A(t) Y


@njit
def _matmul_into(out, x, y):
    m, k = x.shape
    n = y.shape[1]
    for i in range(m):
        for j in range(n):
            acc = 0j
            for l in range(k):
                acc += x[i, l] * y[l, j]
            out[i, j] = acc


@njit
def rk4_fundamental_numba(a_half, h):
    nsteps = (a_half.shape[0] - 1) // 2
    m = a_half.shape[1]
    out = np.empty((nsteps + 1, m, m), dtype=np.complex128)
    y = np.eye(m, dtype=np.complex128)
    out[0] = y
    k1 = np.empty((m, m), dtype=np.complex128)
    k2 = np.empty((m, m), dtype=np.complex128)
    k3 = np.empty((m, m), dtype=np.complex128)
    k4 = np.empty((m, m), dtype=np.complex128)
    tmp = np.empty((m, m), dtype=np.complex128)
    for i in range(nsteps):
        a0 = a_half[2 * i]
        am = a_half[2 * i + 1]
        a1 = a_half[2 * i + 2]
        _matmul_into(k1, a0, y)
        for p in range(m):
            for q in range(m):
                tmp[p, q] = y[p, q] - 0.5 * h * k1[p, q]
        _matmul_into(k2, am, tmp)
        for p in range(m):
            for q in range(m):
                tmp[p, q] = y[p, q] - 0.5 * h * k2[p, q]
        _matmul_into(k3, am, tmp)
        for p in range(m):
            for q in range(m):
                tmp[p, q] = y[p, q] - h * k3[p, q]
        _matmul_into(k4, a1, tmp)
        for p in range(m):
            for q in range(m):
                y[p, q] = y[p, q] - h / 6.0 * (
                    k1[p, q] + 2.0 * k2[p, q] + 2.0 * k3[p, q] + k4[p, q]
                )
        out[i + 1] = y
    return out


def rk4_fundamental_numpy(a_half, h):
    nsteps = (a_half.shape[0] - 1) // 2
    m = a_half.shape[1]
    out = np.empty((nsteps + 1, m, m), dtype=np.complex128)
    y = np.eye(m, dtype=np.complex128)
    out[0] = y
    for i in range(nsteps):
        a0, am, a1 = a_half[2 * i], a_half[2 * i + 1], a_half[2 * i + 2]
        k1 = a0 @ y
        k2 = am @ (y - 0.5 * h * k1)
        k3 = am @ (y - 0.5 * h * k2)
        k4 = a1 @ (y - h * k3)
        y = y - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    return out


def rk4_fundamental(a_half, h):
    """Fixed-step classical RK4 for ``Y' = -A Y``, ``Y(a) = I``.

    ``a_half`` holds ``A`` sampled at the ``2N + 1`` half-step points
    ``a, a + h/2, a + h, ...``; returns ``Y`` at the ``N + 1`` nodes.
    """
    a_half = np.ascontiguousarray(a_half, dtype=np.complex128)
    if _jit.USE_NUMBA:
        return rk4_fundamental_numba(a_half, float(h))
    return rk4_fundamental_numpy(a_half, float(h))


# }}}

# {{{ product-trapezoidal weights for the Caputo integral


@njit
def caputo_weights_numba(n, alpha):
    ap1 = alpha + 1.0
    # one pow per node: w[j] is a second difference of k^(alpha + 1)
    pw = np.empty(n + 1)
    for k in range(n + 1):
        pw[k] = float(k) ** ap1
    w = np.empty(n + 1)
    w[0] = pw[n - 1] - (n - 1.0 - alpha) * float(n) ** alpha
    for j in range(1, n):
        k = n - j
        w[j] = pw[k + 1] - 2.0 * pw[k] + pw[k - 1]
    w[n] = 1.0
    return w


def caputo_weights_numpy(n, alpha):
    ap1 = alpha + 1.0
    pw = np.arange(n + 1, dtype=np.float64) ** ap1
    w = np.empty(n + 1)
    w[0] = pw[n - 1] - (n - 1.0 - alpha) * float(n) ** alpha
    k = np.arange(n - 1, 0, -1)
    w[1:n] = pw[k + 1] - 2.0 * pw[k] + pw[k - 1]
    w[n] = 1.0
    return w


def caputo_weights(n, alpha):
    """Weights ``w`` such that, on a uniform grid ``tau_j = a + j h``,

    ``int_a^{tau_n} (tau_n - tau)^(alpha - 1) g(tau) dtau``
    ``= h**alpha / (alpha (alpha + 1)) * sum_j w[j] g(tau_j)``

    exactly when ``g`` is piecewise linear on the grid. ``0 < alpha < 1``.
    """
    if n < 1:
        raise ValueError("need at least one interval")
    if _jit.USE_NUMBA:
        return caputo_weights_numba(int(n), float(alpha))
    return caputo_weights_numpy(int(n), float(alpha))


# }}}

# {{{ Gagliardo double sum


@njit
def _abs_pow(x, p):
    if p == 2.0:
        return x * x
    if p == 1.0:
        return x
    return x**p


@njit
def gagliardo_sum_numba(g, h, p, expo):
    n = g.shape[0]
    total = 0.0
    # by offset d = j - i, so the distance factor is computed once per d
    for d in range(1, n):
        acc = 0.0
        for i in range(n - d):
            wij = 1.0
            if i == 0:
                wij *= 0.5
            if i + d == n - 1:
                wij *= 0.5
            acc += wij * _abs_pow(abs(g[i + d] - g[i]), p)
        total += acc / (d * h) ** expo
    return 2.0 * total * h * h


def gagliardo_sum_numpy(g, h, p, expo):
    n = g.shape[0]
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    total = 0.0
    for d in range(1, n):
        diff = np.abs(g[d:] - g[:-d])
        total += np.dot(w[d:] * w[:-d], diff**p) / (d * h) ** expo
    return 2.0 * total * h * h


def gagliardo_sum(g, h, p, sigma):
    """Trapezoidal double sum of ``|g_i - g_j|^p / |x_i - x_j|^(1 + sigma p)``.

    Diagonal cells ``i == j`` are omitted.
    """
    g = np.ascontiguousarray(g)
    if not np.iscomplexobj(g):
        g = g.astype(np.float64)
    expo = 1.0 + sigma * p
    if _jit.USE_NUMBA:
        return float(gagliardo_sum_numba(g, float(h), float(p), expo))
    return float(gagliardo_sum_numpy(g, float(h), float(p), expo))


# }}}

