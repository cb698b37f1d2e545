"""Independent oracles for the characteristic-matrix pipeline.

Two closed forms are available without solving any ODE:

* constant ``A`` with conditions ``sum_k alpha_k y^(k)(a)``: since
  ``Y^(k)(a) = (-A)^k``, ``M = sum_k alpha_k (-A)^k``;
* ``A = 0`` with point conditions: ``Y = I``, every derivative of positive
  (integer or Caputo) order of a constant vanishes, so ``M`` is the sum of
  the order-zero matrices.

The oracles here use plain matrix powers and sums, never the fundamental
matrix, the boundary evaluator or the SVD wrapper of the pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryOperator, IntegralTerm, PointTerm, apply_boundary
from .characteristic import (
    UNCERTAIN_FACTOR,
    characteristic_matrix,
    default_rank_tolerance,
    fredholm_analysis,
)
from .errors import DimensionMismatch, NoApplicableOracle
from .functions import DataFunction
from .fundamental import DEFAULT_GRID, fundamental_matrix
from .problem import Interval, ProblemSpec, SpaceParams

EXAMPLE1_TOL = 1e-8
EXAMPLE2_TOL = 1e-4
COLUMN_IDENTITY_TOL = 1e-8
FRACTIONAL_ORDERS = (0.3, 0.5, 0.7)


@dataclass(frozen=True)
class OracleReport:
    oracle_name: str
    max_abs_error: float
    tolerance: float
    details: list = field(default_factory=list)

    @property
    def passed(self):
        return bool(self.max_abs_error <= self.tolerance)

    def to_dict(self):
        return {
            "oracle_name": self.oracle_name,
            "max_abs_error": self.max_abs_error,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "details": self.details,
        }


def _numerical_rank(M):
    sv = np.linalg.svd(M, compute_uv=False) if M.size else np.zeros(0)
    tol = default_rank_tolerance(sv, M.shape)
    return int(np.count_nonzero(sv > tol)), sv, tol


# {{{ closed forms


def example1_characteristic(A, alphas):
    """``sum_k alphas[k] @ (-A)^k`` by repeated multiplication."""
    A = np.asarray(A, dtype=np.complex128)
    if not len(alphas):
        raise DimensionMismatch("need at least one alpha matrix")
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got shape {A.shape}")
    m = A.shape[0]
    alphas = [np.asarray(x, dtype=np.complex128) for x in alphas]
    r = alphas[0].shape[0]
    out = np.zeros((r, m), dtype=np.complex128)
    power = np.eye(m, dtype=np.complex128)
    for k, alpha in enumerate(alphas):
        if alpha.shape != (r, m):
            raise DimensionMismatch(f"alpha[{k}] has shape {alpha.shape}, expected {(r, m)}")
        if k:
            power = power @ (-A)
        out += alpha @ power
    return out


def example1_fredholm_numbers(A, alphas):
    """``(dim ker, dim coker) = (m - rank, r - rank)`` of the closed form."""
    M = example1_characteristic(A, alphas)
    rank, _, _ = _numerical_rank(M)
    r, m = M.shape
    return m - rank, r - rank


def example2_characteristic(alpha00, alpha10):
    alpha00 = np.asarray(alpha00, dtype=np.complex128)
    alpha10 = np.asarray(alpha10, dtype=np.complex128)
    if alpha00.shape != alpha10.shape:
        raise DimensionMismatch(f"shapes differ: {alpha00.shape} vs {alpha10.shape}")
    return alpha00 + alpha10


# }}}

# {{{ pipeline bindings


def classify(problem):
    """``"example1"``, ``"example2"`` or None for problems no oracle covers."""
    B = problem.boundary
    if B.integral_terms or problem.A.kind != "constant":
        return None
    if all(t.t0 == problem.a and float(t.order).is_integer() for t in B.point_terms):
        return "example1"
    if problem.A.is_zero():
        return "example2"
    return None


def oracle_matrix(problem):
    kind = classify(problem)
    B = problem.boundary
    if kind == "example1":
        n = max((int(t.order) for t in B.point_terms), default=0) + 1
        alphas = [np.zeros((B.r, B.m), dtype=np.complex128) for _ in range(n)]
        for t in B.point_terms:
            alphas[int(t.order)] = alphas[int(t.order)] + t.alpha
        return kind, example1_characteristic(problem.A.payload, alphas)
    if kind == "example2":
        zero = np.zeros((B.r, B.m), dtype=np.complex128)
        order0 = [t.alpha for t in B.point_terms if t.order == 0]
        # group into the two-point form; extra points simply add up
        first = sum(order0[:1], zero)
        rest = sum(order0[1:], zero)
        return kind, example2_characteristic(first, rest)
    raise NoApplicableOracle(
        "cross-check needs constant A with integer-order conditions at a, "
        "or A = 0 with point conditions only"
    )


def cross_check(problem, grid_size=DEFAULT_GRID, rank_tolerance=None):
    """Compare pipeline ``M`` and Fredholm numbers with the closed form."""
    kind, M_oracle = oracle_matrix(problem)
    tol = EXAMPLE1_TOL if kind == "example1" else EXAMPLE2_TOL
    Y = fundamental_matrix(problem, grid_size)
    M = characteristic_matrix(Y, problem.boundary, problem, rank_tolerance)
    report = fredholm_analysis(M)

    rank, _, _ = _numerical_rank(M_oracle)
    r, m = M_oracle.shape
    expected = {"rank": rank, "dim_kernel": m - rank, "dim_cokernel": r - rank, "index": m - r}
    got = {k: getattr(report, k) for k in expected}
    err = float(np.max(np.abs(M.entries - M_oracle))) if M_oracle.size else 0.0
    mismatch = sorted(k for k in expected if expected[k] != got[k])
    details = [{"class": kind, "entry_error": err, "expected": expected, "got": got,
                "mismatched": mismatch}]
    return OracleReport(f"cross_check[{kind}]", math.inf if mismatch else err, tol, details)


def column_identity_check(problem, n_vectors=5, seed=0, grid_size=DEFAULT_GRID):
    """``B(Y(.) q)`` against ``M q`` for random ``q``; relative error."""
    rng = np.random.default_rng(seed)
    Y = fundamental_matrix(problem, grid_size)
    M = characteristic_matrix(Y, problem.boundary, problem)
    state = Y.as_state()
    norm_M = float(np.linalg.norm(M.entries, 2)) if M.entries.size else 0.0
    worst = 0.0
    details = []
    for _ in range(n_vectors):
        q = unit_disk(rng, problem.m)
        lhs = apply_boundary(problem.boundary, state.combine(q), problem)
        rhs = M.entries @ q
        rel = float(np.linalg.norm(lhs - rhs)) / (1.0 + norm_M * float(np.linalg.norm(q)))
        worst = max(worst, rel)
        details.append({"relative_error": rel})
    return OracleReport("column_identity", worst, COLUMN_IDENTITY_TOL, details)


def _gap(Y0, Y1):
    return float(np.max(np.linalg.norm(Y1.values - Y0.values, ord=2, axis=(1, 2))))


def fundamental_gap(problem, direction, eps, grid_size=DEFAULT_GRID):
    """Max over nodes of ``|Y_{A + eps dA}(t_i) - Y_A(t_i)|_2``."""
    Y0 = fundamental_matrix(problem, grid_size)
    Y1 = fundamental_matrix(perturb_coefficient(problem, direction, eps), grid_size)
    return _gap(Y0, Y1)


def perturb_coefficient(problem, direction, eps):
    direction = np.asarray(direction, dtype=np.complex128)
    A = problem.A
    if A.kind == "polynomial":
        def shift(x):
            x[0] += eps * direction
            return x
    else:
        def shift(x):
            return x + eps * direction
    return problem.replace(A=A.map_payload(shift))


def continuity_probe(problem, perturbation_scales, direction=None, seed=0,
                     grid_size=DEFAULT_GRID):
    """Local Lipschitz behaviour of ``A -> Y`` in the max-node norm.

    Passes when the gap shrinks strictly with the scale and
    ``gap / scale`` varies by less than a factor 10; the reported error is
    ``log10`` of that spread (infinite when monotonicity fails).
    """
    scales = [float(e) for e in perturbation_scales]
    if any(e <= 0 for e in scales) or any(x <= y for x, y in zip(scales, scales[1:])):
        raise ValueError("perturbation scales must be positive and strictly decreasing")
    m = problem.m
    if direction is None:
        rng = np.random.default_rng(seed)
        direction = unit_disk(rng, (m, m))
    direction = np.asarray(direction, dtype=np.complex128)
    direction = direction / np.linalg.norm(direction)

    Y0 = fundamental_matrix(problem, grid_size)
    gaps = []
    for eps in scales:
        Y1 = fundamental_matrix(perturb_coefficient(problem, direction, eps), grid_size)
        gaps.append(_gap(Y0, Y1))
    ratios = [g / e for g, e in zip(gaps, scales)]
    monotone = all(x > y for x, y in zip(gaps, gaps[1:])) and all(g > 0 for g in gaps)
    spread = max(ratios) / min(ratios) if monotone else math.inf
    details = [{"scale": e, "gap": g, "ratio": q} for e, g, q in zip(scales, gaps, ratios)]
    return OracleReport("continuity", math.log10(spread), 1.0, details)


# }}}

# {{{ random corpus


def unit_disk(rng, shape):
    """Complex entries uniform in the closed unit disk."""
    rad = np.sqrt(rng.uniform(size=shape))
    ang = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    return rad * np.exp(1j * ang)


def _low_rank(rng, r, m, rank):
    # rank >= 1: a target of rank 0 would leave M as pure cancellation noise,
    # whose relative-threshold rank is meaningless
    return unit_disk(rng, (r, rank)) @ unit_disk(rng, (rank, m)) / rank


def well_posed(M):
    """No singular value within a factor 100 of the default rank threshold."""
    sv = np.linalg.svd(M, compute_uv=False) if M.size else np.zeros(0)
    tol = default_rank_tolerance(sv, M.shape)
    if tol == 0:
        return True
    return not np.any((sv > tol / UNCERTAIN_FACTOR) & (sv < tol * UNCERTAIN_FACTOR))


def random_example1(rng, *, max_m=4, max_r=5, max_n=3, deficient=None, length=None):
    """Constant ``A``, conditions ``sum_k alpha_k y^(k)(a) = c``."""
    while True:
        m = int(rng.integers(1, max_m + 1))
        r = int(rng.integers(1, max_r + 1))
        n = int(rng.integers(1, max_n + 1))
        A = unit_disk(rng, (m, m))
        alphas = [unit_disk(rng, (r, m)) for _ in range(n)]
        make_deficient = rng.uniform() < 0.3 if deficient is None else deficient
        if make_deficient and min(r, m) >= 2:
            target = int(rng.integers(1, min(r, m)))
            alphas[0] = _low_rank(rng, r, m, target) - (
                example1_characteristic(A, [np.zeros((r, m))] + alphas[1:])
            )
        if not well_posed(example1_characteristic(A, alphas)):
            continue
        a = float(rng.uniform(-1.0, 1.0))
        L = float(rng.choice([0.5, 1.0, 2.0])) if length is None else float(length)
        return example1_problem(A, alphas, a, a + L, rng)


def example1_problem(A, alphas, a, b, rng=None, f=None, c=None):
    m = np.asarray(A).shape[0]
    r = np.asarray(alphas[0]).shape[0]
    n = len(alphas)
    rng = np.random.default_rng(0) if rng is None else rng
    terms = [PointTerm(a, k, alpha) for k, alpha in enumerate(alphas)]
    f = unit_disk(rng, m) if f is None else f
    c = unit_disk(rng, r) if c is None else c
    return ProblemSpec(
        m,
        Interval(a, b),
        SpaceParams(n + 0.5, 2.0),
        DataFunction.constant(A, a, b),
        DataFunction.constant(f, a, b),
        BoundaryOperator(r, m, terms),
        c,
    )


def random_example2(rng, *, max_m=4, max_r=5, deficient=None, orders=FRACTIONAL_ORDERS,
                    n_extra=None):
    """``A = 0``, conditions at two points with fractional terms."""
    while True:
        m = int(rng.integers(1, max_m + 1))
        r = int(rng.integers(1, max_r + 1))
        alpha00 = unit_disk(rng, (r, m))
        alpha10 = unit_disk(rng, (r, m))
        make_deficient = rng.uniform() < 0.3 if deficient is None else deficient
        if make_deficient and min(r, m) >= 2:
            alpha10 = _low_rank(rng, r, m, int(rng.integers(1, min(r, m)))) - alpha00
        if not well_posed(alpha00 + alpha10):
            continue
        a = float(rng.uniform(-1.0, 1.0))
        b = a + float(rng.choice([0.5, 1.0, 2.0]))
        t0, t1 = sorted(rng.uniform(a, b, size=2))
        k = int(rng.integers(1, 4)) if n_extra is None else n_extra
        extra = [
            (float(rng.choice(orders)), unit_disk(rng, (r, m)), int(rng.integers(0, 2)))
            for _ in range(k)
        ]
        return example2_problem(alpha00, alpha10, a, b, t0, t1, extra, rng)


def example2_problem(alpha00, alpha10, a, b, t0, t1, extra=(), rng=None, s=2.5, p=2.0):
    """``extra`` is a list of ``(order, matrix, which_point)`` with point 0 or 1."""
    r, m = np.asarray(alpha00).shape
    rng = np.random.default_rng(0) if rng is None else rng
    terms = [PointTerm(t0, 0, alpha00), PointTerm(t1, 0, alpha10)]
    for order, alpha, which in extra:
        terms.append(PointTerm(t1 if which else t0, order, alpha))
    return ProblemSpec(
        m,
        Interval(a, b),
        SpaceParams(s, p),
        DataFunction.constant(np.zeros((m, m)), a, b),
        DataFunction.constant(unit_disk(rng, m), a, b),
        BoundaryOperator(r, m, terms),
        unit_disk(rng, r),
    )


def random_general(rng, *, max_m=3, max_r=4, square=False):
    """Mixed problem: polynomial or constant ``A``, polynomial ``f``, point
    terms of integer and fractional order anywhere, and integral terms."""
    m = int(rng.integers(1, max_m + 1))
    r = m if square else int(rng.integers(1, max_r + 1))
    a = float(rng.uniform(-1.0, 1.0))
    b = a + float(rng.choice([0.5, 1.0, 1.5]))
    if rng.uniform() < 0.5:
        A = DataFunction.constant(unit_disk(rng, (m, m)), a, b)
    else:
        A = DataFunction.polynomial(unit_disk(rng, (int(rng.integers(2, 4)), m, m)), a, b)
    f = DataFunction.polynomial(unit_disk(rng, (int(rng.integers(1, 4)), m)), a, b)
    terms = []
    for _ in range(int(rng.integers(1, 4))):
        order = float(rng.choice([0.0, 0.0, 1.0, 2.0, 0.3, 0.5, 0.7, 1.5]))
        t0 = float(rng.choice([a, b, rng.uniform(a, b)]))
        terms.append(PointTerm(t0, order, unit_disk(rng, (r, m))))
    integrals = []
    if rng.uniform() < 0.5:
        K = DataFunction.polynomial(unit_disk(rng, (2, r, m)), a, b)
        integrals.append(IntegralTerm(K))
    return ProblemSpec(
        m,
        Interval(a, b),
        SpaceParams(2.75, 2.0),
        A,
        f,
        BoundaryOperator(r, m, terms, integrals),
        unit_disk(rng, r),
    )


def builtin_corpus(size=200, seed=20240611):
    """Constant-coefficient and two-point instances, alternating."""
    rng = np.random.default_rng(seed)
    return [
        random_example1(rng) if i % 2 == 0 else random_example2(rng) for i in range(size)
    ]


def run_corpus(problems, grid_size=DEFAULT_GRID, rank_tolerance=None, identity_every=10,
               continuity_every=50, seed=0):
    """Cross-check every instance; column identity and continuity on a subsample."""
    reports = []
    for i, prob in enumerate(problems):
        reports.append(cross_check(prob, grid_size, rank_tolerance))
        if identity_every and i % identity_every == 0:
            reports.append(column_identity_check(prob, seed=seed + i, grid_size=grid_size))
        if continuity_every and i % continuity_every == 0:
            reports.append(continuity_probe(prob, [1e-2, 1e-3, 1e-4], seed=seed + i,
                                            grid_size=grid_size))
    return reports


# }}}
