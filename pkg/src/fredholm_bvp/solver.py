"""Solve ``y' + A y = f``, ``B y = c`` through the characteristic matrix.

Every solution is ``y = Y q + y_p``; the boundary condition becomes
``M q = c - B y_p``. The SVD of ``M`` that fixes the rank also gives the
minimum-norm ``q`` and the kernel basis, so the Fredholm report and the
solvability verdict can never disagree.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .boundary import apply_boundary
from .characteristic import (
    FredholmReport,
    characteristic_matrix,
    fredholm_analysis,
    kernel_basis,
)
from .errors import NoSolution, ToleranceConflict
from .fundamental import (
    DEFAULT_GRID,
    StateFunction,
    fundamental_matrix,
    particular_solution,
)
from .problem import encode_array

DEFAULT_CONSISTENCY = 1e-8


class Status(str, enum.Enum):
    UNIQUE = "Unique"
    FAMILY = "Family"
    INCONSISTENT = "Inconsistent"


@dataclass(frozen=True, eq=False)
class BvpSolution:
    status: Status
    report: FredholmReport
    reduced_residual: float
    consistency_tolerance: float
    q_particular: np.ndarray | None = None
    kernel_basis: tuple = ()
    solution: StateFunction | None = None
    homogeneous: StateFunction | None = None
    ode_residual: float | None = None
    boundary_residual: float | None = None

    @property
    def grid(self):
        return None if self.solution is None else self.solution.grid

    @property
    def solution_samples(self):
        return None if self.solution is None else self.solution.values

    def kernel_functions(self):
        """``Y(t) q_k`` for each kernel vector, as state functions."""
        return [self.homogeneous.combine(q) for q in self.kernel_basis]

    def to_dict(self, samples=True):
        doc = {
            "status": self.status.value,
            "report": self.report.to_dict(),
            "reduced_residual": self.reduced_residual,
            "consistency_tolerance": self.consistency_tolerance,
            "q_particular": None if self.q_particular is None else encode_array(self.q_particular),
            "kernel_basis": [encode_array(q) for q in self.kernel_basis],
            "ode_residual": self.ode_residual,
            "boundary_residual": self.boundary_residual,
        }
        if samples and self.solution is not None:
            doc["grid"] = [float(t) for t in self.solution.grid]
            doc["samples"] = encode_array(self.solution.values)
        return doc


def solve(problem, grid_size=DEFAULT_GRID, rank_tolerance=None, consistency_tolerance=None):
    """Classify and solve the boundary-value problem.

    ``consistency_tolerance`` is relative: the reduced system counts as
    consistent when ``|M q - d| <= tol * (1 + |c| + |B y_p|)``.
    """
    rel = DEFAULT_CONSISTENCY if consistency_tolerance is None else float(consistency_tolerance)
    if not rel > 0:
        raise ToleranceConflict(f"consistency tolerance must be positive, got {rel}")

    Y = fundamental_matrix(problem, grid_size)
    yp = particular_solution(Y, problem)
    M = characteristic_matrix(Y, problem.boundary, problem, rank_tolerance)
    report = fredholm_analysis(M)

    Byp = apply_boundary(problem.boundary, yp, problem, grid_size=Y.grid_size)
    d = problem.c - Byp
    scale = 1.0 + float(np.linalg.norm(problem.c)) + float(np.linalg.norm(Byp))
    tol_c = rel * scale
    if tol_c <= M.rank_tolerance:
        raise ToleranceConflict(
            f"consistency threshold {tol_c:.3g} does not exceed the rank "
            f"threshold {M.rank_tolerance:.3g}; the two decisions would conflict"
        )

    k = M.rank
    if k:
        coeffs = (np.conj(M.u[:, :k]).T @ d) / M.singular_values[:k]
        q = np.conj(M.vh[:k]).T @ coeffs
    else:
        q = np.zeros(problem.m, dtype=np.complex128)
    residual = float(np.linalg.norm(M.entries @ q - d))
    basis = tuple(kernel_basis(M))

    if report.invertible:
        status = Status.UNIQUE
    elif residual > tol_c:
        status = Status.INCONSISTENT
    elif report.dim_kernel == 0:
        # overdetermined but consistent: exactly one solution for this data
        status = Status.UNIQUE
    else:
        status = Status.FAMILY

    homogeneous = Y.as_state()
    if status is Status.INCONSISTENT:
        return BvpSolution(status, report, residual, tol_c, homogeneous=homogeneous)

    y = homogeneous.combine(q, yp)
    bres = float(np.linalg.norm(apply_boundary(problem.boundary, y, problem) - problem.c))
    return BvpSolution(
        status,
        report,
        residual,
        tol_c,
        q_particular=q,
        kernel_basis=basis if status is Status.FAMILY else (),
        solution=y,
        homogeneous=homogeneous,
        ode_residual=y.ode_residual(),
        boundary_residual=bres,
    )


def evaluate_solution(sol, t):
    if sol.status is Status.INCONSISTENT or sol.solution is None:
        raise NoSolution("the problem is inconsistent; there is no solution to evaluate")
    return sol.solution(t)
