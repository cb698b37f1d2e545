"""Characteristic matrix ``M(L, B)`` and the Fredholm numbers it determines.

Column ``j`` of ``M`` is ``B`` applied to column ``j`` of the fundamental
matrix, so ``M`` maps ``C^m -> C^r`` (``r`` rows, ``m`` columns). Its rank
gives ``dim ker = m - rank`` and ``dim coker = r - rank``; the index is
always ``m - r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import apply_boundary

#: default relative rank threshold, scaled by ``max(r, m) * sigma_max``
RANK_RTOL = 2.0**-40
#: singular values within this factor of the threshold flag ``rank_uncertain``
UNCERTAIN_FACTOR = 100.0


def default_rank_tolerance(singular_values, shape):
    smax = float(singular_values[0]) if len(singular_values) else 0.0
    return max(shape) * smax * RANK_RTOL


@dataclass(frozen=True, eq=False)
class CharacteristicMatrix:
    entries: np.ndarray
    singular_values: np.ndarray
    rank: int
    rank_tolerance: float
    rank_uncertain: bool
    u: np.ndarray = field(repr=False)
    vh: np.ndarray = field(repr=False)

    @property
    def r(self):
        return self.entries.shape[0]

    @property
    def m(self):
        return self.entries.shape[1]

    @classmethod
    def from_entries(cls, entries, rank_tolerance=None):
        """SVD and numerical rank of an ``r x m`` matrix."""
        entries = np.array(entries, dtype=np.complex128)
        if entries.ndim != 2:
            raise ValueError("characteristic matrix must be two-dimensional")
        r, m = entries.shape
        if r == 0 or m == 0:
            sv = np.zeros(0)
            u = np.eye(r, dtype=np.complex128)
            vh = np.eye(m, dtype=np.complex128)
        else:
            u, sv, vh = np.linalg.svd(entries, full_matrices=True)
        if rank_tolerance is None:
            tol = default_rank_tolerance(sv, entries.shape)
        else:
            tol = float(rank_tolerance)
            if not tol > 0:
                raise ValueError(f"rank tolerance must be positive, got {tol}")
        rank = int(np.count_nonzero(sv > tol))
        uncertain = bool(
            tol > 0
            and np.any((sv > tol / UNCERTAIN_FACTOR) & (sv < tol * UNCERTAIN_FACTOR))
        )
        for x in (entries, sv, u, vh):
            x.flags.writeable = False
        return cls(entries, sv, rank, tol, uncertain, u, vh)


@dataclass(frozen=True)
class FredholmReport:
    rank: int
    dim_kernel: int
    dim_cokernel: int
    index: int
    invertible: bool
    rank_uncertain: bool
    rank_tolerance: float
    singular_values: tuple

    def to_dict(self):
        return {
            "rank": self.rank,
            "dim_kernel": self.dim_kernel,
            "dim_cokernel": self.dim_cokernel,
            "index": self.index,
            "invertible": self.invertible,
            "rank_uncertain": self.rank_uncertain,
            "rank_tolerance": self.rank_tolerance,
            "singular_values": list(self.singular_values),
        }


def characteristic_matrix(Y, B, problem, rank_tolerance=None):
    """Apply ``B`` to every column of ``Y`` at once."""
    entries = apply_boundary(B, Y.as_state(), problem, grid_size=Y.grid_size)
    return CharacteristicMatrix.from_entries(entries.reshape(B.r, Y.m), rank_tolerance)


def fredholm_analysis(M):
    r, m = M.entries.shape
    return FredholmReport(
        rank=M.rank,
        dim_kernel=m - M.rank,
        dim_cokernel=r - M.rank,
        index=m - r,
        invertible=(r == m and M.rank == m),
        rank_uncertain=M.rank_uncertain,
        rank_tolerance=M.rank_tolerance,
        singular_values=tuple(float(s) for s in M.singular_values),
    )


def kernel_basis(M):
    """Orthonormal basis of ``null(M)`` from the trailing right singular vectors."""
    return [np.conj(M.vh[i]) for i in range(M.rank, M.m)]
