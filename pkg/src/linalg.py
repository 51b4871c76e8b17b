"""
Dense linear algebra kernels used by the interior point methods.

All routines work on float64 numpy arrays and are pure functions of their
inputs. Exact equalities of the analysis become residual tolerances here.
"""
import logging
import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import linalg as sla

from .errors import DimensionMismatch, NotPositiveDefinite, PreconditionViolation, SingularUpdate

logger = logging.getLogger(__name__)

PIVOT_RTOL = 1e-12
SYMMETRY_RTOL = 1e-10


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array."""
    m = np.array(a, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise PreconditionViolation(f"{name} has non-finite entries")
    return m


def as_vector(v, name: str = "vector", size: int = None) -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    out = np.array(v, dtype=np.float64).reshape(-1)
    if size is not None and out.size != size:
        raise DimensionMismatch(f"{name} has length {out.size}, expected {size}")
    if not np.all(np.isfinite(out)):
        raise PreconditionViolation(f"{name} has non-finite entries")
    return out


def cholesky_factor(M: np.ndarray, pivot_rtol: float = PIVOT_RTOL) -> Tuple[np.ndarray, bool]:
    """Cholesky factor of an SPD matrix, rejecting tiny pivots."""
    try:
        factor = sla.cho_factor(M, lower=True, check_finite=False)
    except sla.LinAlgError as e:
        raise NotPositiveDefinite(f"Cholesky factorization failed: {e}") from e

    pivots = np.diag(factor[0]) ** 2
    scale = float(np.max(np.diag(M))) if M.size else 0.0
    if M.size and (scale <= 0.0 or float(np.min(pivots)) <= pivot_rtol * scale):
        raise NotPositiveDefinite(
            f"pivot {float(np.min(pivots)):.3e} below {pivot_rtol:g} x max diagonal {scale:.3e}"
        )
    return factor


def spd_solve(
    M: np.ndarray,
    rhs: np.ndarray,
    symmetry_rtol: float = SYMMETRY_RTOL,
    pivot_rtol: float = PIVOT_RTOL,
) -> np.ndarray:
    """Solve M z = rhs for symmetric positive-definite M.

    ``rhs`` may be a vector or a matrix of right-hand sides.
    """
    M = np.asarray(M, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"spd_solve needs a square matrix, got {M.shape}")
    if rhs.shape[0] != M.shape[0]:
        raise DimensionMismatch(f"rhs has {rhs.shape[0]} rows, matrix has {M.shape[0]}")

    scale = float(np.max(np.abs(M))) if M.size else 0.0
    if scale > 0.0 and float(np.max(np.abs(M - M.T))) > symmetry_rtol * scale:
        raise PreconditionViolation("spd_solve matrix is not symmetric")

    factor = cholesky_factor(M, pivot_rtol)
    return sla.cho_solve(factor, rhs, check_finite=False)


def min_norm_point(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimum-norm solution of A x = b, i.e. A^T (A A^T)^{-1} b."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"A has {A.shape[0]} rows, b has length {b.shape[0]}")
    return A.T @ spd_solve(A @ A.T, b)


@dataclass(frozen=True)
class LowRankDelta:
    """Replacement of a few columns of a square matrix.

    With D = new_columns - old_columns and E the identity columns at
    ``col_indices``, the updated matrix is M1 = M0 + D E^T.
    """

    col_indices: np.ndarray
    new_columns: np.ndarray
    old_columns: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.col_indices, dtype=np.int64).reshape(-1)
        new = np.asarray(self.new_columns, dtype=np.float64)
        old = np.asarray(self.old_columns, dtype=np.float64)
        if new.ndim == 1:
            new = new.reshape(-1, 1) if idx.size else new.reshape(-1, 0)
        if old.ndim == 1:
            old = old.reshape(-1, 1) if idx.size else old.reshape(-1, 0)
        if new.shape != old.shape or new.shape[1] != idx.size:
            raise DimensionMismatch(
                f"delta shapes disagree: {idx.size} indices, new {new.shape}, old {old.shape}"
            )
        if idx.size and (np.any(np.diff(idx) <= 0) or idx[0] < 0 or idx[-1] >= new.shape[0]):
            raise PreconditionViolation("col_indices must be strictly increasing and in bounds")
        object.__setattr__(self, "col_indices", idx)
        object.__setattr__(self, "new_columns", new)
        object.__setattr__(self, "old_columns", old)

    @property
    def rank(self) -> int:
        return int(self.col_indices.size)

    @property
    def size(self) -> int:
        return int(self.new_columns.shape[0])

    def difference(self) -> np.ndarray:
        return self.new_columns - self.old_columns

    @classmethod
    def empty(cls, size: int) -> "LowRankDelta":
        return cls(np.zeros(0, dtype=np.int64), np.zeros((size, 0)), np.zeros((size, 0)))

    @classmethod
    def from_columns(cls, base: np.ndarray, col_indices, new_columns) -> "LowRankDelta":
        idx = np.asarray(col_indices, dtype=np.int64).reshape(-1)
        return cls(idx, new_columns, np.asarray(base, dtype=np.float64)[:, idx])

    @classmethod
    def between(cls, base: np.ndarray, target: np.ndarray) -> "LowRankDelta":
        """Delta replacing every column where ``target`` differs from ``base``."""
        base = np.asarray(base, dtype=np.float64)
        target = np.asarray(target, dtype=np.float64)
        if base.shape != target.shape:
            raise DimensionMismatch(f"cannot diff {base.shape} against {target.shape}")
        idx = np.flatnonzero(np.any(base != target, axis=0))
        return cls(idx, target[:, idx], base[:, idx])


def _woodbury_factors(T: np.ndarray, delta: LowRankDelta, pivot_rtol: float):
    """Return (T D, LU of I + E^T T D); only rows where D is nonzero are read."""
    D = delta.difference()
    rows = np.flatnonzero(np.any(D != 0.0, axis=1))
    TD = T[:, rows] @ D[rows]
    K = np.eye(delta.rank) + TD[delta.col_indices]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(K, check_finite=False)
    diag = np.abs(np.diag(lu))
    if not np.all(np.isfinite(lu)) or float(np.min(diag)) <= pivot_rtol * max(float(np.max(diag)), 1.0):
        raise SingularUpdate(f"Woodbury middle matrix of rank {delta.rank} is numerically singular")
    return TD, (lu, piv)


def woodbury_update(T: np.ndarray, delta: LowRankDelta, pivot_rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Inverse of M1 = M0 + D E^T given T = M0^{-1}, without re-inverting M1."""
    if T.shape[0] != delta.size:
        raise DimensionMismatch(f"inverse is {T.shape}, delta acts on size {delta.size}")
    if delta.rank == 0:
        return T.copy()
    TD, lu = _woodbury_factors(T, delta, pivot_rtol)
    return T - TD @ sla.lu_solve(lu, T[delta.col_indices], check_finite=False)


def woodbury_apply(
    T: np.ndarray,
    u: np.ndarray,
    delta: LowRankDelta,
    b: np.ndarray = None,
    pivot_rtol: float = PIVOT_RTOL,
) -> np.ndarray:
    """M1^{-1} b from T = M0^{-1} and u = M0^{-1} b, without forming M1^{-1}."""
    if u is None:
        u = T @ b
    if delta.rank == 0:
        return np.array(u, dtype=np.float64)
    TD, lu = _woodbury_factors(T, delta, pivot_rtol)
    return u - TD @ sla.lu_solve(lu, u[delta.col_indices], check_finite=False)


def block_inverse_extend(Minv: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Last column of [[M, v], [0, -1]]^{-1}, which is (M^{-1} v, -1)."""
    if Minv.shape[1] != v.shape[0]:
        raise DimensionMismatch(f"inverse is {Minv.shape}, vector has length {v.shape[0]}")
    return np.concatenate([Minv @ v, [-1.0]])


def modified_constraint_matrix(A: np.ndarray) -> np.ndarray:
    """[[A, -A, 0], [1^T, 0, 1]] for the initialization program."""
    d, n = A.shape
    abar = np.zeros((d + 1, 2 * n + 1))
    abar[:d, :n] = A
    abar[:d, n:2 * n] = -A
    abar[d, :n] = 1.0
    abar[d, 2 * n] = 1.0
    return abar


def modified_normal_solve(
    A: np.ndarray,
    w1: np.ndarray,
    w2: np.ndarray,
    alpha: float,
    v: np.ndarray,
) -> np.ndarray:
    """Solve H z = v with H = Abar diag(w1, w2, alpha) Abar^T.

    H = [[G, g], [g^T, gamma]] with G = A (W1 + W2) A^T, g = A w1 and
    gamma = sum(w1) + alpha, eliminated through its scalar Schur complement.
    """
    d = A.shape[0]
    if v.shape[0] != d + 1:
        raise DimensionMismatch(f"rhs has length {v.shape[0]}, expected {d + 1}")
    if alpha <= 0.0 or np.any(w1 <= 0.0) or np.any(w2 <= 0.0):
        raise PreconditionViolation("modified_normal_solve needs positive weights")

    G = (A * (w1 + w2)) @ A.T
    g = A @ w1
    gamma = float(np.sum(w1)) + alpha

    factor = cholesky_factor(G)
    z_top = sla.cho_solve(factor, v[:d], check_finite=False)
    z_g = sla.cho_solve(factor, g, check_finite=False)

    schur = gamma - float(g @ z_g)
    if schur <= PIVOT_RTOL * gamma:
        raise NotPositiveDefinite(f"Schur complement {schur:.3e} is not positive")
    last = (v[d] - float(g @ z_top)) / schur
    return np.concatenate([z_top - z_g * last, [last]])


class DenseNormalSolver:
    """Solves (A diag(w) A^T) z = rhs by a fresh Cholesky factorization."""

    def __init__(self, A: np.ndarray):
        self.A = A

    def solve(self, weights: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        return spd_solve((self.A * weights) @ self.A.T, rhs)


class ModifiedNormalSolver:
    """Normal-matrix solver exploiting the block structure of the modified program.

    ``A`` is the original constraint matrix; weights are ordered (w+, w-, w_theta).
    """

    def __init__(self, A: np.ndarray):
        self.A = A
        self.n = A.shape[1]

    def solve(self, weights: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        n = self.n
        return modified_normal_solve(self.A, weights[:n], weights[n:2 * n], float(weights[2 * n]), rhs)


if __name__ == "__main__":
    rng = np.random.default_rng(0)
    B = rng.standard_normal((20, 20))
    M = B @ B.T + np.eye(20)
    rhs = rng.standard_normal(20)
    z = spd_solve(M, rhs)
    print(f"spd_solve relative residual: {np.linalg.norm(M @ z - rhs) / np.linalg.norm(rhs):.2e}")
