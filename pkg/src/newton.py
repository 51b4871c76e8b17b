"""
Newton step of the primal-dual path following methods.

Solves
    S dx + X ds = delta_mu,   A dx = 0,   A^T dy + ds = 0
through the normal matrix A S^{-1} X A^T: dy first, then ds = -A^T dy and
dx = (delta_mu - X ds) / s. The projection P is never materialized.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .linalg import DenseNormalSolver


@dataclass(frozen=True)
class NewtonDirection:
    dx: np.ndarray
    ds: np.ndarray
    dy: np.ndarray

    def residuals(self, A: np.ndarray, xbar: np.ndarray, sbar: np.ndarray, delta_mu: np.ndarray) -> Tuple[float, float, float]:
        """Relative residuals of the three equations of the Newton system."""
        # dx = delta_mu/sbar - xbar ds/sbar; A dx = 0 is measured against both terms
        dx_scale = np.linalg.norm(delta_mu / sbar) + np.linalg.norm(xbar * self.ds / sbar)
        primal = np.linalg.norm(A @ self.dx) / max(np.linalg.norm(A, 2) * dx_scale, 1e-300)
        dual = np.linalg.norm(A.T @ self.dy + self.ds) / max(
            np.linalg.norm(self.ds) + np.linalg.norm(self.dy), 1e-300
        )
        centering = np.linalg.norm(sbar * self.dx + xbar * self.ds - delta_mu) / max(np.linalg.norm(delta_mu), 1e-300)
        return float(primal), float(dual), float(centering)


def solve_newton(
    A: np.ndarray,
    xbar: np.ndarray,
    sbar: np.ndarray,
    delta_mu: np.ndarray,
    normal_solver=None,
) -> NewtonDirection:
    """Exact solution of the Newton system at (xbar, sbar) for target change delta_mu."""
    solver = normal_solver or DenseNormalSolver(A)
    weights = xbar / sbar
    dy = solver.solve(weights, -(A @ (delta_mu / sbar)))
    ds = -(A.T @ dy)
    dx = (delta_mu - xbar * ds) / sbar
    return NewtonDirection(dx, ds, dy)


def apply_projection(
    A: np.ndarray,
    xbar: np.ndarray,
    sbar: np.ndarray,
    v: np.ndarray,
    normal_solver=None,
) -> np.ndarray:
    """P v with P = S^{-1} A^T (A S^{-1} X A^T)^{-1} A X."""
    solver = normal_solver or DenseNormalSolver(A)
    z = solver.solve(xbar / sbar, A @ (xbar * v))
    return (A.T @ z) / sbar


def mu_norm(u: np.ndarray, weights: np.ndarray) -> float:
    """Weighted norm sqrt(u^T diag(weights) u)."""
    return float(np.sqrt(u @ (weights * u)))


def step_ratios(direction: NewtonDirection, x: np.ndarray, s: np.ndarray, ord: Optional[float] = np.inf) -> Tuple[float, float]:
    """(||dx / x||, ||ds / s||) in the given norm."""
    return (
        float(np.linalg.norm(direction.dx / x, ord)),
        float(np.linalg.norm(direction.ds / s, ord)),
    )
