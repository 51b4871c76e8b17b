"""
Linear program data model: instances, conditioning parameters, primal-dual
points, path states, centrality measures and a central path oracle.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    FeasibilityViolation,
    InvariantViolation,
    NoConvergence,
    NotPositiveDefinite,
    PreconditionViolation,
    RankDeficient,
)
from .linalg import as_matrix, as_vector, cholesky_factor, spd_solve

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-8
ORACLE_MAX_N = 16


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LpInstance:
    """Standard-form program min c^T x subject to A x = b, x >= 0."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        d, n = A.shape
        b = as_vector(self.b, "b", d)
        c = as_vector(self.c, "c", n)
        if d > n:
            raise RankDeficient(f"{d} constraints on {n} variables cannot have full row rank")
        try:
            cholesky_factor(A @ A.T)
        except NotPositiveDefinite as e:
            raise RankDeficient(f"A is not numerically full row rank: {e.message}") from e
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "b", _frozen(b))
        object.__setattr__(self, "c", _frozen(c))

    @property
    def d(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def objective(self, x: np.ndarray) -> float:
        return float(self.c @ x)


@dataclass(frozen=True)
class LpParameters:
    """Inner radius r, outer radius R and Lipschitz constant L of a program."""

    inner_radius: float
    outer_radius: float
    lipschitz: float

    def __post_init__(self):
        for name in ("inner_radius", "outer_radius", "lipschitz"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0.0:
                raise PreconditionViolation(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)
        if self.inner_radius > self.outer_radius:
            raise PreconditionViolation(
                f"inner radius {self.inner_radius} exceeds outer radius {self.outer_radius}"
            )

    @classmethod
    def for_instance(
        cls,
        lp: LpInstance,
        inner_radius: float,
        outer_radius: float,
        lipschitz: Optional[float] = None,
    ) -> "LpParameters":
        """Parameters with L recomputed as ||c||_2; a supplied L must dominate it."""
        norm_c = float(np.linalg.norm(lp.c))
        computed = norm_c if norm_c > 0.0 else 1.0
        if lipschitz is not None:
            if lipschitz < norm_c * (1.0 - 1e-12):
                raise PreconditionViolation(f"Lipschitz constant {lipschitz} is below ||c||_2 = {norm_c}")
            computed = float(lipschitz)
        return cls(inner_radius, outer_radius, computed)

    def check_against(self, lp: LpInstance) -> None:
        norm_c = float(np.linalg.norm(lp.c))
        if self.lipschitz < norm_c * (1.0 - 1e-12):
            raise PreconditionViolation(f"Lipschitz constant {self.lipschitz} is below ||c||_2 = {norm_c}")


@dataclass(frozen=True)
class PrimalDualPoint:
    """Strictly positive primal x and slack s with dual y, plus feasibility residuals."""

    x: np.ndarray
    s: np.ndarray
    y: np.ndarray
    primal_residual: float = 0.0
    dual_residual: float = 0.0

    @classmethod
    def from_arrays(
        cls,
        lp: LpInstance,
        x,
        s,
        y,
        tol: float = FEASIBILITY_TOL,
        validate: bool = True,
    ) -> "PrimalDualPoint":
        x = as_vector(x, "x", lp.n)
        s = as_vector(s, "s", lp.n)
        y = as_vector(y, "y", lp.d)
        primal = float(np.linalg.norm(lp.A @ x - lp.b))
        dual = float(np.linalg.norm(lp.A.T @ y + s - lp.c))

        if validate:
            if np.any(x <= 0.0) or np.any(s <= 0.0):
                raise FeasibilityViolation(
                    f"point is not strictly positive (min x = {x.min():.3e}, min s = {s.min():.3e})"
                )
            if primal > tol * (1.0 + float(np.linalg.norm(lp.b))):
                raise FeasibilityViolation(f"primal residual {primal:.3e} exceeds tolerance")
            if dual > tol * (1.0 + float(np.linalg.norm(lp.c))):
                raise FeasibilityViolation(f"dual residual {dual:.3e} exceeds tolerance")
        return cls(_frozen(x), _frozen(s), _frozen(y), primal, dual)


@dataclass(frozen=True)
class PathState:
    """A point together with its path parameter t and cached mu = x * s."""

    point: PrimalDualPoint
    t: float
    mu: np.ndarray

    @classmethod
    def create(cls, point: PrimalDualPoint, t: float) -> "PathState":
        if not t > 0.0:
            raise PreconditionViolation(f"path parameter must be positive, got {t}")
        return cls(point, float(t), _frozen(point.x * point.s))

    @classmethod
    def from_arrays(cls, lp: LpInstance, x, s, y, t: float, validate: bool = False, tol: float = FEASIBILITY_TOL):
        return cls.create(PrimalDualPoint.from_arrays(lp, x, s, y, tol=tol, validate=validate), t)

    @property
    def x(self) -> np.ndarray:
        return self.point.x

    @property
    def s(self) -> np.ndarray:
        return self.point.s

    @property
    def y(self) -> np.ndarray:
        return self.point.y


def duality_gap(p: PrimalDualPoint, lp: Optional[LpInstance] = None) -> float:
    """x^T s; when ``lp`` is given, also checks it equals c^T x - b^T y."""
    gap = float(p.x @ p.s)
    if lp is not None:
        cx = float(lp.c @ p.x)
        by = float(lp.b @ p.y)
        if abs(cx - by - gap) > 1e-6 * (1.0 + abs(cx)):
            raise InvariantViolation(f"duality gap {gap:.6e} disagrees with c^T x - b^T y = {cx - by:.6e}")
    return gap


def l2_centrality(st: PathState) -> float:
    """||x s - t||_2 / t."""
    return float(np.linalg.norm(st.mu - st.t)) / st.t


def central_path_oracle(
    lp: LpInstance,
    mu,
    x0: Optional[np.ndarray] = None,
    max_iterations: int = 100,
    tolerance: float = 1e-10,
) -> PrimalDualPoint:
    """Minimizer of c^T x - sum mu_i ln x_i over {A x = b, x > 0}.

    Infeasible-start damped Newton on the equality-constrained barrier
    problem. Intended for small instances used as ground truth in tests.
    """
    n, d = lp.n, lp.d
    if n > ORACLE_MAX_N:
        raise PreconditionViolation(f"central_path_oracle is limited to n <= {ORACLE_MAX_N}, got {n}")
    mu = as_vector(mu, "mu", n)
    if np.any(mu <= 0.0):
        raise PreconditionViolation("mu must be strictly positive")

    A, b, c = lp.A, lp.b, lp.c
    x = np.ones(n) if x0 is None else as_vector(x0, "x0", n).copy()
    if np.any(x <= 0.0):
        raise PreconditionViolation("oracle start must be strictly positive")
    nu = np.zeros(d)
    mu_scale = float(np.max(mu))

    def residual(x_, nu_):
        return np.concatenate([c - mu / x_ + A.T @ nu_, A @ x_ - b])

    for iteration in range(max_iterations):
        r_dual = c - mu / x + A.T @ nu
        r_prim = A @ x - b
        y = -nu
        s = c - A.T @ y
        if (
            np.max(np.abs(x * s - mu)) <= tolerance * mu_scale
            and np.linalg.norm(r_prim) <= tolerance * (1.0 + np.linalg.norm(b))
        ):
            logger.debug("central_path_oracle converged in %d iterations", iteration)
            return PrimalDualPoint.from_arrays(lp, x, mu / x, y, validate=False)

        # [H A^T; A 0] [dx; dnu] = -[r_dual; r_prim] with H = diag(mu / x^2)
        h_inv = x * x / mu
        rhs = r_prim - A @ (h_inv * r_dual)
        dnu = spd_solve((A * h_inv) @ A.T, rhs)
        dx = -h_inv * (r_dual + A.T @ dnu)

        norm_r = np.linalg.norm(np.concatenate([r_dual, r_prim]))
        step = 1.0
        neg = dx < 0.0
        if np.any(neg):
            step = min(1.0, 0.99 * float(np.min(-x[neg] / dx[neg])))
        while True:
            x_new = x + step * dx
            nu_new = nu + step * dnu
            if np.all(x_new > 0.0) and np.linalg.norm(residual(x_new, nu_new)) <= (1.0 - 0.01 * step) * norm_r:
                break
            step *= 0.5
            if step < 1e-14:
                raise NoConvergence("line search stalled in central_path_oracle")
        x, nu = x_new, nu_new

    raise NoConvergence(f"central_path_oracle did not converge in {max_iterations} iterations")


def check_dimensions(lp: LpInstance, st: PathState) -> None:
    if st.x.size != lp.n or st.y.size != lp.d:
        raise DimensionMismatch(
            f"state has n={st.x.size}, d={st.y.size}; program has n={lp.n}, d={lp.d}"
        )
