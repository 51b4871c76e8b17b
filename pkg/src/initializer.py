"""
Initialization by a modified program with an explicit central path point,
extraction of a well-centered point of the original program, and rounding
of a near-optimal point to the optimal vertex.

The modified program over (x+, x-, x_theta) is

    min c^T x+ + ctilde^T x-   s.t.  A (x+ - x-) = b,  sum(x+) + x_theta = btilde

with x_c+ = t/(c + t/Rbar), x_c- = x_c+ - x_o (x_o the minimum-norm solution
of A x = b), ctilde = t/x_c- and btilde = sum(x_c+) + Rbar. The point
(x_c+, x_c-, Rbar) lies exactly on its central path at t.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import (
    ExtractionFailure,
    FeasibilityViolation,
    InvariantViolation,
    PreconditionViolation,
    RoundingFailure,
)
from .linalg import ModifiedNormalSolver, min_norm_point, modified_constraint_matrix
from .lp import FEASIBILITY_TOL, LpInstance, LpParameters, PathState, PrimalDualPoint

logger = logging.getLogger(__name__)

EXACTNESS_RTOL = 1e-10
MAX_LOG_T = math.log(np.finfo(np.float64).max) - 1.0


def default_epsilon(n: int) -> float:
    return 1.0 / (100.0 * math.sqrt(n))


@dataclass(frozen=True)
class EmbeddingRecord:
    """Everything extraction needs to map a modified point back."""

    r_bar: float
    t: float
    epsilon: float
    x_plus: np.ndarray
    x_minus: np.ndarray
    b_tilde: float
    c_tilde: np.ndarray
    params: LpParameters

    @property
    def target_t(self) -> float:
        """The handoff value L R."""
        return self.params.lipschitz * self.params.outer_radius


@dataclass(frozen=True)
class ModifiedLp:
    instance: LpInstance
    original: LpInstance
    embed: EmbeddingRecord

    @property
    def abar(self) -> np.ndarray:
        return self.instance.A

    @property
    def bbar(self) -> np.ndarray:
        return self.instance.b

    @property
    def cbar(self) -> np.ndarray:
        return self.instance.c

    def normal_solver(self) -> ModifiedNormalSolver:
        return ModifiedNormalSolver(self.original.A)

    def split_primal(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
        n = self.original.n
        return x[:n], x[n:2 * n], float(x[2 * n])


@dataclass(frozen=True)
class ModifiedDualPoint:
    s_plus: np.ndarray
    s_minus: np.ndarray
    s_theta: float
    y: np.ndarray
    lambda_dual: float


def _log_t(epsilon: float, n: int, params: LpParameters) -> float:
    r, R, L = params.inner_radius, params.outer_radius, params.lipschitz
    return 16.0 * math.log(2.0) - 3.0 * math.log(epsilon) + 2.0 * math.log(n) + math.log(R / r) + math.log(L * R)


def build_modified(
    lp: LpInstance, params: LpParameters, epsilon: Optional[float] = None
) -> Tuple[ModifiedLp, PathState]:
    """Modified program and its explicit central path point at t = 2^16 eps^-3 n^2 (R/r) L R."""
    n = lp.n
    params.check_against(lp)
    epsilon = default_epsilon(n) if epsilon is None else float(epsilon)
    if not 0.0 < epsilon <= 0.5:
        raise PreconditionViolation(f"epsilon must lie in (0, 1/2], got {epsilon}")

    R, L = params.outer_radius, params.lipschitz
    r_bar = 5.0 * R / epsilon
    log_t = _log_t(epsilon, n, params)
    if log_t > MAX_LOG_T:
        raise PreconditionViolation(f"initial path parameter exp({log_t:.1f}) overflows double precision")
    t = math.exp(log_t)
    if t < 8.0 * L * r_bar:
        raise PreconditionViolation(f"t = {t:.6e} is below 8 L Rbar = {8.0 * L * r_bar:.6e}")

    x_plus = t / (lp.c + t / r_bar)
    x_origin = min_norm_point(lp.A, lp.b)
    x_minus = x_plus - x_origin
    if np.any(x_minus <= 0.0):
        raise PreconditionViolation(
            "x_c- has a non-positive coordinate; the outer radius R is likely underestimated"
        )
    c_tilde = t / x_minus
    b_tilde = float(np.sum(x_plus)) + r_bar

    if not 0.75 * n * r_bar <= b_tilde <= 3.0 * n * r_bar:
        raise InvariantViolation(f"btilde = {b_tilde:.6e} outside [3/4 n Rbar, 3 n Rbar]")
    if np.any(c_tilde < t / (2.0 * r_bar) * (1.0 - 1e-12)):
        raise InvariantViolation("ctilde has a coordinate below t/(2 Rbar)")
    if np.any(x_plus < 0.75 * r_bar) or np.any(x_plus > 1.5 * r_bar):
        raise InvariantViolation("x_c+ outside [3/4 Rbar, 3/2 Rbar]")

    instance = LpInstance(
        modified_constraint_matrix(lp.A),
        np.concatenate([lp.b, [b_tilde]]),
        np.concatenate([lp.c, c_tilde, [0.0]]),
    )
    embed = EmbeddingRecord(
        r_bar=r_bar,
        t=t,
        epsilon=epsilon,
        x_plus=x_plus,
        x_minus=x_minus,
        b_tilde=b_tilde,
        c_tilde=c_tilde,
        params=params,
    )

    x0 = np.concatenate([x_plus, x_minus, [r_bar]])
    s0 = t / x0
    y0 = np.zeros(lp.d + 1)
    y0[-1] = -t / r_bar
    state = PathState.from_arrays(instance, x0, s0, y0, t, validate=True)
    drift = float(np.max(np.abs(state.mu - t))) / t
    if drift > EXACTNESS_RTOL:
        raise InvariantViolation(f"initial point is off the central path by {drift:.3e} (relative)")

    logger.debug(
        "modified program: n=%d, eps=%.3e, Rbar=%.6e, t=%.6e, btilde=%.6e", n, epsilon, r_bar, t, b_tilde
    )
    return ModifiedLp(instance, lp, embed), state


def split_dual(modified: ModifiedLp, point: PrimalDualPoint, tol: float = FEASIBILITY_TOL) -> ModifiedDualPoint:
    """Recover (s+, s-, s_theta, y, lambda) and check the three dual equalities."""
    lp, embed = modified.original, modified.embed
    n, d = lp.n, lp.d
    y, lam = point.y[:d], float(point.y[d])
    s_plus, s_minus, s_theta = point.s[:n], point.s[n:2 * n], float(point.s[2 * n])

    aty = lp.A.T @ y
    checks = (
        ("A^T y + lambda + s+ = c", np.linalg.norm(aty + lam + s_plus - lp.c), np.linalg.norm(lp.c)),
        ("-A^T y + s- = ctilde", np.linalg.norm(-aty + s_minus - embed.c_tilde), np.linalg.norm(embed.c_tilde)),
        ("lambda + s_theta = 0", abs(lam + s_theta), abs(lam)),
    )
    for name, residual, scale in checks:
        if residual > tol * (1.0 + scale):
            raise FeasibilityViolation(f"modified dual equality {name} violated by {residual:.3e}")
    return ModifiedDualPoint(s_plus.copy(), s_minus.copy(), s_theta, y.copy(), lam)


@dataclass(frozen=True)
class DistanceDiagnostics:
    min_x_plus: float
    x_plus_floor: float
    max_x_minus: float
    x_minus_ceiling: float

    @property
    def holds(self) -> bool:
        return self.min_x_plus >= self.x_plus_floor and self.max_x_minus <= self.x_minus_ceiling


def distance_diagnostics(modified: ModifiedLp, state: PathState) -> DistanceDiagnostics:
    """min x+ >= R r/(10 n Rbar) and max x- <= 20 n L Rbar^2 / t near t = L R."""
    embed = modified.embed
    n = modified.original.n
    r, R, L = embed.params.inner_radius, embed.params.outer_radius, embed.params.lipschitz
    x_plus, x_minus, _ = modified.split_primal(state.x)
    return DistanceDiagnostics(
        min_x_plus=float(np.min(x_plus)),
        x_plus_floor=R * r / (10.0 * n * embed.r_bar),
        max_x_minus=float(np.max(x_minus)),
        x_minus_ceiling=20.0 * n * L * embed.r_bar ** 2 / embed.t,
    )


def extract(modified: ModifiedLp, state: PathState, tol: float = FEASIBILITY_TOL) -> PrimalDualPoint:
    """Map a modified point with x_i s_i in [5/6 LR, 7/6 LR] to the original program."""
    embed = modified.embed
    target = embed.target_t
    if np.any(state.mu < 5.0 / 6.0 * target) or np.any(state.mu > 7.0 / 6.0 * target):
        raise ExtractionFailure(
            f"x s ranges over [{float(np.min(state.mu)):.6e}, {float(np.max(state.mu)):.6e}], "
            f"outside [5/6, 7/6] x L R = {target:.6e}"
        )

    x_plus, x_minus, _ = modified.split_primal(state.x)
    try:
        dual = split_dual(modified, state.point, tol)
    except FeasibilityViolation as e:
        raise ExtractionFailure(e.message) from e

    eps = embed.epsilon * (1.0 + 1e-9)
    if np.any(x_minus > eps * x_plus):
        worst = float(np.max(x_minus / x_plus))
        raise ExtractionFailure(f"x- / x+ reaches {worst:.3e}, above epsilon = {embed.epsilon:.3e}")
    if np.any(dual.s_theta > eps * dual.s_plus):
        worst = dual.s_theta / float(np.min(dual.s_plus))
        raise ExtractionFailure(f"s_theta / s+ reaches {worst:.3e}, above epsilon = {embed.epsilon:.3e}")

    x = x_plus - x_minus
    s = dual.s_plus - dual.s_theta
    try:
        point = PrimalDualPoint.from_arrays(modified.original, x, s, dual.y, tol=tol)
    except FeasibilityViolation as e:
        raise ExtractionFailure(f"extracted point is not strictly feasible: {e.message}") from e

    diagnostics = distance_diagnostics(modified, state)
    logger.debug(
        "extraction: min x+ = %.3e (floor %.3e), max x- = %.3e (ceiling %.3e)",
        diagnostics.min_x_plus,
        diagnostics.x_plus_floor,
        diagnostics.max_x_minus,
        diagnostics.x_minus_ceiling,
    )
    return point


def round_to_vertex(
    lp: LpInstance,
    x: np.ndarray,
    eta: float,
    delta: float,
    params: LpParameters,
    integral: bool = False,
    tol: float = FEASIBILITY_TOL,
) -> np.ndarray:
    """Optimal vertex near a delta L R optimal point, given vertex gap eta > delta.

    Coordinates above 2 delta R / eta form the support; the vertex solves
    A_S x_S = b and has to stay inside that ball around ``x``.
    """
    if not 0.0 <= delta < eta:
        raise PreconditionViolation(f"rounding needs 0 <= delta < eta, got delta={delta}, eta={eta}")
    x = np.asarray(x, dtype=np.float64)
    radius = 2.0 * delta * params.outer_radius / eta
    support = np.flatnonzero(x > radius)
    if support.size == 0:
        raise RoundingFailure(f"no coordinate exceeds the support threshold {radius:.3e}")

    A_S = lp.A[:, support]
    sol, _, rank, _ = np.linalg.lstsq(A_S, lp.b, rcond=None)
    if rank < support.size:
        raise RoundingFailure(
            f"support of size {support.size} has rank {rank}; the point is not near a unique vertex"
        )
    vertex = np.zeros(lp.n)
    vertex[support] = sol

    if integral:
        nearest = np.rint(vertex)
        close = np.abs(vertex - nearest) <= radius
        vertex = np.where(close, nearest, vertex)

    scale = 1.0 + float(np.linalg.norm(lp.b))
    if np.any(vertex < -tol * scale):
        raise RoundingFailure(f"identified vertex has a negative coordinate {float(np.min(vertex)):.3e}")
    vertex = np.maximum(vertex, 0.0)
    residual = float(np.linalg.norm(lp.A @ vertex - lp.b))
    if residual > tol * scale:
        raise RoundingFailure(f"identified vertex violates A x = b by {residual:.3e}")

    distance = float(np.linalg.norm(vertex - x))
    if distance > radius * (1.0 + 1e-9) + tol:
        raise RoundingFailure(f"vertex lies {distance:.3e} from x, outside the certified radius {radius:.3e}")
    window = delta * params.lipschitz * params.outer_radius
    if lp.objective(vertex) > lp.objective(x) + window + tol * (1.0 + abs(lp.objective(x))):
        raise RoundingFailure("identified vertex is not optimal within delta L R")

    if float(np.max(np.abs(vertex - x))) <= 1e-12 * (1.0 + float(np.max(np.abs(x)))):
        return x.copy()
    return vertex
