"""
Robust path following driven by the potential Phi(r) = sum_i cosh(lambda r_i).

The stepper only needs approximations xbar, sbar, rbar of the iterate, which
an oracle supplies; ``ExactOracle`` hands back the true values and
``SelectVectorOracle`` maintains them lazily with ShadowVectors.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Protocol, Tuple, Union

import numpy as np

from .classic import scheduled_t
from .errors import InvariantViolation, OracleContractViolation, PotentialOverflow, PreconditionViolation
from .lp import LpInstance, PathState, check_dimensions, l2_centrality
from .newton import NewtonDirection, solve_newton
from .select_vector import ShadowVector
from .trace import TraceRecord, TraceSink, emit_trace

logger = logging.getLogger(__name__)

OVERFLOW_GUARD = 700.0
GRADIENT_FLOOR = 1e-300
PHI_SLACK = 1e-6
LOG_DELTA = 1.0 / 48.0


def default_lambda(n: int) -> float:
    return 16.0 * math.log(40.0 * n)


@dataclass(frozen=True)
class PotentialConfig:
    lam: float
    phi_cap: float
    step: float
    check_contracts: bool = False

    @classmethod
    def for_size(
        cls,
        n: int,
        lam: Optional[float] = None,
        phi_cap: Optional[float] = None,
        step: Optional[float] = None,
        check_contracts: bool = False,
    ) -> "PotentialConfig":
        """Defaults lambda = 16 ln(40n), cap 16n and h = 1/(128 lambda sqrt n)."""
        floor = default_lambda(n)
        lam = floor if lam is None else float(lam)
        if lam < floor * (1.0 - 1e-12):
            raise PreconditionViolation(f"lambda {lam} is below 16 ln(40n) = {floor}")
        limit = 1.0 / (128.0 * lam * math.sqrt(n))
        step = limit if step is None else float(step)
        if not 0.0 < step <= limit * (1.0 + 1e-12):
            raise PreconditionViolation(f"robust step {step} outside (0, 1/(128 lambda sqrt n)] = (0, {limit}]")
        phi_cap = 16.0 * n if phi_cap is None else float(phi_cap)
        if phi_cap < n:
            raise PreconditionViolation(f"potential cap {phi_cap} is below its minimum value n = {n}")
        return cls(lam=lam, phi_cap=phi_cap, step=step, check_contracts=check_contracts)


def _lambda_of(cfg: Union[PotentialConfig, float]) -> float:
    return cfg.lam if isinstance(cfg, PotentialConfig) else float(cfg)


def _scaled(r, cfg) -> np.ndarray:
    z = _lambda_of(cfg) * np.asarray(r, dtype=np.float64)
    if z.size and float(np.max(np.abs(z))) > OVERFLOW_GUARD:
        raise PotentialOverflow(
            f"lambda * ||r||_inf = {float(np.max(np.abs(z))):.1f} exceeds {OVERFLOW_GUARD:g}"
        )
    return z


def potential(r, cfg: Union[PotentialConfig, float]) -> float:
    """Phi(r) = sum_i cosh(lambda r_i)."""
    return float(np.sum(np.cosh(_scaled(r, cfg))))


def potential_gradient(r, cfg: Union[PotentialConfig, float]) -> np.ndarray:
    """Componentwise lambda sinh(lambda r_i)."""
    return _lambda_of(cfg) * np.sinh(_scaled(r, cfg))


def centrality_vector(x: np.ndarray, s: np.ndarray, t: float) -> np.ndarray:
    return (x * s - t) / t


@dataclass(frozen=True)
class ApproxTriple:
    xbar: np.ndarray
    sbar: np.ndarray
    rbar: np.ndarray

    def check(self, x: np.ndarray, s: np.ndarray, r: np.ndarray, lam: float) -> None:
        """Raise OracleContractViolation unless the triple is close to (x, s, r)."""
        if np.any(self.xbar <= 0.0) or np.any(self.sbar <= 0.0):
            raise OracleContractViolation("approximations must be strictly positive")
        slack = 1e-12
        errors = (
            ("ln x", float(np.max(np.abs(np.log(self.xbar) - np.log(x)))), LOG_DELTA),
            ("ln s", float(np.max(np.abs(np.log(self.sbar) - np.log(s)))), LOG_DELTA),
            ("r", float(np.max(np.abs(self.rbar - r))), LOG_DELTA / lam),
        )
        for name, err, bound in errors:
            if err > bound + slack:
                raise OracleContractViolation(f"{name} approximation error {err:.3e} exceeds {bound:.3e}")


class ApproximationOracle(Protocol):
    def start(self, x: np.ndarray, s: np.ndarray, r: np.ndarray) -> ApproxTriple:
        ...

    def advance(self, x: np.ndarray, s: np.ndarray, r: np.ndarray) -> ApproxTriple:
        ...


class ExactOracle:
    """Returns the iterate itself."""

    def start(self, x, s, r) -> ApproxTriple:
        return ApproxTriple(x.copy(), s.copy(), r.copy())

    def advance(self, x, s, r) -> ApproxTriple:
        return self.start(x, s, r)


class SelectVectorOracle:
    """Lazy approximations of ln x, ln s (within 1/48) and r (within 1/(48 lambda))."""

    def __init__(self, lam: float):
        self.lam = float(lam)
        self.log_x: Optional[ShadowVector] = None
        self.log_s: Optional[ShadowVector] = None
        self.r: Optional[ShadowVector] = None
        self.last_updates: Tuple[np.ndarray, np.ndarray, np.ndarray] = (
            np.zeros(0, dtype=np.int64),
        ) * 3

    def _triple(self) -> ApproxTriple:
        return ApproxTriple(np.exp(self.log_x.vbar), np.exp(self.log_s.vbar), self.r.vbar.copy())

    def start(self, x, s, r) -> ApproxTriple:
        self.log_x = ShadowVector(np.log(x), LOG_DELTA)
        self.log_s = ShadowVector(np.log(s), LOG_DELTA)
        self.r = ShadowVector(r, LOG_DELTA / self.lam)
        empty = np.zeros(0, dtype=np.int64)
        self.last_updates = (empty, empty, empty)
        return self._triple()

    def advance(self, x, s, r) -> ApproxTriple:
        if self.log_x is None:
            return self.start(x, s, r)
        self.last_updates = (
            self.log_x.advance(np.log(x)),
            self.log_s.advance(np.log(s)),
            self.r.advance(r),
        )
        return self._triple()

    @property
    def total_updates(self) -> int:
        if self.log_x is None:
            return 0
        return self.log_x.total_updates + self.log_s.total_updates + self.r.total_updates


def robust_target(rbar: np.ndarray, t_next: float, cfg: PotentialConfig) -> Tuple[np.ndarray, float]:
    """(delta_mu, ||g||_2) with delta_mu = -(t'/(32 lambda)) g/||g||, g = grad Phi(rbar)."""
    g = potential_gradient(rbar, cfg)
    norm = float(np.linalg.norm(g))
    if norm <= GRADIENT_FLOOR:
        return np.zeros_like(g), norm
    return -(t_next / (32.0 * cfg.lam)) * g / norm, norm


def robust_direction(
    A: np.ndarray,
    approx: ApproxTriple,
    t_next: float,
    cfg: PotentialConfig,
    normal_solver=None,
) -> NewtonDirection:
    delta_mu, _ = robust_target(approx.rbar, t_next, cfg)
    return solve_newton(A, approx.xbar, approx.sbar, delta_mu, normal_solver)


def check_potential(phi: float, cfg: PotentialConfig, k: int, t: float) -> None:
    if phi > cfg.phi_cap * (1.0 + PHI_SLACK):
        raise InvariantViolation(f"potential {phi:.6g} exceeds cap {cfg.phi_cap:g} at step {k} (t={t:.6e})")


def robust_step_path(
    lp: LpInstance,
    start: PathState,
    t_end: float,
    cfg: Optional[PotentialConfig] = None,
    oracle: Optional[ApproximationOracle] = None,
    trace: Optional[TraceSink] = None,
    normal_solver=None,
) -> PathState:
    """Follow the path from start.t to t_end keeping Phi((x s - t)/t) under the cap."""
    cfg = cfg or PotentialConfig.for_size(lp.n)
    oracle = oracle or ExactOracle()
    check_dimensions(lp, start)
    if not t_end > 0.0:
        raise PreconditionViolation(f"t_end must be positive, got {t_end}")

    A, c = lp.A, lp.c
    t_start = start.t
    x, s, y = start.x.copy(), start.s.copy(), start.y.copy()
    t = t_start
    r = centrality_vector(x, s, t)
    check_potential(potential(r, cfg), cfg, 0, t)
    logger.debug(
        "robust path following from t=%.6e to t=%.6e (lambda=%.3f, h=%.3e)", t_start, t_end, cfg.lam, cfg.step
    )

    state = start
    k = 0
    while t != t_end:
        approx = oracle.start(x, s, r) if k == 0 else oracle.advance(x, s, r)
        if cfg.check_contracts:
            approx.check(x, s, r, cfg.lam)

        t_next = scheduled_t(t_start, t_end, cfg.step, k + 1)
        direction = robust_direction(A, approx, t_next, cfg, normal_solver)
        x = x + direction.dx
        y = y + direction.dy
        s = c - A.T @ y
        t = t_next
        k += 1

        if np.min(x) <= 0.0 or np.min(s) <= 0.0:
            raise InvariantViolation(f"iterate left the positive orthant at step {k} (t={t:.6e})")
        r = centrality_vector(x, s, t)
        phi = potential(r, cfg)
        check_potential(phi, cfg, k, t)

        state = PathState.from_arrays(lp, x, s, y, t)
        emit_trace(
            trace,
            TraceRecord(
                iteration=k, t=t, l2_centrality=l2_centrality(state), gap=float(x @ s), phi=phi, state=state
            ),
        )

    logger.debug("robust path following finished after %d steps", k)
    return state
