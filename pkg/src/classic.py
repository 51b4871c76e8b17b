"""
Short-step path following that keeps x s within an l2 ball around t.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvariantViolation, PreconditionViolation
from .lp import LpInstance, PathState, check_dimensions, l2_centrality
from .newton import solve_newton
from .trace import TraceRecord, TraceSink, emit_trace

logger = logging.getLogger(__name__)

FINAL_CENTRALITY = 1.0 / 6.0


def scheduled_t(t_start: float, t_end: float, step: float, k: int) -> float:
    """t after k steps: max(t_start/(1+h)^k, t_end), or the increasing mirror."""
    if t_end <= t_start:
        return max(t_start / (1.0 + step) ** k, t_end)
    return min(t_start * (1.0 + step) ** k, t_end)


def schedule_length(t_start: float, t_end: float, step: float) -> int:
    """Number of steps the geometric schedule takes from t_start to t_end."""
    if t_start == t_end:
        return 0
    return math.ceil(abs(math.log(t_start / t_end)) / math.log1p(step))


@dataclass(frozen=True)
class L2Config:
    step: Optional[float] = None
    centrality_cap: float = 0.25

    def step_for(self, n: int) -> float:
        limit = 1.0 / (16.0 * math.sqrt(n))
        h = limit if self.step is None else float(self.step)
        if not 0.0 < h <= limit * (1.0 + 1e-12):
            raise PreconditionViolation(f"L2 step {h} outside (0, 1/(16 sqrt n)] = (0, {limit}]")
        if not 0.0 < self.centrality_cap <= 0.25:
            raise PreconditionViolation(f"centrality cap {self.centrality_cap} outside (0, 1/4]")
        return h


def l2_step_path(
    lp: LpInstance,
    start: PathState,
    t_end: float,
    cfg: Optional[L2Config] = None,
    trace: Optional[TraceSink] = None,
    normal_solver=None,
) -> PathState:
    """Follow the central path from start.t to t_end with exact Newton steps."""
    cfg = cfg or L2Config()
    check_dimensions(lp, start)
    if not t_end > 0.0:
        raise PreconditionViolation(f"t_end must be positive, got {t_end}")
    h = cfg.step_for(lp.n)

    centrality = l2_centrality(start)
    if centrality > cfg.centrality_cap:
        raise InvariantViolation(
            f"start centrality {centrality:.4f} exceeds cap {cfg.centrality_cap}"
        )

    A, c = lp.A, lp.c
    t_start = start.t
    x, y = start.x.copy(), start.y.copy()
    s = start.s.copy()
    t = t_start
    state = start
    k = 0
    logger.debug("L2 path following from t=%.6e to t=%.6e (h=%.3e)", t_start, t_end, h)

    while t != t_end:
        t_next = scheduled_t(t_start, t_end, h, k + 1)
        direction = solve_newton(A, x, s, t_next - x * s, normal_solver)
        x = x + direction.dx
        y = y + direction.dy
        s = c - A.T @ y
        t = t_next
        k += 1

        if np.min(x) <= 0.0 or np.min(s) <= 0.0:
            raise InvariantViolation(f"iterate left the positive orthant at step {k} (t={t:.6e})")
        state = PathState.from_arrays(lp, x, s, y, t)
        centrality = l2_centrality(state)
        if centrality > cfg.centrality_cap:
            raise InvariantViolation(
                f"centrality {centrality:.4f} exceeds cap {cfg.centrality_cap} at step {k} (t={t:.6e})"
            )
        emit_trace(
            trace,
            TraceRecord(iteration=k, t=t, l2_centrality=centrality, gap=float(x @ s), state=state),
        )

    if k and l2_centrality(state) > FINAL_CENTRALITY + 1e-8:
        raise InvariantViolation(f"final centrality {l2_centrality(state):.4f} above 1/6 at t={t:.6e}")
    logger.debug("L2 path following finished after %d steps", k)
    return state
