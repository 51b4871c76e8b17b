"""
End-to-end driver: initialization, two path following phases and optional
rounding to the optimal vertex.
"""
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

import numpy as np

from .classic import L2Config, l2_step_path
from .config import MODES, SolverSettings, load_config
from .errors import (
    InfeasibleInput,
    InvariantViolation,
    IpmError,
    MissingParameters,
    PreconditionViolation,
)
from .initializer import build_modified, extract, round_to_vertex
from .inverse_maintenance import MaintenanceStats, fast_robust_step_path
from .lp import LpInstance, LpParameters, PathState, duality_gap, l2_centrality
from .robust import PotentialConfig, SelectVectorOracle, centrality_vector, potential, robust_step_path
from .trace import TraceRecord, TraceSink, emit_trace

logger = logging.getLogger(__name__)

GAP_SLACK = 1e-6


@dataclass(frozen=True)
class SolveReport:
    x: np.ndarray
    objective: float
    gap_certificate: float
    iterations: int
    mode: str
    fallback_count: int
    wall_time: float
    phase_iterations: Dict[str, int] = field(default_factory=dict)
    y: Optional[np.ndarray] = None
    s: Optional[np.ndarray] = None
    rounded_x: Optional[np.ndarray] = None


@contextmanager
def _phase(name: str):
    """Tag solver errors raised inside the block with the phase name."""
    try:
        yield
    except IpmError as e:
        if e.phase is None:
            e.phase = name
        raise


class _PhaseTrace:
    """Counts the records of one phase and forwards them tagged to the user sink."""

    def __init__(self, sink: Optional[TraceSink], phase: str):
        self.sink = sink
        self.phase = phase
        self.count = 0

    def __call__(self, record: TraceRecord) -> None:
        self.count += 1
        emit_trace(self.sink, record.with_phase(self.phase))


class InteriorPointSolver:
    """Solves min c^T x s.t. A x = b, x >= 0 to within delta L R of the optimum."""

    def __init__(self, config_path: Optional[str] = "config.yaml", settings: Optional[SolverSettings] = None):
        self.config = load_config(config_path)
        self.settings = settings or SolverSettings.from_config(self.config)

        # Statistics
        self.stats: Dict[str, Any] = {
            "total_solves": 0,
            "total_iterations": 0,
            "fallbacks": 0,
            "last_mode": None,
        }

    def _potential_config(self, n: int) -> PotentialConfig:
        cfg = self.settings
        return PotentialConfig.for_size(
            n, lam=cfg.robust_lambda, phi_cap=cfg.phi_cap, step=cfg.robust_step, check_contracts=cfg.check_contracts
        )

    def _run_phase(
        self,
        mode: str,
        lp: LpInstance,
        state: PathState,
        t_end: float,
        trace: _PhaseTrace,
        maintenance: MaintenanceStats,
        ell_star: Optional[int],
        normal_solver=None,
    ) -> PathState:
        logger.info("%s: %s steps from t=%.6e to t=%.6e (n=%d)", trace.phase, mode, state.t, t_end, lp.n)
        if mode == "l2":
            cfg = L2Config(step=self.settings.l2_step, centrality_cap=self.settings.centrality_cap)
            return l2_step_path(lp, state, t_end, cfg, trace=trace, normal_solver=normal_solver)

        cfg = self._potential_config(lp.n)
        if mode == "robust":
            return robust_step_path(
                lp, state, t_end, cfg, oracle=SelectVectorOracle(cfg.lam), trace=trace, normal_solver=normal_solver
            )
        return fast_robust_step_path(
            lp,
            state,
            t_end,
            cfg,
            ell_star=ell_star,
            trace=trace,
            verify=self.settings.verify,
            stats=maintenance,
            tolerance=self.settings.maintenance_tol,
        )

    def _check_handoff(self, mode: str, lp: LpInstance, state: PathState) -> None:
        if mode == "l2":
            centrality = l2_centrality(state)
            if centrality > self.settings.centrality_cap:
                raise InvariantViolation(f"extracted point has centrality {centrality:.4f} above 1/4")
            return
        cfg = self._potential_config(lp.n)
        phi = potential(centrality_vector(state.x, state.s, state.t), cfg)
        if phi > cfg.phi_cap:
            raise InvariantViolation(f"extracted point has potential {phi:.6g} above {cfg.phi_cap:g}")

    def solve(
        self,
        lp: LpInstance,
        params: Optional[LpParameters],
        delta: Optional[float] = None,
        mode: Optional[str] = None,
        trace: Optional[TraceSink] = None,
        ell_star: Optional[int] = None,
        eta: Optional[float] = None,
        round_vertex: bool = False,
        integral: bool = False,
    ) -> SolveReport:
        """
        Run the full pipeline.

        Args:
            lp: Program in standard form
            params: Inner radius r, outer radius R and Lipschitz constant L
            delta: Relative accuracy; the result is within delta L R of the optimum
            mode: 'l2', 'robust' or 'fast'
            trace: Optional sink receiving one record per iteration
            ell_star: Snapshot period exponent for the fast mode
            eta: Vertex gap, required for rounding
            round_vertex: Round the final point to the optimal vertex

        Returns:
            SolveReport with the solution and its gap certificate
        """
        mode = mode or self.settings.mode
        delta = self.settings.delta if delta is None else float(delta)
        ell_star = self.settings.ell_star if ell_star is None else ell_star
        if mode not in MODES:
            raise PreconditionViolation(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
        if params is None:
            raise MissingParameters("inner radius r and outer radius R are required")
        if not delta > 0.0:
            raise PreconditionViolation(f"delta must be positive, got {delta}")
        if round_vertex and eta is None:
            raise PreconditionViolation("rounding to a vertex needs the vertex gap eta")

        started = time.perf_counter()
        maintenance = MaintenanceStats()
        lr = params.lipschitz * params.outer_radius
        t_end = delta * lr / (2.0 * lp.n)

        with _phase("phase-1"):
            try:
                modified, start = build_modified(lp, params, self.settings.epsilon)
            except PreconditionViolation as e:
                raise InfeasibleInput(f"initial construction failed: {e.message}") from e
            first = _PhaseTrace(trace, "phase-1")
            normal_solver = modified.normal_solver() if mode != "fast" else None
            end_1 = self._run_phase(
                mode, modified.instance, start, lr, first, maintenance, ell_star, normal_solver
            )

        with _phase("extract"):
            point = extract(modified, end_1, self.settings.feasibility_tol)
            handoff = PathState.create(point, lr)
            self._check_handoff(mode, lp, handoff)

        with _phase("phase-2"):
            second = _PhaseTrace(trace, "phase-2")
            final = self._run_phase(mode, lp, handoff, t_end, second, maintenance, ell_star)
            gap = duality_gap(final.point, lp)
            if gap > delta * lr * (1.0 + GAP_SLACK):
                raise InvariantViolation(f"final gap {gap:.6e} exceeds delta L R = {delta * lr:.6e}")

        rounded = None
        if round_vertex:
            with _phase("rounding"):
                rounded = round_to_vertex(lp, final.x, eta, delta, params, integral=integral)

        iterations = first.count + second.count
        report = SolveReport(
            x=final.x.copy(),
            objective=lp.objective(final.x),
            gap_certificate=gap,
            iterations=iterations,
            mode=mode,
            fallback_count=maintenance.fallbacks,
            wall_time=time.perf_counter() - started,
            phase_iterations={"phase-1": first.count, "phase-2": second.count},
            y=final.y.copy(),
            s=final.s.copy(),
            rounded_x=rounded,
        )

        self.stats["total_solves"] += 1
        self.stats["total_iterations"] += iterations
        self.stats["fallbacks"] += maintenance.fallbacks
        self.stats["last_mode"] = mode
        logger.info(
            "solved in %d iterations (%d + %d), objective %.12g, gap %.3e, %.2fs",
            iterations,
            first.count,
            second.count,
            report.objective,
            gap,
            report.wall_time,
        )
        return report

    def get_stats(self) -> Dict[str, Any]:
        return self.stats.copy()


def solve(
    lp: LpInstance,
    params: Optional[LpParameters],
    delta: Optional[float] = None,
    mode: Optional[str] = None,
    config: Union[None, str, SolverSettings] = None,
    **kwargs,
) -> SolveReport:
    """One-shot solve; ``config`` is a settings object, a YAML path or None for defaults."""
    if isinstance(config, SolverSettings):
        solver = InteriorPointSolver(config_path=None, settings=config)
    else:
        solver = InteriorPointSolver(config_path=config)
    return solver.solve(lp, params, delta=delta, mode=mode, **kwargs)
