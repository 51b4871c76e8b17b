"""
Maintained inverse of the Newton block matrix and the fast robust stepper.

The block matrix, in variable order (dx, ds, dy, z), is

    [ I     Xbar/Sbar  0    grad Phi(rbar)/Sbar ]
    [ A     0          0    0                   ]
    [ 0     I          A^T  0                   ]
    [ 0     0          0    -1                  ]

with the first n rows divided by sbar, so M^{-1} e_last carries the Newton
step for the right-hand side grad Phi(rbar) and sbar of order t does not
swamp the A blocks. The first n columns are constant. A change of xbar_i
or sbar_i touches column n + i, and a change of rbar or of any sbar_i the
last column, which makes every oracle update a column replacement handled
by the Woodbury identity.
"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg as sla

from .classic import scheduled_t
from .errors import InvariantViolation, PreconditionViolation, SingularUpdate
from .linalg import PIVOT_RTOL, LowRankDelta, woodbury_apply, woodbury_update
from .lp import LpInstance, PathState, check_dimensions, l2_centrality
from .robust import (
    GRADIENT_FLOOR,
    ApproxTriple,
    PotentialConfig,
    SelectVectorOracle,
    centrality_vector,
    check_potential,
    potential,
    potential_gradient,
)
from .trace import TraceRecord, TraceSink, emit_trace

logger = logging.getLogger(__name__)

MAINTENANCE_TOL = 1e-6


def default_ell_star(n: int) -> int:
    """Largest ell with 2^(2 ell) <= min(n^0.31, n^(2/3))."""
    if n <= 1:
        return 0
    return max(0, int(math.floor(0.5 * math.log2(min(n ** 0.31, n ** (2.0 / 3.0))))))


@dataclass(frozen=True)
class NewtonBlockMatrix:
    matrix: np.ndarray
    n: int
    d: int

    @property
    def size(self) -> int:
        return 2 * self.n + self.d + 1

    def unit_last(self) -> np.ndarray:
        e = np.zeros(self.size)
        e[-1] = 1.0
        return e

    def solve_last(self) -> np.ndarray:
        """Dense solution of M z = e_last."""
        try:
            return sla.solve(self.matrix, self.unit_last(), check_finite=False)
        except (sla.LinAlgError, sla.LinAlgWarning) as e:
            raise SingularUpdate(f"block matrix is singular: {e}") from e


def assemble_block(
    A: np.ndarray, xbar: np.ndarray, sbar: np.ndarray, rbar: np.ndarray, cfg: PotentialConfig
) -> NewtonBlockMatrix:
    d, n = A.shape
    if np.any(xbar <= 0.0) or np.any(sbar <= 0.0):
        raise PreconditionViolation("block matrix needs strictly positive xbar and sbar")
    size = 2 * n + d + 1
    M = np.zeros((size, size))
    diag = np.arange(n)
    M[diag, diag] = 1.0
    M[diag, n + diag] = xbar / sbar
    M[:n, -1] = potential_gradient(rbar, cfg) / sbar
    M[n:n + d, :n] = A
    M[n + d + diag, n + diag] = 1.0
    M[n + d:2 * n + d, 2 * n:2 * n + d] = A.T
    M[-1, -1] = -1.0
    return NewtonBlockMatrix(M, n, d)


def block_columns(
    A: np.ndarray,
    xbar: np.ndarray,
    sbar: np.ndarray,
    grad: np.ndarray,
    indices: np.ndarray,
) -> np.ndarray:
    """Columns ``indices`` of the block matrix, built without assembling it."""
    d, n = A.shape
    size = 2 * n + d + 1
    cols = np.zeros((size, len(indices)))
    for k, j in enumerate(indices):
        if j < n:
            cols[j, k] = 1.0
            cols[n:n + d, k] = A[:, j]
        elif j < 2 * n:
            i = j - n
            cols[i, k] = xbar[i] / sbar[i]
            cols[n + d + i, k] = 1.0
        elif j < 2 * n + d:
            cols[n + d:2 * n + d, k] = A[j - 2 * n]
        else:
            cols[:n, k] = grad / sbar
            cols[-1, k] = -1.0
    return cols


@dataclass
class MaintenanceStats:
    refreshes: int = 0
    woodbury_updates: int = 0
    woodbury_applies: int = 0
    columns_touched: int = 0
    factorizations: int = 0
    fallbacks: int = 0
    reinversions: int = 0
    max_rank: int = 0
    max_cross_check_error: float = 0.0
    ranks: list = field(default_factory=list)

    def record_rank(self, rank: int) -> None:
        self.ranks.append(rank)
        self.max_rank = max(self.max_rank, rank)
        self.columns_touched += rank
        if rank:
            self.factorizations += 1


def _dense_inverse(M: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    diag = np.abs(np.diag(lu))
    if not np.all(np.isfinite(lu)) or float(np.min(diag)) <= PIVOT_RTOL * max(float(np.max(diag)), 1.0):
        raise SingularUpdate("block matrix is numerically singular")
    return sla.lu_solve((lu, piv), np.eye(M.shape[0]), check_finite=False)


class MaintainedInverse:
    """Snapshot inverse T, its last column u and the current solution column v.

    Pending changes are always measured against the snapshot triple, so a
    maintained solve costs a Woodbury apply of the rank accumulated since
    the last refresh.
    """

    def __init__(
        self,
        A: np.ndarray,
        approx: ApproxTriple,
        cfg: PotentialConfig,
        ell_star: int = 0,
        stats: Optional[MaintenanceStats] = None,
        tolerance: float = MAINTENANCE_TOL,
    ):
        if ell_star < 0:
            raise PreconditionViolation(f"ell_star must be non-negative, got {ell_star}")
        self.A = A
        self.cfg = cfg
        self.ell_star = int(ell_star)
        self.stats = stats if stats is not None else MaintenanceStats()
        self.tolerance = tolerance
        self.d, self.n = A.shape
        self._set_snapshot(approx)
        self.T = _dense_inverse(self.block().matrix)
        self.u = self.T[:, -1].copy()
        self.v = self.u.copy()
        self.last_rank = 0

    def _set_snapshot(self, approx: ApproxTriple) -> None:
        self.xbar0 = approx.xbar.copy()
        self.sbar0 = approx.sbar.copy()
        self.rbar0 = approx.rbar.copy()
        self.grad0 = potential_gradient(self.rbar0, self.cfg)

    def block(self, approx: Optional[ApproxTriple] = None) -> NewtonBlockMatrix:
        if approx is None:
            return assemble_block(self.A, self.xbar0, self.sbar0, self.rbar0, self.cfg)
        return assemble_block(self.A, approx.xbar, approx.sbar, approx.rbar, self.cfg)

    def pending(self, approx: ApproxTriple) -> LowRankDelta:
        """Column replacement taking the snapshot matrix to the one at ``approx``."""
        n = self.n
        s_changed = approx.sbar != self.sbar0
        diag_idx = np.flatnonzero(s_changed | (approx.xbar != self.xbar0))
        parts = [n + diag_idx]
        grad = self.grad0
        r_changed = np.any(approx.rbar != self.rbar0)
        if r_changed:
            grad = potential_gradient(approx.rbar, self.cfg)
        if r_changed or np.any(s_changed):
            parts.append(np.array([2 * n + self.d]))
        idx = np.concatenate(parts).astype(np.int64)
        new = block_columns(self.A, approx.xbar, approx.sbar, grad, idx)
        old = block_columns(self.A, self.xbar0, self.sbar0, self.grad0, idx)
        return LowRankDelta(idx, new, old)

    def refresh(self, approx: ApproxTriple) -> "MaintainedInverse":
        delta = self.pending(approx)
        self.last_rank = delta.rank
        self.stats.record_rank(delta.rank)
        self.stats.refreshes += 1
        try:
            self.T = woodbury_update(self.T, delta)
            self.stats.woodbury_updates += 1
        except SingularUpdate as e:
            logger.warning("Woodbury refresh of rank %d failed (%s); re-inverting densely", delta.rank, e.message)
            self.stats.fallbacks += 1
            self.T = _dense_inverse(self.block(approx).matrix)
        self._set_snapshot(approx)
        self.u = self.T[:, -1].copy()

        block = self.block()
        M = block.matrix
        residual = float(np.max(np.abs(M @ self.u - block.unit_last())))
        scale = 1.0 + float(np.max(np.sum(np.abs(M), axis=1))) * float(np.max(np.abs(self.u)))
        if residual > self.tolerance * scale:
            logger.warning("maintained inverse drifted (residual %.3e); re-inverting densely", residual)
            self.stats.reinversions += 1
            self.T = _dense_inverse(M)
            self.u = self.T[:, -1].copy()
        self.v = self.u.copy()
        return self

    def solve(self, approx: ApproxTriple) -> np.ndarray:
        delta = self.pending(approx)
        self.last_rank = delta.rank
        self.stats.record_rank(delta.rank)
        try:
            self.v = woodbury_apply(self.T, self.u, delta)
            self.stats.woodbury_applies += 1
        except SingularUpdate as e:
            logger.warning("Woodbury solve of rank %d failed (%s); solving densely", delta.rank, e.message)
            self.stats.fallbacks += 1
            self.v = self.block(approx).solve_last()
        return self.v

    def cross_check(self, approx: ApproxTriple) -> float:
        """Relative max-norm distance between v and a fresh dense solve."""
        dense = self.block(approx).solve_last()
        err = float(np.max(np.abs(self.v - dense))) / max(float(np.max(np.abs(dense))), 1e-300)
        self.stats.max_cross_check_error = max(self.stats.max_cross_check_error, err)
        if err > self.tolerance:
            raise InvariantViolation(f"maintained solve differs from dense solve by {err:.3e} (relative)")
        return err


def refresh_snapshot(mi: MaintainedInverse, approx: ApproxTriple) -> MaintainedInverse:
    return mi.refresh(approx)


def maintained_solve(mi: MaintainedInverse, approx: ApproxTriple) -> np.ndarray:
    return mi.solve(approx)


def fast_robust_step_path(
    lp: LpInstance,
    start: PathState,
    t_end: float,
    cfg: Optional[PotentialConfig] = None,
    ell_star: Optional[int] = None,
    trace: Optional[TraceSink] = None,
    verify: bool = False,
    stats: Optional[MaintenanceStats] = None,
    tolerance: float = MAINTENANCE_TOL,
) -> PathState:
    """Robust path following with SelectVector approximations and a maintained inverse."""
    cfg = cfg or PotentialConfig.for_size(lp.n)
    check_dimensions(lp, start)
    if not t_end > 0.0:
        raise PreconditionViolation(f"t_end must be positive, got {t_end}")
    ell_star = default_ell_star(lp.n) if ell_star is None else int(ell_star)
    if ell_star < 0:
        raise PreconditionViolation(f"ell_star must be non-negative, got {ell_star}")
    period = 2 ** ell_star

    A, c = lp.A, lp.c
    n, d = lp.n, lp.d
    t_start = start.t
    x, s, y = start.x.copy(), start.s.copy(), start.y.copy()
    t = t_start
    r = centrality_vector(x, s, t)
    check_potential(potential(r, cfg), cfg, 0, t)

    oracle = SelectVectorOracle(cfg.lam)
    approx = oracle.start(x, s, r)
    mi = MaintainedInverse(A, approx, cfg, ell_star, stats, tolerance)
    logger.debug("fast robust path following from t=%.6e to t=%.6e (ell*=%d)", t_start, t_end, ell_star)

    state = start
    k = 0
    while t != t_end:
        if k:
            approx = oracle.advance(x, s, r)
        if cfg.check_contracts:
            approx.check(x, s, r, cfg.lam)

        refresh = k % period == 0
        if refresh:
            v = mi.refresh(approx).v
        else:
            v = mi.solve(approx)
        if verify:
            mi.cross_check(approx)

        t_next = scheduled_t(t_start, t_end, cfg.step, k + 1)
        gnorm = float(np.linalg.norm(potential_gradient(approx.rbar, cfg)))
        if gnorm > GRADIENT_FLOOR:
            # M z = e_last solves S dx + X ds = g; the step targets -(t'/(32 lambda)) g/||g||
            kappa = t_next / (32.0 * cfg.lam * gnorm)
            x = x - kappa * v[:n]
            y = y - kappa * v[2 * n:2 * n + d]
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
                iteration=k,
                t=t,
                l2_centrality=l2_centrality(state),
                gap=float(x @ s),
                phi=phi,
                update_rank=mi.last_rank,
                snapshot_refresh=refresh,
                state=state,
            ),
        )

    logger.debug(
        "fast robust path following finished after %d steps (%d refreshes, %d fallbacks)",
        k,
        mi.stats.refreshes,
        mi.stats.fallbacks,
    )
    return state
