"""
Lazy l-infinity approximation of a streamed vector on a dyadic schedule.

ShadowVector keeps ``vbar`` within ``delta`` of the latest value of the
stream while rewriting only the coordinates that moved past a per-level
threshold since the matching checkpoint. At step k every level l with
k divisible by 2^l is inspected; the top level refreshes every coordinate.
"""
import logging
import math
from typing import List

import numpy as np

from .errors import DimensionMismatch, PreconditionViolation
from .linalg import as_vector

logger = logging.getLogger(__name__)


def dyadic_level(k: int, top: int) -> int:
    """Largest l <= top with k divisible by 2^l."""
    level = 0
    while level < top and k % (2 ** (level + 1)) == 0:
        level += 1
    return level


class ShadowVector:
    """Maintains vbar with ||vbar - v||_inf <= delta under streaming updates."""

    def __init__(self, v0, delta: float):
        if not delta > 0.0:
            raise PreconditionViolation(f"delta must be positive, got {delta}")
        v0 = as_vector(v0, "v0")
        self.delta = float(delta)
        self.n = v0.size
        self.levels = math.ceil(math.log2(self.n)) if self.n > 1 else 0
        self.threshold = self.delta / (2.0 * max(self.levels, 1))
        self.vbar = v0.copy()
        self.k = 0
        # checkpoints[l] holds v at the most recent step divisible by 2^l
        self.checkpoints: List[np.ndarray] = [v0.copy() for _ in range(self.levels + 1)]
        self.update_log: List[int] = []
        self.level_log: List[int] = []

    def advance(self, v_new) -> np.ndarray:
        """Consume the next stream value; returns the sorted indices rewritten in vbar."""
        v_new = np.asarray(v_new, dtype=np.float64).reshape(-1)
        if v_new.size != self.n:
            raise DimensionMismatch(f"stream value has length {v_new.size}, expected {self.n}")

        self.k += 1
        selected = np.zeros(self.n, dtype=bool)
        top = dyadic_level(self.k, self.levels)
        for level in range(top + 1):
            if level == self.levels:
                selected[:] = True
            else:
                selected |= np.abs(v_new - self.checkpoints[level]) >= self.threshold
            self.checkpoints[level] = v_new.copy()

        updated = np.flatnonzero(selected)
        self.vbar[updated] = v_new[updated]
        self.update_log.append(int(updated.size))
        self.level_log.append(top)
        return updated

    def error(self, v) -> float:
        return float(np.max(np.abs(self.vbar - np.asarray(v, dtype=np.float64)))) if self.n else 0.0

    @property
    def total_updates(self) -> int:
        return int(sum(self.update_log))

    def updates_by_level(self) -> dict:
        """Total rewritten coordinates grouped by the top level inspected at each step."""
        totals = {}
        for level, count in zip(self.level_log, self.update_log):
            totals[level] = totals.get(level, 0) + count
        return totals
