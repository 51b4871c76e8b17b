"""
Test instances with certified parameters, and a brute-force vertex oracle.
"""
import itertools
import math
from typing import List, Optional, Tuple

import numpy as np

from .errors import PreconditionViolation
from .lp import ORACLE_MAX_N, LpInstance, LpParameters

VERTEX_DECIMALS = 9


def random_instance(d: int, n: int, seed: int = 0) -> Tuple[LpInstance, LpParameters]:
    """Bounded random program with a known interior point.

    The first row of A is positive, so a_0^T x = b_0 caps ||x||_2 by
    b_0 / min(a_0); the interior point x_int fixes b and the inner radius.
    """
    if not 1 <= d <= n:
        raise PreconditionViolation(f"need 1 <= d <= n, got d={d}, n={n}")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d, n))
    A[0] = rng.uniform(0.5, 1.5, size=n)
    x_int = rng.uniform(0.5, 1.5, size=n)
    b = A @ x_int
    c = rng.standard_normal(n)
    lp = LpInstance(A, b, c)
    params = LpParameters.for_instance(lp, float(np.min(x_int)), float(b[0] / np.min(A[0])))
    return lp, params


def assignment_instance(costs) -> Tuple[LpInstance, LpParameters]:
    """3x3 assignment polytope: row sums and all but one column sum equal one."""
    costs = np.asarray(costs, dtype=np.float64)
    if costs.shape != (3, 3):
        raise PreconditionViolation(f"assignment costs must be 3x3, got {costs.shape}")
    A = np.zeros((5, 9))
    for i in range(3):
        A[i, 3 * i:3 * i + 3] = 1.0
    for j in range(2):
        A[3 + j, j::3] = 1.0
    lp = LpInstance(A, np.ones(5), costs.reshape(-1))
    return lp, LpParameters.for_instance(lp, 1.0 / 3.0, math.sqrt(3.0))


SHORTEST_PATH_EDGES = ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3))


def shortest_path_instance(costs) -> Tuple[LpInstance, LpParameters]:
    """Unit flow from node 0 to node 3 on a four-node DAG; node 3's row is dropped."""
    costs = np.asarray(costs, dtype=np.float64).reshape(-1)
    if costs.size != len(SHORTEST_PATH_EDGES):
        raise PreconditionViolation(f"need {len(SHORTEST_PATH_EDGES)} edge costs, got {costs.size}")
    A = np.zeros((3, len(SHORTEST_PATH_EDGES)))
    for e, (tail, head) in enumerate(SHORTEST_PATH_EDGES):
        if tail < 3:
            A[tail, e] += 1.0
        if head < 3:
            A[head, e] -= 1.0
    b = np.array([1.0, 0.0, 0.0])
    lp = LpInstance(A, b, costs)
    # the three paths averaged give (2/3, 1/3, 1/3, 1/3, 2/3); the longest path has norm sqrt 3
    return lp, LpParameters.for_instance(lp, 1.0 / 3.0, math.sqrt(3.0))


def enumerate_vertices(lp: LpInstance, tol: float = 1e-9) -> List[np.ndarray]:
    """All distinct basic feasible solutions, from every d-subset of columns."""
    if lp.n > ORACLE_MAX_N:
        raise PreconditionViolation(f"vertex enumeration is limited to n <= {ORACLE_MAX_N}, got {lp.n}")
    seen = {}
    for basis in itertools.combinations(range(lp.n), lp.d):
        B = lp.A[:, basis]
        if np.linalg.matrix_rank(B) < lp.d:
            continue
        x_B = np.linalg.solve(B, lp.b)
        if np.any(x_B < -tol):
            continue
        x = np.zeros(lp.n)
        x[list(basis)] = np.maximum(x_B, 0.0)
        seen.setdefault(tuple(np.round(x, VERTEX_DECIMALS)), x)
    return list(seen.values())


def brute_force_optimum(lp: LpInstance) -> Tuple[np.ndarray, float]:
    vertices = enumerate_vertices(lp)
    if not vertices:
        raise PreconditionViolation("program has no vertex")
    values = [lp.objective(v) for v in vertices]
    best = int(np.argmin(values))
    return vertices[best], values[best]


def vertex_gap(lp: LpInstance, params: LpParameters) -> Optional[float]:
    """eta with c^T v >= OPT + eta L R for every non-optimal vertex v (None for a single vertex)."""
    values = sorted(lp.objective(v) for v in enumerate_vertices(lp))
    if len(values) < 2:
        return None
    return (values[1] - values[0]) / (params.lipschitz * params.outer_radius)
