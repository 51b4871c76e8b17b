"""
Tests for the modified program, extraction and vertex rounding.
"""
import math
from dataclasses import replace

import numpy as np
import pytest

from src.classic import L2Config, l2_step_path
from src.errors import (
    ExtractionFailure,
    FeasibilityViolation,
    PreconditionViolation,
    RoundingFailure,
)
from src.initializer import (
    build_modified,
    default_epsilon,
    distance_diagnostics,
    extract,
    round_to_vertex,
    split_dual,
)
from src.instances import assignment_instance, random_instance
from src.lp import LpParameters, PathState, l2_centrality


def run_phase_one(lp, params):
    modified, start = build_modified(lp, params)
    end = l2_step_path(
        modified.instance, start, modified.embed.target_t, L2Config(), normal_solver=modified.normal_solver()
    )
    return modified, end


class TestBuildModified:
    """Test the explicit central path point of the modified program."""

    def test_tiny_program(self, tiny_lp, tiny_params):
        """Test exactness and the bounds on btilde, ctilde and x+."""
        modified, state = build_modified(tiny_lp, tiny_params)
        embed = modified.embed
        n = tiny_lp.n
        assert embed.epsilon == pytest.approx(default_epsilon(n))
        assert embed.r_bar == pytest.approx(5.0 / embed.epsilon)
        assert state.t == embed.t
        np.testing.assert_allclose(state.mu, embed.t, rtol=1e-10)
        assert 0.75 * n * embed.r_bar <= embed.b_tilde <= 3.0 * n * embed.r_bar
        assert np.all(embed.c_tilde >= embed.t / (2.0 * embed.r_bar) * (1 - 1e-12))
        assert np.all(embed.x_plus >= 0.75 * embed.r_bar)
        assert np.all(embed.x_plus <= 1.5 * embed.r_bar)

    def test_layout(self, tiny_lp, tiny_params):
        """Test the block structure of the modified constraints."""
        modified, state = build_modified(tiny_lp, tiny_params)
        np.testing.assert_array_equal(modified.abar, [[1, 1, -1, -1, 0], [1, 1, 0, 0, 1]])
        assert modified.bbar[0] == 1.0
        np.testing.assert_array_equal(modified.cbar[:2], tiny_lp.c)
        assert modified.cbar[-1] == 0.0
        x_plus, x_minus, theta = modified.split_primal(state.x)
        np.testing.assert_allclose(x_plus - x_minus, [0.5, 0.5], atol=1e-9)
        assert theta == pytest.approx(modified.embed.r_bar)

    def test_initial_t(self, tiny_lp, tiny_params):
        """Test t = 2^16 eps^-3 n^2 (R/r) L R."""
        eps = 0.01
        modified, _ = build_modified(tiny_lp, tiny_params, eps)
        L = tiny_params.lipschitz
        expected = 2.0 ** 16 * eps ** -3 * 4 * (1.0 / 0.5) * L * 1.0
        assert modified.embed.t == pytest.approx(expected, rel=1e-10)

    def test_parameter_sweep(self):
        """Test exactness over 50 random programs, radii and epsilons."""
        rng = np.random.default_rng(42)
        for trial in range(50):
            n = int(rng.integers(2, 13))
            d = int(rng.integers(1, n))
            lp, params = random_instance(d, n, seed=trial)
            params = LpParameters(
                params.inner_radius * rng.uniform(0.1, 1.0),
                params.outer_radius * rng.uniform(1.0, 100.0),
                params.lipschitz * rng.uniform(1.0, 10.0),
            )
            eps = float(rng.uniform(1e-3, 0.5))
            modified, state = build_modified(lp, params, eps)
            assert np.max(np.abs(state.mu - state.t)) <= 1e-10 * state.t, f"trial {trial}"
            residual = modified.abar @ state.x - modified.bbar
            assert np.linalg.norm(residual) <= 1e-8 * (1.0 + np.linalg.norm(modified.bbar)), f"trial {trial}"

    def test_halving_epsilon(self, tiny_lp, tiny_params):
        """Test t grows by 8 and Rbar doubles when epsilon halves."""
        a, _ = build_modified(tiny_lp, tiny_params, 0.02)
        b, _ = build_modified(tiny_lp, tiny_params, 0.01)
        assert b.embed.t / a.embed.t == pytest.approx(8.0, rel=1e-12)
        assert b.embed.r_bar / a.embed.r_bar == pytest.approx(2.0)

    @pytest.mark.parametrize("eps", [0.0, -0.1, 0.6])
    def test_invalid_epsilon(self, tiny_lp, tiny_params, eps):
        """Test epsilon must lie in (0, 1/2]."""
        with pytest.raises(PreconditionViolation):
            build_modified(tiny_lp, tiny_params, eps)

    def test_underestimated_radius(self, tiny_lp):
        """Test a far too small R makes x_c- non-positive."""
        params = LpParameters.for_instance(tiny_lp, 1e-5, 1e-4)
        with pytest.raises(PreconditionViolation, match="x_c-"):
            build_modified(tiny_lp, params)


class TestSplitDual:
    """Test recovery of the modified dual variables."""

    def test_initial_point(self, tiny_lp, tiny_params):
        """Test lambda = -t/Rbar and the three equalities at the start."""
        modified, state = build_modified(tiny_lp, tiny_params)
        dual = split_dual(modified, state.point)
        embed = modified.embed
        assert dual.lambda_dual == pytest.approx(-embed.t / embed.r_bar)
        assert dual.s_theta == pytest.approx(embed.t / embed.r_bar)
        np.testing.assert_array_equal(dual.y, [0.0])

    def test_broken_equality(self, tiny_lp, tiny_params):
        """Test a perturbed slack is reported."""
        modified, state = build_modified(tiny_lp, tiny_params)
        s = state.s.copy()
        s[0] *= 1.5
        with pytest.raises(FeasibilityViolation):
            split_dual(modified, replace(state.point, s=s))


class TestExtract:
    """Test the handoff from the modified program."""

    def test_tiny_program(self, tiny_lp, tiny_params):
        """Test phase one then extraction on the tiny program."""
        modified, end = run_phase_one(tiny_lp, tiny_params)
        lr = modified.embed.target_t
        assert end.t == lr
        assert np.linalg.norm(end.mu - lr) <= lr / 4
        point = extract(modified, end)
        handoff = PathState.create(point, lr)
        assert l2_centrality(handoff) <= 0.25
        x_plus, x_minus, _ = modified.split_primal(end.x)
        assert np.all(x_minus <= modified.embed.epsilon * x_plus)
        assert distance_diagnostics(modified, end).holds

    @pytest.mark.parametrize("seed", range(3))
    def test_random_programs(self, seed):
        """Test extraction gives a strictly feasible, well-centered point."""
        lp, params = random_instance(3, 8, seed=seed)
        modified, end = run_phase_one(lp, params)
        point = extract(modified, end)
        assert np.all(point.x > 0) and np.all(point.s > 0)
        np.testing.assert_allclose(lp.A @ point.x, lp.b, atol=1e-8 * (1 + np.linalg.norm(lp.b)))
        assert l2_centrality(PathState.create(point, modified.embed.target_t)) <= 0.25

    def test_outside_window(self, tiny_lp, tiny_params):
        """Test the start point is far from t = L R and is refused."""
        modified, state = build_modified(tiny_lp, tiny_params)
        with pytest.raises(ExtractionFailure, match="outside"):
            extract(modified, state)


class TestRoundToVertex:
    """Test identification of the optimal vertex."""

    def test_tiny_program(self, tiny_lp, tiny_params):
        """Test a near-optimal point rounds to (1, 0)."""
        eta = 1.0 / tiny_params.lipschitz
        vertex = round_to_vertex(tiny_lp, np.array([1 - 1e-7, 1e-7]), eta, 1e-6, tiny_params)
        np.testing.assert_allclose(vertex, [1.0, 0.0])

    def test_vertex_is_fixed_point(self, tiny_lp, tiny_params):
        """Test a vertex rounds to itself."""
        x = np.array([1.0, 0.0])
        np.testing.assert_array_equal(round_to_vertex(tiny_lp, x, 0.4, 1e-6, tiny_params), x)

    def test_assignment_integral(self):
        """Test recovery of the identity permutation."""
        costs = np.full((3, 3), 5.0)
        np.fill_diagonal(costs, 1.0)
        lp, params = assignment_instance(costs)
        eta = 8.0 / (params.lipschitz * params.outer_radius)
        x = 0.999999 * np.eye(3) + 0.0000005 * (np.ones((3, 3)) - np.eye(3))
        vertex = round_to_vertex(lp, x.reshape(-1), eta, 1e-4, params, integral=True)
        np.testing.assert_array_equal(vertex, np.eye(3).reshape(-1))

    def test_delta_not_below_eta(self, tiny_lp, tiny_params):
        """Test delta < eta is required."""
        with pytest.raises(PreconditionViolation):
            round_to_vertex(tiny_lp, np.array([1.0, 0.0]), 0.1, 0.1, tiny_params)

    def test_not_near_a_vertex(self, tiny_lp, tiny_params):
        """Test the midpoint of an edge has a rank deficient support."""
        with pytest.raises(RoundingFailure, match="rank"):
            round_to_vertex(tiny_lp, np.array([0.5, 0.5]), 0.4, 1e-6, tiny_params)

    def test_radius_scales(self, tiny_lp, tiny_params):
        """Test a point farther than 2 delta R / eta is refused."""
        with pytest.raises(RoundingFailure):
            round_to_vertex(tiny_lp, np.array([0.99, 0.01]), 0.4, 1e-6, tiny_params)
        assert math.isfinite(round_to_vertex(tiny_lp, np.array([0.99, 0.01]), 0.4, 0.01, tiny_params)[0])
