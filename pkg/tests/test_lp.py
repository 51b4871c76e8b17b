"""
Unit tests for the LP data model and the central path oracle.
"""
import numpy as np
import pytest

from src.errors import (
    DimensionMismatch,
    FeasibilityViolation,
    InvariantViolation,
    PreconditionViolation,
    RankDeficient,
)
from src.instances import random_instance
from src.lp import (
    LpInstance,
    LpParameters,
    PathState,
    PrimalDualPoint,
    central_path_oracle,
    check_dimensions,
    duality_gap,
    l2_centrality,
)


class TestLpInstance:
    """Test instance validation."""

    def test_dimensions(self, tiny_lp):
        """Test d and n."""
        assert tiny_lp.d == 1 and tiny_lp.n == 2

    def test_more_rows_than_columns(self):
        """Test that d > n is rejected."""
        with pytest.raises(RankDeficient):
            LpInstance(np.ones((2, 1)), np.ones(2), np.ones(1))

    def test_dependent_rows(self):
        """Test that duplicate rows are rejected."""
        A = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])
        with pytest.raises(RankDeficient):
            LpInstance(A, np.ones(2), np.ones(3))

    def test_length_mismatch(self):
        """Test vector length checks."""
        with pytest.raises(DimensionMismatch):
            LpInstance(np.ones((1, 2)), np.ones(1), np.ones(3))

    def test_arrays_are_read_only(self, tiny_lp):
        """Test immutability of stored arrays."""
        with pytest.raises(ValueError):
            tiny_lp.c[0] = 5.0


class TestLpParameters:
    """Test conditioning parameters."""

    def test_lipschitz_defaults_to_norm_of_c(self, tiny_lp, tiny_params):
        """Test L = ||c||_2."""
        assert tiny_params.lipschitz == pytest.approx(np.sqrt(5.0))

    def test_supplied_lipschitz_must_dominate(self, tiny_lp):
        """Test L >= ||c||_2 is enforced."""
        with pytest.raises(PreconditionViolation):
            LpParameters.for_instance(tiny_lp, 0.5, 1.0, lipschitz=1.0)
        assert LpParameters.for_instance(tiny_lp, 0.5, 1.0, lipschitz=3.0).lipschitz == 3.0

    def test_inner_radius_above_outer(self):
        """Test r <= R."""
        with pytest.raises(PreconditionViolation):
            LpParameters(2.0, 1.0, 1.0)

    def test_zero_cost_gets_unit_lipschitz(self):
        """Test the c = 0 fallback."""
        lp = LpInstance(np.ones((1, 2)), np.ones(1), np.zeros(2))
        assert LpParameters.for_instance(lp, 0.5, 1.0).lipschitz == 1.0


class TestPrimalDualPoint:
    """Test point construction and feasibility checks."""

    def test_feasible_point(self, tiny_lp):
        """Test residuals of an exactly feasible point."""
        p = PrimalDualPoint.from_arrays(tiny_lp, [0.5, 0.5], [0.5, 1.5], [0.5])
        assert p.primal_residual == pytest.approx(0.0, abs=1e-15)
        assert p.dual_residual == pytest.approx(0.0, abs=1e-15)

    def test_rejects_non_positive(self, tiny_lp):
        """Test strict positivity."""
        with pytest.raises(FeasibilityViolation):
            PrimalDualPoint.from_arrays(tiny_lp, [1.0, 0.0], [0.5, 1.5], [0.5])

    def test_rejects_primal_infeasible(self, tiny_lp):
        """Test A x = b."""
        with pytest.raises(FeasibilityViolation):
            PrimalDualPoint.from_arrays(tiny_lp, [0.6, 0.6], [0.5, 1.5], [0.5])

    def test_rejects_dual_infeasible(self, tiny_lp):
        """Test A^T y + s = c."""
        with pytest.raises(FeasibilityViolation):
            PrimalDualPoint.from_arrays(tiny_lp, [0.5, 0.5], [1.0, 1.0], [0.5])

    def test_skip_validation(self, tiny_lp):
        """Test that residuals are still recorded without validation."""
        p = PrimalDualPoint.from_arrays(tiny_lp, [0.6, 0.6], [1.0, 1.0], [0.5], validate=False)
        assert p.primal_residual == pytest.approx(0.2)


class TestGapAndCentrality:
    """Test duality gap and centrality measures."""

    def test_gap_identity(self, tiny_lp):
        """Test x^T s = c^T x - b^T y on a feasible pair."""
        p = PrimalDualPoint.from_arrays(tiny_lp, [0.5, 0.5], [0.5, 1.5], [0.5])
        assert duality_gap(p, tiny_lp) == pytest.approx(1.0)

    def test_gap_identity_violation(self, tiny_lp):
        """Test that an inconsistent pair is caught."""
        p = PrimalDualPoint.from_arrays(tiny_lp, [0.5, 0.5], [2.0, 2.0], [0.5], validate=False)
        with pytest.raises(InvariantViolation):
            duality_gap(p, tiny_lp)

    def test_centrality_of_centered_state(self, tiny_lp, path_state):
        """Test that an oracle point has zero centrality."""
        assert l2_centrality(path_state(tiny_lp, 0.3)) <= 1e-9

    def test_dimension_check(self, tiny_lp):
        """Test state/program dimension agreement."""
        lp, _ = random_instance(2, 4, seed=0)
        st = PathState.from_arrays(tiny_lp, [0.5, 0.5], [0.5, 1.5], [0.5], 1.0)
        with pytest.raises(DimensionMismatch):
            check_dimensions(lp, st)


class TestCentralPathOracle:
    """Test the barrier minimizer used as ground truth."""

    @pytest.mark.parametrize("t", [10.0, 1.0, 1e-3])
    def test_tiny_lp(self, tiny_lp, t):
        """Test x s = t and feasibility at several t."""
        p = central_path_oracle(tiny_lp, np.full(2, t))
        np.testing.assert_allclose(p.x * p.s, t, rtol=1e-8)
        assert abs(p.x.sum() - 1.0) <= 1e-10
        np.testing.assert_allclose(tiny_lp.c - tiny_lp.A.T @ p.y, p.s, rtol=1e-8, atol=1e-12)

    def test_weighted_target(self):
        """Test a non-uniform target on a random instance."""
        lp, _ = random_instance(3, 8, seed=4)
        mu = np.linspace(0.5, 1.5, 8)
        p = central_path_oracle(lp, mu)
        np.testing.assert_allclose(p.x * p.s, mu, rtol=1e-8)
        assert np.linalg.norm(lp.A @ p.x - lp.b) <= 1e-8

    def test_start_point_does_not_matter(self, tiny_lp):
        """Test two starting points reach the same central point."""
        a = central_path_oracle(tiny_lp, np.full(2, 0.3))
        b = central_path_oracle(tiny_lp, np.full(2, 0.3), x0=np.array([0.1, 3.0]))
        np.testing.assert_allclose(a.x, b.x, rtol=1e-8, atol=1e-12)
        np.testing.assert_allclose(a.y, b.y, rtol=1e-8, atol=1e-12)

    def test_start_point_does_not_matter_on_random_program(self, rng):
        """Test a random positive start on a random instance."""
        lp, _ = random_instance(3, 8, seed=6)
        mu = np.full(8, 0.5)
        a = central_path_oracle(lp, mu)
        b = central_path_oracle(lp, mu, x0=rng.uniform(0.1, 4.0, 8))
        np.testing.assert_allclose(a.x, b.x, rtol=1e-8, atol=1e-12)

    def test_size_limit(self):
        """Test the oracle refuses large instances."""
        lp, _ = random_instance(3, 20, seed=0)
        with pytest.raises(PreconditionViolation):
            central_path_oracle(lp, np.ones(20))
