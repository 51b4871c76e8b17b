"""
Unit tests for the Newton step and the projection it implies.
"""
import numpy as np
import pytest
from scipy.linalg import null_space

from src.instances import random_instance
from src.linalg import DenseNormalSolver
from src.newton import NewtonDirection, apply_projection, mu_norm, solve_newton, step_ratios


def random_system(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 51))
    d = int(rng.integers(1, min(n - 1, 25) + 1))
    lp, _ = random_instance(d, n, seed=seed)
    xbar = rng.uniform(0.2, 5.0, n)
    sbar = rng.uniform(0.2, 5.0, n)
    return lp.A, xbar, sbar, rng


class TestSolveNewton:
    """Test the exact Newton step."""

    def test_residuals_on_random_systems(self):
        """Test all three equations hold to 1e-8 relative on 200 systems."""
        for seed in range(200):
            A, xbar, sbar, rng = random_system(seed)
            delta_mu = rng.standard_normal(xbar.size)
            direction = solve_newton(A, xbar, sbar, delta_mu)
            primal, dual, centering = direction.residuals(A, xbar, sbar, delta_mu)
            assert max(primal, dual, centering) <= 1e-8, f"seed {seed}"

    def test_zero_target(self, tiny_lp):
        """Test that a zero target gives a zero step."""
        direction = solve_newton(tiny_lp.A, np.ones(2), np.ones(2), np.zeros(2))
        assert np.all(direction.dx == 0.0) and np.all(direction.ds == 0.0)

    def test_hand_example(self):
        """Test A = [1 1] at the unit point with target change (1, -1)."""
        direction = solve_newton(np.array([[1.0, 1.0]]), np.ones(2), np.ones(2), np.array([1.0, -1.0]))
        np.testing.assert_allclose(direction.dx, [1.0, -1.0])
        np.testing.assert_allclose(direction.ds, [0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(direction.dy, [0.0], atol=1e-15)

    def test_step_stays_inside_orthant(self):
        """Test both step ratios stay below one when the weighted target change is below min mu."""
        for seed in range(50):
            A, xbar, sbar, rng = random_system(seed)
            mu = xbar * sbar
            delta_mu = rng.standard_normal(xbar.size)
            delta_mu *= np.sqrt(0.99 * np.min(mu) / np.sum(delta_mu**2 / mu))
            rx, rs = step_ratios(solve_newton(A, xbar, sbar, delta_mu), xbar, sbar)
            assert rx < 1.0 and rs < 1.0, f"seed {seed}"

    def test_explicit_solver(self, rng):
        """Test that passing a normal solver gives the same step."""
        A, xbar, sbar, _ = random_system(3)
        delta_mu = rng.standard_normal(xbar.size)
        a = solve_newton(A, xbar, sbar, delta_mu)
        b = solve_newton(A, xbar, sbar, delta_mu, DenseNormalSolver(A))
        np.testing.assert_allclose(a.dx, b.dx)


class TestProjection:
    """Test the projection P = S^-1 A^T (A S^-1 X A^T)^-1 A X."""

    def test_contraction_in_mu_norm(self):
        """Test that P and I - P contract in the mu norm on 100 pairs."""
        for seed in range(100):
            A, xbar, sbar, rng = random_system(seed)
            v = rng.standard_normal(xbar.size)
            mu = xbar * sbar
            pv = apply_projection(A, xbar, sbar, v)
            limit = mu_norm(v, mu) * (1.0 + 1e-8)
            assert mu_norm(pv, mu) <= limit
            assert mu_norm(v - pv, mu) <= limit

    def test_idempotent(self):
        """Test P P v = P v."""
        A, xbar, sbar, rng = random_system(11)
        v = rng.standard_normal(xbar.size)
        pv = apply_projection(A, xbar, sbar, v)
        np.testing.assert_allclose(apply_projection(A, xbar, sbar, pv), pv, atol=1e-9 * np.linalg.norm(v))

    def test_kernel_of_scaled_constraints(self):
        """Test P v = 0 whenever A X v = 0."""
        A, xbar, sbar, rng = random_system(7)
        kernel = null_space(A)
        v = (kernel @ rng.standard_normal(kernel.shape[1])) / xbar
        assert np.linalg.norm(apply_projection(A, xbar, sbar, v)) <= 1e-9 * np.linalg.norm(v)

    def test_mu_norm(self):
        """Test the weighted norm formula."""
        assert mu_norm(np.array([3.0, 4.0]), np.array([1.0, 1.0])) == pytest.approx(5.0)
        assert mu_norm(np.array([1.0, 1.0]), np.array([4.0, 0.0])) == pytest.approx(2.0)


class TestStepRatios:
    """Test relative step sizes."""

    def test_ratios(self):
        """Test ||dx/x|| and ||ds/s||."""
        direction = NewtonDirection(np.array([0.1, -0.2]), np.array([0.0, 0.3]), np.zeros(1))
        rx, rs = step_ratios(direction, np.array([1.0, 1.0]), np.array([1.0, 3.0]))
        assert rx == pytest.approx(0.2)
        assert rs == pytest.approx(0.1)
