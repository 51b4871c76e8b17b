"""
Interior Point LP Solver - Test Suite
Unit tests and end-to-end tests for the solver.

Run tests with: pytest tests/ -v
Skip the long robust runs with: pytest tests/ -m "not slow"
"""

__version__ = "1.0.0"

# Test configuration
TEST_CONFIG = {
    "seeds": (0, 1, 2, 3, 4),
    "delta": 1e-6,
    "maintenance_tol": 1e-6,
}
