"""
Interior Point LP Solver - Source Package
Short-step and robust path following methods for linear programs in standard form.

Components:
- linalg: Dense kernels, Woodbury updates and normal-matrix solvers
- lp: Instances, parameters, primal-dual points and the central path oracle
- newton: Newton step of the path following methods
- classic: Short-step path following in the l2 neighborhood
- robust: Potential-based robust path following and approximation oracles
- select_vector: Lazy l-infinity maintenance on a dyadic schedule
- inverse_maintenance: Maintained inverse and the fast robust stepper
- initializer: Modified program, extraction and vertex rounding
- solver: End-to-end driver
"""

__version__ = "1.0.0"

# Import main classes for easier access
from .errors import IpmError
from .lp import LpInstance, LpParameters, PathState, PrimalDualPoint
from .instance_io import load_instance, save_instance
from .solver import InteriorPointSolver, SolveReport, solve

# Define what's available when someone does "from src import *"
__all__ = [
    "IpmError",
    "LpInstance",
    "LpParameters",
    "PathState",
    "PrimalDualPoint",
    "load_instance",
    "save_instance",
    "InteriorPointSolver",
    "SolveReport",
    "solve",
]


def get_version():
    """Return the current version."""
    return __version__
