"""
Configuration loading for the solver.

Values come from ``config.yaml`` (merged over ``DEFAULT_CONFIG``) and are
exposed to the driver as a typed ``SolverSettings``.
"""
import copy
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .errors import ParseError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG: Dict[str, Any] = {
    "tolerances": {
        "feasibility": 1e-8,
        "maintenance": 1e-6,
    },
    "l2": {"step": None, "centrality_cap": 0.25},
    "robust": {"lambda": None, "phi_cap": None, "step": None, "check_contracts": False},
    "fast": {"ell_star": None, "verify": False},
    "initializer": {"epsilon": None},
    "solver": {"mode": "l2", "delta": 1e-6},
    "logging": {
        "level": "INFO",
        "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
    },
}

MODES = ("l2", "robust", "fast")


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: Optional[str] = "config.yaml") -> Dict[str, Any]:
    """Load the YAML config and merge it over the defaults."""
    if config_path is None:
        return copy.deepcopy(DEFAULT_CONFIG)

    path = Path(config_path)
    if not path.exists():
        logger.info("No config file at %s, using defaults", config_path)
        return copy.deepcopy(DEFAULT_CONFIG)

    with open(path, "r") as f:
        try:
            loaded = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            raise ParseError(f"invalid YAML in {config_path}: {e}", line=line) from e

    if not isinstance(loaded, dict):
        raise ParseError(f"{config_path} must contain a mapping at top level")
    return _merge(DEFAULT_CONFIG, loaded)


@dataclass(frozen=True)
class SolverSettings:
    """Typed view of the merged configuration."""

    feasibility_tol: float = 1e-8
    maintenance_tol: float = 1e-6
    l2_step: Optional[float] = None
    centrality_cap: float = 0.25
    robust_lambda: Optional[float] = None
    phi_cap: Optional[float] = None
    robust_step: Optional[float] = None
    check_contracts: bool = False
    ell_star: Optional[int] = None
    verify: bool = False
    epsilon: Optional[float] = None
    mode: str = "l2"
    delta: float = 1e-6

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "SolverSettings":
        tol = config["tolerances"]
        settings = cls(
            feasibility_tol=float(tol["feasibility"]),
            maintenance_tol=float(tol["maintenance"]),
            l2_step=config["l2"]["step"],
            centrality_cap=float(config["l2"]["centrality_cap"]),
            robust_lambda=config["robust"]["lambda"],
            phi_cap=config["robust"]["phi_cap"],
            robust_step=config["robust"]["step"],
            check_contracts=bool(config["robust"]["check_contracts"]),
            ell_star=config["fast"]["ell_star"],
            verify=bool(config["fast"]["verify"]),
            epsilon=config["initializer"]["epsilon"],
            mode=str(config["solver"]["mode"]),
            delta=float(config["solver"]["delta"]),
        )
        if settings.mode not in MODES:
            raise ParseError(f"unknown mode {settings.mode!r}", field="solver.mode")
        return settings

    @classmethod
    def from_yaml(cls, config_path: Optional[str] = "config.yaml") -> "SolverSettings":
        return cls.from_config(load_config(config_path))


def configure_logging(level: str = "INFO", fmt: Optional[str] = None) -> None:
    """Set up root logging for command line use."""
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format=fmt or DEFAULT_CONFIG["logging"]["format"],
    )
