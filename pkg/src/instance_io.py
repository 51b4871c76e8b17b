"""
YAML instance files.

    rows: 1
    cols: 2
    A: [1.0, 1.0]          # row-major
    b: [1.0]
    c: [1.0, 2.0]
    params:                # optional
      r: 0.5
      R: 1.0
      L: 2.23606797749979  # optional, must be >= ||c||_2
"""
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np
import yaml

from .errors import ParseError
from .lp import LpInstance, LpParameters

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("rows", "cols", "A", "b", "c")


def _field_lines(text: str) -> Dict[str, int]:
    """Line number of each top-level key, for error messages."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {key.value: key.start_mark.line + 1 for key, _ in node.value}


def _numbers(value: Any, name: str, size: int, lines: Dict[str, int]) -> np.ndarray:
    line = lines.get(name)
    if not isinstance(value, list):
        raise ParseError("expected a list of numbers", line=line, field=name)
    if len(value) != size:
        raise ParseError(f"expected {size} entries, found {len(value)}", line=line, field=name)
    out = np.empty(size)
    for i, entry in enumerate(value):
        # YAML 1.1 reads exponents without a dot (1e-6) as strings
        if isinstance(entry, bool) or not isinstance(entry, (int, float, str)):
            raise ParseError(f"non-numeric entry {entry!r}", line=line, field=name)
        try:
            out[i] = float(entry)
        except ValueError as e:
            raise ParseError(f"non-numeric entry {entry!r}", line=line, field=name) from e
    return out


def _positive_int(doc: Dict[str, Any], name: str, lines: Dict[str, int]) -> int:
    value = doc[name]
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise ParseError(f"expected a positive integer, found {value!r}", line=lines.get(name), field=name)
    return value


def load_instance(path: str) -> Tuple[LpInstance, Optional[LpParameters]]:
    """Read an instance file; params is None when the file has no params section."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read instance file {path}: {e}") from e

    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ParseError(f"invalid YAML: {e}", line=mark.line + 1 if mark is not None else None) from e
    if not isinstance(doc, dict):
        raise ParseError("instance file must contain a mapping at top level")

    lines = _field_lines(text)
    for name in REQUIRED_FIELDS:
        if name not in doc:
            raise ParseError("missing required field", field=name)

    rows = _positive_int(doc, "rows", lines)
    cols = _positive_int(doc, "cols", lines)
    A = _numbers(doc["A"], "A", rows * cols, lines).reshape(rows, cols)
    b = _numbers(doc["b"], "b", rows, lines)
    c = _numbers(doc["c"], "c", cols, lines)
    lp = LpInstance(A, b, c)

    params = None
    raw = doc.get("params")
    if raw is not None:
        line = lines.get("params")
        if not isinstance(raw, dict):
            raise ParseError("expected a mapping with r, R and optional L", line=line, field="params")
        for key in ("r", "R"):
            if key not in raw:
                raise ParseError("missing required entry", line=line, field=f"params.{key}")
        try:
            params = LpParameters.for_instance(
                lp, float(raw["r"]), float(raw["R"]), None if raw.get("L") is None else float(raw["L"])
            )
        except (TypeError, ValueError) as e:
            raise ParseError(f"non-numeric parameter: {e}", line=line, field="params") from e

    logger.debug("loaded %d x %d instance from %s", rows, cols, path)
    return lp, params


def save_instance(path: str, lp: LpInstance, params: Optional[LpParameters] = None) -> None:
    """Write an instance file; floats use repr, so loading returns identical values."""
    doc: Dict[str, Any] = {
        "rows": lp.d,
        "cols": lp.n,
        "A": [float(v) for v in lp.A.reshape(-1)],
        "b": [float(v) for v in lp.b],
        "c": [float(v) for v in lp.c],
    }
    if params is not None:
        doc["params"] = {"r": params.inner_radius, "R": params.outer_radius, "L": params.lipschitz}
    with open(path, "w") as f:
        yaml.safe_dump(doc, f, sort_keys=False, default_flow_style=None)
