"""
Per-iteration trace records and the CSV trace sink.
"""
import csv
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional

from .lp import PathState

logger = logging.getLogger(__name__)

TRACE_COLUMNS = (
    "iter",
    "phase",
    "t",
    "l2_centrality",
    "phi",
    "gap",
    "update_rank",
    "snapshot_refresh",
)


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    t: float
    l2_centrality: float
    gap: float
    phi: Optional[float] = None
    update_rank: int = 0
    snapshot_refresh: bool = False
    phase: str = ""
    state: Optional[PathState] = None

    def with_phase(self, phase: str) -> "TraceRecord":
        return replace(self, phase=phase)

    def as_row(self):
        return [
            str(self.iteration),
            self.phase,
            _fmt(self.t),
            _fmt(self.l2_centrality),
            "" if self.phi is None else _fmt(self.phi),
            _fmt(self.gap),
            str(self.update_rank),
            "1" if self.snapshot_refresh else "0",
        ]


TraceSink = Callable[[TraceRecord], None]


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


class CsvTraceSink:
    """Writes one CSV row per iteration; the header is written once, on open."""

    def __init__(self, path: str):
        self.path = Path(path)
        self.rows = 0
        self._file = open(self.path, "w", newline="")
        self._writer = csv.writer(self._file)
        self._writer.writerow(TRACE_COLUMNS)

    def __call__(self, record: TraceRecord) -> None:
        self._writer.writerow(record.as_row())
        self.rows += 1

    def close(self) -> None:
        if not self._file.closed:
            self._file.flush()
            self._file.close()
            logger.info("Wrote %d trace rows to %s", self.rows, self.path)

    def __enter__(self) -> "CsvTraceSink":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def emit_trace(sink: Optional[TraceSink], record: TraceRecord) -> None:
    """Append one record to ``sink`` (no-op without a sink)."""
    if sink is not None:
        sink(record)
