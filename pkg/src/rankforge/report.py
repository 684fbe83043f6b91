"""Result records shared by the three rank-equality routes and the verifier."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

ROUTES = ("elementary", "ulv", "cr", "oracle")


@dataclass
class RankReportEntry:
    """Outcome of one route's row-rank / column-rank computation.

    ``passed`` is true only when the two ranks agree *and* every named check in
    ``checks`` succeeded. ``residuals`` is empty in exact mode. A route that
    raised carries the message in ``error`` and ``None`` ranks.
    """

    route: str
    row_rank: int | None
    col_rank: int | None
    checks: dict[str, bool] = field(default_factory=dict)
    residuals: dict[str, float] = field(default_factory=dict)
    timing_ms: float = 0.0
    error: str | None = None

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")

    @property
    def passed(self) -> bool:
        return (
            self.error is None
            and self.row_rank is not None
            and self.row_rank == self.col_rank
            and all(self.checks.values())
        )

    def to_dict(self) -> dict:
        return {
            "route": self.route,
            "row_rank": self.row_rank,
            "col_rank": self.col_rank,
            "pass": self.passed,
            "checks": dict(sorted(self.checks.items())),
            "residuals": dict(sorted(self.residuals.items())),
            "timing_ms": self.timing_ms,
            "error": self.error,
        }


@contextmanager
def stopwatch():
    """Yields a one-element list that receives the elapsed milliseconds on exit."""
    box = [0.0]
    start = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = (time.perf_counter() - start) * 1000.0
