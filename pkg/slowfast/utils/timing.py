"""Wall-clock helpers."""

from __future__ import annotations

import time
from types import TracebackType


class Stopwatch:
    """Context manager measuring elapsed milliseconds; reads 0 when disabled."""

    def __init__(self, enabled: bool = True) -> None:
        self.enabled = enabled
        self._start = 0.0
        self.elapsed_ms = 0.0

    def __enter__(self) -> Stopwatch:
        self._start = time.perf_counter()
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        if self.enabled:
            self.elapsed_ms = (time.perf_counter() - self._start) * 1000.0


def is_window(tau0: float, t_end: float) -> bool:
    """True when ``[tau0, t_end]`` is a closed subinterval of ``(0, inf)`` with room for a tail."""

    return 0.0 < tau0 < t_end / 2
