"""Integrated trajectories and convergence tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline


@dataclass(frozen=True, slots=True)
class StepStats:
    steps: int = 0
    rejected: int = 0
    evaluations: int = 0
    jacobians: int = 0


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Accepted nodes of an integration with a C1 Hermite interpolant through them."""

    times: np.ndarray
    states: np.ndarray
    derivatives: np.ndarray
    stats: StepStats = field(default_factory=StepStats)
    _spline: CubicHermiteSpline | None = field(init=False, repr=False, default=None)

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        states = np.atleast_2d(np.asarray(self.states, dtype=float))
        derivatives = np.atleast_2d(np.asarray(self.derivatives, dtype=float))
        if states.shape != derivatives.shape or states.shape[0] != times.size:
            raise ValueError("times, states and derivatives must have matching lengths")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "derivatives", derivatives)
        if times.size > 1:
            object.__setattr__(self, "_spline", CubicHermiteSpline(times, states, derivatives, axis=0))

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def final(self) -> np.ndarray:
        return self.states[-1].copy()

    def __call__(self, t: float | np.ndarray) -> np.ndarray:
        if self._spline is None:
            return np.broadcast_to(self.states[0], np.shape(t) + self.states[0].shape).copy()
        return self._spline(t)

    def covers(self, t0: float, t1: float, slack: float = 1e-12) -> bool:
        span = max(1.0, abs(self.t_end))
        return self.t_start <= t0 + slack * span and self.t_end >= t1 - slack * span


@dataclass(slots=True)
class ConvergenceRow:
    eps: float
    sup_err: float = math.nan
    tail_err: float = math.nan
    head_err: float = math.nan
    n_steps_full: int = 0
    n_steps_reduced: int = 0
    wall_ms: float = 0.0
    failed: bool = False
    reason: str = ""

    def tail_ok(self, slack: float, floor: float) -> bool:
        if self.failed:
            return False
        if not self.tail_err <= self.sup_err:
            return False
        return self.tail_err <= max((1.0 + slack) * self.head_err, floor)


@dataclass(slots=True)
class ConvergenceTable:
    system: str
    rows: list[ConvergenceRow] = field(default_factory=list)
    tau0: float = 0.1
    T: float = 50.0
    tail_slack: float = 0.25
    error_floor: float = 1e-10

    def row_ok(self, row: ConvergenceRow) -> bool:
        return row.tail_ok(self.tail_slack, self.error_floor)

    @property
    def monotone(self) -> bool:
        """sup_err strictly decreasing along the eps order of the rows."""

        errors = [row.sup_err for row in self.rows]
        if any(row.failed or not math.isfinite(row.sup_err) for row in self.rows):
            return False
        return all(b < a for a, b in zip(errors, errors[1:]))

    @property
    def ok(self) -> bool:
        return self.monotone and all(self.row_ok(row) for row in self.rows)

    def empirical_slope(self) -> float:
        """Least-squares slope of log(sup_err) against log(eps); nan when undefined."""

        usable = [(r.eps, r.sup_err) for r in self.rows if not r.failed and r.sup_err > 0]
        if len(usable) < 2:
            return math.nan
        eps, err = np.log(np.array(usable)).T
        return float(np.polyfit(eps, err, 1)[0])
