"""Full-versus-reduced convergence sweeps on a slow-time window."""

from __future__ import annotations

import asyncio
import logging
from typing import Sequence

import numpy as np

from ..core.errors import SlowFastError, WindowError
from ..models.manifold import SlowManifold
from ..models.reduction import ReducedField
from ..models.settings import (
    DEFAULT_INTEGRATOR,
    DEFAULT_TOLERANCES,
    IntegratorConfig,
    SweepConfig,
    Tolerances,
)
from ..models.system import PerturbedSystem
from ..models.trajectory import ConvergenceRow, ConvergenceTable, Trajectory
from ..utils.timing import Stopwatch, is_window
from .integration_service import integrate
from .manifold_service import fast_fiber_project
from .reduction_service import reduced_rhs


def _errors(full: Trajectory, reduced: Trajectory, times: np.ndarray) -> np.ndarray:
    return np.max(np.abs(full(times) - reduced(times)), axis=1)


def compare_on_window(
    full: Trajectory, reduced: Trajectory, tau0: float, T: float, grid: int = 512  # noqa: N803
) -> float:
    """Sup-norm distance of the dense outputs on a uniform grid over ``[tau0, T]``."""

    if tau0 <= 0:
        raise WindowError(f"window must start after 0, got tau0={tau0}")
    if tau0 >= T:
        raise WindowError(f"empty window [{tau0}, {T}]")
    for name, trajectory in (("full", full), ("reduced", reduced)):
        if not trajectory.covers(tau0, T):
            raise WindowError(
                f"{name} trajectory spans [{trajectory.t_start:g}, {trajectory.t_end:g}], "
                f"window is [{tau0:g}, {T:g}]"
            )
    return float(np.max(_errors(full, reduced, np.linspace(tau0, T, grid))))


def _row(
    system: PerturbedSystem,
    eps: float,
    x0: np.ndarray,
    reduced: Trajectory,
    tau0: float,
    T: float,  # noqa: N803
    cfg: IntegratorConfig,
    sweep: SweepConfig,
    timing: bool,
) -> ConvergenceRow:
    row = ConvergenceRow(eps=eps, n_steps_reduced=reduced.stats.steps)
    with Stopwatch(timing) as watch:
        try:
            full = integrate(system.slow_time_field(eps), x0, (0.0, T), cfg)
        # numpy LinAlgError and scipy non-finite input checks are ValueErrors
        except (SlowFastError, ValueError) as exc:
            logging.warning("full system at eps=%g failed", eps, exc_info=exc)
            row.failed = True
            row.reason = str(exc)
            return row
    row.n_steps_full = full.stats.steps
    row.wall_ms = watch.elapsed_ms
    half = T / 2
    times = np.union1d(np.linspace(tau0, T, sweep.grid), np.linspace(half, T, sweep.grid))
    errors = _errors(full, reduced, times)
    row.sup_err = float(np.max(errors))
    row.tail_err = float(np.max(errors[times >= half]))
    row.head_err = float(np.max(errors[times <= half]))
    logging.info(
        "eps=%g sup=%.3e tail=%.3e head=%.3e steps=%d",
        eps, row.sup_err, row.tail_err, row.head_err, row.n_steps_full,
    )
    return row


async def convergence_sweep(
    system: PerturbedSystem,
    field: ReducedField,
    mf: SlowManifold,
    x0: Sequence[float],
    eps_list: Sequence[float],
    tau0: float,
    T: float,  # noqa: N803
    cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
    sweep: SweepConfig | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    timing: bool = True,
) -> ConvergenceTable:
    """Integrate the full system in slow time for each eps against one reduced trajectory.

    The reduced system starts from the fast-fiber projection of ``x0`` and is
    integrated once; full-system rows run concurrently in worker threads. A row
    whose integration fails is marked failed and the sweep continues.
    """

    sweep = sweep or SweepConfig()
    if not eps_list:
        raise ValueError("eps_list must not be empty")
    if any(e <= 0 for e in eps_list) or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError(f"eps_list must be positive and strictly decreasing, got {list(eps_list)}")
    if not is_window(tau0, T):
        raise WindowError(f"need 0 < tau0 < T/2, got tau0={tau0}, T={T}")

    start = system.check_point(x0)
    projected = fast_fiber_project(system, mf, start, tolerances)
    reduced = integrate(
        lambda x: reduced_rhs(field, x), projected, (0.0, T), cfg.model_copy(update={"method": "explicit"})
    )
    logging.info("reduced trajectory from %s: %d steps", projected.tolist(), reduced.stats.steps)

    limit = asyncio.Semaphore(sweep.max_workers)

    async def run_row(eps: float) -> ConvergenceRow:
        async with limit:
            return await asyncio.to_thread(_row, system, eps, start, reduced, tau0, T, cfg, sweep, timing)

    rows = await asyncio.gather(*(run_row(float(eps)) for eps in eps_list))
    return ConvergenceTable(
        system=system.name, rows=list(rows), tau0=tau0, T=T,
        tail_slack=sweep.tail_slack, error_floor=sweep.error_floor,
    )


def run_convergence_sweep(*args: object, **kwargs: object) -> ConvergenceTable:
    """Blocking wrapper around :func:`convergence_sweep`."""

    return asyncio.run(convergence_sweep(*args, **kwargs))  # type: ignore[arg-type]


class ConvergenceService:
    """Sweeps with the configured integrator and sweep settings."""

    def __init__(
        self,
        integrator: IntegratorConfig = DEFAULT_INTEGRATOR,
        sweep: SweepConfig | None = None,
        tolerances: Tolerances = DEFAULT_TOLERANCES,
    ) -> None:
        self.integrator = integrator
        self.sweep = sweep or SweepConfig()
        self.tolerances = tolerances

    async def sweep_example(
        self,
        system: PerturbedSystem,
        field: ReducedField,
        mf: SlowManifold,
        x0: Sequence[float],
        eps_list: Sequence[float],
        tau0: float,
        T: float,  # noqa: N803
        timing: bool = True,
    ) -> ConvergenceTable:
        return await convergence_sweep(
            system, field, mf, x0, eps_list, tau0, T, self.integrator, self.sweep, self.tolerances, timing
        )
