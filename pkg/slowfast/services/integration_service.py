"""Initial-value integration: a three-stage Rosenbrock method and scipy's RK45."""

from __future__ import annotations

import logging
import math
from typing import Any, Callable, Sequence

import numpy as np
from scipy.integrate import RK45
from scipy.linalg import lu_factor, lu_solve

from ..core import dual
from ..core.errors import IntegrationError, StiffnessDetected
from ..models.settings import DEFAULT_INTEGRATOR, IntegratorConfig
from ..models.trajectory import StepStats, Trajectory

Field = Callable[[Sequence[Any]], Sequence[Any]]
JacobianMap = Callable[[np.ndarray], np.ndarray]

# L-stable order-3 Rosenbrock tableau with an embedded order-2 estimate.
# Stage 3 reuses f(Y2) because A31 = A21 and A32 = 0.
GAMMA = 0.43586652150845899941601945119356
A21 = 1.0
C21 = -1.0156171083877702091975600115545
C31 = 4.0759956452537699824805835358067
C32 = 9.2076794298330791242156818474003
M = (1.0, 6.1697947043828245592553615689730, -0.42772256543218573326238373806514)
E = (0.5, -2.9079558716805469821718236208017, 0.22354069897811569627360909276199)
ORDER = 3

FAC_MIN = 0.2
FAC_MAX = 6.0
FAC_SAFE = 0.9
FAC_REJECT = 0.1
UNDERFLOW = 1e-14


def _evaluate(f: Field, x: np.ndarray) -> np.ndarray:
    return np.asarray(f(x), dtype=float).ravel()


def _error_norm(err: np.ndarray, y: np.ndarray, ynew: np.ndarray, cfg: IntegratorConfig) -> float:
    scale = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(ynew))
    value = float(np.sqrt(np.mean((err / scale) ** 2)))
    return max(value, 1e-10) if math.isfinite(value) else math.inf


def _initial_step(
    f: Field, y: np.ndarray, fy: np.ndarray, span: float, cfg: IntegratorConfig
) -> float:
    """Starting step from the size of ``f`` and its change over one small explicit step."""

    scale = cfg.atol + cfg.rtol * np.abs(y)
    d0 = float(np.sqrt(np.mean((y / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((fy / scale) ** 2)))
    h0 = 1e-6 * span if d0 < 1e-5 or d1 < 1e-5 else min(0.01 * d0 / d1, span)
    try:
        f1 = _evaluate(f, y + h0 * fy)
    except (ValueError, ArithmeticError):
        return h0
    d2 = float(np.sqrt(np.mean(((f1 - fy) / scale) ** 2))) / h0
    if not math.isfinite(d2):
        return h0
    if max(d1, d2) <= 1e-15:
        return max(1e-6 * span, 1e-3 * h0)
    return min(100.0 * h0, (0.01 / max(d1, d2)) ** (1.0 / (ORDER + 1)))


def _partial(times: list[float], states: list[np.ndarray], derivs: list[np.ndarray], stats: StepStats) -> Trajectory:
    return Trajectory(np.array(times), np.array(states), np.array(derivs), stats)


def _rosenbrock(
    f: Field, x0: np.ndarray, t0: float, t1: float, cfg: IntegratorConfig, jac: JacobianMap
) -> Trajectory:
    span = t1 - t0
    n = x0.size
    identity = np.eye(n)
    y = x0.copy()
    fy = _evaluate(f, y)
    t = t0
    times, states, derivs = [t], [y.copy()], [fy.copy()]
    steps = rejected = evaluations = jacobians = 0
    evaluations += 1

    if cfg.adaptive:
        if cfg.h_init is None:
            h = _initial_step(f, y, fy, span, cfg)
            evaluations += 1
        else:
            h = cfg.h_init
        h = min(h, cfg.h_max, span)
    else:
        if cfg.h_init is None:
            raise ValueError("fixed-step integration needs h_init")
        count = max(1, math.ceil(span / cfg.h_init - 1e-9))
        h = span / count

    jacobian_at: float | None = None
    jm = np.zeros((n, n))
    consecutive_rejects = 0
    while t1 - t > 1e-13 * span:
        if steps + rejected >= cfg.max_steps:
            stats = StepStats(steps, rejected, evaluations, jacobians)
            raise IntegrationError(
                f"max_steps={cfg.max_steps} exceeded at t={t:.6g}",
                _partial(times, states, derivs, stats),
            )
        if h < UNDERFLOW * span:
            raise StiffnessDetected(t, h)
        if t1 - (t + h) < 1e-12 * span:
            h = t1 - t

        if jacobian_at != t:
            jm = np.asarray(jac(y), dtype=float).reshape(n, n)
            jacobians += 1
            jacobian_at = t
        lu = lu_factor(identity / (h * GAMMA) - jm)
        k1 = lu_solve(lu, fy)
        f2 = _evaluate(f, y + A21 * k1)
        k2 = lu_solve(lu, f2 + (C21 / h) * k1)
        k3 = lu_solve(lu, f2 + (C31 * k1 + C32 * k2) / h)
        evaluations += 1
        ynew = y + M[0] * k1 + M[1] * k2 + M[2] * k3

        if cfg.adaptive:
            err = _error_norm(E[0] * k1 + E[1] * k2 + E[2] * k3, y, ynew, cfg)
        elif np.all(np.isfinite(ynew)):
            err = 0.0
        else:
            stats = StepStats(steps, rejected, evaluations, jacobians)
            raise IntegrationError(
                f"non-finite state at t={t + h:.6g}", _partial(times, states, derivs, stats)
            )

        if err <= 1.0:
            t += h
            y = ynew
            fy = _evaluate(f, y)
            evaluations += 1
            steps += 1
            times.append(t)
            states.append(y.copy())
            derivs.append(fy.copy())
            if cfg.adaptive:
                fac = min(FAC_MAX, max(FAC_MIN, FAC_SAFE / err ** (1.0 / ORDER)))
                if consecutive_rejects:
                    fac = min(fac, 1.0)
                h = min(h * fac, cfg.h_max)
            consecutive_rejects = 0
        else:
            rejected += 1
            consecutive_rejects += 1
            if consecutive_rejects >= 2 or not math.isfinite(err):
                h *= FAC_REJECT
            else:
                h *= max(FAC_MIN, FAC_SAFE / err ** (1.0 / ORDER))

    return _partial(times, states, derivs, StepStats(steps, rejected, evaluations, jacobians))


def _explicit(f: Field, x0: np.ndarray, t0: float, t1: float, cfg: IntegratorConfig) -> Trajectory:
    solver = RK45(
        lambda _t, y: _evaluate(f, y), t0, x0, t1,
        rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.h_max,
        first_step=min(cfg.h_init, t1 - t0) if cfg.h_init else None,
    )
    times = [t0]
    states = [x0.copy()]
    derivs = [_evaluate(f, x0)]
    steps = 0
    while solver.status == "running":
        if steps >= cfg.max_steps:
            stats = StepStats(steps, max(0, (solver.nfev - 2) // 6 - steps), solver.nfev, 0)
            raise IntegrationError(
                f"max_steps={cfg.max_steps} exceeded at t={solver.t:.6g}",
                _partial(times, states, derivs, stats),
            )
        message = solver.step()
        if solver.status == "failed":
            stats = StepStats(steps, max(0, (solver.nfev - 2) // 6 - steps), solver.nfev, 0)
            if solver.step_size is not None and solver.step_size < UNDERFLOW * (t1 - t0):
                raise StiffnessDetected(solver.t, solver.step_size)
            raise IntegrationError(
                f"RK45 failed at t={solver.t:.6g}: {message}", _partial(times, states, derivs, stats)
            )
        steps += 1
        times.append(float(solver.t))
        states.append(np.array(solver.y))
        derivs.append(np.array(solver.f))
    stats = StepStats(steps, max(0, (solver.nfev - 2) // 6 - steps), solver.nfev, 0)
    return _partial(times, states, derivs, stats)


def integrate(
    f: Field,
    x0: Sequence[float] | np.ndarray,
    t_span: tuple[float, float],
    cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
    jac: JacobianMap | None = None,
) -> Trajectory:
    """Integrate the autonomous field ``f`` from ``x0`` over ``t_span``.

    ``method="implicit"`` uses the Rosenbrock scheme, with ``jac`` or a dual-number
    Jacobian of ``f``; ``method="explicit"`` drives scipy's RK45 step by step.
    """

    t0, t1 = (float(v) for v in t_span)
    if not t1 > t0:
        raise ValueError(f"integration span must be increasing, got {t_span}")
    start = np.asarray(x0, dtype=float).ravel()
    if not np.all(np.isfinite(start)):
        raise ValueError(f"initial state must be finite, got {start.tolist()}")
    if cfg.method == "explicit":
        trajectory = _explicit(f, start, t0, t1, cfg)
    else:
        jacobian = jac if jac is not None else (lambda x: dual.jacobian(f, x))
        trajectory = _rosenbrock(f, start, t0, t1, cfg, jacobian)
    logging.debug(
        "integrated %s over [%g, %g]: %d steps, %d rejected",
        cfg.method, t0, t1, trajectory.stats.steps, trajectory.stats.rejected,
    )
    return trajectory


class IntegrationService:
    """Runs integrations with a configured default method."""

    def __init__(self, config: IntegratorConfig = DEFAULT_INTEGRATOR) -> None:
        self.config = config

    def run(
        self, f: Field, x0: Sequence[float], t_span: tuple[float, float],
        jac: JacobianMap | None = None, **overrides: Any,
    ) -> Trajectory:
        cfg = self.config.model_copy(update=overrides) if overrides else self.config
        return integrate(f, x0, t_span, cfg, jac)
