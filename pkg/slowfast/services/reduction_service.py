"""Tikhonov-Fenichel reduction from a product decomposition."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from ..core import dual
from ..core.errors import DecompositionError, SingularPencil
from ..core.linalg import numeric_rank
from ..core.verdicts import Certified, Failed, Verdict
from ..models.reduction import Decomposition, ReducedField
from ..models.settings import DEFAULT_TOLERANCES, Tolerances
from ..models.system import PerturbedSystem


@dataclass(frozen=True, slots=True)
class DecompositionReport:
    max_residual: float
    rank_p: int
    rank_dmu: int
    worst_condition: float
    worst_point: tuple[float, ...]
    samples: int
    ok: bool
    reason: str = ""


def decompose_structural(
    stoichiometry: np.ndarray,
    fast_columns: Sequence[int],
    rates: Callable[[Sequence[Any]], Sequence[Any]],
) -> Decomposition:
    """``P`` = fast stoichiometric columns, ``mu`` = fast reaction rates."""

    s = np.atleast_2d(np.asarray(stoichiometry, dtype=float))
    columns = tuple(int(c) for c in fast_columns)
    if not columns:
        raise DecompositionError("at least one fast reaction is required")
    if any(c < 0 or c >= s.shape[1] for c in columns):
        raise DecompositionError(f"fast columns {columns} out of range for {s.shape[1]} reactions")
    p = s[:, list(columns)].copy()
    rank = numeric_rank(p) if np.any(p) else 0
    if rank < len(columns):
        raise DecompositionError(
            f"fast stoichiometric columns {columns} have rank {rank} < {len(columns)}; "
            "merge dependent fast reactions (e.g. a reversible pair) into one net reaction"
        )

    def mu(x: Sequence[Any]) -> list[Any]:
        v = rates(x)
        return [v[c] for c in columns]

    def p_map(_: Sequence[Any]) -> np.ndarray:
        return p

    return Decomposition(
        r=len(columns), P=p_map, mu=mu, source="reaction-structural", fast_columns=columns
    )


def _pencil(d: Decomposition, x: np.ndarray, cond_max: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    p = d.p_matrix(x)
    dmu = d.dmu(x)
    pencil = dmu @ p
    condition = float(np.linalg.cond(pencil))
    if not np.isfinite(condition) or condition > cond_max:
        raise SingularPencil(condition, x)
    return p, dmu, pencil


def projection_Q(d: Decomposition, x: Sequence[float] | np.ndarray, cond_max: float = 1e10) -> np.ndarray:  # noqa: N802
    point = np.asarray(x, dtype=float).ravel()
    p, dmu, pencil = _pencil(d, point, cond_max)
    return np.eye(point.size) - p @ np.linalg.solve(pencil, dmu)


def reduced_rhs(field: ReducedField, x: Sequence[float] | np.ndarray) -> np.ndarray:
    """``q(x) = Q(x)·h1(x)`` without forming Q explicitly."""

    point = np.asarray(x, dtype=float).ravel()
    p, dmu, pencil = _pencil(field.decomposition, point, field.cond_max)
    h1 = np.asarray(field.h1(point), dtype=float)
    return h1 - p @ np.linalg.solve(pencil, dmu @ h1)


def reduce_system(system: PerturbedSystem, d: Decomposition, cond_max: float = 1e10) -> ReducedField:
    return ReducedField(decomposition=d, h1=system.h1, cond_max=cond_max)


def verify_decomposition(
    d: Decomposition,
    system: PerturbedSystem,
    samples: Sequence[Sequence[float]] | np.ndarray,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    residual_tol: float = 1e-10,
) -> DecompositionReport:
    """Residual of ``h0 - P·mu``, ranks at the first sample and worst ``cond(Dmu·P)``."""

    points = np.atleast_2d(np.asarray(samples, dtype=float))
    if points.size == 0:
        raise ValueError("verify_decomposition needs at least one sample")
    worst_residual = 0.0
    worst_condition = 0.0
    worst_point = tuple(points[0])
    reason = ""
    for x in points:
        h0 = np.asarray(system.h0(x), dtype=float)
        product = d.p_matrix(x) @ d.mu_value(x)
        residual = float(np.max(np.abs(h0 - product)) / (1.0 + np.max(np.abs(h0))))
        if residual > worst_residual:
            worst_residual = residual
            if residual > residual_tol:
                worst_point = tuple(x)
        try:
            condition = float(np.linalg.cond(d.dmu(x) @ d.p_matrix(x)))
        except np.linalg.LinAlgError:
            condition = float("inf")
        if not np.isfinite(condition) or condition > worst_condition:
            worst_condition = condition
            if worst_residual <= residual_tol:
                worst_point = tuple(x)
    x0 = points[0]
    rank_p = numeric_rank(d.p_matrix(x0), tolerances.rank_tol)
    rank_dmu = numeric_rank(d.dmu(x0), tolerances.rank_tol)
    ok = True
    if worst_residual > residual_tol:
        ok, reason = False, f"h0 - P·mu residual {worst_residual:.3e}"
    elif rank_p != d.r or rank_dmu != d.r:
        ok, reason = False, f"ranks (P, Dmu) = ({rank_p}, {rank_dmu}), expected {d.r}"
    elif not np.isfinite(worst_condition) or worst_condition > tolerances.cond_max:
        ok, reason = False, f"Dmu·P condition {worst_condition:.3e}"
    if not ok:
        logging.warning("decomposition check failed: %s at %s", reason, worst_point)
    return DecompositionReport(
        max_residual=worst_residual,
        rank_p=rank_p,
        rank_dmu=rank_dmu,
        worst_condition=worst_condition,
        worst_point=tuple(float(v) for v in worst_point),
        samples=len(points),
        ok=ok,
        reason=reason,
    )


class ReductionService:
    """Builds and evaluates reduced fields under one set of tolerances."""

    def __init__(self, tolerances: Tolerances = DEFAULT_TOLERANCES) -> None:
        self.tolerances = tolerances

    def reduce(self, system: PerturbedSystem, d: Decomposition) -> ReducedField:
        return reduce_system(system, d, self.tolerances.cond_max)

    def verify(self, d: Decomposition, system: PerturbedSystem, samples: np.ndarray) -> DecompositionReport:
        return verify_decomposition(d, system, samples, self.tolerances)

    def q(self, field: ReducedField, x: Sequence[float]) -> np.ndarray:
        return reduced_rhs(field, x)

    def q_jacobian(self, field: ReducedField, x: Sequence[float], step: float = 1e-6) -> np.ndarray:
        """Central finite differences of q; Q depends on Dmu, which duals cannot nest."""

        point = np.asarray(x, dtype=float)
        cols = []
        for i in range(point.size):
            h = step * max(1.0, abs(point[i]))
            e = np.zeros(point.size)
            e[i] = h
            cols.append((reduced_rhs(field, point + e) - reduced_rhs(field, point - e)) / (2 * h))
        return np.column_stack(cols)

    def mu_jacobian(self, d: Decomposition, x: Sequence[float]) -> np.ndarray:
        return dual.jacobian(d.mu, x)


def check_projection(
    field: ReducedField, points: np.ndarray, tol: float = 1e-9
) -> Verdict:
    """``Q² = Q``, ``QP = 0``, ``Dmu·q = 0`` and ``trace Q = m - r`` at every point."""

    d = field.decomposition
    worst = 0.0
    witness: np.ndarray | None = None
    for x in np.atleast_2d(points):
        q_matrix = projection_Q(d, x, field.cond_max)
        scale = max(1.0, float(np.max(np.abs(q_matrix))))
        deviations = (
            float(np.max(np.abs(q_matrix @ q_matrix - q_matrix))) / scale,
            float(np.max(np.abs(q_matrix @ d.p_matrix(x)))) / scale,
            float(np.max(np.abs(d.dmu(x) @ reduced_rhs(field, x)))),
            abs(float(np.trace(q_matrix)) - (x.size - d.r)),
        )
        if max(deviations) > worst:
            worst, witness = max(deviations), x
    margins = {"deviation": worst}
    if worst > tol and witness is not None:
        return Failed(
            condition="projection", witness=witness, margins=margins, samples=len(points),
            reason=f"projection identities violated by {worst:.3e}",
        )
    return Certified(condition="projection", margins=margins, samples=len(points))


def compare_oracle(
    field: ReducedField,
    oracle: Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    rtol: float = 1e-9,
) -> Verdict:
    """Relative gap ``|q - oracle| / (1 + |oracle|)`` at manifold points."""

    worst = 0.0
    witness: np.ndarray | None = None
    for x in np.atleast_2d(points):
        expected = np.asarray(oracle(x), dtype=float)
        gap = float(np.max(np.abs(reduced_rhs(field, x) - expected) / (1.0 + np.abs(expected))))
        if gap > worst:
            worst, witness = gap, x
    margins = {"relative_gap": worst}
    if worst >= rtol and witness is not None:
        return Failed(
            condition="oracle", witness=witness, margins=margins, samples=len(points),
            reason=f"reduced field differs from the closed form by {worst:.3e}",
        )
    return Certified(condition="oracle", margins=margins, samples=len(points))
