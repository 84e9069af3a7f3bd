"""Sampling, curve tracing and fast-fiber projection on slow manifolds."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from ..core.errors import (
    ConstantRankViolation,
    ContinuationStalled,
    OffManifold,
    ProjectionDiverged,
)
from ..core.linalg import numeric_rank
from ..models.manifold import (
    CurveChart,
    CurveSpec,
    GraphChart,
    ManifoldSample,
    SlowManifold,
    correct_onto,
)
from ..models.polytope import Polytope, membership
from ..models.reduction import Decomposition
from ..models.settings import DEFAULT_TOLERANCES, IntegratorConfig, Tolerances
from ..models.system import PerturbedSystem
from .integration_service import integrate

MAX_STALLS = 3
MAX_NODES = 20_000
PROJECTION_T_MAX = 1e4
DIVERGENCE_RADIUS = 1e6


def _null_direction(d: Decomposition, x: np.ndarray) -> np.ndarray:
    _, _, vt = np.linalg.svd(d.dmu(x))
    return vt[-1]


def _corrector(
    d: Decomposition, predicted: np.ndarray, tangent: np.ndarray, tol: float, max_iter: int = 12
) -> np.ndarray:
    """Newton on ``[mu(x); t·(x - predicted)] = 0``."""

    x = predicted.copy()
    for _ in range(max_iter):
        residual = np.concatenate([d.mu_value(x), [float(tangent @ (x - predicted))]])
        if np.max(np.abs(residual)) <= 1e-2 * tol:
            return x
        system = np.vstack([d.dmu(x), tangent])
        step = np.linalg.solve(system, residual)
        x -= step
        if not np.all(np.isfinite(x)):
            break
    if np.all(np.isfinite(x)) and d.residual(x) <= tol:
        return x
    raise OffManifold(d.residual(x) if np.all(np.isfinite(x)) else float("inf"), tol)


def _boundary_point(
    d: Decomposition, region: Polytope, current: np.ndarray, tangent: np.ndarray,
    length: float, tol: float, membership_tol: float,
) -> np.ndarray | None:
    lo, hi = 0.0, length
    best = None
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        try:
            candidate = _corrector(d, current + mid * tangent, tangent, tol)
        except (OffManifold, np.linalg.LinAlgError):
            hi = mid
            continue
        if membership(region, candidate, membership_tol).status == "outside":
            hi = mid
        else:
            lo, best = mid, candidate
    if best is None or lo <= 1e-9 * length:
        return None
    return best


def _march(
    d: Decomposition, region: Polytope, start: np.ndarray, tangent: np.ndarray,
    step: float, tol: float, membership_tol: float, max_nodes: int,
) -> tuple[list[np.ndarray], str]:
    nodes: list[np.ndarray] = []
    current = start
    h = step
    stalls = 0
    while len(nodes) < max_nodes:
        try:
            candidate = _corrector(d, current + h * tangent, tangent, tol)
        except (OffManifold, np.linalg.LinAlgError) as exc:
            stalls += 1
            h *= 0.5
            if stalls >= MAX_STALLS:
                logging.warning("continuation stalled near %s", current.tolist(), exc_info=exc)
                return nodes, f"continuation stalled after {MAX_STALLS} failed corrections near {current.tolist()}"
            continue
        stalls = 0
        if membership(region, candidate, membership_tol).status == "outside":
            edge = _boundary_point(d, region, current, tangent, h, tol, membership_tol)
            if edge is not None:
                nodes.append(edge)
            return nodes, ""
        if len(nodes) > 2 and np.linalg.norm(candidate - start) < 0.5 * step:
            return nodes, "closed curve"
        direction = _null_direction(d, candidate)
        if direction @ tangent < 0:
            direction = -direction
        nodes.append(candidate)
        current, tangent = candidate, direction
        h = min(step, 2.0 * h)
    return nodes, f"node limit {max_nodes} reached"


def trace_curve(
    d: Decomposition,
    region: Polytope,
    spec: CurveSpec,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    max_nodes: int = MAX_NODES,
) -> CurveChart:
    """Predictor-corrector continuation of a one-dimensional ``{mu = 0}`` in both directions."""

    if region.dim - d.r != 1:
        raise ValueError(f"curve tracing needs a one-dimensional manifold, got dimension {region.dim - d.r}")
    seed = correct_onto(d, np.asarray(spec.seed, dtype=float), tolerances.tol_y)
    if membership(region, seed, tolerances.membership_tol).status == "outside":
        raise OffManifold(d.residual(seed), tolerances.tol_y)
    step = spec.step or region.diameter() / 256
    tangent = _null_direction(d, seed)
    forward, note_f = _march(d, region, seed, tangent, step, tolerances.tol_y, tolerances.membership_tol, max_nodes)
    if note_f == "closed curve":
        backward, note_b = [], ""
    else:
        backward, note_b = _march(d, region, seed, -tangent, step, tolerances.tol_y, tolerances.membership_tol, max_nodes)
    nodes = [*backward[::-1], seed, *forward]
    diagnostic = "; ".join(n for n in (note_b, note_f) if n)
    if len(nodes) < 2:
        raise ContinuationStalled(f"no continuation step succeeded from {seed.tolist()}: {diagnostic}")
    logging.debug("traced %d nodes (%s)", len(nodes), diagnostic or "boundary to boundary")
    return CurveChart(d, np.array(nodes), tol=tolerances.tol_y, diagnostic=diagnostic)


def _dedupe(points: Sequence[np.ndarray], spacing: float) -> list[int]:
    kept: list[int] = []
    for i, p in enumerate(points):
        if all(np.linalg.norm(p - points[j]) > spacing for j in kept):
            kept.append(i)
    return kept


class ManifoldService:
    """Charts and samples slow manifolds; traced curves are cached per manifold."""

    def __init__(self, tolerances: Tolerances = DEFAULT_TOLERANCES) -> None:
        self.tolerances = tolerances
        self._curves: dict[SlowManifold, CurveChart] = {}

    def curve_chart(self, mf: SlowManifold) -> CurveChart:
        if not isinstance(mf.chart, CurveSpec):
            raise ValueError(f"manifold chart is {mf.chart_kind}, not a traced curve")
        chart = self._curves.get(mf)
        if chart is None:
            chart = trace_curve(mf.decomposition, mf.region, mf.chart, self.tolerances)
            self._curves[mf] = chart
        return chart

    def sample(self, mf: SlowManifold, n: int, rng: np.random.Generator | None = None) -> ManifoldSample:
        return sample_manifold(mf, n, rng, self)

    def project(self, system: PerturbedSystem, mf: SlowManifold, x: Sequence[float]) -> np.ndarray:
        return fast_fiber_project(system, mf, x, self.tolerances)

    def tangent(self, mf: SlowManifold, x: Sequence[float]) -> np.ndarray:
        return tangent_space(mf, x, self.tolerances)


def _graph_sample(mf: SlowManifold, chart: GraphChart, n: int, tol: Tolerances) -> ManifoldSample:
    axes = [np.linspace(lo, hi, n) for lo, hi in zip(chart.lower, chart.upper)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, chart.dim)
    points, params = [], []
    for w in grid:
        x = chart.embed(w)
        if not np.all(np.isfinite(x)):
            continue
        if membership(mf.region, x, tol.membership_tol).status == "outside":
            continue
        if mf.decomposition.residual(x) > mf.tol_y:
            x = correct_onto(mf.decomposition, x, mf.tol_y)
        points.append(x)
        params.append(w)
    return ManifoldSample(np.array(points).reshape(-1, mf.region.dim), np.array(params).reshape(-1, chart.dim))


def _implicit_sample(mf: SlowManifold, n: int, rng: np.random.Generator, tol: Tolerances) -> ManifoldSample:
    starts = mf.region.sample_interior(8 * n, rng)
    points: list[np.ndarray] = []
    for x in starts:
        try:
            y = correct_onto(mf.decomposition, x, mf.tol_y)
        except (OffManifold, np.linalg.LinAlgError):
            continue
        if membership(mf.region, y, tol.membership_tol).status != "outside":
            points.append(y)
    keep = _dedupe(points, tol.dedup_tol)[:n]
    chosen = np.array([points[i] for i in keep]).reshape(-1, mf.region.dim)
    diagnostic = "" if len(chosen) == n else f"only {len(chosen)} of {n} starts landed on the manifold"
    return ManifoldSample(chosen, chosen.copy(), diagnostic)


def sample_manifold(
    mf: SlowManifold,
    n: int,
    rng: np.random.Generator | None = None,
    service: ManifoldService | None = None,
) -> ManifoldSample:
    """Graph charts: n points per axis over W; curves: n points equally spaced in arc length."""

    if n < 2:
        raise ValueError(f"sample_manifold needs n >= 2, got {n}")
    svc = service or ManifoldService()
    if isinstance(mf.chart, GraphChart):
        return _graph_sample(mf, mf.chart, n, svc.tolerances)
    if isinstance(mf.chart, CurveSpec):
        chart = svc.curve_chart(mf)
        sigma = np.linspace(0.0, chart.length, n)
        points = np.array([chart.point(s) for s in sigma])
        return ManifoldSample(points, sigma, chart.diagnostic)
    return _implicit_sample(mf, n, rng or np.random.default_rng(0), svc.tolerances)


def _polish(d: Decomposition, x: np.ndarray, max_iter: int = 20) -> np.ndarray:
    """Newton along the fast directions: ``x <- x - P (Dmu P)^-1 mu``."""

    point = x.copy()
    for _ in range(max_iter):
        mu = d.mu_value(point)
        if np.max(np.abs(mu)) <= 1e-15 * (1.0 + np.max(np.abs(point))):
            break
        p = d.p_matrix(point)
        point = point - p @ np.linalg.solve(d.dmu(point) @ p, mu)
    return point


def fast_fiber_project(
    system: PerturbedSystem,
    mf: SlowManifold,
    x: Sequence[float] | np.ndarray,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """Follow ``x' = h0(x)`` to its limit on the slow manifold."""

    point = system.check_point(x)
    d = mf.decomposition

    def settled(p: np.ndarray) -> bool:
        h0 = np.asarray(system.h0(p), dtype=float)
        return d.residual(p) <= tolerances.tol_y and float(np.max(np.abs(h0))) <= tolerances.tol_fp

    if settled(point):
        return point
    elapsed = 0.0
    chunk = 10.0
    while elapsed < PROJECTION_T_MAX:
        cfg = IntegratorConfig(rtol=1e-10, atol=1e-12, h_max=chunk, max_steps=200_000)
        try:
            point = integrate(system.h0, point, (0.0, chunk), cfg, jac=system.jacobian_h0).final
        except Exception as exc:  # noqa: BLE001
            raise ProjectionDiverged(f"fast flow integration failed: {exc}", point) from exc
        elapsed += chunk
        if not np.all(np.isfinite(point)) or np.linalg.norm(point) > DIVERGENCE_RADIUS:
            raise ProjectionDiverged(f"fast flow left every bounded set by t={elapsed:g}", point)
        if d.residual(point) <= 1e-8:
            try:
                polished = _polish(d, point)
            except np.linalg.LinAlgError:
                polished = point
            if settled(polished):
                return polished
        if settled(point):
            return point
        chunk *= 2.0
    raise ProjectionDiverged(
        f"fast flow did not settle within t={PROJECTION_T_MAX:g} (|mu|={d.residual(point):.3e})", point
    )


def tangent_space(
    mf: SlowManifold, x: Sequence[float] | np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Orthonormal basis (m x s) of ``ker Dmu(x)``."""

    point = np.asarray(x, dtype=float).ravel()
    d = mf.decomposition
    residual = d.residual(point)
    if residual > max(mf.tol_y, tolerances.tol_y):
        raise OffManifold(residual, mf.tol_y)
    dmu = d.dmu(point)
    rank = numeric_rank(dmu, tolerances.rank_tol)
    if rank != d.r:
        raise ConstantRankViolation(rank, d.r, point)
    _, _, vt = np.linalg.svd(dmu)
    return vt[d.r:].T.copy()
