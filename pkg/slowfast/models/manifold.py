"""Slow manifolds ``Y = {mu = 0} ∩ K`` and their charts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from ..core.errors import OffManifold
from .polytope import Polytope
from .reduction import Decomposition


@dataclass(frozen=True, eq=False)
class GraphChart:
    """``x[dependent] = gamma(x[free])`` for ``x[free]`` in the box ``W``."""

    free: tuple[int, ...]
    dependent: tuple[int, ...]
    gamma: Callable[[Sequence[Any]], Sequence[Any]]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.free)

    def embed(self, w: Sequence[float]) -> np.ndarray:
        x = np.zeros(len(self.free) + len(self.dependent))
        x[list(self.free)] = w
        x[list(self.dependent)] = np.asarray(self.gamma(np.asarray(w, dtype=float)), dtype=float)
        return x


@dataclass(frozen=True, slots=True)
class CurveSpec:
    """Request for a traced one-dimensional chart starting near ``seed``."""

    seed: tuple[float, ...]
    step: float | None = None


@dataclass(frozen=True, eq=False)
class SlowManifold:
    decomposition: Decomposition
    region: Polytope
    chart: GraphChart | CurveSpec | None = None
    tol_y: float = 1e-10

    @property
    def dim(self) -> int:
        return self.region.dim - self.decomposition.r

    @property
    def chart_kind(self) -> str:
        if isinstance(self.chart, GraphChart):
            return "graph"
        if isinstance(self.chart, CurveSpec):
            return "curve1d"
        return "implicit-only"


@dataclass(frozen=True, slots=True)
class ManifoldSample:
    points: np.ndarray
    params: np.ndarray
    diagnostic: str = ""

    def __len__(self) -> int:
        return len(self.points)


def correct_onto(decomposition: Decomposition, x: np.ndarray, tol: float, max_iter: int = 25) -> np.ndarray:
    """Minimal-norm Gauss-Newton steps onto ``mu = 0``."""

    point = np.asarray(x, dtype=float).copy()
    for _ in range(max_iter):
        residual = decomposition.mu_value(point)
        if np.max(np.abs(residual)) <= 1e-2 * tol:
            return point
        step = np.linalg.lstsq(decomposition.dmu(point), residual, rcond=None)[0]
        point -= step
        if np.linalg.norm(step) <= 1e-15 * (1.0 + np.linalg.norm(point)):
            break
    residual = decomposition.residual(point)
    if residual > tol:
        raise OffManifold(residual, tol)
    return point


@dataclass(frozen=True, eq=False)
class CurveChart:
    """Arc-length chart of a traced curve: ordered nodes and cumulative length."""

    decomposition: Decomposition
    nodes: np.ndarray
    sigma: np.ndarray = field(init=False)
    tol: float = 1e-10
    diagnostic: str = ""

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        if len(nodes) < 2:
            raise ValueError("a curve chart needs at least two nodes")
        lengths = np.linalg.norm(np.diff(nodes, axis=0), axis=1)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "sigma", np.concatenate([[0.0], np.cumsum(lengths)]))

    @property
    def length(self) -> float:
        return float(self.sigma[-1])

    def _segment(self, s: float) -> int:
        return int(np.clip(np.searchsorted(self.sigma, s, side="right") - 1, 0, len(self.sigma) - 2))

    def interpolate(self, s: float) -> np.ndarray:
        s = float(np.clip(s, 0.0, self.length))
        i = self._segment(s)
        width = self.sigma[i + 1] - self.sigma[i]
        t = 0.0 if width == 0 else (s - self.sigma[i]) / width
        return (1.0 - t) * self.nodes[i] + t * self.nodes[i + 1]

    def point(self, s: float) -> np.ndarray:
        return correct_onto(self.decomposition, self.interpolate(s), self.tol)

    def locate(self, x: Sequence[float]) -> float:
        target = np.asarray(x, dtype=float)
        nearest = int(np.argmin(np.linalg.norm(self.nodes - target, axis=1)))
        lo = self.sigma[max(nearest - 1, 0)]
        hi = self.sigma[min(nearest + 1, len(self.sigma) - 1)]
        if hi <= lo:
            return float(lo)
        res = minimize_scalar(
            lambda s: float(np.sum((self.interpolate(s) - target) ** 2)),
            bounds=(lo, hi), method="bounded", options={"xatol": 1e-13},
        )
        return float(res.x)

    def tangent(self, s: float) -> np.ndarray:
        """Unit tangent at ``s`` pointing toward increasing arc length."""

        x = self.point(s)
        _, _, vt = np.linalg.svd(self.decomposition.dmu(x))
        t = vt[-1]
        i = self._segment(s)
        if np.dot(t, self.nodes[i + 1] - self.nodes[i]) < 0:
            t = -t
        return t
