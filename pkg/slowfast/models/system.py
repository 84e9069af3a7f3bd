"""Singularly perturbed autonomous systems h = h0 + eps·h1 + eps²·h*."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from ..core import dual
from ..core.errors import DimensionMismatch, NonFiniteValue

VectorField = Callable[[Sequence[Any]], Sequence[Any]]
PerturbationTail = Callable[[Sequence[Any], float], Sequence[Any]]


@dataclass(frozen=True, eq=False)
class PerturbedSystem:
    """Immutable description of ``x' = h0(x) + eps·h1(x) + eps²·h*(x, eps)``.

    The maps accept plain floats or dual numbers and must be written with the
    ``slowfast.core.dual`` elementary functions so both paths work.
    """

    name: str
    dim: int
    h0: VectorField
    h1: VectorField
    hstar: PerturbationTail | None = None
    params: Mapping[str, float] = field(default_factory=dict)
    eps_max: float = 0.1
    analytic_dh0: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"system dimension must be positive, got {self.dim}")
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    def check_point(self, x: Sequence[float] | np.ndarray) -> np.ndarray:
        point = np.asarray(x, dtype=float).ravel()
        if point.size != self.dim:
            raise DimensionMismatch(self.dim, point.size)
        return point

    def field(self, x: Sequence[Any], eps: float) -> list[Any]:
        """``h(x, eps)`` without validation; safe for dual inputs."""

        base = list(self.h0(x))
        if eps == 0.0:
            return base
        out = [a + eps * b for a, b in zip(base, self.h1(x))]
        if self.hstar is not None:
            out = [a + eps * eps * b for a, b in zip(out, self.hstar(x, eps))]
        return out

    def slow_time_field(self, eps: float) -> Callable[[Sequence[Any]], list[Any]]:
        """``eps^-1·h(·, eps)``, the full system on the reduced system's clock."""

        if eps <= 0:
            raise ValueError(f"slow time needs eps > 0, got {eps}")
        scale = 1.0 / eps
        return lambda x: [scale * v for v in self.field(x, eps)]

    def jacobian_h0(self, x: Sequence[float] | np.ndarray) -> np.ndarray:
        return dual.jacobian(self.h0, self.check_point(x))


def _finite(values: np.ndarray, where: str) -> np.ndarray:
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise NonFiniteValue(int(bad[0]), float(values[bad[0]]), where)
    return values


def eval_h(system: PerturbedSystem, x: Sequence[float] | np.ndarray, eps: float) -> np.ndarray:
    """Evaluate ``h0(x) + eps·h1(x) + eps²·h*(x, eps)``."""

    point = system.check_point(x)
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    h0 = _finite(np.asarray(system.h0(point), dtype=float), "h0")
    if h0.size != system.dim:
        raise DimensionMismatch(system.dim, h0.size, what="h0(x)")
    if eps == 0.0:
        return h0
    h1 = _finite(np.asarray(system.h1(point), dtype=float), "h1")
    out = h0 + eps * h1
    if system.hstar is not None:
        out = out + eps * eps * _finite(np.asarray(system.hstar(point, eps), dtype=float), "hstar")
    return _finite(out, "h")
