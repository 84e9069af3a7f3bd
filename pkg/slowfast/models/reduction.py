"""Product decompositions ``h0 = P·mu`` and the reduced fields they induce."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Literal, Sequence

import numpy as np

from ..core import dual

MatrixMap = Callable[[Sequence[Any]], Any]


@dataclass(frozen=True, eq=False)
class Decomposition:
    r: int
    P: MatrixMap
    mu: Callable[[Sequence[Any]], Sequence[Any]]
    source: Literal["reaction-structural", "user-supplied"] = "user-supplied"
    fast_columns: tuple[int, ...] = ()

    def p_matrix(self, x: Sequence[float] | np.ndarray) -> np.ndarray:
        return np.asarray(self.P(np.asarray(x, dtype=float)), dtype=float).reshape(-1, self.r)

    def mu_value(self, x: Sequence[float] | np.ndarray) -> np.ndarray:
        return np.asarray(self.mu(np.asarray(x, dtype=float)), dtype=float).ravel()

    def dmu(self, x: Sequence[float] | np.ndarray) -> np.ndarray:
        return dual.jacobian(self.mu, x).reshape(self.r, -1)

    def residual(self, x: Sequence[float] | np.ndarray) -> float:
        return float(np.max(np.abs(self.mu_value(x)))) if self.r else 0.0


@dataclass(frozen=True, eq=False)
class ReducedField:
    """``q = Q·h1`` with ``Q = I - P (Dmu P)^-1 Dmu``; Q is rebuilt at every point."""

    decomposition: Decomposition
    h1: Callable[[Sequence[Any]], Sequence[Any]]
    cond_max: float = 1e10

    @property
    def r(self) -> int:
        return self.decomposition.r
