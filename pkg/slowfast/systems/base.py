"""Shared shape of the shipped example systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from ..core.errors import ConfigError
from ..models.manifold import SlowManifold
from ..models.network import ReactionNetwork
from ..models.polytope import Polytope
from ..models.reduction import Decomposition, ReducedField
from ..models.system import PerturbedSystem


@dataclass(frozen=True, slots=True)
class LyapunovCandidate:
    """User-supplied ``phi`` together with its exponents."""

    phi: Callable[[Sequence[Any]], Any]
    a: int = 1
    k: float = 1.0
    note: str = ""


@dataclass(frozen=True, eq=False)
class ExampleSystem:
    name: str
    system: PerturbedSystem
    decomposition: Decomposition
    manifold: SlowManifold
    invariant_region: Callable[[float], Polytope]
    initial_state: np.ndarray
    reduced_oracle: Callable[[np.ndarray], np.ndarray] | None = None
    stationary_oracle: Callable[[], np.ndarray] | None = None
    lyapunov_candidate: LyapunovCandidate | None = None
    network: Callable[[float], ReactionNetwork] | None = None
    lift: Callable[[np.ndarray, float], Mapping[str, float]] | None = None
    coordinates: tuple[str, ...] = ()
    description: str = ""
    extras: Mapping[str, Any] = field(default_factory=dict)

    @property
    def params(self) -> Mapping[str, float]:
        return self.system.params

    @property
    def dim(self) -> int:
        return self.system.dim

    @property
    def r(self) -> int:
        return self.decomposition.r

    @property
    def region(self) -> Polytope:
        return self.manifold.region

    @property
    def reduced_field(self) -> ReducedField:
        return ReducedField(self.decomposition, self.system.h1)


def merge_params(
    name: str, defaults: Mapping[str, float], overrides: Mapping[str, float] | None
) -> dict[str, float]:
    params = dict(defaults)
    for key, value in (overrides or {}).items():
        if key not in defaults:
            raise ConfigError(
                f"{name} has no parameter {key!r}; known: {', '.join(sorted(defaults))}"
            )
        params[key] = float(value)
    return params
