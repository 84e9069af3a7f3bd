"""Name-based lookup of example systems, open to user plugins."""

from __future__ import annotations

import logging
from typing import Callable, Mapping

import numpy as np

from ..core.errors import OffManifold, UnknownSystem
from . import inhibition, maltose, michaelis_menten
from .base import ExampleSystem

Factory = Callable[[Mapping[str, float] | None], ExampleSystem]


class ExampleRegistry:
    """Factories keyed by name, listed in registration order."""

    def __init__(self) -> None:
        self._factories: dict[str, tuple[Factory, str]] = {}

    def register(self, name: str, factory: Factory, description: str = "") -> None:
        if name in self._factories:
            raise ValueError(f"system {name!r} is already registered")
        self._factories[name] = (factory, description)
        logging.debug("registered system %s", name)

    def unregister(self, name: str) -> None:
        self._factories.pop(name, None)

    def names(self) -> list[str]:
        return list(self._factories)

    def __contains__(self, name: object) -> bool:
        return name in self._factories

    def __len__(self) -> int:
        return len(self._factories)

    def get(self, name: str, overrides: Mapping[str, float] | None = None) -> ExampleSystem:
        try:
            factory, _ = self._factories[name]
        except KeyError:
            raise UnknownSystem(name, self.names()) from None
        return factory(overrides)

    def rows(self) -> list[tuple[str, int, int, str, str]]:
        """``(name, m, r, chart kind, description)`` for every registered system."""

        rows = []
        for name, (factory, description) in self._factories.items():
            example = factory(None)
            rows.append((name, example.dim, example.r, example.manifold.chart_kind, description or example.description))
        return rows


def default_registry() -> ExampleRegistry:
    registry = ExampleRegistry()
    registry.register("mm_reversible_small_e0", michaelis_menten.small_enzyme)
    registry.register("mm_irrev_slow_k2", michaelis_menten.slow_product)
    registry.register("comp_inhibition_small_e0", inhibition.small_enzyme)
    registry.register("comp_inhibition_2d", inhibition.planar)
    registry.register("maltose_transport", maltose.transport)
    return registry


REGISTRY = default_registry()


def register(name: str, factory: Factory, description: str = "") -> None:
    REGISTRY.register(name, factory, description)


def get_example(
    name: str, overrides: Mapping[str, float] | None = None, registry: ExampleRegistry | None = None
) -> ExampleSystem:
    return (registry if registry is not None else REGISTRY).get(name, overrides)


def oracle_reduced_rhs(example: ExampleSystem, x: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Closed-form reduced field; only defined on the slow manifold."""

    if example.reduced_oracle is None:
        raise ValueError(f"{example.name} ships no closed-form reduced system")
    point = example.system.check_point(x)
    residual = example.decomposition.residual(point)
    if residual > tol:
        raise OffManifold(residual, tol)
    return np.asarray(example.reduced_oracle(point), dtype=float)


def oracle_stationary(example: ExampleSystem) -> np.ndarray:
    if example.stationary_oracle is None:
        raise ValueError(f"{example.name} ships no stationary point")
    return np.asarray(example.stationary_oracle(), dtype=float)
