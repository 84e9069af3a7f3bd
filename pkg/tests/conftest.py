from typing import Mapping

import numpy as np
import pytest

from slowfast.models.manifold import GraphChart, SlowManifold
from slowfast.models.polytope import Polytope
from slowfast.models.reduction import Decomposition
from slowfast.models.system import PerturbedSystem
from slowfast.systems.base import ExampleSystem
from slowfast.systems.registry import ExampleRegistry


def make_linear_toy(overrides: Mapping[str, float] | None = None) -> ExampleSystem:
    """x1' = -eps·x1, x2' = -x2: slow manifold {x2 = 0}, reduced flow x1' = -x1."""

    system = PerturbedSystem(
        "linear_toy", 2, lambda x: [0.0 * x[0], -x[1]], lambda x: [-x[0], 0.0 * x[1]]
    )
    decomposition = Decomposition(r=1, P=lambda x: np.array([[0.0], [-1.0]]), mu=lambda x: [x[1]])
    region = Polytope.box([0.0, 0.0], [1.0, 1.0], label="L")
    chart = GraphChart(free=(0,), dependent=(1,), gamma=lambda w: [0.0 * w[0]], lower=(0.0,), upper=(1.0,))
    return ExampleSystem(
        name="linear_toy",
        system=system,
        decomposition=decomposition,
        manifold=SlowManifold(decomposition, region, chart),
        invariant_region=lambda _eps: region,
        initial_state=np.array([1.0, 1.0]),
        reduced_oracle=lambda x: np.array([-x[0], 0.0]),
        stationary_oracle=lambda: np.zeros(2),
        description="linear toy",
    )


def make_jordan(overrides: Mapping[str, float] | None = None) -> ExampleSystem:
    """Dh0 is a Jordan block: rank 1 but the zero eigenvalue is not semisimple."""

    system = PerturbedSystem("jordan", 2, lambda x: [x[1], 0.0 * x[0]], lambda x: [-x[0], -x[1]])
    decomposition = Decomposition(r=1, P=lambda x: np.array([[1.0], [0.0]]), mu=lambda x: [x[1]])
    region = Polytope.box([-1.0, -1.0], [1.0, 1.0], label="L")
    chart = GraphChart(free=(0,), dependent=(1,), gamma=lambda w: [0.0 * w[0]], lower=(-1.0,), upper=(1.0,))
    return ExampleSystem(
        name="jordan",
        system=system,
        decomposition=decomposition,
        manifold=SlowManifold(decomposition, region, chart),
        invariant_region=lambda _eps: region,
        initial_state=np.array([0.5, 0.0]),
        description="Jordan block",
    )


def make_rotation(overrides: Mapping[str, float] | None = None) -> ExampleSystem:
    """Fast decay of w onto a plane carrying a rotation; O(eps) forcing makes the full flow spiral out."""

    system = PerturbedSystem(
        "rotation", 3,
        lambda x: [0.0 * x[0], 0.0 * x[1], -x[2]],
        lambda x: [-x[1] + x[2], x[0], x[0]],
    )
    decomposition = Decomposition(r=1, P=lambda x: np.array([[0.0], [0.0], [-1.0]]), mu=lambda x: [x[2]])
    region = Polytope.box([-2.0, -2.0, -2.0], [2.0, 2.0, 2.0], label="L")
    chart = GraphChart(
        free=(0, 1), dependent=(2,), gamma=lambda w: [0.0 * w[0]], lower=(-2.0, -2.0), upper=(2.0, 2.0)
    )
    return ExampleSystem(
        name="rotation",
        system=system,
        decomposition=decomposition,
        manifold=SlowManifold(decomposition, region, chart),
        invariant_region=lambda _eps: region,
        initial_state=np.array([1.0, 0.0, 0.0]),
        reduced_oracle=lambda x: np.array([-x[1], x[0], 0.0]),
        description="oscillatory non-example",
    )


@pytest.fixture
def linear_toy() -> ExampleSystem:
    return make_linear_toy()


@pytest.fixture
def jordan() -> ExampleSystem:
    return make_jordan()


@pytest.fixture
def rotation() -> ExampleSystem:
    return make_rotation()


@pytest.fixture
def empty_registry() -> ExampleRegistry:
    return ExampleRegistry()


@pytest.fixture
def toy_registry() -> ExampleRegistry:
    registry = ExampleRegistry()
    registry.register("linear_toy", make_linear_toy)
    registry.register("jordan", make_jordan)
    registry.register("rotation", make_rotation)
    return registry


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)
