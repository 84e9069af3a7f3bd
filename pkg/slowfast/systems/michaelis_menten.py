"""Michaelis-Menten kinetics in the (s, c) coordinates left by the conservation laws."""

from __future__ import annotations

from typing import Any, Mapping, Sequence

import numpy as np

from ..models.manifold import CurveSpec, GraphChart, SlowManifold
from ..models.network import Reaction, ReactionNetwork
from ..models.polytope import Polytope
from ..models.reduction import Decomposition
from ..models.system import PerturbedSystem
from ..services.reduction_service import decompose_structural
from .base import ExampleSystem, merge_params

SMALL_ENZYME_DEFAULTS = {"k1": 1.0, "km1": 1.0, "k2": 1.0, "km2": 1.0, "s0": 1.0, "e0_star": 1.0}
SLOW_PRODUCT_DEFAULTS = {"k1": 1.0, "km1": 1.0, "k2_star": 1.0, "e0": 1.0, "s0": 1.0}


def _network(k1: float, km1: float, k2: float, km2: float) -> ReactionNetwork:
    reactions = [
        Reaction({"E": 1, "S": 1}, {"C": 1}, k1, "E+S->C"),
        Reaction({"C": 1}, {"E": 1, "S": 1}, km1, "C->E+S"),
        Reaction({"C": 1}, {"E": 1, "P": 1}, k2, "C->E+P"),
    ]
    if km2:
        reactions.append(Reaction({"E": 1, "P": 1}, {"C": 1}, km2, "E+P->C"))
    return ReactionNetwork(("E", "S", "C", "P"), tuple(reactions), label="michaelis-menten")


def _simplex(s0: float) -> list[tuple[list[float], float, str]]:
    return [
        ([-1.0, 0.0], 0.0, "s>=0"),
        ([0.0, -1.0], 0.0, "c>=0"),
        ([1.0, 1.0], s0, "s+c<=s0"),
    ]


def small_enzyme(overrides: Mapping[str, float] | None = None) -> ExampleSystem:
    """Reversible Michaelis-Menten with ``e0 = eps·e0*``; slow manifold ``{c = 0}``."""

    p = merge_params("mm_reversible_small_e0", SMALL_ENZYME_DEFAULTS, overrides)
    k1, km1, k2, km2, s0, e0s = (p[k] for k in ("k1", "km1", "k2", "km2", "s0", "e0_star"))

    def h0(x: Sequence[Any]) -> list[Any]:
        s, c = x[0], x[1]
        return [c * (k1 * s + km1), -c * (k1 * s + km1 + k2) - km2 * c * (s0 - s - c)]

    def h1(x: Sequence[Any]) -> list[Any]:
        s, c = x[0], x[1]
        return [-k1 * e0s * s, k1 * e0s * s + km2 * e0s * (s0 - s - c)]

    def p_matrix(x: Sequence[float]) -> np.ndarray:
        s, c = x[0], x[1]
        return np.array([[k1 * s + km1], [-(k1 * s + km1 + k2) - km2 * (s0 - s - c)]])

    decomposition = Decomposition(r=1, P=p_matrix, mu=lambda x: [x[1]], source="user-supplied")
    region = Polytope.from_inequalities(_simplex(s0), label="L")
    chart = GraphChart(free=(0,), dependent=(1,), gamma=lambda w: [0.0 * w[0]], lower=(0.0,), upper=(s0,))
    def dh0(x: np.ndarray) -> np.ndarray:
        s, c = x[0], x[1]
        return np.array([
            [k1 * c, k1 * s + km1],
            [(km2 - k1) * c, -(k1 * s + km1 + k2) - km2 * (s0 - s - 2 * c)],
        ])

    system = PerturbedSystem("mm_reversible_small_e0", 2, h0, h1, params=p, analytic_dh0=dh0)

    def invariant_region(eps: float) -> Polytope:
        return Polytope.from_inequalities([*_simplex(s0), ([0.0, 1.0], eps * e0s, "c<=e0")], label="K")

    def reduced(x: np.ndarray) -> np.ndarray:
        s = x[0]
        numerator = (k1 * k2 + km1 * km2) * s - km1 * km2 * s0
        return np.array([-e0s * numerator / (k1 * s + km1 + k2 + km2 * (s0 - s)), 0.0])

    def stationary() -> np.ndarray:
        return np.array([km1 * km2 * s0 / (k1 * k2 + km1 * km2), 0.0])

    def lift(x: np.ndarray, eps: float) -> dict[str, float]:
        s, c = float(x[0]), float(x[1])
        return {"E": eps * e0s - c, "S": s, "C": c, "P": s0 - s - c}

    return ExampleSystem(
        name=system.name,
        system=system,
        decomposition=decomposition,
        manifold=SlowManifold(decomposition, region, chart),
        invariant_region=invariant_region,
        initial_state=np.array([s0, 0.0]),
        reduced_oracle=reduced,
        stationary_oracle=stationary,
        network=lambda _eps: _network(k1, km1, k2, km2),
        lift=lift,
        coordinates=("S", "C"),
        description="reversible Michaelis-Menten, small enzyme concentration",
    )


def slow_product(overrides: Mapping[str, float] | None = None) -> ExampleSystem:
    """Irreversible Michaelis-Menten with ``k2 = eps·k2*``; the binding step is fast."""

    p = merge_params("mm_irrev_slow_k2", SLOW_PRODUCT_DEFAULTS, overrides)
    k1, km1, k2s, e0, s0 = (p[k] for k in ("k1", "km1", "k2_star", "e0", "s0"))

    # columns: net binding E+S <-> C (fast), C -> E+P (slow)
    stoichiometry = np.array([[-1.0, 0.0], [1.0, -1.0]])

    def rates(x: Sequence[Any]) -> list[Any]:
        s, c = x[0], x[1]
        return [k1 * (e0 - c) * s - km1 * c, k2s * c]

    decomposition = decompose_structural(stoichiometry, [0], rates)

    def h0(x: Sequence[Any]) -> list[Any]:
        binding = rates(x)[0]
        return [-binding, binding]

    def h1(x: Sequence[Any]) -> list[Any]:
        return [0.0 * x[0], -k2s * x[1]]

    def on_curve(s: float) -> float:
        return k1 * e0 * s / (k1 * s + km1)

    region = Polytope.from_inequalities([*_simplex(s0), ([0.0, 1.0], e0, "c<=e0")], label="L")
    def dh0(x: np.ndarray) -> np.ndarray:
        ds, dc = k1 * (e0 - x[1]), -(k1 * x[0] + km1)
        return np.array([[-ds, -dc], [ds, dc]])

    system = PerturbedSystem("mm_irrev_slow_k2", 2, h0, h1, params=p, analytic_dh0=dh0)

    def reduced(x: np.ndarray) -> np.ndarray:
        s = x[0]
        shift = k1 * s + km1
        ds = -shift * k1 * k2s * e0 * s / (k1 * km1 * e0 + shift ** 2)
        return np.array([ds, k1 * e0 * km1 / shift ** 2 * ds])

    def lift(x: np.ndarray, eps: float) -> dict[str, float]:
        s, c = float(x[0]), float(x[1])
        return {"E": e0 - c, "S": s, "C": c, "P": s0 - s - c}

    return ExampleSystem(
        name=system.name,
        system=system,
        decomposition=decomposition,
        manifold=SlowManifold(decomposition, region, CurveSpec((s0 / 2, on_curve(s0 / 2)))),
        invariant_region=lambda _eps: region,
        initial_state=np.array([s0, 0.0]),
        reduced_oracle=reduced,
        stationary_oracle=lambda: np.zeros(2),
        network=lambda eps: _network(k1, km1, eps * k2s, 0.0),
        lift=lift,
        coordinates=("S", "C"),
        description="irreversible Michaelis-Menten, slow product formation",
    )
