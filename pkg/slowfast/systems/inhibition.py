"""Competitive inhibition E+S <-> C1 -> E+P, E+I <-> C2 in (s, c1, c2) coordinates."""

from __future__ import annotations

from typing import Any, Mapping, Sequence

import numpy as np

from ..core import dual
from ..models.manifold import GraphChart, SlowManifold
from ..models.network import Reaction, ReactionNetwork
from ..models.polytope import Polytope
from ..models.reduction import Decomposition
from ..models.system import PerturbedSystem
from ..services.reduction_service import decompose_structural
from .base import ExampleSystem, LyapunovCandidate, merge_params

SMALL_ENZYME_DEFAULTS = {
    "k1": 1.0, "km1": 1.0, "k2": 1.0, "k3": 1.0, "km3": 1.0, "s0": 1.0, "i0": 1.0, "e0_star": 1.0,
}
PLANAR_DEFAULTS = {
    "k1_star": 1.0, "km1_star": 1.0, "k2_star": 1.0, "k3": 1.0, "km3": 1.0,
    "s0": 1.0, "i0": 1.0, "e0": 1.0,
}
SPECIES = ("E", "S", "C1", "C2", "I", "P")


def _network(k1: float, km1: float, k2: float, k3: float, km3: float) -> ReactionNetwork:
    return ReactionNetwork(
        SPECIES,
        (
            Reaction({"E": 1, "S": 1}, {"C1": 1}, k1, "E+S->C1"),
            Reaction({"C1": 1}, {"E": 1, "S": 1}, km1, "C1->E+S"),
            Reaction({"C1": 1}, {"E": 1, "P": 1}, k2, "C1->E+P"),
            Reaction({"E": 1, "I": 1}, {"C2": 1}, k3, "E+I->C2"),
            Reaction({"C2": 1}, {"E": 1, "I": 1}, km3, "C2->E+I"),
        ),
        label="competitive-inhibition",
    )


def _lift(e0: float, s0: float, i0: float, x: np.ndarray) -> dict[str, float]:
    s, c1, c2 = (float(v) for v in x)
    return {"E": e0 - c1 - c2, "S": s, "C1": c1, "C2": c2, "I": i0 - c2, "P": s0 - s - c1}


def _stoichiometric(s0: float, i0: float) -> list[tuple[list[float], float, str]]:
    return [
        ([-1.0, 0.0, 0.0], 0.0, "s>=0"),
        ([0.0, -1.0, 0.0], 0.0, "c1>=0"),
        ([0.0, 0.0, -1.0], 0.0, "c2>=0"),
        ([1.0, 1.0, 0.0], s0, "s+c1<=s0"),
        ([0.0, 0.0, 1.0], i0, "c2<=i0"),
    ]


def small_enzyme(overrides: Mapping[str, float] | None = None) -> ExampleSystem:
    """Total enzyme ``e0 = eps·e0*``; slow manifold ``{c1 = c2 = 0}``."""

    p = merge_params("comp_inhibition_small_e0", SMALL_ENZYME_DEFAULTS, overrides)
    k1, km1, k2, k3, km3 = (p[k] for k in ("k1", "km1", "k2", "k3", "km3"))
    s0, i0, e0s = p["s0"], p["i0"], p["e0_star"]

    def h0(x: Sequence[Any]) -> list[Any]:
        s, c1, c2 = x[0], x[1], x[2]
        bound = c1 + c2
        return [
            km1 * c1 + k1 * s * bound,
            -k1 * s * bound - (km1 + k2) * c1,
            -k3 * bound * (i0 - c2) - km3 * c2,
        ]

    def h1(x: Sequence[Any]) -> list[Any]:
        s, c2 = x[0], x[2]
        return [-e0s * k1 * s, e0s * k1 * s, e0s * k3 * (i0 - c2)]

    def p_matrix(x: Sequence[float]) -> np.ndarray:
        s, c2 = x[0], x[2]
        return np.array([
            [km1 + k1 * s, k1 * s],
            [-k1 * s - (km1 + k2), -k1 * s],
            [-k3 * (i0 - c2), -k3 * (i0 - c2) - km3],
        ])

    decomposition = Decomposition(r=2, P=p_matrix, mu=lambda x: [x[1], x[2]], source="user-supplied")
    region = Polytope.from_inequalities(_stoichiometric(s0, i0), label="L")
    chart = GraphChart(
        free=(0,), dependent=(1, 2), gamma=lambda w: [0.0 * w[0], 0.0 * w[0]], lower=(0.0,), upper=(s0,)
    )
    system = PerturbedSystem("comp_inhibition_small_e0", 3, h0, h1, params=p)

    def invariant_region(eps: float) -> Polytope:
        faces = [*_stoichiometric(s0, i0), ([0.0, 1.0, 1.0], eps * e0s, "c1+c2<=e0")]
        return Polytope.from_inequalities(faces, label="K")

    def reduced(x: np.ndarray) -> np.ndarray:
        s = x[0]
        denominator = km3 * (k1 * s + km1) + (km1 + k2) * k3 * i0 + k2 * km3
        return np.array([-e0s * k1 * k2 * km3 * s / denominator, 0.0, 0.0])

    return ExampleSystem(
        name=system.name,
        system=system,
        decomposition=decomposition,
        manifold=SlowManifold(decomposition, region, chart),
        invariant_region=invariant_region,
        initial_state=np.array([s0, 0.0, 0.0]),
        reduced_oracle=reduced,
        stationary_oracle=lambda: np.zeros(3),
        network=lambda _eps: _network(k1, km1, k2, k3, km3),
        lift=lambda x, eps: _lift(eps * e0s, s0, i0, x),
        coordinates=("S", "C1", "C2"),
        description="competitive inhibition, small enzyme concentration",
    )


def inhibitor_graph(kappa: float, e0: float, i0: float, c1: Any) -> Any:
    """Smaller root ``c2`` of ``(e0 - c1 - c2)(i0 - c2) = kappa·c2``."""

    b = kappa + e0 + i0 - c1
    return (b - dual.sqrt(b * b - 4.0 * i0 * (e0 - c1))) / 2.0


def planar(overrides: Mapping[str, float] | None = None) -> ExampleSystem:
    """Substrate binding and product formation slow, inhibitor binding fast; 2-d slow manifold."""

    p = merge_params("comp_inhibition_2d", PLANAR_DEFAULTS, overrides)
    k1s, km1s, k2s = p["k1_star"], p["km1_star"], p["k2_star"]
    k3, km3, s0, i0, e0 = p["k3"], p["km3"], p["s0"], p["i0"], p["e0"]
    kappa = km3 / k3

    # columns: net inhibitor binding (fast), net substrate binding, product formation
    stoichiometry = np.array([[0.0, -1.0, 0.0], [0.0, 1.0, -1.0], [1.0, 0.0, 0.0]])

    def rates(x: Sequence[Any]) -> list[Any]:
        s, c1, c2 = x[0], x[1], x[2]
        free = e0 - c1 - c2
        return [k3 * free * (i0 - c2) - km3 * c2, k1s * s * free - km1s * c1, k2s * c1]

    decomposition = decompose_structural(stoichiometry, [0], rates)

    def h0(x: Sequence[Any]) -> list[Any]:
        return [0.0 * x[0], 0.0 * x[1], rates(x)[0]]

    def h1(x: Sequence[Any]) -> list[Any]:
        _, binding, product = rates(x)
        return [-binding, binding - product, 0.0 * x[2]]

    region = Polytope.from_inequalities(
        [*_stoichiometric(s0, i0), ([0.0, 1.0, 1.0], e0, "c1+c2<=e0")], label="L"
    )
    chart = GraphChart(
        free=(0, 1), dependent=(2,),
        gamma=lambda w: [inhibitor_graph(kappa, e0, i0, w[1])],
        lower=(0.0, 0.0), upper=(s0, e0),
    )
    system = PerturbedSystem("comp_inhibition_2d", 3, h0, h1, params=p)

    def reduced(x: np.ndarray) -> np.ndarray:
        s, c1, c2 = x
        free = e0 - c1 - c2
        ds = km1s * c1 - k1s * s * free
        dc1 = k1s * s * free - (km1s + k2s) * c1
        dc2 = -(i0 - c2) * dc1 / (kappa + e0 + i0 - c1 - 2.0 * c2)
        return np.array([ds, dc1, dc2])

    alpha = 0.5 * k2s / (km1s + k1s * s0)
    candidate = LyapunovCandidate(
        phi=lambda x: (1.0 + alpha) * x[0] + x[1], a=1, k=1.0,
        note=f"(1 + alpha)·s + c1 with alpha = {alpha:g}",
    )

    return ExampleSystem(
        name=system.name,
        system=system,
        decomposition=decomposition,
        manifold=SlowManifold(decomposition, region, chart),
        invariant_region=lambda _eps: region,
        initial_state=np.array([s0, 0.0, 0.0]),
        reduced_oracle=reduced,
        stationary_oracle=lambda: np.array([0.0, 0.0, float(inhibitor_graph(kappa, e0, i0, 0.0))]),
        lyapunov_candidate=candidate,
        network=lambda eps: _network(eps * k1s, eps * km1s, eps * k2s, k3, km3),
        lift=lambda x, eps: _lift(e0, s0, i0, x),
        coordinates=("S", "C1", "C2"),
        description="competitive inhibition, two-dimensional slow manifold",
        extras={"alpha": alpha, "kappa": kappa},
    )
