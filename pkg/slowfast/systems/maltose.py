"""Maltose transport through a membrane receptor, in (xi, y1, y2, y3) coordinates."""

from __future__ import annotations

import math
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq, root

from ..models.manifold import CurveSpec, SlowManifold
from ..models.network import Reaction, ReactionNetwork
from ..models.polytope import Polytope
from ..models.system import PerturbedSystem
from ..services.reduction_service import decompose_structural
from .base import ExampleSystem, merge_params

DEFAULTS = {"x0": 1.0, "xi0": 1.0, "z0": 1.0, "r0": 1.0}
SPECIES = ("X", "Z", "R", "Xi", "Y1", "Y2", "Y3")


def complex_rates(p: Mapping[str, float], v: Sequence[Any]) -> list[Any]:
    """Net rates ``(E2, E3, E4, E1)`` after eliminating x, z and r."""

    xi, y1, y2, y3 = v[0], v[1], v[2], v[3]
    z = p["z0"] - (y1 + y2 + y3)
    r = p["r0"] - (y2 + y3)
    x = p["x0"] + p["xi0"] - (xi + y1 + y2)
    return [y1 - z * x, y2 - y1 * r, y3 - z * r, -y2]


def minor_parameters(p: Mapping[str, float], v: Sequence[float]) -> tuple[float, float, float, float]:
    xi, y1, y2, y3 = (float(c) for c in v)
    return (
        p["x0"] + p["xi0"] - (xi + y1 + y2),
        p["z0"] - (y1 + y2 + y3),
        p["r0"] - (y2 + y3),
        y1,
    )


def maltose_minor(a: float, b: float, c: float, d: float) -> np.ndarray:
    """Lower right 3x3 block of the fast Jacobian."""

    return np.array([
        [-1 - a - b - c, -a - b + 1 + d, -a + d],
        [c, -1 - d, -d],
        [-c, -b - c, -1 - b - c],
    ])


def printed_hurwitz(a: float, b: float, c: float, d: float) -> tuple[float, float, float]:
    """``(A1, H2, A3)`` as closed-form polynomials in the nonnegative block parameters."""

    a1 = 3 + 2 * b + 2 * c + d + a
    h2 = (
        a**2 * b + a**2 * c + a**2 * d + 3 * a * b**2 + 7 * a * b * c + 4 * a * b * d
        + 3 * a * c**2 + 4 * a * c * d + a * d**2 + 2 * b**3 + 7 * b**2 * c + 3 * b**2 * d
        + 7 * b * c**2 + 6 * b * c * d + b * d**2 + 2 * c**3 + 3 * c**2 * d + c * d**2
        + 2 * a**2 + 10 * b * a + 9 * c * a + 6 * d * a + 10 * b**2 + 21 * c * b + 10 * d * b
        + 9 * c**2 + 10 * c * d + 2 * d**2 + 8 * a + 16 * b + 14 * c + 8 * d + 8
    )
    a3 = (
        b**2 * c + b * c**2 + b * c * d + b * a + c * a + d * a + b**2 + 2 * c * b + d * b
        + a + 2 * b + c + d + 1
    )
    return float(a1), float(h2), float(a3)


def _network(eps: float) -> ReactionNetwork:
    return ReactionNetwork(
        SPECIES,
        (
            Reaction({"Y2": 1}, {"R": 1, "Z": 1, "Xi": 1}, eps, "Y2->R+Z+Xi"),
            Reaction({"Z": 1, "X": 1}, {"Y1": 1}, 1.0, "Z+X->Y1"),
            Reaction({"Y1": 1}, {"Z": 1, "X": 1}, 1.0, "Y1->Z+X"),
            Reaction({"Y1": 1, "R": 1}, {"Y2": 1}, 1.0, "Y1+R->Y2"),
            Reaction({"Y2": 1}, {"Y1": 1, "R": 1}, 1.0, "Y2->Y1+R"),
            Reaction({"Z": 1, "R": 1}, {"Y3": 1}, 1.0, "Z+R->Y3"),
            Reaction({"Y3": 1}, {"Z": 1, "R": 1}, 1.0, "Y3->Z+R"),
        ),
        label="maltose-transport",
    )


def receptor_equilibrium(z0: float, r0: float) -> float:
    """Root of ``y3 = (z0 - y3)(r0 - y3)`` in ``[0, min(z0, r0)]``."""

    return float(brentq(lambda y3: y3 - (z0 - y3) * (r0 - y3), 0.0, min(z0, r0), xtol=1e-15))


def transport(overrides: Mapping[str, float] | None = None) -> ExampleSystem:
    """All fast rate constants 1, translocation ``Y2 -> R+Z+Xi`` at rate eps."""

    p = merge_params("maltose_transport", DEFAULTS, overrides)
    x0, xi0, z0, r0 = p["x0"], p["xi0"], p["z0"], p["r0"]

    # columns: E2, E3, E4 (fast), E1 (slow)
    stoichiometry = np.array([
        [0.0, 0.0, 0.0, -1.0],
        [-1.0, 1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ])
    decomposition = decompose_structural(stoichiometry, [0, 1, 2], lambda v: complex_rates(p, v))

    def h0(v: Sequence[Any]) -> list[Any]:
        e2, e3, e4, _ = complex_rates(p, v)
        return [0.0 * v[0], -e2 + e3, -e3, -e4]

    def h1(v: Sequence[Any]) -> list[Any]:
        y2 = v[2]
        return [y2, 0.0 * y2, -y2, 0.0 * y2]

    region = Polytope.from_inequalities(
        [
            ([-1.0, 0.0, 0.0, 0.0], 0.0, "xi>=0"),
            ([0.0, -1.0, 0.0, 0.0], 0.0, "y1>=0"),
            ([0.0, 0.0, -1.0, 0.0], 0.0, "y2>=0"),
            ([0.0, 0.0, 0.0, -1.0], 0.0, "y3>=0"),
            ([0.0, 1.0, 1.0, 1.0], z0, "y1+y2+y3<=z0"),
            ([0.0, 0.0, 1.0, 1.0], r0, "y2+y3<=r0"),
            ([1.0, 1.0, 1.0, 0.0], xi0 + x0, "xi+y1+y2<=xi0+x0"),
        ],
        label="L",
    )

    seed_solution = root(
        lambda y: np.asarray(complex_rates(p, [xi0, *y])[:3], dtype=float),
        np.zeros(3), method="hybr", options={"xtol": 1e-14},
    )
    seed = (xi0, *(float(v) for v in seed_solution.x))
    system = PerturbedSystem("maltose_transport", 4, h0, h1, params=p)

    def reduced(v: np.ndarray) -> np.ndarray:
        xi, y1, y2, y3 = v
        total = y1 + y2 + y3
        n = xi0 - xi + (total - z0) * (y2 + y3 - r0 - 1) - (y1 + y2) + 1 + x0
        return np.array([
            y2,
            y2 * (total - z0) / n,
            -y2 - y2 * (xi - xi0 + 2 * (y1 + y2) + y3 - (x0 + z0 + 1)) / n,
            y2 * ((y2 + y3) * (total - r0 - z0) + r0 * (z0 - y1)) / n,
        ])

    def stationary() -> np.ndarray:
        return np.array([xi0 + x0, 0.0, 0.0, receptor_equilibrium(z0, r0)])

    def lift(v: np.ndarray, eps: float) -> dict[str, float]:
        xi, y1, y2, y3 = (float(c) for c in v)
        return {
            "X": x0 + xi0 - (xi + y1 + y2), "Z": z0 - (y1 + y2 + y3), "R": r0 - (y2 + y3),
            "Xi": xi, "Y1": y1, "Y2": y2, "Y3": y3,
        }

    closed_form = ((z0 + r0 + 1) - math.sqrt((z0 + r0 + 1) ** 2 - 4 * z0 * r0)) / 2
    return ExampleSystem(
        name=system.name,
        system=system,
        decomposition=decomposition,
        manifold=SlowManifold(decomposition, region, CurveSpec(seed)),
        invariant_region=lambda _eps: region,
        initial_state=np.array([xi0, 0.0, 0.0, 0.0]),
        reduced_oracle=reduced,
        stationary_oracle=stationary,
        network=_network,
        lift=lift,
        coordinates=("Xi", "Y1", "Y2", "Y3"),
        description="maltose transport, slow translocation",
        extras={
            "y3_closed_form": closed_form,
            "hurwitz_minor": maltose_minor,
            "hurwitz_printed": printed_hurwitz,
        },
    )
