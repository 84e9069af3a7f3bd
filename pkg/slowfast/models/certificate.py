"""Lyapunov certificates and the decay envelope they imply."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class LyapunovCertificate:
    """``phi`` with a unique zero ``z``, power bounds near ``z`` and ``L_q phi <= -nu·phi^k``.

    ``c1``/``c2`` hold on ``Y ∩ B_rho(z)``; ``c1_ext``/``c2_ext`` extend the same
    bounds to every sampled point of ``Y ∩ K``. ``lie`` gives ``L_q phi`` directly when
    ``phi`` cannot be evaluated on dual numbers.
    """

    phi: Callable[[Sequence[Any]], Any]
    z: np.ndarray
    nu: float
    k: float = 1.0
    a: int = 2
    c1: float = math.nan
    c2: float = math.nan
    rho: float = math.nan
    c1_ext: float = math.nan
    c2_ext: float = math.nan
    eigenvalue: float | None = None
    source: str = "candidate"
    lie: Callable[[np.ndarray], float] | None = None
    meta: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float))
        if self.k < 1:
            raise ValueError(f"certificate exponent k must be >= 1, got {self.k}")
        if self.a < 1 or int(self.a) != self.a:
            raise ValueError(f"norm exponent a must be a positive integer, got {self.a}")

    @property
    def envelope_constant(self) -> float:
        """``(c2*/c1*)^(1/a)``, the constant in front of the decay envelope."""

        return (self.c2_ext / self.c1_ext) ** (1.0 / self.a)

    def value(self, x: Sequence[float]) -> float:
        return float(self.phi(np.asarray(x, dtype=float)))


def decay_envelope(cert: LyapunovCertificate, phi0: float, tau: float) -> float:
    """``gamma(tau)``: ``exp(-nu·tau/a)`` for k = 1, algebraic decay for k > 1."""

    if cert.k < 1:
        raise ValueError(f"decay envelope needs k >= 1, got {cert.k}")
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    if phi0 <= 0:
        raise ValueError(f"phi0 must be positive, got {phi0}")
    if cert.k == 1:
        return math.exp(-cert.nu * tau / cert.a)
    k = cert.k
    return ((k - 1) * cert.nu * tau * phi0 ** (k - 1) + 1.0) ** (1.0 / (cert.a * (1.0 - k)))
