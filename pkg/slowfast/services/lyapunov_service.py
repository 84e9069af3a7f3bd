"""Lyapunov certificates for the reduced flow on Y ∩ K."""

from __future__ import annotations

import logging
import math
from typing import Any, Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.spatial.distance import pdist

from ..core import dual
from ..core.errors import (
    CertificateError,
    JacobianError,
    MultipleEquilibria,
    MultiplicityMismatch,
    NotLinearlyStable,
)
from ..core.linalg import char_poly, deflate_zero_roots
from ..core.verdicts import Certified, Failed, Verdict
from ..models.certificate import LyapunovCertificate, decay_envelope
from ..models.manifold import CurveChart, CurveSpec, GraphChart, SlowManifold
from ..models.reduction import ReducedField
from ..models.settings import DEFAULT_TOLERANCES, Tolerances
from ..models.trajectory import Trajectory
from .manifold_service import ManifoldService, sample_manifold, tangent_space, trace_curve
from .reduction_service import ReductionService, reduced_rhs

KNOTS = 129
PHI_FLOOR = 1e-12
NU_SAFETY = 0.9
C1_SAFETY = 0.9
C2_SAFETY = 1.1


class ArcLengthPotential:
    """``phi(sigma) = -∫_{sigma_z}^{sigma} p``, with ``p`` the reduced field along the unit tangent."""

    def __init__(self, field: ReducedField, chart: CurveChart, sigma_z: float, knots: int = KNOTS) -> None:
        self.field = field
        self.chart = chart
        self.sigma_z = sigma_z
        grid = np.union1d(np.linspace(0.0, chart.length, knots), [sigma_z])
        self.knots = grid
        values = np.zeros(grid.size)
        centre = int(np.searchsorted(grid, sigma_z))
        for i in range(centre + 1, grid.size):
            values[i] = values[i - 1] - self._integral(grid[i - 1], grid[i])
        for i in range(centre - 1, -1, -1):
            values[i] = values[i + 1] + self._integral(grid[i], grid[i + 1])
        self.values = values

    def p(self, sigma: float) -> float:
        x = self.chart.point(sigma)
        return float(self.chart.tangent(sigma) @ reduced_rhs(self.field, x))

    def _integral(self, lo: float, hi: float) -> float:
        value, _ = quad(self.p, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=100)
        return float(value)

    def at(self, sigma: float) -> float:
        sigma = float(np.clip(sigma, 0.0, self.chart.length))
        i = int(np.clip(np.searchsorted(self.knots, sigma, side="right") - 1, 0, self.knots.size - 2))
        if sigma == self.knots[i]:
            return float(self.values[i])
        return float(self.values[i] - self._integral(self.knots[i], sigma))

    def __call__(self, x: Sequence[float]) -> float:
        return self.at(self.chart.locate(np.asarray(x, dtype=float)))

    def lie(self, x: Sequence[float]) -> float:
        """``L_q phi = -p^2`` along the curve."""

        return -self.p(self.chart.locate(np.asarray(x, dtype=float))) ** 2


def _as_curve(mf: SlowManifold, manifolds: ManifoldService) -> CurveChart:
    if isinstance(mf.chart, CurveSpec):
        return manifolds.curve_chart(mf)
    if isinstance(mf.chart, GraphChart) and mf.chart.dim == 1 and mf.dim == 1:
        chart = mf.chart
        middle = 0.5 * (np.asarray(chart.lower) + np.asarray(chart.upper))
        return trace_curve(mf.decomposition, mf.region, CurveSpec(tuple(chart.embed(middle))), manifolds.tolerances)
    raise ValueError(f"one-dimensional certificates need a curve or 1-d graph chart, got {mf.chart_kind}")


def _power_constants(
    values: np.ndarray, distances: np.ndarray, a: int, rho: float, floor: float
) -> tuple[float, float, float, float]:
    usable = distances > floor
    ratio = values[usable] / distances[usable] ** a
    near = distances[usable] <= rho
    if not np.any(near):
        near = np.argsort(distances[usable])[: max(1, int(usable.sum() // 4))]
    c1 = C1_SAFETY * float(np.min(ratio[near]))
    c2 = C2_SAFETY * float(np.max(ratio[near]))
    return c1, c2, C1_SAFETY * float(np.min(ratio)), C2_SAFETY * float(np.max(ratio))


def check_lc_1d(
    field: ReducedField,
    mf: SlowManifold,
    z: Sequence[float],
    manifolds: ManifoldService | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> LyapunovCertificate:
    """Linear stability of ``z`` along the curve, then ``phi`` by quadrature of the pulled-back field."""

    svc = manifolds or ManifoldService(tolerances)
    chart = _as_curve(mf, svc)
    point = np.asarray(z, dtype=float)
    m = point.size

    dq = ReductionService(tolerances).q_jacobian(field, point)
    scale = max(1.0, float(np.linalg.norm(dq)))
    try:
        linear = deflate_zero_roots(char_poly(dq), m - 1, 1e-6 * scale ** m)
    except MultiplicityMismatch as exc:
        raise CertificateError(f"Dq(z) does not have a simple nonzero eigenvalue: {exc}") from exc
    eigenvalue = -linear.coefficients[0]
    tangent = tangent_space(mf, point, tolerances)[:, 0]
    rayleigh = float(tangent @ dq @ tangent)
    defect = float(np.linalg.norm(dq @ tangent - eigenvalue * tangent))
    if abs(rayleigh - eigenvalue) > 1e-5 * max(1.0, abs(eigenvalue)) or defect > 1e-5 * scale:
        raise CertificateError(
            f"eigenvector of lambda={eigenvalue:.6g} does not span the tangent space "
            f"(Rayleigh {rayleigh:.6g}, defect {defect:.3e})"
        )
    if eigenvalue >= -tolerances.stability_margin:
        raise NotLinearlyStable(eigenvalue, tolerances.stability_margin)

    sigma_z = chart.locate(point)
    potential = ArcLengthPotential(field, chart, sigma_z)
    sigmas = potential.knots
    floor = 1e-9 * chart.length
    for sigma in sigmas:
        offset = sigma - sigma_z
        if abs(offset) <= floor:
            continue
        value = potential.p(sigma)
        if value * offset >= 0:
            raise MultipleEquilibria(chart.point(sigma), value)

    points = np.array([chart.point(s) for s in sigmas])
    values = potential.values
    distances = np.linalg.norm(points - point, axis=1)
    slopes = np.array([potential.p(s) ** 2 for s in sigmas])
    positive = values > PHI_FLOOR
    nu = NU_SAFETY * float(np.min(slopes[positive] / values[positive]))
    rho = chart.length / 4
    c1, c2, c1_ext, c2_ext = _power_constants(values, distances, 2, rho, floor)
    logging.info("1-d certificate: lambda=%.6g nu=%.6g c1=%.3g c2=%.3g", eigenvalue, nu, c1, c2)
    return LyapunovCertificate(
        phi=potential, z=point, nu=nu, k=1, a=2, c1=c1, c2=c2, rho=rho,
        c1_ext=c1_ext, c2_ext=c2_ext, eigenvalue=eigenvalue, source="arc-length quadrature",
        lie=potential.lie, meta={"length": chart.length, "sigma_z": sigma_z},
    )


def lie_derivative(cert: LyapunovCertificate, field: ReducedField, x: np.ndarray) -> float:
    if cert.lie is not None:
        return float(cert.lie(x))
    direction = reduced_rhs(field, x)
    return float(dual.directional_derivative(lambda v: [cert.phi(v)], x, direction)[0])


def fit_certificate(
    phi: Callable[[Sequence[Any]], Any],
    z: Sequence[float],
    a: int,
    k: float,
    samples: np.ndarray,
    field: ReducedField,
    rho: float | None = None,
) -> LyapunovCertificate:
    """Fit ``nu``, ``c1``, ``c2`` and ``rho`` for a user-supplied candidate ``phi``."""

    point = np.asarray(z, dtype=float)
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    values = np.array([float(phi(x)) for x in pts])
    try:
        lie = np.array([
            float(dual.directional_derivative(lambda v: [phi(v)], x, reduced_rhs(field, x))[0])
            for x in pts
        ])
    except JacobianError as exc:
        raise CertificateError(f"candidate cannot be differentiated: {exc}") from exc
    positive = values > PHI_FLOOR
    if not np.any(positive):
        raise CertificateError("candidate vanishes at every sample")
    ratios = -lie[positive] / values[positive] ** k
    worst = int(np.argmin(ratios))
    if ratios[worst] <= 0:
        raise CertificateError(
            f"-L_q(phi)/phi^k is not positive at {pts[positive][worst].tolist()} (ratio {ratios[worst]:.3e})"
        )
    distances = np.linalg.norm(pts - point, axis=1)
    if rho is None:
        rho = 0.25 * float(np.max(pdist(pts))) if len(pts) > 1 else 1.0
    c1, c2, c1_ext, c2_ext = _power_constants(values, distances, a, rho, 1e-12)
    return LyapunovCertificate(
        phi=phi, z=point, nu=NU_SAFETY * float(ratios[worst]), k=k, a=a, c1=c1, c2=c2, rho=rho,
        c1_ext=c1_ext, c2_ext=c2_ext, source="fitted candidate",
        meta={"min_ratio": float(ratios[worst])},
    )


def verify_lyapunov(
    cert: LyapunovCertificate,
    field: ReducedField,
    mf: SlowManifold,
    n_samples: int,
    manifolds: ManifoldService | None = None,
    rng: np.random.Generator | None = None,
) -> Verdict:
    """Check positivity, the power bounds and the decay inequality at manifold samples."""

    svc = manifolds or ManifoldService()
    points = sample_manifold(mf, n_samples, rng, svc).points
    spacing = svc.tolerances.dedup_tol
    slack_pos = slack_pow = slack_decay = math.inf
    failure: tuple[str, np.ndarray] | None = None

    z_value = cert.value(cert.z)
    if abs(z_value) > 1e-10:
        return Failed(
            condition="LC", witness=cert.z, reason=f"phi(z) = {z_value:.3e} is not zero",
            samples=len(points),
        )
    for x in points:
        value = cert.value(x)
        distance = float(np.linalg.norm(x - cert.z))
        if distance > spacing:
            slack_pos = min(slack_pos, value)
            if value <= 0 and failure is None:
                failure = (f"(i) phi = {value:.3e} is not positive away from z", x)
            if distance <= cert.rho and math.isfinite(cert.c1):
                power = distance ** cert.a
                bound = min(value - cert.c1 * power, cert.c2 * power - value)
                slack_pow = min(slack_pow, bound)
                if bound < -1e-12 * (1.0 + value) and failure is None:
                    failure = (f"(ii) phi = {value:.3e} outside [{cert.c1:.3g}, {cert.c2:.3g}]·|x-z|^{cert.a}", x)
        lie = lie_derivative(cert, field, x)
        bound = -cert.nu * max(value, 0.0) ** cert.k - lie
        slack_decay = min(slack_decay, bound)
        if bound < -1e-12 * (1.0 + abs(lie)) and failure is None:
            failure = (f"(iii) L_q(phi) = {lie:.3e} exceeds -nu·phi^k = {-cert.nu * value ** cert.k:.3e}", x)

    margins = {"positivity": slack_pos, "power_bounds": slack_pow, "decay": slack_decay, "nu": cert.nu}
    margins = {name: v for name, v in margins.items() if math.isfinite(v)}
    if failure is not None:
        reason, witness = failure
        logging.warning("Lyapunov check failed: %s at %s", reason, witness.tolist())
        return Failed(condition="LC", witness=witness, reason=reason, margins=margins, samples=len(points))
    return Certified(
        condition="LC", margins=margins, samples=len(points),
        detail=f"{cert.source}: nu={cert.nu:.6g}, a={cert.a}, k={cert.k:g}",
    )


def check_envelope(cert: LyapunovCertificate, trajectory: Trajectory, rtol: float = 1e-6) -> Verdict:
    """``|x(tau) - z| <= c·|x0 - z|·gamma(tau)`` at every node of a reduced trajectory."""

    x0 = trajectory.states[0]
    start = float(np.linalg.norm(x0 - cert.z))
    phi0 = cert.value(x0)
    if start == 0.0 or phi0 <= 0.0:
        return Certified(condition="envelope", detail="trajectory starts at z", samples=1)
    constant = cert.envelope_constant
    worst = math.inf
    for tau, x in zip(trajectory.times - trajectory.t_start, trajectory.states):
        bound = constant * start * decay_envelope(cert, phi0, float(tau))
        slack = bound * (1.0 + rtol) + 1e-12 - float(np.linalg.norm(x - cert.z))
        worst = min(worst, slack)
        if slack < 0:
            return Failed(
                condition="envelope", witness=x,
                reason=f"|x-z| exceeds the decay envelope at tau={tau:.6g}",
                margins={"envelope": slack}, samples=len(trajectory.times),
            )
    return Certified(condition="envelope", margins={"envelope": worst}, samples=len(trajectory.times))


class LyapunovService:
    """Builds and verifies certificates with shared manifold charts."""

    def __init__(self, manifolds: ManifoldService, tolerances: Tolerances = DEFAULT_TOLERANCES) -> None:
        self.manifolds = manifolds
        self.tolerances = tolerances

    def certify_curve(self, field: ReducedField, mf: SlowManifold, z: Sequence[float]) -> LyapunovCertificate:
        return check_lc_1d(field, mf, z, self.manifolds, self.tolerances)

    def verify(
        self, cert: LyapunovCertificate, field: ReducedField, mf: SlowManifold, n_samples: int,
        rng: np.random.Generator | None = None,
    ) -> Verdict:
        return verify_lyapunov(cert, field, mf, n_samples, self.manifolds, rng)
