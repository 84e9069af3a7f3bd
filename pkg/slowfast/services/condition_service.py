"""Sample-based checks of the hypotheses behind a convergent reduction."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np
from scipy.optimize import root
from scipy.spatial import cKDTree

from ..core.errors import (
    CertificateError,
    CharPolyOverflow,
    MultipleEquilibria,
    MultiplicityMismatch,
    NotLinearlyStable,
    SlowFastError,
)
from ..core.linalg import CharPoly, char_poly, deflate_zero_roots, numeric_rank, routh_hurwitz
from ..core.result import ConditionReport
from ..core.verdicts import Certified, Failed, Marginal, Skipped, Verdict
from ..models.certificate import LyapunovCertificate
from ..models.manifold import CurveSpec, GraphChart, SlowManifold
from ..models.polytope import Polytope, membership
from ..models.reduction import Decomposition, ReducedField
from ..models.settings import DEFAULT_TOLERANCES, Tolerances
from ..models.system import PerturbedSystem, eval_h
from ..systems.maltose import maltose_minor, printed_hurwitz
from .lyapunov_service import LyapunovService, fit_certificate
from .manifold_service import ManifoldService
from .reduction_service import reduced_rhs, verify_decomposition

if TYPE_CHECKING:
    from ..systems.base import ExampleSystem

RegionSource = Polytope | Callable[[float], Polytope]

MAX_STARTS = 64


def _deflated(jac: np.ndarray, s: int, tolerances: Tolerances) -> CharPoly:
    scale = max(1.0, float(np.linalg.norm(jac)))
    return deflate_zero_roots(char_poly(jac), s, tolerances.deflation_tol * scale ** jac.shape[0])


def check_tf0_tfi(
    system: PerturbedSystem,
    d: Decomposition,
    mf: SlowManifold,
    n_samples: int,
    manifolds: ManifoldService | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[Verdict, Verdict]:
    """Constant rank r of Dh0 on Y, and a semisimple zero eigenvalue by two independent routes."""

    svc = manifolds or ManifoldService()
    tol = svc.tolerances
    points = svc.sample(mf, n_samples, rng).points
    m, r = system.dim, d.r
    gap = math.inf
    tf0: Verdict | None = None
    tfi: Verdict | None = None
    for x in points:
        jac = system.jacobian_h0(x)
        singular = np.linalg.svd(jac, compute_uv=False)
        rank = numeric_rank(jac, tol.rank_tol)
        if rank != r and tf0 is None:
            tf0 = Failed(
                condition="TF0", witness=x, reason=f"rank Dh0 = {rank}, expected {r}",
                samples=len(points),
            )
        if singular[0] > 0 and r > 0:
            gap = min(gap, float(singular[r - 1] / singular[0]))
        if tfi is not None:
            continue
        try:
            _deflated(jac, m - r, tol)
            by_deflation = True
        except (MultiplicityMismatch, CharPolyOverflow):
            by_deflation = False
        by_rank = numeric_rank(jac @ jac, tol.rank_tol) == rank == r
        if not (by_deflation and by_rank):
            reason = (
                "zero eigenvalue is not semisimple"
                if by_deflation == by_rank
                else f"deflation ({by_deflation}) and kernel-dimension ({by_rank}) routes disagree"
            )
            tfi = Failed(
                condition="TFI", witness=x, reason=reason, samples=len(points),
                extra={"deflation": by_deflation, "direct": by_rank},
            )
    margins = {"rank_gap": gap} if math.isfinite(gap) else {}
    if tf0 is None:
        tf0 = Certified(condition="TF0", margins=margins, samples=len(points), detail=f"rank {r} of {m}")
    if tfi is None:
        tfi = Certified(
            condition="TFI", samples=len(points), detail=f"zero eigenvalue of multiplicity {m - r}",
            extra={"deflation": True, "direct": True},
        )
    return tf0, tfi


def check_tfii(
    system: PerturbedSystem,
    mf: SlowManifold,
    n_samples: int,
    manifolds: ManifoldService | None = None,
    rng: np.random.Generator | None = None,
) -> Verdict:
    """Routh-Hurwitz on the deflated characteristic polynomial of Dh0 at each sample."""

    svc = manifolds or ManifoldService()
    tol = svc.tolerances
    points = svc.sample(mf, n_samples, rng).points
    s = system.dim - mf.decomposition.r
    margin = math.inf
    marginal: np.ndarray | None = None
    for x in points:
        try:
            poly = _deflated(system.jacobian_h0(x), s, tol)
        except (MultiplicityMismatch, CharPolyOverflow) as exc:
            return Failed(condition="TFII", witness=x, reason=f"deflation undefined: {exc}", samples=len(points))
        report = routh_hurwitz(poly, tol.hurwitz_tol)
        margin = min(margin, report.margin)
        if report.status == "unstable":
            index = report.first_failure or report.failed_coefficient
            return Failed(
                condition="TFII", witness=x, samples=len(points), margins={"hurwitz": margin},
                reason=f"Hurwitz condition {index} fails for {poly}",
            )
        if report.status == "marginal" and marginal is None:
            marginal = x
    margins = {"hurwitz": margin}
    if marginal is not None:
        return Marginal(
            condition="TFII", witness=marginal, margins=margins, samples=len(points),
            reason="a Hurwitz minor is within tolerance of zero",
        )
    logging.info("TFII margin %.6g over %d samples", margin, len(points))
    return Certified(condition="TFII", margins=margins, samples=len(points))


def check_hurwitz_symbolic_match(
    n: int = 200,
    rng: np.random.Generator | None = None,
    upper: float = 5.0,
    minor: Callable[..., np.ndarray] = maltose_minor,
    printed: Callable[..., tuple[float, float, float]] = printed_hurwitz,
) -> Verdict:
    """Compare ``(A1, A1·A2 - A3, A3)`` from the block's characteristic polynomial with closed forms."""

    generator = rng or np.random.default_rng(0)
    worst = 0.0
    smallest = math.inf
    witness = None
    for params in generator.uniform(0.0, upper, size=(n, 4)):
        a1, a2, a3 = char_poly(minor(*params)).hurwitz_coefficients()
        computed = np.array([a1, a1 * a2 - a3, a3])
        expected = np.array(printed(*params))
        deviation = float(np.max(np.abs(computed - expected) / np.maximum(1.0, np.abs(expected))))
        if deviation > worst:
            worst, witness = deviation, params
        smallest = min(smallest, float(np.min(expected)))
    margins = {"max_deviation": worst, "min_value": smallest}
    if worst >= 1e-9 or smallest <= 0:
        return Failed(
            condition="hurwitz-match", witness=witness if witness is not None else np.zeros(4),
            reason=f"max relative deviation {worst:.3e}, smallest value {smallest:.3e}",
            margins=margins, samples=n,
        )
    return Certified(condition="hurwitz-match", margins=margins, samples=n)


def check_cis(
    system: PerturbedSystem,
    region: RegionSource,
    eps_list: Sequence[float],
    n_per_face: int,
    rng: np.random.Generator | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Verdict:
    """Outward flux ``n·h(x, eps)`` on sampled face points must not exceed ``flux_tol``."""

    if not eps_list:
        raise ValueError("check_cis needs at least one eps")
    generator = rng or np.random.default_rng(0)
    worst = -math.inf
    witness: tuple[np.ndarray, str, float] | None = None
    count = 0
    for eps in eps_list:
        poly = region(eps) if callable(region) else region
        for face in range(len(poly.offsets)):
            normal = poly.normals[face] / np.linalg.norm(poly.normals[face])
            for x in poly.sample_face(face, n_per_face, generator):
                flux = float(normal @ eval_h(system, x, eps))
                count += 1
                if flux > worst:
                    worst, witness = flux, (x, poly.face_labels[face], eps)
    margins = {"inward_flux": -worst}
    if witness is None:
        return Skipped(condition="CIS", reason="no face points could be sampled")
    x, face_label, eps = witness
    if worst > tolerances.flux_tol:
        return Failed(
            condition="CIS", witness=x, margins=margins, samples=count,
            reason=f"outward flux {worst:.3e} through face {face_label} at eps={eps:g}",
            extra={"face": face_label, "eps": eps},
        )
    return Certified(
        condition="CIS", margins=margins, samples=count,
        detail=f"tightest face {face_label} at eps={eps:g}", extra={"face": face_label},
    )


def find_stationary_points(
    field: ReducedField,
    mf: SlowManifold,
    region: Polytope,
    samples: np.ndarray,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> list[np.ndarray]:
    """Multistart root finding on ``[mu(x); B^T q(x)] = 0`` with B the tangent basis at the start."""

    d = mf.decomposition
    found: list[np.ndarray] = []
    for start in np.atleast_2d(samples):
        try:
            _, _, vt = np.linalg.svd(d.dmu(start))
            basis = vt[d.r:].T

            def equations(x: np.ndarray, basis: np.ndarray = basis) -> np.ndarray:
                return np.concatenate([d.mu_value(x), basis.T @ reduced_rhs(field, x)])

            solution = root(equations, start, method="hybr", options={"xtol": 1e-14})
        except (SlowFastError, np.linalg.LinAlgError, FloatingPointError) as exc:
            logging.warning("stationary-point start %s skipped", start.tolist(), exc_info=exc)
            continue
        x = solution.x
        if not solution.success or not np.all(np.isfinite(x)):
            continue
        if membership(region, x, tolerances.membership_tol).status == "outside":
            continue
        try:
            speed = float(np.max(np.abs(reduced_rhs(field, x))))
        except SlowFastError:
            continue
        if speed >= tolerances.root_tol or d.residual(x) > tolerances.tol_y:
            continue
        if all(np.linalg.norm(x - other) > tolerances.dedup_tol for other in found):
            found.append(x)
    return found


def check_gp(mf: SlowManifold, manifolds: ManifoldService | None = None) -> Verdict:
    """Global parameterization: graph charts by construction, traced curves when simple."""

    if isinstance(mf.chart, GraphChart):
        return Certified(condition="GP", detail=f"graph over a box in coordinates {mf.chart.free}")
    if not isinstance(mf.chart, CurveSpec):
        return Skipped(condition="GP", reason="implicit-only manifold has no global chart")
    chart = (manifolds or ManifoldService()).curve_chart(mf)
    steps = np.linalg.norm(np.diff(chart.nodes, axis=0), axis=1)
    radius = 0.25 * float(np.min(steps[steps > 0])) if np.any(steps > 0) else 0.0
    for i, j in sorted(cKDTree(chart.nodes).query_pairs(radius)):
        if j - i > 1:
            return Failed(condition="GP", witness=chart.nodes[j], reason=f"curve revisits node {i} at node {j}")
    if "stalled" in chart.diagnostic:
        return Marginal(
            condition="GP", witness=chart.nodes[-1], reason=chart.diagnostic, samples=len(chart.nodes)
        )
    return Certified(
        condition="GP", samples=len(chart.nodes),
        detail=f"simple curve of length {chart.length:.6g}" + (f" ({chart.diagnostic})" if chart.diagnostic else ""),
    )


class ConditionService:
    """Runs the full hypothesis check for one example system."""

    def __init__(
        self,
        manifolds: ManifoldService,
        lyapunov: LyapunovService,
        tolerances: Tolerances = DEFAULT_TOLERANCES,
    ) -> None:
        self.manifolds = manifolds
        self.lyapunov = lyapunov
        self.tolerances = tolerances

    def run_all(
        self,
        example: ExampleSystem,
        eps_list: Sequence[float],
        n_samples: int = 50,
        seed: int = 0,
        cis_region: Polytope | None = None,
    ) -> ConditionReport:
        rng = np.random.default_rng(seed)
        report = ConditionReport(system=example.name, seed=seed)
        mf = example.manifold
        try:
            samples = self.manifolds.sample(mf, n_samples, rng)
        except SlowFastError as exc:
            logging.warning("sampling %s failed", example.name, exc_info=exc)
            report.add(Failed(condition="sampling", witness=example.initial_state, reason=str(exc)))
            return report

        decomposition = verify_decomposition(example.decomposition, example.system, samples.points, self.tolerances)
        if decomposition.ok:
            report.add(Certified(
                condition="decomposition", samples=decomposition.samples,
                detail=(
                    f"{example.decomposition.source}, residual {decomposition.max_residual:.3e}, "
                    f"cond(Dmu·P) <= {decomposition.worst_condition:.3g}"
                ),
            ))
        else:
            report.add(Failed(
                condition="decomposition", witness=decomposition.worst_point,
                reason=decomposition.reason, samples=decomposition.samples,
            ))

        tf0, tfi = check_tf0_tfi(example.system, example.decomposition, mf, n_samples, self.manifolds, rng)
        report.add(tf0)
        report.add(tfi)
        if tf0.passed and tfi.passed:
            report.add(check_tfii(example.system, mf, n_samples, self.manifolds, rng))
        else:
            report.add(Skipped(condition="TFII", reason="TF0/TFI failed, deflation undefined"))
        if "hurwitz_minor" in example.extras:
            report.add(check_hurwitz_symbolic_match(
                rng=rng, minor=example.extras["hurwitz_minor"], printed=example.extras["hurwitz_printed"],
            ))
        report.add(check_gp(mf, self.manifolds))
        region = cis_region if cis_region is not None else example.invariant_region
        report.add(check_cis(example.system, region, eps_list, 16, rng, self.tolerances))
        if not decomposition.ok:
            report.add(Skipped(condition="stationary", reason="reduced field undefined without a valid decomposition"))
            return report

        field = example.reduced_field
        roots = self.stationary_points(example, samples.points)
        if len(roots) != 1:
            report.add(Failed(
                condition="stationary", witness=roots[1] if roots else example.initial_state,
                reason=f"{len(roots)} stationary points found in the region, expected exactly one",
            ))
            return report
        z = roots[0]
        report.add(Certified(condition="stationary", samples=len(samples), detail=f"z = {z.tolist()}", extra={"z": z.tolist()}))
        report.add(self._lyapunov(example, field, z, n_samples, rng))
        return report

    def stationary_points(self, example: ExampleSystem, samples: np.ndarray) -> list[np.ndarray]:
        starts = samples[:: max(1, len(samples) // MAX_STARTS)]
        mf = example.manifold
        return find_stationary_points(example.reduced_field, mf, mf.region, starts, self.tolerances)

    def certificate(
        self, example: ExampleSystem, field: ReducedField, z: np.ndarray, n_samples: int,
        rng: np.random.Generator,
    ) -> LyapunovCertificate | None:
        """Quadrature certificate on curves, the shipped candidate otherwise; None when neither applies."""

        mf = example.manifold
        if mf.dim == 1:
            return self.lyapunov.certify_curve(field, mf, z)
        candidate = example.lyapunov_candidate
        if candidate is None:
            return None
        points = self.manifolds.sample(mf, n_samples, rng).points
        return fit_certificate(candidate.phi, z, candidate.a, candidate.k, points, field)

    def _lyapunov(
        self, example: ExampleSystem, field: ReducedField, z: np.ndarray, n_samples: int,
        rng: np.random.Generator,
    ) -> Verdict:
        mf = example.manifold
        try:
            cert = self.certificate(example, field, z, n_samples, rng)
        except (NotLinearlyStable, CertificateError) as exc:
            return Failed(condition="LC", witness=z, reason=str(exc))
        except MultipleEquilibria as exc:
            return Failed(condition="LC", witness=exc.witness, reason=str(exc))
        if cert is None:
            return Skipped(condition="LC", reason=f"no Lyapunov candidate for a {mf.dim}-d manifold")
        return self.lyapunov.verify(cert, field, mf, n_samples, rng)
