import logging

import numpy as np
import pytest

from slowfast.models.manifold import SlowManifold
from slowfast.models.polytope import Polytope
from slowfast.models.settings import DEFAULT_TOLERANCES
from slowfast.services import condition_service
from slowfast.services.condition_service import (
    ConditionService,
    check_cis,
    check_gp,
    check_hurwitz_symbolic_match,
    check_tf0_tfi,
    check_tfii,
    find_stationary_points,
)
from slowfast.services.lyapunov_service import LyapunovService
from slowfast.services.manifold_service import ManifoldService, sample_manifold
from slowfast.systems.maltose import maltose_minor, printed_hurwitz
from slowfast.systems.registry import get_example


@pytest.fixture
def conditions() -> ConditionService:
    manifolds = ManifoldService()
    return ConditionService(manifolds, LyapunovService(manifolds))


def test_linear_toy_passes_every_check(conditions, linear_toy):
    report = conditions.run_all(linear_toy, [0.1, 0.01, 0.001], n_samples=20, seed=3)
    assert report.ok, [(v.condition, v.detail) for v in report.failures]
    assert [v.condition for v in report.verdicts] == [
        "decomposition", "TF0", "TFI", "TFII", "GP", "CIS", "stationary", "LC",
    ]
    assert report.get("stationary").extra["z"] == pytest.approx([0.0, 0.0], abs=1e-12)
    assert report.get("TFII").margins["hurwitz"] == pytest.approx(1.0)
    assert report.get("LC").margins["nu"] == pytest.approx(1.8, rel=1e-6)


def test_jordan_block_fails_semisimplicity(jordan, rng):
    tf0, tfi = check_tf0_tfi(jordan.system, jordan.decomposition, jordan.manifold, 10, rng=rng)
    assert tf0.status == "certified-at-samples"
    assert tfi.status == "failed"
    assert tfi.extra == {"deflation": False, "direct": False}
    assert "not semisimple" in tfi.detail


def test_jordan_report_skips_downstream_checks(conditions, jordan):
    report = conditions.run_all(jordan, [0.1], n_samples=10)
    assert not report.ok
    assert report.get("decomposition").status == "failed"
    assert report.get("TFII").status == "skipped"
    assert report.get("stationary").status == "skipped"
    assert report.get("LC") is None


def test_shrunken_box_has_outward_flux(linear_toy, rng):
    box = Polytope.box([0.0, 0.5], [1.0, 1.0], label="shrunk")
    verdict = check_cis(linear_toy.system, box, [0.1, 0.01], 8, rng)
    assert verdict.status == "failed"
    assert verdict.extra["face"] == "x2>=0.5"
    assert verdict.margins["inward_flux"] == pytest.approx(-0.5)
    assert verdict.witness[1] == pytest.approx(0.5)


def test_cis_over_eps_dependent_region():
    example = get_example("mm_reversible_small_e0")
    verdict = check_cis(example.system, example.invariant_region, [0.1, 0.01], 8)
    assert verdict.passed
    assert verdict.samples > 0
    with pytest.raises(ValueError):
        check_cis(example.system, example.invariant_region, [], 8)


def test_printed_hurwitz_polynomials_match():
    verdict = check_hurwitz_symbolic_match(n=100, rng=np.random.default_rng(1))
    assert verdict.status == "certified-at-samples"
    assert verdict.margins["max_deviation"] < 1e-9
    assert verdict.margins["min_value"] > 0


def test_perturbed_hurwitz_polynomials_are_caught():
    def off_by_one(a, b, c, d):
        a1, h2, a3 = printed_hurwitz(a, b, c, d)
        return a1, h2 + 1.0, a3

    verdict = check_hurwitz_symbolic_match(n=20, printed=off_by_one, minor=maltose_minor)
    assert verdict.status == "failed"
    assert len(verdict.witness) == 4


def test_maltose_fast_block_is_hurwitz():
    example = get_example("maltose_transport")
    verdict = check_tfii(example.system, example.manifold, 12)
    assert verdict.status == "certified-at-samples"
    assert verdict.margins["hurwitz"] > 0


def test_tfii_on_linear_toy(linear_toy):
    verdict = check_tfii(linear_toy.system, linear_toy.manifold, 5)
    assert verdict.passed
    assert verdict.samples == 5


def test_global_parameterization_by_chart_kind(linear_toy):
    assert check_gp(linear_toy.manifold).status == "certified-at-samples"
    curve = get_example("mm_irrev_slow_k2").manifold
    assert check_gp(curve).status == "certified-at-samples"
    implicit = SlowManifold(linear_toy.decomposition, linear_toy.region)
    assert check_gp(implicit).status == "skipped"


def test_stationary_point_of_reversible_enzyme():
    example = get_example("mm_reversible_small_e0")
    samples = sample_manifold(example.manifold, 10).points
    roots = find_stationary_points(
        example.reduced_field, example.manifold, example.region, samples, DEFAULT_TOLERANCES
    )
    assert len(roots) == 1
    assert roots[0] == pytest.approx([0.5, 0.0], abs=1e-9)


def test_failed_stationary_start_is_logged_and_skipped(monkeypatch, caplog):
    real_root = condition_service.root
    calls = []

    def flaky_root(*args, **kwargs):
        calls.append(args[1])
        if len(calls) == 1:
            raise np.linalg.LinAlgError("singular matrix")
        return real_root(*args, **kwargs)

    monkeypatch.setattr(condition_service, "root", flaky_root)
    example = get_example("mm_reversible_small_e0")
    samples = sample_manifold(example.manifold, 10).points
    with caplog.at_level(logging.WARNING):
        roots = find_stationary_points(
            example.reduced_field, example.manifold, example.region, samples, DEFAULT_TOLERANCES
        )
    assert len(roots) == 1
    skipped = [r for r in caplog.records if "stationary-point start" in r.getMessage()]
    assert all(r.levelno == logging.WARNING and r.exc_info for r in skipped)
    assert any(r.exc_info[0] is np.linalg.LinAlgError for r in skipped)


def test_stationary_starts_are_thinned(conditions, linear_toy):
    samples = sample_manifold(linear_toy.manifold, 200).points
    roots = conditions.stationary_points(linear_toy, samples)
    assert len(roots) == 1


def test_report_is_reproducible(conditions):
    example = get_example("mm_reversible_small_e0")
    first = conditions.run_all(example, [0.1, 0.01], n_samples=10, seed=5)
    second = conditions.run_all(example, [0.1, 0.01], n_samples=10, seed=5)
    assert [(v.condition, v.status, v.witness) for v in first.verdicts] == [
        (v.condition, v.status, v.witness) for v in second.verdicts
    ]
    assert first.ok
