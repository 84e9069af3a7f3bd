import numpy as np
import pytest

from slowfast.core.errors import ConstantRankViolation, OffManifold
from slowfast.models.manifold import CurveSpec, SlowManifold
from slowfast.models.polytope import membership
from slowfast.services.manifold_service import (
    ManifoldService,
    fast_fiber_project,
    sample_manifold,
    tangent_space,
    trace_curve,
)
from slowfast.systems.registry import get_example


def test_trace_slow_product_curve():
    example = get_example("mm_irrev_slow_k2")
    mf = example.manifold
    chart = trace_curve(mf.decomposition, mf.region, mf.chart)
    residuals = [mf.decomposition.residual(x) for x in chart.nodes]
    assert max(residuals) <= 1e-10
    assert chart.length > 0.5
    assert all(membership(mf.region, x, 1e-8).status != "outside" for x in chart.nodes)
    assert np.all(np.diff(chart.sigma) >= 0)


def test_curve_chart_locates_its_own_points():
    example = get_example("mm_irrev_slow_k2")
    chart = ManifoldService().curve_chart(example.manifold)
    for sigma in (0.1 * chart.length, 0.5 * chart.length, 0.9 * chart.length):
        assert chart.locate(chart.point(sigma)) == pytest.approx(sigma, abs=1e-3)


def test_curve_chart_is_cached():
    example = get_example("maltose_transport")
    service = ManifoldService()
    assert service.curve_chart(example.manifold) is service.curve_chart(example.manifold)


def test_graph_samples_cover_the_box(linear_toy):
    sample = sample_manifold(linear_toy.manifold, 11)
    assert len(sample) == 11
    assert sample.points[:, 0] == pytest.approx(np.linspace(0.0, 1.0, 11))
    assert np.all(sample.points[:, 1] == 0.0)


def test_curve_samples_follow_arc_length():
    example = get_example("mm_irrev_slow_k2")
    sample = sample_manifold(example.manifold, 9)
    assert len(sample) == 9
    assert np.all(np.diff(sample.params) > 0)
    assert max(example.decomposition.residual(x) for x in sample.points) <= 1e-10


def test_implicit_sampling_lands_on_manifold(linear_toy):
    mf = SlowManifold(linear_toy.decomposition, linear_toy.region)
    assert mf.chart_kind == "implicit-only"
    sample = sample_manifold(mf, 5, np.random.default_rng(2))
    assert len(sample) == 5
    assert np.max(np.abs(sample.points[:, 1])) <= 1e-10


def test_sampling_needs_two_points(linear_toy):
    with pytest.raises(ValueError):
        sample_manifold(linear_toy.manifold, 1)


def test_fast_fiber_projection_of_linear_toy(linear_toy):
    projected = fast_fiber_project(linear_toy.system, linear_toy.manifold, [1.0, 1.0])
    assert projected == pytest.approx([1.0, 0.0], abs=1e-12)


def test_maltose_projection_preserves_slow_coordinate():
    example = get_example("maltose_transport")
    projected = fast_fiber_project(example.system, example.manifold, example.initial_state)
    assert projected[0] == pytest.approx(example.initial_state[0], abs=1e-9)
    assert example.decomposition.residual(projected) <= 1e-10
    assert membership(example.region, projected, 1e-8).status != "outside"


def test_tangent_space(linear_toy):
    basis = tangent_space(linear_toy.manifold, [0.5, 0.0])
    assert basis.shape == (2, 1)
    assert abs(basis[0, 0]) == pytest.approx(1.0)
    with pytest.raises(OffManifold):
        tangent_space(linear_toy.manifold, [0.5, 0.5])


def test_tangent_space_rank_violation(linear_toy):
    degenerate = SlowManifold(
        type(linear_toy.decomposition)(r=1, P=lambda x: np.array([[0.0], [-1.0]]), mu=lambda x: [x[1] * x[1]]),
        linear_toy.region,
    )
    with pytest.raises(ConstantRankViolation):
        tangent_space(degenerate, [0.5, 0.0])


def test_curve_spec_outside_region_is_rejected():
    example = get_example("mm_irrev_slow_k2")
    mf = example.manifold
    with pytest.raises(OffManifold):
        trace_curve(mf.decomposition, mf.region, CurveSpec((5.0, 0.9)))
