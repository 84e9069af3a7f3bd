import dataclasses
import math

import numpy as np
import pytest

from slowfast.core.errors import WindowError
from slowfast.models.settings import IntegratorConfig, SweepConfig
from slowfast.models.trajectory import ConvergenceRow, ConvergenceTable
from slowfast.services.convergence_service import (
    ConvergenceService,
    compare_on_window,
    convergence_sweep,
    run_convergence_sweep,
)
from slowfast.services.integration_service import integrate
from slowfast.services.manifold_service import fast_fiber_project
from slowfast.services.reduction_service import reduced_rhs
from slowfast.services.report_service import render_csv
from slowfast.systems.registry import REGISTRY, get_example
from slowfast.utils.timing import Stopwatch, is_window


def test_compare_on_window_rejects_bad_windows():
    full = integrate(lambda x: [-x[0]], [1.0], (0.0, 2.0))
    reduced = integrate(lambda x: [-x[0]], [1.0], (0.0, 1.0))
    with pytest.raises(WindowError):
        compare_on_window(full, full, 0.0, 1.0)
    with pytest.raises(WindowError):
        compare_on_window(full, full, 1.5, 1.0)
    with pytest.raises(WindowError):
        compare_on_window(full, reduced, 0.5, 2.0)
    assert compare_on_window(full, full, 0.5, 2.0) == 0.0


def test_compare_on_window_measures_distance():
    lower = integrate(lambda x: [-x[0]], [1.0], (0.0, 2.0))
    upper = integrate(lambda x: [-x[0]], [2.0], (0.0, 2.0))
    assert compare_on_window(lower, upper, 0.5, 2.0) == pytest.approx(math.exp(-0.5), rel=1e-6)


async def test_linear_toy_sweep_converges(linear_toy):
    table = await convergence_sweep(
        linear_toy.system, linear_toy.reduced_field, linear_toy.manifold,
        linear_toy.initial_state, [0.1, 0.01, 0.001], 0.1, 5.0,
    )
    assert [row.eps for row in table.rows] == [0.1, 0.01, 0.001]
    assert table.rows[0].sup_err == pytest.approx(math.exp(-1.0), rel=1e-4)
    assert table.monotone
    assert table.ok
    assert all(row.n_steps_full > 0 and row.n_steps_reduced > 0 for row in table.rows)
    assert table.empirical_slope() > 0


async def test_oscillatory_system_fails_tail_check(rotation):
    service = ConvergenceService()
    table = await service.sweep_example(
        rotation.system, rotation.reduced_field, rotation.manifold,
        rotation.initial_state, [0.1, 0.01, 0.001], 0.1, 10.0,
    )
    assert not table.ok
    assert not any(row.failed for row in table.rows)
    assert all(row.tail_err > 1.25 * row.head_err for row in table.rows)


def test_sweep_without_timing_is_reproducible(linear_toy):
    args = (
        linear_toy.system, linear_toy.reduced_field, linear_toy.manifold,
        linear_toy.initial_state, [0.1, 0.01], 0.1, 2.0,
    )
    first = run_convergence_sweep(*args, timing=False)
    second = run_convergence_sweep(*args, timing=False, sweep=SweepConfig(max_workers=1))
    assert all(row.wall_ms == 0.0 for row in first.rows)
    assert render_csv(first) == render_csv(second)


async def test_sweep_validates_inputs(linear_toy):
    args = (linear_toy.system, linear_toy.reduced_field, linear_toy.manifold, linear_toy.initial_state)
    with pytest.raises(ValueError):
        await convergence_sweep(*args, [0.01, 0.1], 0.1, 5.0)
    with pytest.raises(ValueError):
        await convergence_sweep(*args, [], 0.1, 5.0)
    with pytest.raises(WindowError):
        await convergence_sweep(*args, [0.1], 3.0, 5.0)


async def test_row_whose_field_raises_is_marked_failed(linear_toy):
    def tail(x, eps):
        if eps < 0.005:
            raise ValueError("array must not contain infs or NaNs")
        return [0.0 * x[0], 0.0 * x[1]]

    system = dataclasses.replace(linear_toy.system, hstar=tail)
    table = await convergence_sweep(
        system, linear_toy.reduced_field, linear_toy.manifold,
        linear_toy.initial_state, [0.1, 0.01, 0.001], 0.1, 5.0,
    )
    assert [row.failed for row in table.rows] == [False, False, True]
    assert "infs or NaNs" in table.rows[-1].reason
    assert table.rows[0].sup_err == pytest.approx(math.exp(-1.0), rel=1e-4)
    assert not table.ok


def test_failed_rows_break_the_table():
    table = ConvergenceTable(
        system="demo",
        rows=[
            ConvergenceRow(eps=0.1, sup_err=1e-2, tail_err=1e-3, head_err=1e-2),
            ConvergenceRow(eps=0.01, failed=True, reason="max_steps"),
        ],
    )
    assert not table.monotone
    assert not table.ok
    assert math.isnan(table.empirical_slope())


def test_empirical_slope_of_linear_errors():
    rows = [
        ConvergenceRow(eps=e, sup_err=3.0 * e, tail_err=e, head_err=3.0 * e)
        for e in np.logspace(-1, -4, 4)
    ]
    table = ConvergenceTable(system="demo", rows=rows)
    assert table.ok
    assert table.empirical_slope() == pytest.approx(1.0)


def test_stopwatch_and_window_helpers():
    with Stopwatch(enabled=False) as watch:
        sum(range(1000))
    assert watch.elapsed_ms == 0.0
    with Stopwatch() as watch:
        sum(range(1000))
    assert watch.elapsed_ms >= 0.0
    assert is_window(0.1, 5.0)
    assert not is_window(0.0, 5.0)
    assert not is_window(2.5, 5.0)


async def test_reversible_enzyme_errors_shrink_with_eps():
    example = get_example("mm_reversible_small_e0")
    table = await convergence_sweep(
        example.system, example.reduced_field, example.manifold,
        example.initial_state, [0.1, 0.01, 0.001], 0.1, 20.0,
    )
    assert table.monotone
    assert all(row.tail_err <= row.sup_err for row in table.rows)
    assert table.rows[-1].sup_err < 1e-2


@pytest.mark.slow
@pytest.mark.parametrize("name", REGISTRY.names())
async def test_shipped_systems_converge_on_the_long_window(name):
    example = get_example(name)
    table = await convergence_sweep(
        example.system, example.reduced_field, example.manifold,
        example.initial_state, [1e-1, 1e-2, 1e-3, 1e-4], 0.1, 50.0, timing=False,
    )
    assert not any(row.failed for row in table.rows)
    assert table.monotone
    assert table.ok


def test_window_distance_is_insensitive_to_grid_refinement():
    example = get_example("mm_reversible_small_e0")
    start = fast_fiber_project(example.system, example.manifold, example.initial_state)
    field = example.reduced_field
    reduced = integrate(
        lambda x: reduced_rhs(field, x), start, (0.0, 20.0), IntegratorConfig(method="explicit")
    )
    full = integrate(example.system.slow_time_field(0.01), example.initial_state, (0.0, 20.0))
    coarse = compare_on_window(full, reduced, 0.1, 20.0, grid=512)
    fine = compare_on_window(full, reduced, 0.1, 20.0, grid=1024)
    assert fine > 0.0
    assert abs(fine - coarse) <= 0.01 * fine
