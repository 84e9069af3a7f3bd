import math

import numpy as np
import pytest

from slowfast.core.errors import IntegrationError
from slowfast.models.settings import IntegratorConfig
from slowfast.services.integration_service import ORDER, IntegrationService, integrate


def decay(rate):
    return lambda x: [-rate * x[0]]


def test_implicit_exponential_decay():
    cfg = IntegratorConfig(rtol=1e-8, atol=1e-12)
    trajectory = integrate(decay(1.0), [1.0], (0.0, 1.0), cfg)
    assert trajectory.final[0] == pytest.approx(math.exp(-1.0), abs=1e-7)
    assert trajectory.t_end == pytest.approx(1.0)


def test_explicit_exponential_decay():
    cfg = IntegratorConfig(rtol=1e-8, atol=1e-12, method="explicit")
    trajectory = integrate(decay(1.0), [1.0], (0.0, 1.0), cfg)
    assert trajectory.final[0] == pytest.approx(math.exp(-1.0), abs=1e-7)
    assert trajectory.stats.rejected >= 0


def test_stiff_decay_is_stable_with_long_steps():
    cfg = IntegratorConfig(rtol=1e-6, atol=1e-9)
    trajectory = integrate(decay(1000.0), [1.0], (0.0, 10.0), cfg)
    assert abs(trajectory.final[0]) <= 1e-8
    assert trajectory.stats.steps < 2000


def test_stiff_decay_over_short_span_takes_few_steps():
    rtol = 1e-4
    trajectory = integrate(decay(1000.0), [1.0], (0.0, 0.01), IntegratorConfig(rtol=rtol, atol=1e-10))
    exact = math.exp(-10.0)
    assert trajectory.stats.steps < 200
    assert abs(trajectory.final[0] - exact) <= 100 * rtol * exact


def test_adaptive_error_follows_method_order():
    steps, errors = [], []
    for rtol in (1e-5, 1e-6, 1e-7, 1e-8, 1e-9):
        cfg = IntegratorConfig(rtol=rtol, atol=1e-14, h_max=1.0)
        trajectory = integrate(decay(1.0), [1.0], (0.0, 1.0), cfg)
        error = abs(trajectory.final[0] - math.exp(-1.0))
        assert error <= 10 * rtol
        steps.append(trajectory.stats.steps)
        errors.append(error)
    assert steps == sorted(steps)
    slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
    assert -slope == pytest.approx(ORDER, abs=0.3)


def test_fixed_step_order_is_three():
    errors = []
    for h in (0.1, 0.05):
        cfg = IntegratorConfig(adaptive=False, h_init=h, h_max=h)
        trajectory = integrate(decay(1.0), [1.0], (0.0, 1.0), cfg)
        errors.append(abs(trajectory.final[0] - math.exp(-1.0)))
    order = math.log2(errors[0] / errors[1])
    assert order == pytest.approx(3.0, abs=0.3)


def test_dense_output_between_nodes():
    trajectory = integrate(decay(1.0), [1.0], (0.0, 2.0), IntegratorConfig(rtol=1e-10, atol=1e-12))
    times = np.linspace(0.0, 2.0, 33)
    assert trajectory(times)[:, 0] == pytest.approx(np.exp(-times), abs=1e-6)
    assert trajectory.covers(0.5, 2.0)


def test_max_steps_keeps_partial_trajectory():
    cfg = IntegratorConfig(max_steps=5, h_max=0.01)
    with pytest.raises(IntegrationError) as excinfo:
        integrate(decay(1.0), [1.0], (0.0, 1.0), cfg)
    partial = excinfo.value.partial
    assert partial is not None
    assert 0.0 < partial.t_end < 1.0


def test_bad_span_and_state():
    with pytest.raises(ValueError):
        integrate(decay(1.0), [1.0], (1.0, 0.0))
    with pytest.raises(ValueError):
        integrate(decay(1.0), [math.nan], (0.0, 1.0))


def test_service_overrides():
    service = IntegrationService(IntegratorConfig(method="implicit"))
    trajectory = service.run(decay(2.0), [1.0], (0.0, 1.0), method="explicit")
    assert trajectory.final[0] == pytest.approx(math.exp(-2.0), abs=1e-5)
    assert service.config.method == "implicit"


def test_linear_system_with_jacobian():
    matrix = np.array([[-1.0, 0.0], [0.0, -100.0]])
    trajectory = integrate(
        lambda x: [-x[0], -100.0 * x[1]], [1.0, 1.0], (0.0, 1.0), jac=lambda x: matrix
    )
    assert trajectory.final == pytest.approx([math.exp(-1.0), 0.0], abs=1e-7)
