"""Dependency container for convenient handler wiring."""

from __future__ import annotations

from dataclasses import dataclass

from ..data.storage import OutputStore
from ..systems.registry import ExampleRegistry
from .condition_service import ConditionService
from .convergence_service import ConvergenceService
from .integration_service import IntegrationService
from .lyapunov_service import LyapunovService
from .manifold_service import ManifoldService
from .reduction_service import ReductionService


@dataclass
class ServiceContainer:
    registry: ExampleRegistry
    store: OutputStore
    reduction: ReductionService
    manifolds: ManifoldService
    integration: IntegrationService
    lyapunov: LyapunovService
    conditions: ConditionService
    convergence: ConvergenceService
