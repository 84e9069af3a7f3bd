"""Application wiring and bootstrap helpers."""

from __future__ import annotations

from ..config import Settings
from ..data.storage import OutputStore
from ..models.settings import RunConfig
from ..services.condition_service import ConditionService
from ..services.container import ServiceContainer
from ..services.convergence_service import ConvergenceService
from ..services.integration_service import IntegrationService
from ..services.lyapunov_service import LyapunovService
from ..services.manifold_service import ManifoldService
from ..services.reduction_service import ReductionService
from ..systems.registry import REGISTRY, ExampleRegistry


class Application:
    def __init__(self, settings: Settings, registry: ExampleRegistry | None = None) -> None:
        self.settings = settings
        self.registry = registry if registry is not None else REGISTRY
        self.services: ServiceContainer | None = None

    def initialize(self, config: RunConfig) -> ServiceContainer:
        """Build the services for one run; tolerances and integrator come from ``config``."""

        tolerances = config.tolerances
        manifold_service = ManifoldService(tolerances)
        lyapunov_service = LyapunovService(manifold_service, tolerances)
        self.services = ServiceContainer(
            registry=self.registry,
            store=OutputStore(config.output_dir),
            reduction=ReductionService(tolerances),
            manifolds=manifold_service,
            integration=IntegrationService(config.integrator),
            lyapunov=lyapunov_service,
            conditions=ConditionService(manifold_service, lyapunov_service, tolerances),
            convergence=ConvergenceService(config.integrator, config.sweep, tolerances),
        )
        return self.services
