"""Exception hierarchy shared by every slowfast module."""

from __future__ import annotations

from typing import Any, Sequence


class SlowFastError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(SlowFastError, ValueError):
    def __init__(self, expected: int, got: int, what: str = "point") -> None:
        super().__init__(f"{what} has length {got}, expected {expected}")
        self.expected = expected
        self.got = got


class NonFiniteValue(SlowFastError, ValueError):
    def __init__(self, component: int, value: float, where: str = "h") -> None:
        super().__init__(f"{where}[{component}] evaluated to non-finite value {value!r}")
        self.component = component
        self.value = value


class JacobianError(SlowFastError, RuntimeError):
    def __init__(self, seed: int, cause: BaseException) -> None:
        super().__init__(f"evaluation failed while seeding coordinate {seed}: {cause}")
        self.seed = seed


class CharPolyOverflow(SlowFastError, ValueError):
    pass


class MultiplicityMismatch(SlowFastError, ValueError):
    """Zero-root pattern of a characteristic polynomial is not the expected one."""

    def __init__(self, index: int, value: float, expected_zero: bool) -> None:
        kind = "should vanish" if expected_zero else "should not vanish"
        super().__init__(f"coefficient c{index}={value:.3e} {kind}")
        self.index = index
        self.value = value


class DecompositionError(SlowFastError, ValueError):
    pass


class SingularPencil(SlowFastError, ValueError):
    def __init__(self, condition: float, point: Sequence[float]) -> None:
        super().__init__(f"D(mu)·P is singular (condition {condition:.3e}) at {list(point)}")
        self.condition = condition
        self.point = tuple(float(v) for v in point)


class OffManifold(SlowFastError, ValueError):
    def __init__(self, residual: float, tol: float) -> None:
        super().__init__(f"point is off the slow manifold: |mu|={residual:.3e} > {tol:.1e}")
        self.residual = residual


class ConstantRankViolation(SlowFastError, ValueError):
    def __init__(self, rank: int, expected: int, point: Sequence[float]) -> None:
        super().__init__(f"rank {rank} != {expected} at {list(point)}")
        self.rank = rank
        self.point = tuple(float(v) for v in point)


class ProjectionDiverged(SlowFastError, RuntimeError):
    def __init__(self, message: str, state: Sequence[float]) -> None:
        super().__init__(message)
        self.state = tuple(float(v) for v in state)


class ContinuationStalled(SlowFastError, RuntimeError):
    pass


class StiffnessDetected(SlowFastError, RuntimeError):
    def __init__(self, t: float, h: float) -> None:
        super().__init__(f"step size underflow at t={t:.6g} (h={h:.3e})")
        self.t = t
        self.h = h


class IntegrationError(SlowFastError, RuntimeError):
    def __init__(self, message: str, partial: Any = None) -> None:
        super().__init__(message)
        self.partial = partial


class WindowError(SlowFastError, ValueError):
    pass


class NotLinearlyStable(SlowFastError, ValueError):
    def __init__(self, eigenvalue: float, margin: float) -> None:
        super().__init__(f"tangent eigenvalue {eigenvalue:.3e} is not below -{margin:.1e}")
        self.eigenvalue = eigenvalue


class MultipleEquilibria(SlowFastError, ValueError):
    def __init__(self, witness: Sequence[float], value: float) -> None:
        super().__init__(f"reduced field has the wrong sign ({value:.3e}) at {list(witness)}")
        self.witness = tuple(float(v) for v in witness)
        self.value = value


class CertificateError(SlowFastError, ValueError):
    pass


class UnknownSystem(SlowFastError, KeyError):
    def __init__(self, name: str, valid: Sequence[str]) -> None:
        super().__init__(f"unknown system {name!r}; valid names: {', '.join(valid) or '<none>'}")
        self.name = name
        self.valid = tuple(valid)

    def __str__(self) -> str:
        return str(self.args[0])


class ConfigError(SlowFastError, ValueError):
    pass
