"""Forward-mode dual numbers and the Jacobians built on them."""

from __future__ import annotations

import math
from numbers import Real
from typing import Any, Callable, Sequence

import numpy as np

from .errors import JacobianError

VectorMap = Callable[[Sequence[Any]], Any]


class DualScalar:
    """A value together with its seeded directional sensitivities.

    numpy scalars and arrays defer to the Python operators below because
    ``__array_ufunc__`` is disabled, so ``np.float64(2.0) * d`` stays dual.
    """

    __slots__ = ("derivatives", "value")
    __array_ufunc__ = None

    def __init__(self, value: float, derivatives: Sequence[float] | np.ndarray) -> None:
        self.value = float(value)
        self.derivatives = np.asarray(derivatives, dtype=float)

    @classmethod
    def constant(cls, value: float, width: int) -> DualScalar:
        return cls(value, np.zeros(width))

    def _lift(self, other: Any) -> DualScalar | None:
        if isinstance(other, DualScalar):
            return other
        if isinstance(other, Real):
            return DualScalar(float(other), np.zeros_like(self.derivatives))
        return None

    def __add__(self, other: Any) -> DualScalar:
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return DualScalar(self.value + rhs.value, self.derivatives + rhs.derivatives)

    __radd__ = __add__

    def __sub__(self, other: Any) -> DualScalar:
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return DualScalar(self.value - rhs.value, self.derivatives - rhs.derivatives)

    def __rsub__(self, other: Any) -> DualScalar:
        lhs = self._lift(other)
        if lhs is None:
            return NotImplemented
        return lhs - self

    def __mul__(self, other: Any) -> DualScalar:
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return DualScalar(
            self.value * rhs.value,
            self.derivatives * rhs.value + rhs.derivatives * self.value,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> DualScalar:
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        quotient = self.value / rhs.value
        return DualScalar(quotient, (self.derivatives - quotient * rhs.derivatives) / rhs.value)

    def __rtruediv__(self, other: Any) -> DualScalar:
        lhs = self._lift(other)
        if lhs is None:
            return NotImplemented
        return lhs / self

    def __neg__(self) -> DualScalar:
        return DualScalar(-self.value, -self.derivatives)

    def __pos__(self) -> DualScalar:
        return self

    def __abs__(self) -> DualScalar:
        return -self if self.value < 0 else self

    def __pow__(self, exponent: Any) -> DualScalar:
        if isinstance(exponent, DualScalar):
            return exp(exponent * log(self))
        if not isinstance(exponent, Real):
            return NotImplemented
        n = float(exponent)
        if n == 0.0:
            return DualScalar(1.0, np.zeros_like(self.derivatives))
        if n == 1.0:
            return self
        slope = n * self.value ** (n - 1.0)
        return DualScalar(self.value**n, slope * self.derivatives)

    def __rpow__(self, base: Any) -> DualScalar:
        if not isinstance(base, Real):
            return NotImplemented
        return exp(self * math.log(float(base)))

    def __lt__(self, other: Any) -> bool:
        return self.value < _plain(other)

    def __le__(self, other: Any) -> bool:
        return self.value <= _plain(other)

    def __gt__(self, other: Any) -> bool:
        return self.value > _plain(other)

    def __ge__(self, other: Any) -> bool:
        return self.value >= _plain(other)

    def __repr__(self) -> str:
        return f"DualScalar({self.value!r}, {self.derivatives.tolist()!r})"


def _plain(value: Any) -> float:
    return value.value if isinstance(value, DualScalar) else float(value)


def sqrt(x: Any) -> Any:
    if isinstance(x, DualScalar):
        root = math.sqrt(x.value)
        return DualScalar(root, x.derivatives / (2.0 * root))
    return np.sqrt(x)


def exp(x: Any) -> Any:
    if isinstance(x, DualScalar):
        value = math.exp(x.value)
        return DualScalar(value, value * x.derivatives)
    return np.exp(x)


def log(x: Any) -> Any:
    if isinstance(x, DualScalar):
        return DualScalar(math.log(x.value), x.derivatives / x.value)
    return np.log(x)


def value_of(x: Any) -> float:
    return _plain(x)


def values(out: Any) -> np.ndarray:
    """Strip sensitivities from an evaluated map, keeping its shape."""

    arr = np.asarray(out, dtype=object)
    flat = np.array([_plain(v) for v in arr.ravel()], dtype=float)
    return flat.reshape(arr.shape)


def _seeded(point: np.ndarray, direction: np.ndarray) -> np.ndarray:
    seeded = np.empty(point.size, dtype=object)
    for i, (v, d) in enumerate(zip(point, direction)):
        seeded[i] = DualScalar(v, (d,))
    return seeded


def _first_derivatives(out: Any) -> np.ndarray:
    flat = np.asarray(out, dtype=object).ravel()
    return np.array(
        [v.derivatives[0] if isinstance(v, DualScalar) else 0.0 for v in flat],
        dtype=float,
    )


def jacobian(f: VectorMap, x: Sequence[float] | np.ndarray) -> np.ndarray:
    """Jacobian of ``f`` at ``x`` with one dual pass per coordinate."""

    point = np.asarray(x, dtype=float).ravel()
    columns = []
    for seed in range(point.size):
        direction = np.zeros(point.size)
        direction[seed] = 1.0
        try:
            out = f(_seeded(point, direction))
        except Exception as exc:  # noqa: BLE001
            raise JacobianError(seed, exc) from exc
        columns.append(_first_derivatives(out))
    if not columns:
        return np.zeros((0, 0))
    return np.column_stack(columns)


def directional_derivative(
    f: VectorMap, x: Sequence[float] | np.ndarray, direction: Sequence[float] | np.ndarray
) -> np.ndarray:
    """``Df(x)·direction`` from a single dual pass."""

    point = np.asarray(x, dtype=float).ravel()
    try:
        out = f(_seeded(point, np.asarray(direction, dtype=float).ravel()))
    except Exception as exc:  # noqa: BLE001
        raise JacobianError(-1, exc) from exc
    return _first_derivatives(out)
