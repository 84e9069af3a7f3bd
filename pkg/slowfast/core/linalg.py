"""Small dense linear algebra for the condition checkers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import CharPolyOverflow, MultiplicityMismatch

MAX_CHAR_POLY_SIZE = 12


@dataclass(frozen=True, slots=True)
class CharPoly:
    """Monic polynomial, coefficients stored ascending: ``c0 + c1 x + ... + x^m``."""

    coefficients: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.coefficients or self.coefficients[-1] != 1.0:
            raise ValueError(f"characteristic polynomial must be monic, got {self.coefficients}")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def hurwitz_coefficients(self) -> tuple[float, ...]:
        """Coefficients ``a1..an`` of ``x^n + a1 x^(n-1) + ... + an``."""

        return tuple(reversed(self.coefficients[:-1]))

    def __call__(self, x: complex | float | np.ndarray) -> complex | float | np.ndarray:
        return np.polyval(self.coefficients[::-1], x)

    def roots(self) -> np.ndarray:
        return np.roots(self.coefficients[::-1])

    def __str__(self) -> str:
        terms = []
        for power in range(self.degree, -1, -1):
            c = self.coefficients[power]
            if c == 0 and power != self.degree:
                continue
            terms.append(f"{c:+.6g}·x^{power}" if power else f"{c:+.6g}")
        return " ".join(terms)


@dataclass(frozen=True, slots=True)
class HurwitzReport:
    status: Literal["stable", "marginal", "unstable"]
    determinants: tuple[float, ...]
    first_failure: int | None = None
    failed_coefficient: int | None = None

    @property
    def stable(self) -> bool:
        return self.status == "stable"

    @property
    def margin(self) -> float:
        return min(self.determinants) if self.determinants else float("inf")


def numeric_rank(matrix: np.ndarray, tol: float = 1e-8) -> int:
    """Count singular values above ``tol`` times the largest one."""

    if tol <= 0:
        raise ValueError(f"rank tolerance must be positive, got {tol}")
    arr = np.atleast_2d(np.asarray(matrix, dtype=float))
    if arr.size == 0:
        return 0
    singular = np.linalg.svd(arr, compute_uv=False)
    if singular[0] == 0.0:
        return 0
    return int(np.count_nonzero(singular > tol * singular[0]))


def char_poly(matrix: np.ndarray) -> CharPoly:
    """Characteristic polynomial by the Faddeev-LeVerrier recursion."""

    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"characteristic polynomial needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_CHAR_POLY_SIZE:
        raise CharPolyOverflow(f"matrix of size {n} exceeds the supported size {MAX_CHAR_POLY_SIZE}")
    coefficients = np.zeros(n + 1)
    coefficients[n] = 1.0
    identity = np.eye(n)
    m_k = np.zeros((n, n))
    for k in range(1, n + 1):
        m_k = a @ m_k + coefficients[n - k + 1] * identity
        coefficients[n - k] = -np.trace(a @ m_k) / k
    if not np.all(np.isfinite(coefficients)):
        raise CharPolyOverflow("characteristic polynomial coefficients overflowed")
    return CharPoly(tuple(float(c) for c in coefficients))


def deflate_zero_roots(poly: CharPoly, s: int, tol: float) -> CharPoly:
    """Divide by ``x^s`` after checking the zero root has multiplicity exactly ``s``."""

    if not 0 <= s <= poly.degree:
        raise ValueError(f"deflation order {s} outside [0, {poly.degree}]")
    c = poly.coefficients
    for index in range(s):
        if abs(c[index]) > tol:
            raise MultiplicityMismatch(index, c[index], expected_zero=True)
    if abs(c[s]) <= tol:
        raise MultiplicityMismatch(s, c[s], expected_zero=False)
    return CharPoly(tuple(c[s:]))


def hurwitz_matrix(poly: CharPoly) -> np.ndarray:
    n = poly.degree
    a = (1.0, *poly.hurwitz_coefficients())
    h = np.zeros((n, n))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            index = 2 * j - i
            if 0 <= index <= n:
                h[i - 1, j - 1] = a[index]
    return h


def routh_hurwitz(poly: CharPoly, tol: float = 1e-12) -> HurwitzReport:
    """Decide strict stability from coefficient signs and leading Hurwitz minors.

    The reported determinants are ``[D1, ..., D(n-1), an]``: the last minor
    factors as ``an·D(n-1)``, so for a cubic they are exactly ``(A1, A1A2-A3, A3)``.
    """

    n = poly.degree
    if n < 1:
        raise ValueError("Routh-Hurwitz needs a polynomial of degree >= 1")
    h = hurwitz_matrix(poly)
    determinants = [float(np.linalg.det(h[:k, :k])) for k in range(1, n)]
    determinants.append(float(poly.coefficients[0]))

    status: Literal["stable", "marginal", "unstable"] = "stable"
    failed_coefficient = None
    for power in range(n - 1, -1, -1):
        value = poly.coefficients[power]
        if value < -tol:
            failed_coefficient = power
            status = "unstable"
            break
        if value <= tol:
            status = "marginal"
    first_failure = None
    for index, value in enumerate(determinants, start=1):
        if value < -tol:
            first_failure = index
            status = "unstable"
            break
        if value <= tol and status == "stable":
            status = "marginal"
    return HurwitzReport(
        status=status,
        determinants=tuple(determinants),
        first_failure=first_failure,
        failed_coefficient=failed_coefficient,
    )
