import numpy as np
import pytest

from slowfast.core import dual
from slowfast.core.errors import JacobianError, MultiplicityMismatch
from slowfast.core.linalg import CharPoly, char_poly, deflate_zero_roots, numeric_rank, routh_hurwitz
from slowfast.systems.maltose import maltose_minor, printed_hurwitz
from slowfast.systems.registry import REGISTRY, get_example


def test_jacobian_of_product_and_sqrt():
    jac = dual.jacobian(lambda x: [x[0] * x[1], dual.sqrt(x[0])], [4.0, 3.0])
    assert jac == pytest.approx(np.array([[3.0, 4.0], [0.25, 0.0]]))


def test_numpy_scalars_stay_dual():
    jac = dual.jacobian(lambda x: [np.float64(2.0) * x[0] - x[1] / 2.0], [1.0, 1.0])
    assert jac == pytest.approx(np.array([[2.0, -0.5]]))


def test_directional_derivative_matches_jacobian():
    f = lambda x: [dual.exp(x[0]) * x[1], dual.log(x[1])]  # noqa: E731
    x, v = np.array([0.3, 2.0]), np.array([1.0, -0.5])
    assert dual.directional_derivative(f, x, v) == pytest.approx(dual.jacobian(f, x) @ v)


def test_jacobian_failure_names_seed():
    def broken(x):
        raise ZeroDivisionError("boom")

    with pytest.raises(JacobianError) as excinfo:
        dual.jacobian(broken, [1.0])
    assert excinfo.value.seed == 0


def test_char_poly_of_diagonal():
    poly = char_poly(np.diag([1.0, 2.0]))
    assert poly.coefficients == pytest.approx((2.0, -3.0, 1.0))
    assert sorted(poly.roots().real) == pytest.approx([1.0, 2.0])


def test_char_poly_vanishes_at_eigenvalues():
    rng = np.random.default_rng(12)
    for _ in range(100):
        matrix = rng.normal(size=(4, 4))
        poly = char_poly(matrix)
        for lam in np.linalg.eigvals(matrix):
            assert abs(poly(lam)) <= 1e-8 * max(1.0, abs(lam)) ** 4


def test_deflation_removes_exact_zero_roots():
    poly = char_poly(np.diag([0.0, -1.0, -2.0]))
    deflated = deflate_zero_roots(poly, 1, 1e-12)
    assert deflated.degree == 2
    assert deflated.coefficients == pytest.approx((2.0, 3.0, 1.0))


def test_deflation_rejects_jordan_block():
    poly = char_poly(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(MultiplicityMismatch) as excinfo:
        deflate_zero_roots(poly, 1, 1e-12)
    assert excinfo.value.index == 1


def test_routh_hurwitz_stable_cubic():
    report = routh_hurwitz(char_poly(-np.eye(3)))
    assert report.stable
    assert report.determinants == pytest.approx((3.0, 8.0, 1.0))
    assert report.margin == pytest.approx(1.0)


def test_routh_hurwitz_flags_unstable_and_marginal():
    assert routh_hurwitz(char_poly(np.array([[1.0, 0.0], [0.0, -2.0]]))).status == "unstable"
    rotation = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert routh_hurwitz(char_poly(rotation)).status == "marginal"


def random_real_polynomial(rng, degree):
    pairs = int(rng.integers(0, degree // 2 + 1))
    roots = [complex(r) for r in rng.uniform(-2.0, 2.0, degree - 2 * pairs)]
    for _ in range(pairs):
        z = complex(rng.uniform(-2.0, 2.0), rng.uniform(0.1, 2.0))
        roots += [z, z.conjugate()]
    return CharPoly(tuple(float(c) for c in np.real(np.poly(roots))[::-1]))


def test_routh_hurwitz_agrees_with_root_finder():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(500):
        poly = random_real_polynomial(rng, int(rng.integers(1, 7)))
        real_parts = np.roots(poly.coefficients[::-1]).real
        if np.min(np.abs(real_parts)) <= 1e-3:
            continue
        assert routh_hurwitz(poly).stable == bool(np.all(real_parts < 0))
        checked += 1
    assert checked > 400


def test_numeric_rank():
    assert numeric_rank(np.array([[1.0, 2.0], [2.0, 4.0]])) == 1
    assert numeric_rank(np.zeros((3, 3))) == 0
    with pytest.raises(ValueError):
        numeric_rank(np.eye(2), tol=0.0)


def test_maltose_block_at_origin():
    assert printed_hurwitz(0.0, 0.0, 0.0, 0.0) == (3.0, 8.0, 1.0)
    a1, a2, a3 = char_poly(maltose_minor(0.0, 0.0, 0.0, 0.0)).hurwitz_coefficients()
    assert (a1, a1 * a2 - a3, a3) == pytest.approx((3.0, 8.0, 1.0))


def central_differences(f, x, step=1e-6):
    x = np.asarray(x, dtype=float)
    columns = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        columns.append((np.asarray(f(x + e), dtype=float) - np.asarray(f(x - e), dtype=float)) / (2 * step))
    return np.array(columns).T


@pytest.mark.parametrize("name", REGISTRY.names())
def test_dual_jacobians_match_finite_differences(name):
    example = get_example(name)
    for x in example.region.sample_interior(5, np.random.default_rng(3)):
        for f in (example.system.h0, example.system.h1):
            exact = dual.jacobian(f, x)
            approx = central_differences(f, x)
            scale = max(1.0, float(np.max(np.abs(exact))))
            assert np.max(np.abs(exact - approx)) <= 1e-6 * scale


@pytest.mark.parametrize("name", ["mm_reversible_small_e0", "mm_irrev_slow_k2"])
def test_dual_jacobian_matches_shipped_analytic_one(name):
    system = get_example(name).system
    for x in np.random.default_rng(4).uniform(0.0, 0.5, size=(6, 2)):
        assert system.jacobian_h0(x) == pytest.approx(system.analytic_dh0(x), abs=1e-12)
