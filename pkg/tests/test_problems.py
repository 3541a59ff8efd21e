import numpy as np
import pytest

from hbsge.exceptions import DimensionMismatch, InvalidKappa
from hbsge.numerics import SeededRng
from hbsge.problems import (
    Beale, QuadraticProblem, Rosenbrock, beale_value_grad, finite_diff_gradient, gradient_relative_error,
    make_quadratic, quadratic_value_grad, rosenbrock_value_grad,
)


def test_quadratic_spectrum_kappa50():
    p = make_quadratic(50, 10, seed=42)
    spacing = np.diff(p.eigenvalues)
    np.testing.assert_allclose(spacing, 49 / 9, rtol=1e-14)
    assert p.eigenvalues[0] == 1.0
    assert p.eigenvalues[-1] == pytest.approx(50.0, rel=1e-15)
    assert p.kappa == pytest.approx(50.0)
    assert (p.lipschitz_L, p.strong_mu) == (pytest.approx(50.0), 1.0)


def test_quadratic_eigenpairs_match_stored_basis():
    p = make_quadratic(50, 10, seed=42)
    for i, lam in enumerate(p.eigenvalues):
        qi = p.q[:, i]
        assert np.linalg.norm(p.a @ qi - lam * qi) <= 1e-8


def test_quadratic_is_exactly_symmetric():
    p = make_quadratic(100, 10, seed=3)
    assert np.array_equal(p.a, p.a.T)


def test_kappa_one_is_identity():
    p = make_quadratic(1, 10, seed=7)
    np.testing.assert_allclose(p.a, np.eye(10), atol=1e-14)
    np.testing.assert_allclose(p.optimum, p.b, atol=1e-13)


def test_gradient_vanishes_at_optimum():
    p = make_quadratic(50, 10, seed=42)
    assert np.linalg.norm(p.gradient(p.optimum)) <= 1e-8


def test_invalid_kappa():
    with pytest.raises(InvalidKappa):
        make_quadratic(0.5, 10, seed=0)


def test_make_quadratic_deterministic():
    a = make_quadratic(50, 10, seed=11)
    b = make_quadratic(50, 10, seed=11)
    assert np.array_equal(a.a, b.a) and np.array_equal(a.b, b.b)


def test_draw_order_q_then_b():
    rng = SeededRng(5)
    p = make_quadratic(10, 4, rng)
    assert rng.counter == 4 * 4 + 4


def test_quadratic_direct_evaluation():
    p = QuadraticProblem.diagonal([1.0, 2.0])
    f, g = quadratic_value_grad(p, np.array([1.0, 1.0]))
    assert f == 1.5
    np.testing.assert_array_equal(g, [1.0, 2.0])


def test_dimension_mismatch():
    p = QuadraticProblem.diagonal([1.0, 2.0])
    with pytest.raises(DimensionMismatch):
        p.value_grad(np.zeros(3))
    with pytest.raises(DimensionMismatch):
        rosenbrock_value_grad(np.zeros(3))
    with pytest.raises(DimensionMismatch):
        beale_value_grad(np.zeros(1))


class TestRosenbrock:
    def test_minimum(self):
        f, g = rosenbrock_value_grad(np.array([1.0, 1.0]))
        assert f == 0.0
        np.testing.assert_array_equal(g, [0.0, 0.0])

    def test_classic_start(self):
        # (1 - x)^2 = 4.84, 100 (y - x^2)^2 = 19.36
        f, g = rosenbrock_value_grad(np.array([-1.2, 1.0]))
        assert f == pytest.approx(24.2, abs=1e-12)
        np.testing.assert_allclose(g, [-215.6, -88.0], atol=1e-12)
        np.testing.assert_allclose(finite_diff_gradient(Rosenbrock(), np.array([-1.2, 1.0])), g, atol=1e-4)

    def test_origin(self):
        f, g = rosenbrock_value_grad(np.array([0.0, 0.0]))
        assert f == 1.0
        np.testing.assert_allclose(g, [-2.0, 0.0])

    def test_overflow_passes_through(self):
        with np.errstate(over="ignore", invalid="ignore"):
            f, g = rosenbrock_value_grad(np.array([1e200, -1e200]))
        assert not np.isfinite(f)


class TestBeale:
    def test_minimum(self):
        f, g = beale_value_grad(np.array([3.0, 0.5]))
        assert f == 0.0
        np.testing.assert_allclose(g, [0.0, 0.0], atol=1e-15)

    def test_at_ones(self):
        # residuals are exactly 1.5, 2.25, 2.625
        f, _ = beale_value_grad(np.array([1.0, 1.0]))
        assert f == 1.5**2 + 2.25**2 + 2.625**2 == 14.203125

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            x = rng.uniform(-2, 4, size=2)
            g = Beale().gradient(x)
            fd = finite_diff_gradient(Beale(), x)
            assert np.linalg.norm(g - fd) <= 1e-6 * max(1.0, np.linalg.norm(g))


class TestFiniteDifferences:
    def test_quadratic(self):
        p = make_quadratic(100, 10, seed=1)
        x = np.random.default_rng(0).uniform(-3, 3, 10)
        assert gradient_relative_error(p, x) <= 1e-6

    def test_constant_function(self):
        np.testing.assert_array_equal(finite_diff_gradient(lambda x: 3.0, np.array([1.0, -2.0, 5.0])), 0.0)

    def test_rejects_bad_step(self):
        with pytest.raises(ValueError):
            finite_diff_gradient(Rosenbrock(), np.zeros(2), h=0.0)

    @pytest.mark.parametrize("problem", [Rosenbrock(), Beale(), make_quadratic(50, 10, seed=42)],
                             ids=["rosenbrock", "beale", "quadratic"])
    def test_hundred_random_points(self, problem):
        rng = np.random.default_rng(17)
        errs = [gradient_relative_error(problem, rng.uniform(-3, 3, problem.dim)) for _ in range(100)]
        assert max(errs) <= 1e-5


def test_known_optima():
    for p in (Rosenbrock(), Beale(), make_quadratic(10, 10, seed=0)):
        assert np.linalg.norm(p.gradient(p.optimum)) <= 1e-8
