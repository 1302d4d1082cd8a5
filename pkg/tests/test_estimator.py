import numpy as np
import pytest

from fwdgrad import (DirectionSampler, ScalarFunction, forward_gradient,
                     gradient_exact, moment_diagnostics)
from fwdgrad.dual import Dual, half_sqnorm


class LinearFn(ScalarFunction):
    """f(x) = <g, x>: constant gradient, cheap to evaluate in bulk tests."""

    def __init__(self, g):
        super().__init__(None, len(g))
        self.g = np.asarray(g, dtype=float)

    def __call__(self, xs):
        vals = np.array([d.value for d in xs])
        tans = np.array([d.tangent for d in xs])
        return Dual(float(self.g @ vals), float(self.g @ tans))

    def value(self, x):
        return float(self.g @ np.asarray(x, dtype=float))

    def gradient(self, x):
        return self.g.copy()


def test_estimate_is_exact_product():
    f = ScalarFunction(half_sqnorm, 4)
    rng = np.random.default_rng(1)
    for _ in range(10):
        x, u = rng.standard_normal(4), rng.standard_normal(4)
        s = forward_gradient(f, x, u)
        assert np.array_equal(s.estimate, s.dirderiv * s.direction)


def test_identity_direction_on_quadratic():
    f = ScalarFunction(half_sqnorm, 3)
    e1 = np.array([1.0, 0.0, 0.0])
    s = forward_gradient(f, e1, e1)
    assert s.dirderiv == 1.0
    assert np.array_equal(s.estimate, e1)
    assert s.value == 0.5


def test_constant_function_gives_zero_estimate():
    f = ScalarFunction(lambda xs: 4.2, 3)
    s = forward_gradient(f, np.ones(3), np.array([0.3, -1.0, 2.0]))
    assert np.array_equal(s.estimate, np.zeros(3))


def test_orthogonal_direction_annihilates():
    f = ScalarFunction(lambda xs: xs[0] * xs[0] + 2.0 * xs[1], 2)
    s = forward_gradient(f, [1.0, 1.0], [1.0, -1.0])  # grad = (2, 2)
    assert s.dirderiv == 0.0
    assert np.array_equal(s.estimate, np.zeros(2))


def test_unbiasedness_error_shrinks_like_sqrt_n():
    g = np.array([3.0, -1.0, 0.5, 2.0, -0.7, 1.1, 0.0, -2.3, 0.9, 1.6])
    f = LinearFn(g)
    x = np.zeros(10)
    errs = []
    for n in (1_000, 10_000, 100_000):
        mean_est, _ = moment_diagnostics(f, x, n, DirectionSampler(10, seed=314))
        errs.append(np.linalg.norm(mean_est - g) / np.linalg.norm(g))
    assert errs[0] > errs[1] > errs[2]
    assert errs[0] / errs[2] > 3.0  # ~10 expected from the 1/sqrt(N) law


def test_moments_on_fixed_gradient():
    m = 60
    rng = np.random.default_rng(5)
    g = rng.standard_normal(m)
    f = LinearFn(g)
    mean_est, second = moment_diagnostics(f, np.zeros(m), 200_000,
                                          DirectionSampler(m, seed=42))
    gnorm2 = float(g @ g)
    assert np.linalg.norm(mean_est - g) / np.sqrt(gnorm2) <= 0.02
    ratio = second / gnorm2
    assert m + 1.5 <= ratio <= m + 2.5        # Gaussian exact value is m + 2
    assert ratio <= (m + 4) * 1.05            # proven bound, with 5% slack


def test_zero_gradient_point_is_exact_zero():
    f = ScalarFunction(half_sqnorm, 3)
    mean_est, second = moment_diagnostics(f, np.zeros(3), 50,
                                          DirectionSampler(3, seed=8))
    assert np.array_equal(mean_est, np.zeros(3))
    assert second == 0.0


def test_gradient_exact_agrees_with_mean_direction_split():
    # estimator consistency against the basis-vector oracle
    f = ScalarFunction(lambda xs: xs[0] * xs[1] + xs[2] ** 2, 3)
    x = np.array([0.4, -1.2, 0.8])
    g = gradient_exact(f, x)
    assert np.allclose(g, [-1.2, 0.4, 1.6], atol=1e-12)


def test_moment_diagnostics_validates_sample_count():
    f = ScalarFunction(half_sqnorm, 2)
    with pytest.raises(ValueError):
        moment_diagnostics(f, np.zeros(2), 0, DirectionSampler(2, seed=1))
