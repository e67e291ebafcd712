import math

import numpy as np
import pytest
from scipy.special import ive

from oracles import gamma_by_time_integral, heat_kernel, scaled_bessel_i
from rattling import specfun
from rattling.errors import AccuracyError, DomainError
from rattling.green import GreenEvaluator, alias_safe_panels, relaxation_factor


@pytest.fixture(scope="module")
def gr():
    return GreenEvaluator()


def test_oracle_against_scipy():
    for n, x in [(0, 0.1), (2, 2.0), (5, 40.0), (30, 200.0)]:
        assert scaled_bessel_i(n, x) == pytest.approx(ive(n, x), rel=1e-13)


def test_zero_time(gr):
    for n in (-3, 0, 4):
        assert gr.gamma(n, 0.0) == 0.0
        assert gr.gamma(n, -1.0) == 0.0
    assert gr.gamma_dot(0, 0.0) == 1.0
    assert gr.gamma_dot(3, 0.0) == 0.0


def test_symmetry(gr):
    assert gr.gamma(-3, 1.7) == gr.gamma(3, 1.7)
    for n in range(6):
        for t in (0.3, 5.0, 80.0):
            assert gr.grad_gamma(-(n + 1), t) == -gr.grad_gamma(n, t)


def test_time_integral_oracle(gr):
    assert abs(gr.gamma(0, 2.0) - gamma_by_time_integral(0, 2.0)) <= 1e-10
    for n in (0, 1, 4, 9):
        for t in (0.3, 3.0, 25.0):
            assert abs(gr.gamma(n, t) - gamma_by_time_integral(n, t)) <= 1e-10


def test_gamma_dot_bessel(gr):
    assert gr.gamma_dot(2, 1.0) == pytest.approx(math.exp(-2) * scaled_bessel_i(2, 2.0) * math.exp(2), rel=1e-12)
    assert gr.grad_gamma_dot(0, 1.0) == pytest.approx(heat_kernel(1, 1.0) - heat_kernel(0, 1.0), abs=1e-14)
    fd = gr.gamma_dot(4, 0.5) - gr.gamma_dot(3, 0.5)
    assert gr.grad_gamma_dot(3, 0.5) == fd


@pytest.mark.parametrize("t", [0.5, 1.0, 5.0])
def test_source_equation(gr, t):
    assert gr.gamma_dot(0, t) - gr.laplacian_gamma(0, t) == pytest.approx(1.0, abs=1e-12)
    for n in (1, 2, 5):
        assert abs(gr.gamma_dot(n, t) - gr.laplacian_gamma(n, t)) <= 1e-12


def test_ode_residual_grid(gr):
    for t in (0.25, 1.0, 4.0, 16.0):
        for n in range(9):
            assert abs(gr.gamma_dot(n, t) - gr.laplacian_gamma(n, t) - (n == 0)) <= 1e-9


def test_bounds_and_monotonicity(gr):
    for t in (0.5, 10.0, 300.0):
        g0 = gr.gamma(0, t)
        for n in range(1, 30):
            v = gr.gamma(n, t)
            assert 0.0 <= v <= g0
    ts = np.linspace(0.0, 20.0, 60)
    for n in (0, 3):
        vals = [gr.gamma(n, t) for t in ts]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_large_time_gradient(gr):
    assert abs(gr.grad_gamma(0, 100.0) - specfun.g(0.0)) <= 0.05
    assert gr.grad_gamma(0, 0.0) == 0.0


def test_grad_gamma_dot_decay(gr):
    for n in (0, 1, 5):
        scaled = [t * abs(gr.grad_gamma_dot(n, t)) for t in np.geomspace(1, 1e4, 9)]
        assert max(scaled) < 0.25


def test_accuracy_error_when_panels_exhausted():
    small = GreenEvaluator(quad_points=4, max_points=8)
    with pytest.raises(AccuracyError):
        small.gamma(0, 50.0)


def test_validation_and_cache():
    with pytest.raises(DomainError):
        GreenEvaluator(rel_tol=0.0)
    gr = GreenEvaluator(cache_size=3)
    with pytest.raises(DomainError):
        gr.gamma_dot(0, -1.0)
    for n in range(5):
        gr.gamma(n, 1.0)
    assert gr.cache_len <= 3
    gr.clear_cache()
    assert gr.cache_len == 0


def test_helpers():
    assert relaxation_factor(0.0) == 1.0
    assert relaxation_factor(1e-10) == pytest.approx(1.0 - 5e-11, rel=1e-15)
    assert relaxation_factor(2.0) == pytest.approx((1 - math.exp(-2)) / 2, rel=1e-15)
    m = alias_safe_panels(10, 100.0)
    assert m & (m - 1) == 0 and 2 * m >= 10 + 130 + 16
