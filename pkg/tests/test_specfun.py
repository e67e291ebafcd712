import math

import numpy as np
import pytest

from oracles import f_by_quad
from rattling import specfun
from rattling.errors import DomainError
from rattling.specfun import F, G, H_integrand, SpecFunConfig, f, g, h


def test_h_values():
    assert h(0.0) == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-15)
    assert h(2.0) == pytest.approx(math.exp(-1) / (2 * math.sqrt(math.pi)), rel=1e-15)
    assert h(40.0) == 0.0


def test_g_values():
    assert g(0.0) == -0.5
    assert g(40.0) == 0.0
    d = 1e-5
    fd = (f_by_quad(1 + d) - f_by_quad(1 - d)) / (2 * d)
    assert abs(g(1.0) - fd) <= 1e-8
    assert g(1.0) == pytest.approx(-0.5 * math.erfc(0.5), rel=1e-14)


def test_f_values():
    assert f(0.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)
    assert abs(f_by_quad(1e-8) - f(0.0)) <= 1e-8
    assert f(40.0) == 0.0
    assert f(1.0) == pytest.approx(f_by_quad(1.0), rel=1e-10)


@pytest.mark.parametrize("x", [0.0, 0.25, 0.5, 1.0, 2.0, 4.0])
def test_profile_identity(x):
    assert abs(2 * h(x) + x * g(x) - f(x)) <= 1e-12


@pytest.mark.parametrize("x", [0.3, 0.5, 1.0, 3.0, 7.0])
def test_f_matches_defining_integral(x):
    assert specfun.f_defining_integral(x) == pytest.approx(f_by_quad(x), rel=1e-12, abs=1e-300)


def test_finite_differences():
    grid = np.linspace(0.1, 5.0, 50)
    d = 1e-5
    assert np.max(np.abs((f(grid + d) - f(grid - d)) / (2 * d) - g(grid))) <= 1e-6
    assert np.max(np.abs((g(grid + d) - g(grid - d)) / (2 * d) - h(grid))) <= 1e-6


def test_tail_and_monotonicity():
    cut = specfun.DEFAULT_CONFIG.tail_cutoff
    for fun in (f, g, h):
        assert abs(fun(cut)) <= 1e-15
    xs = np.linspace(0, 10, 400)
    assert np.all(np.diff(h(xs)) < 0)
    assert np.all(np.diff(g(xs)) > 0)
    assert np.all(g(xs) < 0) and np.all(g(xs) >= -0.5)


def test_negative_argument_rejected():
    for fun in (f, g, h):
        with pytest.raises(DomainError):
            fun(-0.1)


def test_config_validation():
    with pytest.raises(DomainError):
        SpecFunConfig(quad_rel_tol=1e-3)
    with pytest.raises(DomainError):
        SpecFunConfig(tail_cutoff=10.0)


def test_F_examples():
    for a in (0.2, 1.0, 7.0):
        assert F(a, -1.0) == 0.0
    assert F(1.0, 1.0) == 0.0
    assert F(1.0, 0.0) == pytest.approx(f(1.0), rel=1e-15)


def test_G_examples():
    for a in (0.2, 1.0, 7.0):
        assert G(a, 1.0) == -0.5
        assert G(a, -1.0) == 0.0
    assert G(1.0, 0.0) == pytest.approx(g(1.0), rel=1e-15)


def test_H_examples():
    assert H_integrand(1.0, 0.0) == pytest.approx(h(1.0), rel=1e-15)
    assert H_integrand(4.0, 0.0) == pytest.approx(0.5 * h(0.5), rel=1e-15)
    assert abs(H_integrand(1.0, -1 + 1e-12)) <= 1e-12
    for x in (-1.0, 1.0, 1.5):
        with pytest.raises(DomainError):
            H_integrand(1.0, x)


def test_scaled_profiles_domain():
    with pytest.raises(DomainError):
        F(0.0, 0.0)
    with pytest.raises(DomainError):
        G(1.0, 1.5)


def test_scaled_profiles_endpoint_limits():
    for a in (0.2, 1.0, 5.0):
        assert abs(F(a, 1 - 1e-12)) < 1e-5
        assert abs(F(a, -1 + 1e-12)) < 1e-5
        assert abs(G(a, 1 - 1e-12) + 0.5) < 1e-5
        assert abs(G(a, -1 + 1e-12)) < 1e-5


def test_vectorised_matches_scalar():
    xs = np.array([0.0, 0.7, 3.0])
    assert np.array_equal(f(xs), np.array([f(float(x)) for x in xs]))
    assert isinstance(h(1.0), float)
