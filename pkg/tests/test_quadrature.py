import math

import numpy as np
import pytest
from scipy.integrate import quad

from rattling.errors import AccuracyError
from rattling.quadrature import gaussian_tail_bound, integrate


def test_polynomial_exact():
    res = integrate(lambda x: x**22, (0.0, 1.0))
    assert res.value == pytest.approx(1 / 23, rel=1e-14)


def test_exponential_and_breakpoints():
    res = integrate(np.exp, (0.0, 0.5, 1.0, 2.0))
    assert res.value == pytest.approx(math.exp(2) - 1, rel=1e-15)


def test_endpoint_singularity():
    res = integrate(lambda x: 1 / np.sqrt(x), (0.0, 1.0), max_intervals=20000, rel_tol=1e-10)
    assert res.value == pytest.approx(2.0, rel=1e-9)


def test_matches_quadpack():
    fun = lambda x: np.cos(7 * x) * np.exp(-x)
    ref, _ = quad(lambda x: math.cos(7 * x) * math.exp(-x), 0, 5, epsabs=1e-14)
    assert integrate(fun, (0.0, 5.0)).value == pytest.approx(ref, abs=1e-13)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_nonconvergence_raises():
    with pytest.raises(AccuracyError):
        integrate(lambda x: np.sin(1 / np.maximum(x, 1e-300)), (0.0, 1.0), max_intervals=50)
    with pytest.raises(AccuracyError):
        integrate(lambda x: 1 / (x - 0.5), (0.0, 1.0))


def test_bad_interval():
    with pytest.raises(ValueError):
        integrate(np.exp, (1.0, 0.0))


def test_tail_bound():
    assert gaussian_tail_bound(0.0) == pytest.approx(0.5)
    assert gaussian_tail_bound(40.0) < 1e-170
