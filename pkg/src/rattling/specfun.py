r"""Similarity profiles of the discrete Green function.

The large-time behaviour of the lattice Green function is described by three
functions on :math:`[0, \infty)`

.. math::

    h(x) = \frac{e^{-x^2/4}}{2\sqrt{\pi}}, \qquad
    f(x) = 2x \int_x^\infty \frac{h(y)}{y^2}\,dy, \qquad g = f'.

Integrating the definition of ``f`` by parts gives ``f = 2h + x g`` and
``g(x) = -erfc(x/2)/2``; those closed forms are the fast path used here.  The
defining integral is kept in :func:`f_defining_integral` so the closed forms
can be checked against it.

The scaled profiles ``F(a, x)``, ``G(a, x)`` and ``H_integrand(a, x)`` on
``[-1, 1]`` compose ``f``, ``g``, ``h`` with the map

.. math::

    y(a, x) = \frac{1}{\sqrt{a}} \sqrt{\frac{1 - x}{1 + x}},

which sends ``x = 1`` to ``y = 0`` and ``x = -1`` to ``y = +inf``.

All functions accept scalars or numpy arrays and return the same kind.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, erfcx

from .errors import DomainError

__all__ = [
    "SpecFunConfig",
    "DEFAULT_CONFIG",
    "h",
    "g",
    "f",
    "F",
    "G",
    "H_integrand",
    "similarity_variable",
    "f_defining_integral",
]

_INV_2SQRTPI = 0.5 / math.sqrt(math.pi)
_INV_SQRTPI = 1.0 / math.sqrt(math.pi)


@dataclass(frozen=True)
class SpecFunConfig:
    """Numerical settings of the profile functions.

    Attributes
    ----------
    quad_rel_tol : float
        Relative tolerance of the quadrature behind
        :func:`f_defining_integral`.  Must lie in ``(0, 1e-6]``.
    tail_cutoff : float
        Arguments at or beyond this value evaluate to exactly 0.  Must be at
        least 20; the default 40 is far past the double underflow of
        ``exp(-x**2/4)``.
    """

    quad_rel_tol: float = 1e-12
    tail_cutoff: float = 40.0

    def __post_init__(self):
        if not 0.0 < self.quad_rel_tol <= 1e-6:
            raise DomainError(f"quad_rel_tol must be in (0, 1e-6], got {self.quad_rel_tol}")
        if not self.tail_cutoff >= 20.0:
            raise DomainError(f"tail_cutoff must be >= 20, got {self.tail_cutoff}")


DEFAULT_CONFIG = SpecFunConfig()


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _finish(out, scalar):
    return float(out) if scalar else out


def _check_nonneg(x):
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("argument must be a nonnegative real")


def h(x, config: SpecFunConfig = DEFAULT_CONFIG):
    """Gaussian profile ``exp(-x**2/4) / (2 sqrt(pi))`` on ``x >= 0``."""
    x, scalar = _as_array(x)
    _check_nonneg(x)
    out = np.where(x < config.tail_cutoff, _INV_2SQRTPI * np.exp(-0.25 * x * x), 0.0)
    return _finish(out, scalar)


def g(x, config: SpecFunConfig = DEFAULT_CONFIG):
    """Derivative of :func:`f`, equal to ``-erfc(x/2)/2``.

    Increases from ``g(0) = -1/2`` to 0 with ``g' = h``.
    """
    x, scalar = _as_array(x)
    _check_nonneg(x)
    out = np.where(x < config.tail_cutoff, -0.5 * erfc(0.5 * x), 0.0)
    return _finish(out, scalar)


def f(x, config: SpecFunConfig = DEFAULT_CONFIG):
    """Profile of the Green function itself, ``f = 2h + x g``.

    ``f(0) = 1/sqrt(pi)``.  The combination is evaluated through the scaled
    complementary error function so that no intermediate underflows.
    """
    x, scalar = _as_array(x)
    _check_nonneg(x)
    inside = x < config.tail_cutoff
    xs = np.where(inside, x, 0.0)
    out = np.exp(-0.25 * xs * xs) * (_INV_SQRTPI - 0.5 * xs * erfcx(0.5 * xs))
    out = np.where(inside, out, 0.0)
    return _finish(out, scalar)


def _check_a(a):
    if not (np.isfinite(a) and a > 0):
        raise DomainError(f"a must be a positive real, got {a}")


def similarity_variable(a, x):
    """Map ``x in [-1, 1]`` to ``y = sqrt((1-x)/(1+x)) / sqrt(a)``.

    Returns ``inf`` at ``x = -1``.
    """
    _check_a(a)
    x, scalar = _as_array(x)
    if np.any(np.isnan(x)) or np.any(np.abs(x) > 1):
        raise DomainError("x must lie in [-1, 1]")
    with np.errstate(divide="ignore"):
        y = np.sqrt((1.0 - x) / (1.0 + x)) / math.sqrt(a)
    return _finish(y, scalar)


def F(a, x, config: SpecFunConfig = DEFAULT_CONFIG):
    """``sqrt(a) sqrt(1-x**2) f(y(a, x))``, extended by 0 at ``x = -1``."""
    y = np.asarray(similarity_variable(a, x))
    x, scalar = _as_array(x)
    out = math.sqrt(a) * np.sqrt(1.0 - x * x) * f(np.where(np.isinf(y), config.tail_cutoff, y), config)
    return _finish(out, scalar)


def G(a, x, config: SpecFunConfig = DEFAULT_CONFIG):
    """``g(y(a, x))``; equals ``-1/2`` at ``x = 1`` and 0 at ``x = -1``."""
    y = np.asarray(similarity_variable(a, x))
    x, scalar = _as_array(x)
    out = g(np.where(np.isinf(y), config.tail_cutoff, y), config)
    return _finish(out, scalar)


def H_integrand(a, x, config: SpecFunConfig = DEFAULT_CONFIG):
    """``h(y(a, x)) / (sqrt(a) sqrt(1-x**2))`` on the open interval ``(-1, 1)``.

    The endpoint ``x = 1`` is an inverse square root singularity, so neither
    endpoint is accepted.
    """
    _check_a(a)
    xa, scalar = _as_array(x)
    if np.any(np.isnan(xa)) or np.any(np.abs(xa) >= 1):
        raise DomainError("x must lie in the open interval (-1, 1)")
    y = similarity_variable(a, xa)
    out = h(y, config) / (math.sqrt(a) * np.sqrt(1.0 - xa * xa))
    return _finish(out, scalar)


def f_defining_integral(x: float, config: SpecFunConfig = DEFAULT_CONFIG) -> float:
    """Evaluate ``f(x) = 2x int_x^inf h(y)/y**2 dy`` by adaptive quadrature.

    This is the slow reference route; the integral is truncated at
    ``config.tail_cutoff`` where the remaining tail is below ``1e-170``.
    """
    from .quadrature import integrate

    x = float(x)
    if x < 0 or math.isnan(x):
        raise DomainError("argument must be a nonnegative real")
    if x == 0.0:
        return 2.0 * h(0.0, config)
    if x >= config.tail_cutoff:
        return 0.0
    upper = config.tail_cutoff
    breaks = [x] + [b for b in (2 * x, 4 * x, x + 2, x + 4, x + 8) if x < b < upper] + [upper]
    breaks = sorted(set(breaks))
    res = integrate(
        lambda y: h(y, config) / (y * y),
        breaks,
        abs_tol=0.0,
        rel_tol=config.quad_rel_tol,
    )
    return 2.0 * x * res.value
