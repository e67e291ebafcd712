r"""Discrete Green function of the one-dimensional lattice heat equation.

.. math::

    \Gamma_n(t) = \frac{1}{\pi} \int_0^\pi
        \frac{1 - e^{-2t(1-\cos\theta)}}{2(1-\cos\theta)} \cos(n\theta)\,d\theta,
    \qquad t \ge 0,

and ``Gamma_n(t) = 0`` for ``t < 0``.  It solves ``d/dt Gamma_n = Delta Gamma_n
+ [n == 0]`` with zero initial data, and its time derivative is the discrete
heat kernel ``exp(-2t) I_n(2t)``.

The integrand is an entire, even, :math:`2\pi`-periodic function of
:math:`\theta`, so the trapezoid rule on ``[0, pi]`` converges spectrally.  Its
cosine coefficients are ``Gamma_j(t)`` itself, which are negligible once
``j > 13 sqrt(t)``; the trapezoid rule with ``M`` panels aliases coefficient
``n`` with ``2M - n``, so the starting panel count is chosen with
``2M >= n + 13 sqrt(t) + 16`` and then doubled until two successive values
agree to ``rel_tol`` times ``Gamma_0(t)`` (the largest coefficient).

Thread safety: evaluation is pure.  The cache is a plain dict; reads are
lock-free and inserts are serialised by a lock, so one evaluator may be
shared between threads.
"""
from __future__ import annotations

import math
import threading

import numpy as np

from .errors import AccuracyError, DomainError

__all__ = ["GreenEvaluator", "relaxation_factor", "alias_safe_panels"]


def relaxation_factor(z):
    """``(1 - exp(-z)) / z`` for ``z >= 0`` with the limit 1 at ``z = 0``."""
    z = np.asarray(z, dtype=float)
    small = z < 1e-8
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 - 0.5 * z, -np.expm1(-safe) / safe)


def _symbol(theta):
    """``2 (1 - cos theta)`` computed without cancellation near 0."""
    s = np.sin(0.5 * theta)
    return 4.0 * s * s


def _gamma_kernel(theta, t):
    lam = _symbol(theta)
    return t * relaxation_factor(lam * t)


def _gamma_dot_kernel(theta, t):
    return np.exp(-_symbol(theta) * t)


def alias_safe_panels(n_max: int, t: float, minimum: int = 64) -> int:
    """Smallest power of two ``M >= minimum`` with ``2M >= n_max + 13 sqrt(t) + 16``."""
    need = 0.5 * (abs(n_max) + 13.0 * math.sqrt(max(t, 0.0)) + 16.0)
    m = max(int(minimum), 1)
    m = 1 << (m - 1).bit_length()
    while m < need:
        m *= 2
    return m


class GreenEvaluator:
    """Cached, accuracy-controlled evaluator of ``Gamma_n(t)`` and derivatives.

    Parameters
    ----------
    quad_points : int
        Minimum initial number of trapezoid panels on ``[0, pi]``.
    rel_tol : float
        Convergence threshold relative to ``Gamma_0(t)`` (resp. the kernel at
        ``n = 0`` for time derivatives).
    max_points : int
        Largest panel count tried before :class:`AccuracyError` is raised.
    time_quantum : float
        Cache keys use ``round(t / time_quantum)``.  A cached value may thus be
        returned for a time that differs by less than ``time_quantum``; since
        ``0 <= d/dt Gamma_n <= 1`` the induced error is below ``time_quantum``.
    cache_size : int
        Entries kept before the cache is cleared wholesale.
    """

    def __init__(
        self,
        quad_points: int = 64,
        rel_tol: float = 1e-12,
        max_points: int = 2**20,
        time_quantum: float = 1e-13,
        cache_size: int = 1_000_000,
    ):
        if quad_points < 2 or max_points < quad_points:
            raise DomainError("need 2 <= quad_points <= max_points")
        if not 0 < rel_tol < 1:
            raise DomainError("rel_tol must be in (0, 1)")
        if not time_quantum > 0:
            raise DomainError("time_quantum must be positive")
        self.quad_points = int(quad_points)
        self.rel_tol = float(rel_tol)
        self.max_points = int(max_points)
        self.time_quantum = float(time_quantum)
        self.cache_size = int(cache_size)
        self._cache: dict = {}
        self._lock = threading.Lock()

    # -- core quadrature -------------------------------------------------
    def _trapezoid(self, kernel, n: int, t: float) -> float:
        m = alias_safe_panels(n, t, self.quad_points)
        if m > self.max_points:
            raise AccuracyError(f"Gamma_{n}({t}) needs more than {self.max_points} panels")
        theta = np.linspace(0.0, math.pi, m + 1)
        k = kernel(theta, t)
        c = np.cos(n * theta)
        w = k * c
        s_val = 0.5 * (w[0] + w[-1]) + w[1:-1].sum()
        s_ref = 0.5 * (k[0] + k[-1]) + k[1:-1].sum()
        val = s_val / m
        while True:
            if 2 * m > self.max_points:
                raise AccuracyError(
                    f"Gamma_{n}({t}): panel doubling did not converge within {self.max_points} panels"
                )
            mid = (np.arange(m) + 0.5) * (math.pi / m)
            k = kernel(mid, t)
            s_val += np.dot(k, np.cos(n * mid))
            s_ref += k.sum()
            m *= 2
            new = s_val / m
            scale = max(abs(new), s_ref / m)
            if abs(new - val) <= self.rel_tol * scale:
                return float(new)
            val = new

    def _cached(self, kind: str, kernel, n: int, t: float) -> float:
        n = abs(int(n))
        key = (kind, n, round(t / self.time_quantum))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        val = self._trapezoid(kernel, n, t)
        with self._lock:
            if len(self._cache) >= self.cache_size:
                self._cache.clear()
            self._cache[key] = val
        return val

    # -- public API --------------------------------------------------------
    def gamma(self, n: int, t: float) -> float:
        """``Gamma_n(t)``; exactly 0 for ``t <= 0``, even in ``n``."""
        t = float(t)
        if math.isnan(t):
            raise DomainError("t is NaN")
        if t <= 0.0:
            return 0.0
        # integral of a positive kernel; clip rounding below zero
        return max(0.0, self._cached("g", _gamma_kernel, n, t))

    def gamma_dot(self, n: int, t: float) -> float:
        """Time derivative ``exp(-2t) I_n(2t)`` (requires ``t >= 0``)."""
        t = float(t)
        if not t >= 0.0:
            raise DomainError(f"gamma_dot needs t >= 0, got {t}")
        if t == 0.0:
            return 1.0 if n == 0 else 0.0
        return self._cached("d", _gamma_dot_kernel, n, t)

    def grad_gamma(self, n: int, t: float) -> float:
        """Forward difference ``Gamma_{n+1}(t) - Gamma_n(t)``."""
        return self.gamma(n + 1, t) - self.gamma(n, t)

    def grad_gamma_dot(self, n: int, t: float) -> float:
        """Forward difference of :meth:`gamma_dot` in ``n``."""
        return self.gamma_dot(n + 1, t) - self.gamma_dot(n, t)

    def laplacian_gamma(self, n: int, t: float) -> float:
        """Second difference ``Gamma_{n-1} - 2 Gamma_n + Gamma_{n+1}``."""
        return self.gamma(n - 1, t) - 2.0 * self.gamma(n, t) + self.gamma(n + 1, t)

    def clear_cache(self) -> None:
        with self._lock:
            self._cache.clear()

    @property
    def cache_len(self) -> int:
        return len(self._cache)
