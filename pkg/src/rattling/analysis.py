r"""Propagation constant and comparison of simulations with the asymptotic theory.

Integrals over ``[-1, 1]`` of the scaled profiles,

.. math::

    I_F(a) = \int_{-1}^1 F(a,x)\,dx,\quad
    I_G(a) = \int_{-1}^1 G(a,x)\,dx,\quad
    I_H(a) = \int_{-1}^1 H(a,x)\,dx,

become, after the substitution ``x = (1 - a y^2)/(1 + a y^2)``,

.. math::

    I_F = \int_0^\infty \frac{2a+1}{1+ay^2} h\,dy - \tfrac12,\quad
    I_G = \int_0^\infty \frac{1-ay^2}{1+ay^2} h\,dy - \tfrac12,\quad
    I_H = \int_0^\infty \frac{2h}{1+ay^2}\,dy.

``I_F`` and ``I_G`` are computed both ways and the two must agree;
``I_H`` is singular at ``x = 1`` and is evaluated in the ``y`` form, with the
raw ``x`` form available as a slow check.

With ``lambda = h1/c`` (and ``c = 1``) the constant ``a*`` is the common root
of

* ``-2 - lambda I_G(a) = 0``,
* ``-1 + (lambda - 2) a - lambda I_F(a) = 0``,
* ``(lambda - 2) - lambda I_H(a) = 0``.

Semi-infinite integrals are truncated at ``y = 40`` where the discarded tail
is below ``scale * erfc(20) / 2 ~ 1e-176`` (see
:func:`rattling.quadrature.gaussian_tail_bound`).
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import specfun
from .errors import AccuracyError, DomainError
from .events import EventLog
from .patterns import count_p, pattern_from_log
from .quadrature import integrate

__all__ = [
    "AsymptoticConstants",
    "RattlingReport",
    "integral_I_F",
    "integral_I_G",
    "integral_I_H",
    "integral_I_F_semi_infinite",
    "integral_I_G_semi_infinite",
    "integral_I_H_raw",
    "identity_main3",
    "solve_a_star",
    "fit_rattling",
    "astar_table_csv",
    "profiles_csv",
]

CUTOFF = 40.0
QUAD_TOL = 1e-12
CROSS_TOL = 1e-9
ROOT_TOL = 1e-10
_Y_BREAKS = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0)


def _check_a(a: float) -> float:
    a = float(a)
    if not (math.isfinite(a) and a > 0):
        raise DomainError(f"a must be a positive real, got {a}")
    return a


def _x_breaks(a: float) -> list[float]:
    # images of fixed y values; without them a small a leaves every Kronrod
    # node in the region where the integrand vanishes to rounding
    xs = {(1.0 - a * y * y) / (1.0 + a * y * y) for y in _Y_BREAKS}
    return [-1.0] + sorted(x for x in xs if -1.0 < x < 1.0) + [1.0]


def _semi_infinite(weight: Callable[[np.ndarray], np.ndarray]) -> float:
    pts = [0.0] + [y for y in _Y_BREAKS if y < CUTOFF] + [CUTOFF]
    res = integrate(lambda y: weight(y) * specfun.h(y), pts, abs_tol=QUAD_TOL, rel_tol=QUAD_TOL)
    return res.value


def integral_I_F_semi_infinite(a: float) -> float:
    """``int_0^inf (2a+1) h(y) / (1 + a y^2) dy - 1/2``."""
    a = _check_a(a)
    return _semi_infinite(lambda y: (2 * a + 1) / (1 + a * y * y)) - 0.5


def integral_I_G_semi_infinite(a: float) -> float:
    """``int_0^inf (1 - a y^2) h(y) / (1 + a y^2) dy - 1/2``."""
    a = _check_a(a)
    return _semi_infinite(lambda y: (1 - a * y * y) / (1 + a * y * y)) - 0.5


def _interval(func, a: float) -> float:
    return integrate(lambda x: func(a, x), _x_breaks(a), abs_tol=QUAD_TOL, rel_tol=QUAD_TOL).value


def _cross(name: str, primary: float, alt: float) -> None:
    if abs(primary - alt) > CROSS_TOL:
        raise AccuracyError(f"{name}: [-1, 1] form {primary!r} and y form {alt!r} disagree")


def integral_I_F(a: float, cross_check: bool = True) -> float:
    """``I_F(a)`` by quadrature of ``F(a, .)`` on ``[-1, 1]``.

    With ``cross_check`` the semi-infinite form is evaluated as well and an
    :class:`AccuracyError` is raised if the two differ by more than 1e-9.
    """
    a = _check_a(a)
    val = _interval(specfun.F, a)
    if cross_check:
        _cross("I_F", val, integral_I_F_semi_infinite(a))
    return val


def integral_I_G(a: float, cross_check: bool = True) -> float:
    """``I_G(a)``; same conventions as :func:`integral_I_F`."""
    a = _check_a(a)
    val = _interval(specfun.G, a)
    if cross_check:
        _cross("I_G", val, integral_I_G_semi_infinite(a))
    return val


def integral_I_H(a: float) -> float:
    """``I_H(a) = int_0^inf 2 h(y) / (1 + a y^2) dy`` (singularity-free form)."""
    a = _check_a(a)
    return _semi_infinite(lambda y: 2.0 / (1 + a * y * y))


def integral_I_H_raw(a: float, rel_tol: float = 1e-10) -> float:
    """``I_H(a)`` straight from ``H(a, .)`` on ``(-1, 1)``.

    Slow: the ``(1 - x)^{-1/2}`` endpoint singularity is handled only by
    geometric breakpoints towards ``x = 1`` and brute-force subdivision.  The
    last piece ``[1 - 1e-14, 1]`` is integrated in closed form from the
    leading singular term ``H ~ h(0) / sqrt(2 a (1 - x))``.
    """
    a = _check_a(a)
    eps = 1e-14
    pts = _x_breaks(a)[:-1]
    pts += [1.0 - 10.0 ** (-k) for k in range(2, 15) if 1.0 - 10.0 ** (-k) > pts[-1]]
    pts[0] = -1.0
    res = integrate(
        lambda x: specfun.H_integrand(a, np.clip(x, -1 + 1e-300, 1 - 1e-16)),
        pts, abs_tol=1e-14, rel_tol=rel_tol, max_intervals=200_000,
    )
    tail = specfun.h(0.0) * 2.0 * math.sqrt(eps) / math.sqrt(2.0 * a)
    return res.value + tail


def identity_main3(a: float) -> float:
    """``(2a + 1) I_G(a) - 2 I_F(a) + 2a``, which vanishes identically."""
    a = _check_a(a)
    return (2 * a + 1) * integral_I_G(a) - 2 * integral_I_F(a) + 2 * a


# -- propagation constant ---------------------------------------------------

def _residual_G(lam: float, a: float) -> float:
    return -2.0 - lam * integral_I_G(a, cross_check=False)


def _residual_F(lam: float, a: float) -> float:
    return -1.0 + (lam - 2.0) * a - lam * integral_I_F(a, cross_check=False)


def _residual_H(lam: float, a: float) -> float:
    return (lam - 2.0) - lam * integral_I_H(a)


def _bisect(fun: Callable[[float], float], lo: float, hi: float, f_lo: float) -> float:
    """Bisection until the bracket is below ``ROOT_TOL * max(1, |root|)``."""
    while hi - lo > ROOT_TOL * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        f_mid = fun(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _root_by_doubling(fun: Callable[[float], float]) -> float:
    lo, hi = 1e-6, 1.0
    f_lo, f_hi = fun(lo), fun(hi)
    while f_lo >= 0:
        lo /= 2.0
        if lo < 1e-300:
            raise AccuracyError("no lower bracket for a*")
        f_lo = fun(lo)
    while f_hi < 0:
        lo, f_lo = hi, f_hi
        hi *= 2.0
        if hi > 1e12:
            raise AccuracyError("no upper bracket for a*")
        f_hi = fun(hi)
    return _bisect(fun, lo, hi, f_lo)


def _root_by_scan(fun: Callable[[float], float], lo: float = 1e-6, hi: float = 1e8, points: int = 57) -> tuple[float, int]:
    """First sign change on a log grid, refined by bisection; also returns the number of sign changes."""
    grid = np.geomspace(lo, hi, points)
    vals = [fun(a) for a in grid]
    changes = [k for k in range(points - 1) if (vals[k] < 0) != (vals[k + 1] < 0)]
    if not changes:
        raise AccuracyError("no sign change of the residual on the scan grid")
    k = changes[0]
    return _bisect(fun, float(grid[k]), float(grid[k + 1]), vals[k]), len(changes)


@dataclass(frozen=True)
class AsymptoticConstants:
    """``a*`` for ``lambda = h1 / c`` with the roots of all three equations."""

    lam: float
    a_star: float
    roots: dict
    residuals: dict
    sign_changes: dict

    @property
    def max_disagreement(self) -> float:
        r = list(self.roots.values())
        return max(r) - min(r)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["max_disagreement"] = self.max_disagreement
        return d


def solve_a_star(lam: float) -> AsymptoticConstants:
    """Solve for ``a*(lambda)`` from each of the three equations.

    The primary value comes from the ``I_G`` equation, whose residual is
    increasing in ``a``; its bracket is found by doubling from ``[1e-6, 1]``.
    The other two equations are solved after a logarithmic scan (no
    monotonicity assumed).  The root values are then re-checked with both
    integral forms.
    """
    lam = float(lam)
    if not (math.isfinite(lam) and lam > 2):
        raise DomainError(f"a* exists only for lambda > 2, got {lam}")
    root_g = _root_by_doubling(lambda a: _residual_G(lam, a))
    root_f, n_f = _root_by_scan(lambda a: _residual_F(lam, a))
    root_h, n_h = _root_by_scan(lambda a: _residual_H(lam, a))
    # both forms of I_F, I_G must agree at the roots
    integral_I_G(root_g)
    integral_I_F(root_f)
    return AsymptoticConstants(
        lam=lam,
        a_star=root_g,
        roots={"eqFa": root_f, "eqGa": root_g, "eqHa": root_h},
        residuals={
            "eqFa": _residual_F(lam, root_g),
            "eqGa": _residual_G(lam, root_g),
            "eqHa": _residual_H(lam, root_g),
        },
        sign_changes={"eqFa": n_f, "eqGa": 1, "eqHa": n_h},
    )


# -- comparison with simulations ---------------------------------------------

@dataclass
class RattlingReport:
    """Fit of a run against the asymptotic predictions.

    ``residual_eqa1`` and ``residual_eqa2`` are the leading-order balances
    ``-c + (h1 - 2c) a - (h1 + h2) p I_F(a)`` and
    ``-2c - (h1 + h2) p I_G(a)`` at the measured ``a`` and ``p``; the
    ``normalized_*`` fields divide them by ``c`` and ``2c``.
    """

    params: dict
    events: int
    fit_nodes: list
    measured_a: float
    fit_coefficients: dict
    measured_p_star: float
    resolved_node: int
    predicted_p_star: float
    predicted_a: float
    residual_eqa1: float
    residual_eqa2: float
    normalized_eqa1: float
    normalized_eqa2: float
    omega_max_ratio: float
    spacing_epsilon: float
    omega: list = field(default_factory=list, repr=False)

    @property
    def a_relative_error(self) -> float:
        return abs(self.measured_a - self.predicted_a) / self.predicted_a

    def to_json(self) -> str:
        d = asdict(self)
        d["a_relative_error"] = self.a_relative_error
        return json.dumps(d, sort_keys=True, indent=2) + "\n"

    def save_json(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_json(), encoding="utf-8")
        return path

    def omega_csv(self) -> str:
        buf = io.StringIO()
        buf.write("k,t_k,omega_k\n")
        for k, t, w in self.omega:
            buf.write(f"{k},{t!r},{w!r}\n")
        return buf.getvalue()


def fit_rattling(log_: EventLog, consts: Optional[AsymptoticConstants] = None, min_events: int = 20) -> RattlingReport:
    """Compare a switching log with the asymptotic theory.

    ``measured_a`` is the ``k**2`` coefficient of a least-squares fit
    ``t_k = a k**2 + b k + d`` over the upper half of the switched nodes
    (the linear term absorbs the ``O(k)`` remainder).  ``measured_p_star``
    is ``p(n) / n`` at the largest switched node ``n``.
    """
    p = log_.params
    pos = sorted((e.node, e.time) for e in log_.events if e.node > 0)
    if len(log_.events) < min_events:
        raise DomainError(f"need at least {min_events} events, got {len(log_.events)}")
    if consts is None:
        consts = solve_a_star(p.ratio)
    upper = pos[len(pos) // 2:]
    k = np.array([n for n, _ in upper], dtype=float)
    t = np.array([s for _, s in upper])
    d, b, a = np.polynomial.polynomial.polyfit(k, t, 2)
    a = float(a)

    pattern = pattern_from_log(log_)
    n = pattern.n_max
    p_star = count_p(pattern, n) / n

    r1 = -p.c + p.drift * a - p.jump * p_star * integral_I_F(a)
    r2 = -2 * p.c - p.jump * p_star * integral_I_G(a)

    omega = [(kk, tt, tt - a * kk * kk) for kk, tt in pos]
    ratio = max(abs(w) / kk for kk, _, w in omega)
    gaps = [(t2 - t1) / k2 for (k1, t1), (k2, t2) in zip(pos, pos[1:])]
    return RattlingReport(
        params=p.as_dict(),
        events=len(log_.events),
        fit_nodes=[int(k[0]), int(k[-1])],
        measured_a=a,
        fit_coefficients={"a": a, "b": float(b), "d": float(d)},
        measured_p_star=p_star,
        resolved_node=n,
        predicted_p_star=p.predicted_fraction(),
        predicted_a=consts.a_star,
        residual_eqa1=r1,
        residual_eqa2=r2,
        normalized_eqa1=r1 / p.c,
        normalized_eqa2=r2 / (2 * p.c),
        omega_max_ratio=ratio,
        spacing_epsilon=min(gaps) if gaps else math.nan,
        omega=omega,
    )


# -- table generators -------------------------------------------------------

def astar_table_csv(lams: Iterable[float]) -> str:
    """CSV ``lambda,a_star_eqFa,a_star_eqGa,a_star_eqHa,max_disagreement``."""
    buf = io.StringIO()
    buf.write("lambda,a_star_eqFa,a_star_eqGa,a_star_eqHa,max_disagreement\n")
    for lam in lams:
        c = solve_a_star(lam)
        r = c.roots
        buf.write(f"{c.lam!r},{r['eqFa']!r},{r['eqGa']!r},{r['eqHa']!r},{c.max_disagreement!r}\n")
    return buf.getvalue()


def profiles_csv(a_values: Sequence[float] = (0.2, 1.0, 5.0), points: int = 201) -> str:
    """CSV of ``F``, ``G``, ``H`` on an interior grid of ``(-1, 1)`` for each ``a``.

    Columns: ``x`` then ``F_a=<a>,G_a=<a>,H_a=<a>`` per value of ``a``.
    """
    if points < 3:
        raise DomainError("points must be at least 3")
    x = np.linspace(-1.0, 1.0, points)[1:-1]
    cols = [x]
    head = ["x"]
    for a in a_values:
        head += [f"F_a={a!r}", f"G_a={a!r}", f"H_a={a!r}"]
        cols += [specfun.F(a, x), specfun.G(a, x), specfun.H_integrand(a, x)]
    buf = io.StringIO()
    buf.write(",".join(head) + "\n")
    for row in zip(*cols):
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()
