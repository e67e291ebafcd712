r"""Exact event-driven solution of the lattice problem.

The unique solution is

.. math::

    u_n(t) = -c n^2 + (h_1 - 2c) t - (h_1 + h_2)
             \sum_{k \in S(t)} \Gamma_{n-k}(t - t_k),

where ``S(t)`` is the (symmetric) set of nodes switched by time ``t``.
Between two switchings nothing but time changes, so the solver only has to
locate the next moment some node reaches 0.

Spectral representation
-----------------------
Write the sum in the cosine form of ``Gamma``.  Pairing ``k`` with ``-k``,

.. math::

    \sum_{k\in S(t)} \Gamma_{n-k}(t-t_k)
      = \frac{1}{\pi}\int_0^\pi \Sigma(\theta, t) \cos(n\theta)\,d\theta,
    \qquad
    \Sigma(\theta, t) = \sum_{k \ge 0} m_k \cos(k\theta)\,
        (t - t_k)\,\varphi\big(\lambda(\theta)(t - t_k)\big),

with ``m_0 = 1``, ``m_k = 2``, ``lambda = 2(1 - cos theta)`` and
``phi(z) = (1 - exp(-z))/z``.  Since ``d/dt Sigma = P - lambda Sigma`` with
``P = sum m_k cos(k theta)`` constant between switchings,

.. math::

    \Sigma(\theta, t + d) = e^{-\lambda d}\,\Sigma(\theta, t)
                            + P(\theta)\, d\, \varphi(\lambda d),

which is exact and free of cancellation.  On an ``M``-panel trapezoid grid
all ``u_n`` follow from one type-I DCT.  ``M`` is kept alias-safe (see
:mod:`rattling.green`) as the front advances.

Event search
------------
From the current time the march takes the certified step
``min_n(-u_n) / (h1 - 2c)`` (no node rises faster than ``h1 - 2c``), floored
at ``min_step``.  Nodes beyond ``sqrt((h1 - 2c) t / c)`` are certified
negative and are not evaluated.  Once a node is nonnegative the step is
bracketed and every crossing node is refined with Brent's method; nodes whose
roots lie within ``simultaneity_window`` of the earliest one switch together
at the earliest time.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np
from scipy.fft import dct
from scipy.optimize import brentq

from .errors import AccuracyError, DomainError, InvariantViolation, NoProgressError
from .events import EventLog, SwitchEvent
from .green import GreenEvaluator, _symbol, relaxation_factor
from .relay import ModelParams

__all__ = [
    "SolverConfig",
    "LatticeField",
    "u_value",
    "profile",
    "run_event_driven",
    "rescale_events",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and stopping rule shared by both solvers.

    Attributes
    ----------
    time_tol : float
        Absolute accuracy of switching times.
    value_tol : float
        Admissible ``|u|`` at an accepted switching and admissible violation
        of the a-priori bounds.
    horizon : float or None
        Stop at this time.
    max_events : int or None
        Stop once the log holds this many events (node 0 included).  At
        least one of ``horizon`` / ``max_events`` must be given.
    max_candidates : int
        Refuse to track more than this many candidate nodes.
    simultaneity_window : float or None
        Roots closer than this to the earliest root form one batch; defaults
        to ``10 * time_tol``.
    min_step : float
        Floor of the certified march step.
    max_steps : int
        March steps allowed without an event before :class:`NoProgressError`.
    verify_with_green : bool
        Re-evaluate ``u`` at each accepted switching with the direct Green
        sum of :func:`u_value`.
    ode_rtol, ode_atol : float
        Integrator tolerances of the time stepper.
    """

    time_tol: float = 1e-9
    value_tol: float = 1e-7
    horizon: Optional[float] = None
    max_events: Optional[int] = None
    max_candidates: int = 100_000
    simultaneity_window: Optional[float] = None
    min_step: float = 1e-3
    max_steps: int = 1_000_000
    verify_with_green: bool = True
    ode_rtol: float = 1e-12
    ode_atol: float = 1e-12

    def __post_init__(self):
        if self.horizon is None and self.max_events is None:
            raise DomainError("give a horizon or a target event count")
        if self.horizon is not None and not self.horizon > 0:
            raise DomainError("horizon must be positive")
        if self.max_events is not None and self.max_events < 1:
            raise DomainError("max_events must be at least 1")
        for name in ("time_tol", "value_tol", "min_step", "ode_rtol", "ode_atol"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.window < self.time_tol:
            raise DomainError("simultaneity_window must be >= time_tol")

    @property
    def window(self) -> float:
        if self.simultaneity_window is None:
            return 10.0 * self.time_tol
        return self.simultaneity_window

    def as_dict(self) -> dict:
        d = asdict(self)
        d["simultaneity_window"] = self.window
        return d


class LatticeField:
    """Spectral state of ``u`` between switchings.

    Holds ``Sigma(theta, t_ref)`` and ``P(theta)`` on an ``M``-panel grid and
    evaluates ``u_n(t)`` for ``t >= t_ref`` assuming no switching in
    ``(t_ref, t]``.
    """

    def __init__(self, params: ModelParams, panels: int = 64):
        self.params = params
        self._switched: list[tuple[int, float]] = []
        self._set_grid(panels)
        self.t_ref = 0.0
        self._sigma = np.zeros(self.panels + 1)
        self._p = np.zeros(self.panels + 1)
        self._weights: dict[int, np.ndarray] = {}

    # -- grid management -----------------------------------------------
    def _set_grid(self, panels: int) -> None:
        self.panels = int(panels)
        self.theta = np.linspace(0.0, math.pi, self.panels + 1)
        self.lam = _symbol(self.theta)
        self._weights = {}

    def _rebuild(self, panels: int, t: float) -> None:
        """Recompute the state directly from the switch list at time ``t``."""
        self._set_grid(panels)
        self._sigma = np.zeros(self.panels + 1)
        self._p = np.zeros(self.panels + 1)
        for k, tk in self._switched:
            mult = 1.0 if k == 0 else 2.0
            ck = mult * np.cos(k * self.theta)
            self._p += ck
            lag = t - tk
            if lag > 0:
                self._sigma += ck * lag * relaxation_factor(self.lam * lag)
        self.t_ref = t

    def ensure_resolution(self, n_max: int, t: float) -> None:
        """Refine the grid so that nodes up to ``n_max`` are alias-free at ``t``."""
        need = _grid_panels(max(n_max, self._k_max()), t, self.panels)
        if need > self.panels:
            self._rebuild(need, self.t_ref)

    def _k_max(self) -> int:
        return max((k for k, _ in self._switched), default=0)

    @classmethod
    def from_events(cls, params: ModelParams, events, t: float, n_max: int) -> "LatticeField":
        """Field at time ``t`` built from every event with ``time <= t``."""
        fld = cls(params)
        fld._switched = [(e.node, e.time) for e in events if e.time <= t]
        fld._rebuild(_grid_panels(max(n_max, fld._k_max()), t, 64), t)
        return fld

    # -- evaluation ------------------------------------------------------
    def sigma_at(self, t: float) -> np.ndarray:
        d = t - self.t_ref
        if d < 0:
            raise DomainError(f"cannot evaluate before the reference time ({t} < {self.t_ref})")
        if d == 0:
            return self._sigma
        z = self.lam * d
        return np.exp(-z) * self._sigma + self._p * d * relaxation_factor(z)

    def green_sums(self, t: float, n_max: int) -> np.ndarray:
        """``sum_k Gamma_{n-k}(t - t_k)`` for ``n = 0..n_max``."""
        if n_max > self.panels:
            raise DomainError("n_max exceeds the grid; call ensure_resolution first")
        y = dct(self.sigma_at(t), type=1) / (2 * self.panels)
        return y[: n_max + 1]

    def values(self, t: float, n_max: int) -> np.ndarray:
        """``u_n(t)`` for ``n = 0..n_max``."""
        p = self.params
        n = np.arange(n_max + 1, dtype=float)
        return -p.c * n * n + p.drift * t - p.jump * self.green_sums(t, n_max)

    def _weight(self, n: int) -> np.ndarray:
        w = self._weights.get(n)
        if w is None:
            w = np.cos(n * self.theta)
            w[0] *= 0.5
            w[-1] *= 0.5
            w /= self.panels
            self._weights[n] = w
        return w

    def value(self, n: int, t: float) -> float:
        """``u_n(t)`` for one node."""
        p = self.params
        n = abs(int(n))
        return -p.c * n * n + p.drift * t - p.jump * float(np.dot(self.sigma_at(t), self._weight(n)))

    # -- updates -----------------------------------------------------------
    def advance(self, t: float) -> None:
        """Move the reference time to ``t`` without switching anything."""
        self._sigma = self.sigma_at(t)
        self.t_ref = t

    def switch(self, nodes, t: float) -> None:
        """Record that ``nodes`` (and their mirrors) switch at ``t``."""
        self.advance(t)
        for k in nodes:
            k = abs(int(k))
            self._switched.append((k, t))
            self._p += (1.0 if k == 0 else 2.0) * np.cos(k * self.theta)


def _grid_panels(n_max: int, t: float, minimum: int) -> int:
    # Sigma's cosine coefficients beyond n_max + 7 sqrt(t) are below rounding;
    # the DCT aliases n with 2M - n, so M above that bound keeps u_n clean.
    need = n_max + 7.0 * math.sqrt(max(t, 0.0)) + 32.0
    m = 1 << (max(int(minimum), 2) - 1).bit_length()
    while m < need:
        m *= 2
    return m


def profile(log_: EventLog, t: float, n_max: int) -> np.ndarray:
    """``u_n(t)``, ``n = 0..n_max``, reconstructed from an event log."""
    fld = LatticeField.from_events(log_.params, log_.events, t, n_max)
    return fld.values(t, n_max)


def u_value(n: int, t: float, log_: EventLog, green: Optional[GreenEvaluator] = None) -> float:
    """Direct evaluation of the solution formula with the Green evaluator.

    Sums ``Gamma_{n-k}(t - t_k)`` over every logged node with ``t_k <= t``
    and its mirror image.  Slower than :class:`LatticeField` but independent
    of it.
    """
    green = green or GreenEvaluator()
    p = log_.params
    total = 0.0
    for e in log_.events:
        if e.time > t:
            continue
        lag = t - e.time
        total += green.gamma(n - e.node, lag)
        if e.node != 0:
            total += green.gamma(n + e.node, lag)
    return -p.c * n * n + p.drift * t - p.jump * total


def run_event_driven(
    params: ModelParams,
    cfg: SolverConfig,
    green: Optional[GreenEvaluator] = None,
) -> EventLog:
    """Compute the switching events up to the horizon or event count.

    Raises
    ------
    NoProgressError
        If ``cfg.max_steps`` march steps pass without a switching.
    InvariantViolation
        If an accepted switching breaks ``|u| <= value_tol`` or the lower bound
        on switching times.
    AccuracyError
        If the field becomes non-finite or a Green evaluation fails.
    """
    if cfg.verify_with_green and green is None:
        green = GreenEvaluator()
    drift = params.drift
    fld = LatticeField(params)
    fld.switch([0], 0.0)
    events = [SwitchEvent(0, 0.0)]
    switched = {0}
    t = 0.0
    horizon = cfg.horizon if cfg.horizon is not None else math.inf
    steps_since_event = 0
    total_steps = 0
    batches = 0
    out_of_order = 0
    xtol = 0.1 * cfg.time_tol

    def done() -> bool:
        return cfg.max_events is not None and len(events) >= cfg.max_events

    while not done() and t < horizon:
        n_lim = params.max_candidate(t)
        if n_lim > cfg.max_candidates:
            raise DomainError(f"more than max_candidates={cfg.max_candidates} candidate nodes")
        fld.ensure_resolution(n_lim + 2, t)
        u = fld.values(t, n_lim)
        if not np.all(np.isfinite(u)):
            raise AccuracyError(f"non-finite field values at t={t}")
        free = np.ones(n_lim + 1, dtype=bool)
        free[[k for k in switched if k <= n_lim]] = False
        gap = -float(np.max(u[free])) if free.any() else math.inf
        # every node beyond n_lim sits at or below -c n**2 + drift t
        gap = min(gap, params.c * (n_lim + 1) ** 2 - drift * t)
        t_new = min(t + max(gap / drift, cfg.min_step), horizon)
        n_new = params.max_candidate(t_new)
        fld.ensure_resolution(n_new + 2, t_new)
        u_new = fld.values(t_new, n_new)
        crossing = [n for n in range(1, n_new + 1) if n not in switched and u_new[n] >= 0.0]
        steps_since_event += 1
        total_steps += 1
        if steps_since_event > cfg.max_steps:
            raise NoProgressError(f"no switching within {cfg.max_steps} steps after t={events[-1].time}")
        if not crossing:
            t = t_new
            continue

        roots = {}
        for n in crossing:
            lo_val = fld.value(n, t)
            if lo_val >= 0.0:
                roots[n] = t
                continue
            roots[n] = brentq(lambda s, n=n: fld.value(n, s), t, t_new, xtol=xtol, rtol=1e-15)
        t_star = min(roots.values())
        batch = sorted(n for n, r in roots.items() if r <= t_star + cfg.window)
        if batch and min(batch) < max(switched):
            out_of_order += sum(1 for n in batch if n < max(switched))
        fld.switch(batch, t_star)
        for n in batch:
            switched.add(n)
            events.append(SwitchEvent(n, t_star))
        batches += 1
        steps_since_event = 0
        t = t_star

        for n in batch:
            bound = params.switch_time_lower_bound(n)
            if t_star < bound - cfg.time_tol:
                raise InvariantViolation(f"node {n} switched at {t_star} < lower bound {bound}")
            if cfg.verify_with_green:
                partial = EventLog(params, t_star, events)
                val = u_value(n, t_star, partial, green)
                if abs(val) > cfg.value_tol:
                    raise InvariantViolation(
                        f"u_{n}({t_star}) = {val:.3e} exceeds value_tol at an accepted switching"
                    )
        log.debug("t=%.10g switched %s", t_star, batch)

    end = horizon if cfg.horizon is not None and t >= horizon else events[-1].time
    meta = {
        "method": "event-driven",
        "config": cfg.as_dict(),
        "march_steps": total_steps,
        "batches": batches,
        "out_of_order_switchings": out_of_order,
        "grid_panels": fld.panels,
        "batch_time_rule": "all nodes of a batch carry the earliest root",
    }
    result = EventLog(params, end, events, meta)
    result.validate(tol=cfg.time_tol)
    return result


def rescale_events(log_: EventLog, epsilon: float) -> EventLog:
    """Map times to the physical scale ``tau = epsilon**2 t``.

    Node indices are unchanged (the pattern does not depend on ``epsilon``);
    the physical solution is ``v_n(tau) = epsilon**2 u_n(t)``.
    """
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    s = epsilon * epsilon
    meta = dict(log_.solver_meta)
    meta.update({"epsilon": epsilon, "time_unit": "tau = epsilon**2 * t", "value_scale": s})
    events = [replace(e, time=e.time * s) for e in log_.events]
    return EventLog(log_.params, log_.horizon * s, events, meta)
