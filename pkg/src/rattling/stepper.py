"""Truncated-lattice time stepper, an independent check on the event-driven solver.

The state is the deviation ``w_n = u_n + c n**2 - (h1 - 2c) t`` on the
half-lattice ``n = 0..N``.  It obeys

    dw_n/dt = (Delta w)_n - (h1 + h2) [n switched],

with the reflection ``(Delta w)_0 = 2 (w_1 - w_0)`` (``u`` is even) and the
closure ``w_{N+1} = 0``.  Far from the switched region the deviation is
negligible, so the closure is accurate as long as ``N`` stays well ahead of
the front; :func:`suggest_halfwidth` gives such an ``N`` for a horizon.

Integration is DOP853 with dense output.  The event function is the largest
``u_n`` over unswitched nodes; each zero crossing stops the integrator, the
relay of the crossing node is flipped and integration restarts.  When no
half-width is given the lattice is widened between time chunks (new nodes
start at ``w = 0``, consistent with the closure).
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BoundaryViolation, DomainError, StepSizeError
from .events import EventLog, SwitchEvent
from .relay import ModelParams
from .solver import SolverConfig

__all__ = ["suggest_halfwidth", "half_lattice_rhs", "full_lattice_rhs", "run_time_stepper"]


def suggest_halfwidth(params: ModelParams, horizon: float) -> int:
    """Half-width keeping the closure error far below rounding up to ``horizon``.

    The switched region ends near ``sqrt((h1 - 2c) T / c)``; the discrete heat
    kernel is below ``1e-16`` of its peak beyond ``14 sqrt(T)`` from a source.
    """
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    front = math.isqrt(int(horizon * params.drift / params.c))
    return front + int(14.0 * math.sqrt(horizon)) + 10


def half_lattice_rhs(w: np.ndarray, switched: np.ndarray, jump: float) -> np.ndarray:
    """Right-hand side on ``n = 0..N`` with the even reflection at 0."""
    lap = np.empty_like(w)
    lap[0] = 2.0 * (w[1] - w[0])
    lap[1:-1] = w[:-2] - 2.0 * w[1:-1] + w[2:]
    lap[-1] = w[-2] - 2.0 * w[-1]
    return lap - jump * switched


def full_lattice_rhs(w: np.ndarray, switched: np.ndarray, jump: float) -> np.ndarray:
    """Right-hand side on ``n = -N..N`` with zero closure on both ends."""
    lap = np.empty_like(w)
    lap[0] = w[1] - 2.0 * w[0]
    lap[1:-1] = w[:-2] - 2.0 * w[1:-1] + w[2:]
    lap[-1] = w[-2] - 2.0 * w[-1]
    return lap - jump * switched


def run_time_stepper(
    params: ModelParams,
    cfg: SolverConfig,
    lattice_halfwidth: Optional[int] = None,
) -> EventLog:
    """Integrate the truncated lattice and return its switching events.

    With ``lattice_halfwidth`` given the lattice is fixed and
    ``cfg.horizon`` is required; ``c N**2 / (h1 - 2c)`` must exceed it so
    the outermost node cannot switch.  Otherwise the lattice grows with time.

    Raises
    ------
    BoundaryViolation
        The outermost node switched or its deviation exceeded ``value_tol``.
    StepSizeError
        The integrator failed (step size underflow).
    """
    drift, jump, c = params.drift, params.jump, params.c
    horizon = cfg.horizon if cfg.horizon is not None else math.inf
    fixed = lattice_halfwidth is not None
    if fixed:
        if cfg.horizon is None:
            raise DomainError("a fixed lattice needs a finite horizon")
        if not c * lattice_halfwidth**2 / drift > horizon:
            raise DomainError("lattice_halfwidth too small: its boundary node could switch before the horizon")
        size = int(lattice_halfwidth) + 1
    else:
        size = suggest_halfwidth(params, 64.0) + 1

    w = np.zeros(size)
    switched = np.zeros(size, dtype=bool)
    switched[0] = True
    events = [SwitchEvent(0, 0.0)]
    t = 0.0
    steps = 0

    def done() -> bool:
        return cfg.max_events is not None and len(events) >= cfg.max_events

    while not done() and t < horizon:
        if fixed:
            t_end = horizon
        else:
            t_end = min(horizon, t + max(50.0, 0.25 * t))
            need = suggest_halfwidth(params, t_end) + 1
            if need > w.size:
                w = np.concatenate([w, np.zeros(need - w.size)])
                switched = np.concatenate([switched, np.zeros(need - switched.size, dtype=bool)])
        n = np.arange(w.size, dtype=float)
        base = -c * n * n
        sw = switched.astype(float)

        def rhs(_t, y):
            return half_lattice_rhs(y, sw, jump)

        def crossing(s, y):
            u = y + base + drift * s
            return float(np.max(np.where(switched, -np.inf, u)))

        crossing.terminal = True
        crossing.direction = 1
        sol = solve_ivp(
            rhs, (t, t_end), w, method="DOP853",
            rtol=cfg.ode_rtol, atol=cfg.ode_atol, events=crossing, max_step=1.0,
        )
        if sol.status == -1:
            raise StepSizeError(f"integrator failed at t={sol.t[-1]}: {sol.message}")
        steps += sol.t.size - 1
        if sol.status == 1:
            t = float(sol.t_events[0][0])
            w = sol.y_events[0][0].copy()
            u = w + base + drift * t
            cand = np.where(switched, -np.inf, u)
            batch = np.flatnonzero(cand >= -drift * cfg.window)
            if batch.size == 0:
                batch = np.array([int(np.argmax(cand))])
            for k in batch:
                switched[k] = True
                events.append(SwitchEvent(int(k), t))
        else:
            t = float(sol.t[-1])
            w = sol.y[:, -1].copy()
        if switched[-1]:
            raise BoundaryViolation(f"boundary node {w.size - 1} switched at t={t}")
        if abs(w[-1]) > cfg.value_tol:
            raise BoundaryViolation(f"deviation {w[-1]:.3e} at the lattice boundary exceeds value_tol")

    meta = {
        "method": "time-stepper",
        "config": cfg.as_dict(),
        "integrator": "DOP853",
        "lattice_halfwidth": int(w.size - 1),
        "lattice_fixed": fixed,
        "accepted_steps": steps,
    }
    end = horizon if cfg.horizon is not None and t >= horizon else events[-1].time
    result = EventLog(params, end, events, meta)
    result.validate(tol=cfg.time_tol)
    return result
