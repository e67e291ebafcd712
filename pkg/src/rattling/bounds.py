"""A-priori bounds on the lattice solution, checked on a computed run.

For the solution started from ``-c n**2`` the following hold for all
``n`` and ``t``:

* ``u_n(t) <= 0``;
* ``du_n/dt`` lies in ``[-(h1 + h2), h1 - 2c]``;
* ``(Delta u)_n`` lies in ``[-(2 h1 + h2), h1 + h2 - 2c]``;
* at a switching node, ``u_{n+1}(t_n) - u_n(t_n)`` lies in
  ``[-(2 h1 + h2), 0]`` and ``u_n(t_n) - u_{n-1}(t_n)`` in ``[0, 2 h1 + h2]``.

:func:`check_runtime_bounds` rebuilds the field from an event log and
evaluates each bound at every switching moment (the derivative on both
sides) and at interior sample times.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .events import EventLog
from .solver import LatticeField

__all__ = ["BoundsReport", "check_runtime_bounds"]

BOUND_NAMES = (
    "u_nonpositive",
    "u_dot",
    "laplacian",
    "gradient_at_switch",
    "left_gradient_at_switch",
    "u_at_switch",
)


@dataclass
class BoundsReport:
    """Largest violation of each bound (0 means satisfied)."""

    violations: dict = field(default_factory=lambda: dict.fromkeys(BOUND_NAMES, 0.0))
    samples: int = 0
    nodes: int = 0

    @property
    def worst(self) -> float:
        return max(self.violations.values())

    def ok(self, tol: float) -> bool:
        return self.worst <= tol

    def as_dict(self) -> dict:
        return {"violations": dict(self.violations), "samples": self.samples, "nodes": self.nodes}


def _excess(x: np.ndarray, lo: float, hi: float) -> float:
    if x.size == 0:
        return 0.0
    return float(max(0.0, lo - x.min(), x.max() - hi))


def check_runtime_bounds(log_: EventLog, samples_per_gap: int = 3, n_max: int | None = None) -> BoundsReport:
    """Evaluate all bounds along ``log_``.

    Parameters
    ----------
    log_ : EventLog
        A complete log: every switching with ``time <= log_.horizon``.
    samples_per_gap : int
        Interior sample times inserted between consecutive switching moments.
    n_max : int, optional
        Largest node examined; defaults to two past the last node that can
        have switched by the horizon.
    """
    p = log_.params
    h1, h2 = p.h1, p.h2
    if n_max is None:
        n_max = p.max_candidate(log_.horizon) + 2
    report = BoundsReport(nodes=n_max + 1)
    viol = report.violations

    def laplacian(u):
        # u_{-1} = u_1 by symmetry
        ext = np.concatenate([[u[1]], u])
        return ext[:-2] - 2.0 * ext[1:-1] + ext[2:]

    def sample(fld, t, switched):
        u = fld.values(t, n_max + 1)
        lap = laplacian(u)
        u = u[:-1]
        out = np.where(switched, -h2, h1)
        viol["u_nonpositive"] = max(viol["u_nonpositive"], _excess(u, -np.inf, 0.0))
        viol["laplacian"] = max(viol["laplacian"], _excess(lap, -(2 * h1 + h2), h1 + h2 - 2 * p.c))
        viol["u_dot"] = max(viol["u_dot"], _excess(lap + out, -(h1 + h2), p.drift))
        report.samples += 1
        return u, lap

    by_time: dict[float, list[int]] = {}
    for e in log_.events:
        by_time.setdefault(e.time, []).append(e.node)
    times = sorted(by_time)
    fld = LatticeField(p)
    fld.ensure_resolution(n_max + 2, log_.horizon)
    switched = np.zeros(n_max + 1, dtype=bool)
    prev = 0.0
    for k, t in enumerate(times + [log_.horizon]):
        if k > 0:
            for s in np.linspace(prev, t, samples_per_gap + 2)[1:-1]:
                sample(fld, s, switched)
        if k == len(times):
            if t > prev:
                sample(fld, t, switched)
            break
        nodes = [n for n in by_time[t] if n <= n_max]
        u, lap = sample(fld, t, switched) if t > 0 else (fld.values(t, n_max + 1)[:-1], None)
        for n in nodes:
            viol["u_at_switch"] = max(viol["u_at_switch"], abs(float(u[n])))
            u_next = fld.value(n + 1, t)
            u_prev = fld.value(n - 1, t)
            viol["gradient_at_switch"] = max(
                viol["gradient_at_switch"], _excess(np.array([u_next - u[n]]), -(2 * h1 + h2), 0.0)
            )
            viol["left_gradient_at_switch"] = max(
                viol["left_gradient_at_switch"], _excess(np.array([u[n] - u_prev]), 0.0, 2 * h1 + h2)
            )
        fld.switch(by_time[t], t)
        switched[nodes] = True
        sample(fld, t, switched)
        prev = t
    return report
