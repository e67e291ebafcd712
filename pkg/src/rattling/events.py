"""Switching events and their on-disk format.

An :class:`EventLog` lists ``(node, time)`` pairs for ``node >= 0``; the
partner ``-node`` switches at the same time.  Node 0 is always present at
time 0.

File format
-----------
``<stem>.csv``
    UTF-8, ``\\n`` line endings, header ``node,time`` (or ``node,time,tau``
    when a rescaled-time column is attached), one row per event in log order.
    ``node`` is a base-10 integer; ``time`` and ``tau`` are written with
    Python ``repr`` (the shortest decimal string that round-trips the
    IEEE-754 double), so reading the file back reproduces the log exactly.
``<stem>.json``
    Sidecar object with keys ``params`` (``h1``, ``h2``, ``c``), ``horizon``,
    ``method``, ``solver_meta`` and ``format`` (``"rattling-events/1"``).
    Keys are sorted and the file ends with a newline.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import InvariantViolation
from .relay import ModelParams

__all__ = ["SwitchEvent", "EventLog", "FORMAT_TAG"]

FORMAT_TAG = "rattling-events/1"


@dataclass(frozen=True)
class SwitchEvent:
    """Node ``node`` (and ``-node``) switches at ``time``."""

    node: int
    time: float

    def __post_init__(self):
        if self.node < 0:
            raise ValueError("events are stored for nonnegative nodes only")
        if not (math.isfinite(self.time) and self.time >= 0):
            raise ValueError(f"bad event time {self.time}")


@dataclass
class EventLog:
    params: ModelParams
    horizon: float
    events: list[SwitchEvent] = field(default_factory=list)
    solver_meta: dict = field(default_factory=dict)

    # -- queries -----------------------------------------------------------
    @property
    def nodes(self) -> list[int]:
        return [e.node for e in self.events]

    @property
    def times(self) -> list[float]:
        return [e.time for e in self.events]

    def __len__(self) -> int:
        return len(self.events)

    def switch_time(self, n: int) -> Optional[float]:
        """Switching time of ``n`` (either sign), or ``None``."""
        n = abs(n)
        for e in self.events:
            if e.node == n:
                return e.time
        return None

    def switched_by(self, t: float, strict: bool = False) -> list[SwitchEvent]:
        """Events with ``time <= t`` (``< t`` when ``strict``)."""
        if strict:
            return [e for e in self.events if e.time < t]
        return [e for e in self.events if e.time <= t]

    def switched_set(self, t: float) -> set[int]:
        """The full symmetric set of nodes switched by time ``t``."""
        out = set()
        for e in self.switched_by(t):
            out.add(e.node)
            out.add(-e.node)
        return out

    def count(self, t: float) -> int:
        """Number of switched nodes on the whole lattice at time ``t``."""
        return sum(1 if e.node == 0 else 2 for e in self.switched_by(t))

    @property
    def max_node(self) -> int:
        return max(self.nodes) if self.events else 0

    def validate(self, tol: float = 0.0) -> None:
        """Raise :class:`InvariantViolation` if a structural invariant fails.

        Checked: node 0 at time 0, sorted times, distinct nodes, every time
        below the horizon (within ``tol``) and above ``c n**2 / (h1 - 2c)``
        (within ``tol``).
        """
        if not self.events or self.events[0].node != 0 or self.events[0].time != 0.0:
            raise InvariantViolation("log must start with node 0 at time 0")
        nodes = self.nodes
        if len(set(nodes)) != len(nodes):
            raise InvariantViolation("a node appears twice in the log")
        times = self.times
        if any(b < a for a, b in zip(times, times[1:])):
            raise InvariantViolation("event times are not sorted")
        if times[-1] > self.horizon + tol:
            raise InvariantViolation("event after the horizon")
        for e in self.events:
            bound = self.params.switch_time_lower_bound(e.node)
            if e.time < bound - tol:
                raise InvariantViolation(
                    f"node {e.node} switched at {e.time} before its lower bound {bound}"
                )

    # -- serialisation -----------------------------------------------------
    def to_csv(self, tau: Optional[Iterable[float]] = None) -> str:
        buf = io.StringIO()
        if tau is None:
            buf.write("node,time\n")
            for e in self.events:
                buf.write(f"{e.node},{e.time!r}\n")
        else:
            buf.write("node,time,tau\n")
            for e, s in zip(self.events, tau):
                buf.write(f"{e.node},{e.time!r},{float(s)!r}\n")
        return buf.getvalue()

    def sidecar(self) -> dict:
        return {
            "format": FORMAT_TAG,
            "params": self.params.as_dict(),
            "horizon": self.horizon,
            "method": self.solver_meta.get("method", "unknown"),
            "solver_meta": self.solver_meta,
        }

    def save(self, stem, tau: Optional[Iterable[float]] = None, extra_meta: Optional[dict] = None) -> tuple[Path, Path]:
        """Write ``<stem>.csv`` and ``<stem>.json``; return both paths."""
        stem = Path(stem)
        csv_path = stem.with_suffix(".csv")
        json_path = stem.with_suffix(".json")
        csv_path.write_text(self.to_csv(tau), encoding="utf-8", newline="\n")
        meta = self.sidecar()
        if extra_meta:
            meta.update(extra_meta)
        json_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return csv_path, json_path

    @classmethod
    def from_csv(cls, text: str, params: ModelParams, horizon: float, solver_meta: Optional[dict] = None) -> "EventLog":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0][:2] != ["node", "time"]:
            raise ValueError("events CSV must start with header 'node,time'")
        events = [SwitchEvent(int(r[0]), float(r[1])) for r in rows[1:] if r]
        return cls(params, float(horizon), events, dict(solver_meta or {}))

    @classmethod
    def load(cls, stem) -> "EventLog":
        stem = Path(stem)
        meta = json.loads(stem.with_suffix(".json").read_text(encoding="utf-8"))
        if meta.get("format") != FORMAT_TAG:
            raise ValueError(f"unknown events format {meta.get('format')!r}")
        params = ModelParams(**meta["params"])
        text = stem.with_suffix(".csv").read_text(encoding="utf-8")
        return cls.from_csv(text, params, meta["horizon"], meta.get("solver_meta"))
