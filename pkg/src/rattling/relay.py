"""Relay hysteresis with threshold 0.

A relay outputs ``h1`` while its input has stayed strictly negative and
``-h2`` from the first moment the input reaches 0 onwards.  The state is a
small immutable value: whether the relay has switched and when.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .errors import DomainError, MonotoneTimeError

__all__ = [
    "ModelParams",
    "RelayState",
    "relay_output",
    "relay_update",
    "init_relay",
    "relay_trajectory",
]


@dataclass(frozen=True)
class ModelParams:
    """Relay outputs ``h1``, ``-h2`` and the tangency coefficient ``c``.

    The initial profile is ``-c n**2``.  Construction enforces
    ``-h2 <= 0 < 2c < h1``.
    """

    h1: float
    h2: float
    c: float

    def __post_init__(self):
        for name in ("h1", "h2", "c"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise DomainError(f"{name} must be a finite real, got {v!r}")
        if not (self.h2 >= 0 and 0 < 2 * self.c < self.h1):
            raise DomainError(
                f"parameters violate -h2 <= 0 < 2c < h1: h1={self.h1}, h2={self.h2}, c={self.c}"
            )

    @property
    def ratio(self) -> float:
        """``h1 / c``, the only combination the propagation constant depends on."""
        return self.h1 / self.c

    @property
    def drift(self) -> float:
        """Growth rate ``h1 - 2c`` of a node far from every switching."""
        return self.h1 - 2 * self.c

    @property
    def jump(self) -> float:
        """Drop ``h1 + h2`` of the relay output at switching."""
        return self.h1 + self.h2

    def switch_time_lower_bound(self, n: int) -> float:
        """A node ``n`` cannot switch before ``c n**2 / (h1 - 2c)``."""
        return self.c * n * n / self.drift

    def max_candidate(self, t: float) -> int:
        """Largest ``|n|`` that may have switched by time ``t``."""
        if t <= 0:
            return 0
        return int(math.isqrt(int(self.drift * t / self.c)) + 1)

    def predicted_fraction(self) -> float:
        """Asymptotic share of switching nodes, ``h1 / (h1 + h2)``."""
        return self.h1 / (self.h1 + self.h2)

    def as_dict(self) -> dict:
        return {"h1": self.h1, "h2": self.h2, "c": self.c}


@dataclass(frozen=True)
class RelayState:
    """Memory of one relay.

    ``switch_time`` is set iff ``switched``; ``last_time`` is the time of the
    most recent update and guards against non-monotone use.
    """

    switched: bool = False
    switch_time: Optional[float] = None
    last_time: Optional[float] = None

    def __post_init__(self):
        if self.switched != (self.switch_time is not None):
            raise DomainError("switch_time must be given exactly when switched is True")


def relay_output(state: RelayState, params: ModelParams) -> float:
    """``h1`` before switching, ``-h2`` after."""
    return -params.h2 if state.switched else params.h1


def relay_update(state: RelayState, value: float, time: float) -> RelayState:
    """Feed one input sample ``value`` observed at ``time``.

    The relay switches on the first sample with ``value >= 0`` and never
    reverts.
    """
    if not time >= 0:
        raise DomainError(f"time must be nonnegative, got {time}")
    if state.last_time is not None and time < state.last_time:
        raise MonotoneTimeError(f"time {time} precedes previous update at {state.last_time}")
    if state.switched or value < 0:
        return replace(state, last_time=time)
    return RelayState(switched=True, switch_time=time, last_time=time)


def init_relay(n: int, params: ModelParams) -> RelayState:
    """State at ``t = 0`` for initial value ``-c n**2``: only node 0 is switched."""
    if n == 0:
        return RelayState(switched=True, switch_time=0.0, last_time=0.0)
    return RelayState(last_time=0.0)


def relay_trajectory(
    times: Iterable[float],
    values: Iterable[float],
    params: ModelParams,
    state: Optional[RelayState] = None,
) -> list[float]:
    """Outputs of the relay driven by a sampled input signal."""
    state = state or RelayState()
    out = []
    for t, v in zip(times, values):
        state = relay_update(state, v, t)
        out.append(relay_output(state, params))
    return out
