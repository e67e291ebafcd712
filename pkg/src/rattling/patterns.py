"""Symmetric sets of switching nodes and their statistics.

A pattern ``K = {0, +-k_1, +-k_2, ...}`` with ``0 < k_1 < k_2 < ...`` is
stored through its positive members up to a resolution limit ``n_max``:
membership of ``|n| <= n_max`` is known, beyond it is not.

Counting convention: ``p(n)`` is the number of members in ``[1, n - 1]``
and ``q(n) = n - p(n)``.  Ranks are signed, ``k_{-i} = -k_i``, ``k_0 = 0``.

File formats
------------
JSON (``save_json``): an object with ``n_max`` and, depending on how the set
was made, ``alpha`` / ``beta`` (strings for exact fractions, numbers
otherwise) and/or ``explicit_nodes`` (list of positive members).  The
counterexample is described instead by ``counterexample_levels`` (and its
``start`` frequency); such files are not loadable as a :class:`PatternSet`.
Membership CSV (``membership_csv``): header ``n,member``, rows ``n`` from 0
to ``n_max`` with ``member`` in ``{0, 1}``.
"""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Union

import numpy as np

from .errors import DomainError
from .events import EventLog

__all__ = [
    "PatternSet",
    "count_p",
    "count_q",
    "quasi_uniformity_metric",
    "gen_quasiperiodic",
    "quasiperiodic_member",
    "check_periodic_window",
    "pattern_from_log",
]

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class PatternSet:
    """Positive members in increasing order, known up to ``n_max``."""

    positive_nodes: tuple[int, ...]
    n_max: int
    contains_zero: bool = True
    description: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        nodes = tuple(int(k) for k in self.positive_nodes)
        object.__setattr__(self, "positive_nodes", nodes)
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise DomainError("positive_nodes must be strictly increasing")
        if nodes and (nodes[0] < 1 or nodes[-1] > self.n_max):
            raise DomainError("positive_nodes must lie in [1, n_max]")
        if not self.contains_zero:
            raise DomainError("switching patterns always contain node 0")

    def _check_range(self, n: int) -> None:
        if abs(n) > self.n_max:
            raise DomainError(f"membership of {n} is unknown (resolved up to {self.n_max})")

    def __contains__(self, n: int) -> bool:
        n = abs(int(n))
        self._check_range(n)
        if n == 0:
            return True
        i = bisect.bisect_left(self.positive_nodes, n)
        return i < len(self.positive_nodes) and self.positive_nodes[i] == n

    def node(self, i: int) -> int:
        """Signed rank lookup ``k_i`` with ``k_0 = 0`` and ``k_{-i} = -k_i``."""
        if i == 0:
            return 0
        k = self.positive_nodes[abs(i) - 1]
        return k if i > 0 else -k

    def members(self) -> list[int]:
        """All members in ``[-n_max, n_max]``, increasing."""
        pos = list(self.positive_nodes)
        return [-k for k in reversed(pos)] + [0] + pos

    def indicator(self) -> np.ndarray:
        """Boolean array over ``n = 0..n_max``."""
        out = np.zeros(self.n_max + 1, dtype=bool)
        out[0] = True
        out[list(self.positive_nodes)] = True
        return out

    # -- I/O -------------------------------------------------------------
    def membership_csv(self) -> str:
        ind = self.indicator()
        return "n,member\n" + "".join(f"{n},{int(b)}\n" for n, b in enumerate(ind))

    def to_json(self) -> dict:
        out = {"n_max": self.n_max}
        out.update({k: _encode(v) for k, v in self.description.items()})
        if not {"alpha", "beta"} <= out.keys():
            out["explicit_nodes"] = list(self.positive_nodes)
        return out

    def save_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def from_json(cls, obj: dict) -> "PatternSet":
        if "counterexample_levels" in obj:
            raise DomainError("counterexample descriptions are rebuilt with build_counterexample()")
        n_max = int(obj["n_max"])
        if "explicit_nodes" in obj:
            desc = {k: _decode(obj[k]) for k in ("alpha", "beta") if k in obj}
            return cls(tuple(obj["explicit_nodes"]), n_max, description=desc)
        return gen_quasiperiodic(_decode(obj["alpha"]), _decode(obj["beta"]), n_max)

    @classmethod
    def load_json(cls, path) -> "PatternSet":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def _encode(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


def _decode(v):
    if isinstance(v, str):
        return Fraction(v)
    return v


def count_p(pattern: PatternSet, n: int) -> int:
    """Number of members in ``[1, n - 1]``."""
    if n < 1:
        raise DomainError("p(n) is defined for n >= 1")
    pattern._check_range(n - 1)
    return bisect.bisect_left(pattern.positive_nodes, n)


def count_q(pattern: PatternSet, n: int) -> int:
    """Number of non-members in ``[1, n - 1]`` plus one, i.e. ``n - p(n)``."""
    return n - count_p(pattern, n)


def quasi_uniformity_metric(pattern: PatternSet, n: int) -> float:
    """``max_{|i| <= p(n)} |k_i / n - i / p(n)|`` at a positive member ``n``.

    By the odd symmetry of ``k_i`` the supremum over negative ranks equals
    that over positive ones.
    """
    if n <= 0 or n not in pattern:
        raise DomainError(f"{n} is not a positive member of the pattern")
    p = count_p(pattern, n)
    if p == 0:
        raise DomainError(f"p({n}) = 0: the metric is undefined")
    k = np.asarray(pattern.positive_nodes[:p], dtype=float)
    i = np.arange(1, p + 1, dtype=float)
    return float(np.max(np.abs(k / n - i / p)))


def quasiperiodic_member(n: int, alpha: Number, beta: Number) -> bool:
    """``floor(|n| alpha + beta) > floor((|n| - 1) alpha + beta)``; 0 is always a member."""
    n = abs(int(n))
    if n == 0:
        return True
    return math.floor(n * alpha + beta) > math.floor((n - 1) * alpha + beta)


def gen_quasiperiodic(alpha: Number, beta: Number, n_max: int) -> PatternSet:
    """Quasiperiodic pattern with frequency ``alpha`` and phase ``beta``.

    Fractions (or ints) are evaluated exactly; floats use floating-point
    floors.
    """
    if not 0 < alpha <= 1:
        raise DomainError("alpha must lie in (0, 1]")
    if not 0 <= beta < 1:
        raise DomainError("beta must lie in [0, 1)")
    if n_max < 1:
        raise DomainError("n_max must be positive")
    exact = isinstance(alpha, Rational) and isinstance(beta, Rational)
    if exact:
        a, b = Fraction(alpha), Fraction(beta)
        den = a.denominator * b.denominator
        fl = [(n * a.numerator * b.denominator + b.numerator * a.denominator) // den
              for n in range(n_max + 1)]
        nodes = [n for n in range(1, n_max + 1) if fl[n] > fl[n - 1]]
        desc = {"alpha": a, "beta": b}
    else:
        n = np.arange(n_max + 1, dtype=float)
        fl = np.floor(n * float(alpha) + float(beta))
        nodes = (np.flatnonzero(fl[1:] > fl[:-1]) + 1).tolist()
        desc = {"alpha": float(alpha), "beta": float(beta)}
    return PatternSet(tuple(nodes), n_max, description=desc)


def check_periodic_window(pattern: PatternSet, p1: int, p2: int, j_min: int, j_max: int) -> bool:
    """True iff each window ``{j+1, ..., j+p1+p2}``, ``j_min <= j <= j_max``, holds exactly ``p1`` members."""
    if p1 < 1 or p2 < 0 or j_min > j_max:
        raise DomainError("need p1 >= 1, p2 >= 0 and j_min <= j_max")
    width = p1 + p2
    pattern._check_range(j_max + width)
    ind = pattern.indicator().astype(int)
    csum = np.concatenate([[0], np.cumsum(ind)])
    j = np.arange(j_min, j_max + 1)
    counts = csum[j + width + 1] - csum[j + 1]
    return bool(np.all(counts == p1))


def pattern_from_log(log_: EventLog) -> PatternSet:
    """Switching pattern of a run, resolved up to its largest switched node.

    A node below the largest switched node that has not switched is treated
    as non-switching; nodes above it are left unclassified.
    """
    nodes = sorted(n for n in log_.nodes if n > 0)
    n_max = nodes[-1] if nodes else 0
    return PatternSet(tuple(nodes), n_max, description={"source": "event log"})
