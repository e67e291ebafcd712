"""A pattern that is quasi-uniform yet has no asymptotic frequency.

The positive axis is cut into consecutive segments of lengths
``L_1, L_2, ...`` with ``M_j = L_1 + ... + L_j``.  Inside segment ``j + 1``
the node ``n = M_j + r`` (``1 <= r <= L_{j+1}``) is a member iff

    floor(r p_{j+1}) > floor((r - 1) p_{j+1}),

so the segment carries ``l_{j+1} = p_{j+1} L_{j+1}`` members and
``m_j = l_1 + ... + l_j`` counts the members in ``(0, M_j]``.

Frequencies ``p_j`` move along a triangular wave between 1/3 and 2/3 with
shrinking steps ``1/(j + 3)`` (so ``p_j / p_{j+1} -> 1``, while the divergent
step sum keeps the wave sweeping the whole band).  Lengths grow so
fast (``l_{j+1} >= M_j (j + 1)``) that ``m_j / M_j`` follows ``p_j`` and keeps
oscillating.  All quantities are exact: fractions and Python integers.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError

__all__ = [
    "BigPatternSet",
    "build_counterexample",
    "triangular_frequencies",
    "accumulation_bands",
]

P_LOW = Fraction(1, 3)
P_HIGH = Fraction(2, 3)


def triangular_frequencies(levels: int, start: Fraction = P_LOW) -> list[Fraction]:
    """``p_1, ..., p_levels`` on the triangular wave.

    Step ``j`` has size exactly ``1/(j + 3)``.  When a step would leave
    ``[1/3, 2/3]`` the direction flips before the step is taken, so no step is
    ever shortened.
    """
    if not P_LOW <= start <= P_HIGH:
        raise DomainError("start must lie in [1/3, 2/3]")
    p = [Fraction(start)]
    up = True
    for j in range(1, levels):
        step = Fraction(1, j + 3)
        nxt = p[-1] + step if up else p[-1] - step
        if not P_LOW <= nxt <= P_HIGH:
            up = not up
            nxt = p[-1] + step if up else p[-1] - step
        p.append(nxt)
    return p


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@dataclass(frozen=True)
class BigPatternSet:
    """Segment data of the construction; index ``j`` is 1-based as in the text.

    ``M[0] = m[0] = 0``; ``p[j-1]``, ``L[j-1]``, ``l[j-1]`` describe segment ``j``.
    """

    p: tuple[Fraction, ...]
    L: tuple[int, ...]
    l: tuple[int, ...]
    M: tuple[int, ...]
    m: tuple[int, ...]

    @property
    def levels(self) -> int:
        return len(self.p)

    def _segment_of_node(self, n: int) -> int:
        """``s`` with ``M_s < n <= M_{s+1}``."""
        if not 0 < n <= self.M[-1]:
            raise DomainError(f"node {n} outside (0, M_levels]")
        return bisect.bisect_left(self.M, n) - 1

    def is_member(self, n: int) -> bool:
        n = abs(int(n))
        if n == 0:
            return True
        s = self._segment_of_node(n)
        r = n - self.M[s]
        pf = self.p[s]
        a, b = pf.numerator, pf.denominator
        return (r * a) // b > ((r - 1) * a) // b

    def prefix_count(self, n: int) -> int:
        """Members in ``[1, n]``."""
        if n <= 0:
            return 0
        s = self._segment_of_node(n)
        r = n - self.M[s]
        pf = self.p[s]
        return self.m[s] + (r * pf.numerator) // pf.denominator

    def count_p(self, n: int) -> int:
        """Members in ``[1, n - 1]``."""
        if n < 1:
            raise DomainError("p(n) is defined for n >= 1")
        return self.prefix_count(n - 1)

    def node_by_rank(self, i: int) -> int:
        """The ``i``-th positive member, ``M_s + ceil((i - m_s) / p_{s+1})``."""
        if not 1 <= i <= self.m[-1]:
            raise DomainError(f"rank {i} outside [1, {self.m[-1]}]")
        s = bisect.bisect_left(self.m, i) - 1
        rho = i - self.m[s]
        pf = self.p[s]
        return self.M[s] + _ceil_div(rho * pf.denominator, pf.numerator)

    def density(self, j: int) -> Fraction:
        """``m_j / M_j``."""
        return Fraction(self.m[j], self.M[j])

    def sampled_metric(self, j: int, grid: int = 64) -> float:
        """Quasi-uniformity metric at ``n = M_j`` from sampled ranks.

        With ``P = p(M_j) = m_j - 1`` the metric is
        ``max_i |k_i / M_j - i / P|`` over ``1 <= i <= P``.  Within a segment
        ``k_i`` is affine in ``i`` up to a ceiling, so the sample consists of
        both ends of every segment plus ``grid`` evenly spaced ranks per
        segment.
        """
        if not 1 <= j <= self.levels:
            raise DomainError(f"level {j} outside [1, {self.levels}]")
        n = self.M[j]
        big_p = self.m[j] - 1
        if big_p < 1:
            raise DomainError(f"p(M_{j}) = 0: the metric is undefined")
        ranks = set()
        for s in range(j):
            lo, hi = self.m[s] + 1, min(self.m[s + 1], big_p)
            if lo > hi:
                continue
            ranks.update((lo, hi))
            span = hi - lo
            ranks.update(lo + span * q // grid for q in range(1, grid))
        worst = Fraction(0)
        for i in ranks:
            dev = abs(Fraction(self.node_by_rank(i), n) - Fraction(i, big_p))
            worst = max(worst, dev)
        return float(worst)


def build_counterexample(levels: int, start: Fraction = P_LOW) -> BigPatternSet:
    """Construct ``levels`` segments with exact arithmetic.

    ``L_1`` is the denominator of ``p_1``; afterwards ``L_{j+1}`` is the
    smallest multiple of ``denominator(p_{j+1})`` with
    ``p_{j+1} L_{j+1} >= M_j (j + 1)``.
    """
    if levels < 2:
        raise DomainError("levels must be at least 2")
    p = triangular_frequencies(levels, start)
    L, l, M, m = [], [], [0], [0]
    for j, pj in enumerate(p):
        d = pj.denominator
        if j == 0:
            length = d
        else:
            # segment j + 1 needs p L >= M_j (j + 1); L = d q gives p L = a q
            need = M[-1] * (j + 1)
            length = d * max(1, _ceil_div(need, pj.numerator))
        count = pj.numerator * (length // d)
        L.append(length)
        l.append(count)
        M.append(M[-1] + length)
        m.append(m[-1] + count)
    return BigPatternSet(tuple(p), tuple(L), tuple(l), tuple(M), tuple(m))


def accumulation_bands(values: Sequence[float], gap: float) -> list[tuple[float, float, int]]:
    """Cluster sorted values, splitting wherever neighbours differ by more than ``gap``.

    Returns ``(low, high, count)`` for every cluster with at least two values.
    """
    xs = sorted(values)
    bands, start = [], 0
    for k in range(1, len(xs) + 1):
        if k == len(xs) or xs[k] - xs[k - 1] > gap:
            if k - start >= 2:
                bands.append((xs[start], xs[k - 1], k - start))
            start = k
    return bands
