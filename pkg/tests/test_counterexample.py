from fractions import Fraction

import pytest

from rattling.counterexample import (
    P_HIGH,
    P_LOW,
    accumulation_bands,
    build_counterexample,
    triangular_frequencies,
)
from rattling.errors import DomainError


@pytest.fixture(scope="module")
def big():
    return build_counterexample(10)


def test_frequencies():
    p = triangular_frequencies(40)
    assert p[0] == P_LOW
    assert all(P_LOW <= x <= P_HIGH for x in p)
    assert all(abs(b - a) == Fraction(1, j + 3) for j, (a, b) in enumerate(zip(p, p[1:]), start=1))
    ratios = [float(a / b) for a, b in zip(p[20:], p[21:])]
    assert max(abs(r - 1) for r in ratios) < 0.2
    # the wave reaches both halves of the band repeatedly
    assert min(p[10:]) < Fraction(2, 5) and max(p[10:]) > Fraction(3, 5)
    with pytest.raises(DomainError):
        triangular_frequencies(3, Fraction(3, 4))


def test_lengths(big):
    for j in range(1, big.levels):
        assert big.L[j] % big.p[j].denominator == 0
        assert big.l[j] == big.p[j] * big.L[j]
        assert big.l[j] >= big.M[j] * (j + 1)
    assert big.M[1] == big.L[0]


def test_rank_membership_consistency(big):
    assert big.is_member(0)
    for j in range(1, big.levels + 1):
        assert big.node_by_rank(big.m[j]) == big.M[j] or not big.is_member(big.M[j])
    prev = 0
    for i in range(1, min(big.m[-1], 3000) + 1):
        k = big.node_by_rank(i)
        assert k > prev and big.is_member(k) and big.is_member(-k)
        assert big.count_p(k + 1) == i
        prev = k
    members = [n for n in range(1, big.M[4] + 1) if big.is_member(n)]
    assert len(members) == big.m[4]
    assert all(big.prefix_count(n) == sum(1 for k in members if k <= n) for n in range(0, big.M[4] + 1, 7))


def test_density_tracks_frequency(big):
    for j in range(2, big.levels + 1):
        assert abs(big.density(j) - big.p[j - 1]) <= Fraction(big.M[j - 1], big.M[j])


def test_density_oscillates():
    dens = [float(build_counterexample(12).density(j)) for j in range(1, 13)]
    bands = accumulation_bands(dens, 0.05)
    assert len(bands) >= 2


def test_sampled_metric(big):
    values = [big.sampled_metric(j) for j in range(4, 11)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert big.sampled_metric(6, grid=256) >= big.sampled_metric(6, grid=8) - 1e-15
    with pytest.raises(DomainError):
        big.sampled_metric(11)


def test_domain(big):
    with pytest.raises(DomainError):
        build_counterexample(1)
    with pytest.raises(DomainError):
        big.node_by_rank(0)
    with pytest.raises(DomainError):
        big.is_member(big.M[-1] + 1)


def test_bands():
    assert accumulation_bands([0.1, 0.11, 0.5, 0.9, 0.91, 0.92], 0.05) == [(0.1, 0.11, 2), (0.9, 0.92, 3)]
    assert accumulation_bands([], 0.1) == []
