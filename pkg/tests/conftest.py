"""Shared test helpers: independent brute-force oracles and random generators.

Everything here recomputes expected values by a route different from the
library's, so the tests stay honest cross-checks.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from kneserdiv.measure import MeasurableSet
from kneserdiv.sets import FamilyDescriptor, Subset


def all_subsets(n):
    """Every subset of [n] as a Subset, in mask order."""
    return [Subset(n, mask) for mask in range(1 << n)]


def brute_members(family: FamilyDescriptor) -> list[Subset]:
    """Family members found by scanning every subset mask (independent of the
    library's combination-based enumeration)."""
    return [b for b in all_subsets(family.n) if len(b) and family.contains(b)]


def brute_min_member(family: FamilyDescriptor, D: Subset):
    """Order-minimal member inside D via pairwise comparisons."""
    best = None
    for b in brute_members(family):
        if b.issubset(D) and (best is None or family.order_leq(b, best)):
            best = b
    return best


def brute_alt(x: tuple[int, ...]) -> int:
    """Longest alternating subsequence by exhaustive subsequence search."""
    positions = [j for j, v in enumerate(x) if v]
    best = 0
    for size in range(len(positions), 0, -1):
        for combo in itertools.combinations(positions, size):
            if all(x[a] != x[b] for a, b in zip(combo, combo[1:])):
                return size
    return best


def brute_valuation_by_levels(oracle, i: int, x) -> Fraction:
    """Independent valuation: integrate the oracle's answer over level sets."""
    n = len(x)
    total = Fraction(0)
    prev = Fraction(0)
    for level in sorted(set(x)):
        if level > 0:
            mask = sum(1 << (j - 1) for j in range(1, n + 1) if x[j - 1] >= level)
            total += (level - prev) * oracle.query(Subset(n, mask), i)
            prev = level
    return total


def valuations_over_all_tiebreaks(oracle, i: int, x) -> set[Fraction]:
    """Telescoping value under every sort permutation consistent with x."""
    n = len(x)
    values = set()
    for perm in itertools.permutations(range(1, n + 1)):
        if any(x[perm[j] - 1] > x[perm[j + 1] - 1] for j in range(n - 1)):
            continue
        total = Fraction(0)
        prev = Fraction(0)
        for j in range(n):
            cur = x[perm[j] - 1]
            mask = sum(1 << (perm[t] - 1) for t in range(j, n))
            total += (cur - prev) * oracle.query(Subset(n, mask), i)
            prev = cur
        values.add(total)
    return values


def random_mset(rng: random.Random, denominator: int,
                max_intervals: int = 3) -> MeasurableSet:
    """Random union of up to max_intervals grid intervals."""
    count = rng.randint(0, max_intervals)
    if count == 0:
        return MeasurableSet.empty()
    points = sorted(rng.sample(range(denominator + 1), 2 * count))
    return MeasurableSet((Fraction(points[2 * t], denominator),
                          Fraction(points[2 * t + 1], denominator))
                         for t in range(count))


def random_nested_pair(rng: random.Random, denominator: int):
    """A pair (E1, E2) with E1 contained in E2."""
    outer = random_mset(rng, denominator)
    inner = outer.intersection(random_mset(rng, denominator))
    return inner, outer
