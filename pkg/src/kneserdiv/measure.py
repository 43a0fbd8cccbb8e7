"""Exact measurable-set arithmetic on [0, 1] and the suffix-query valuations.

All arithmetic is exact rational; the strict inequalities downstream make
floating point unacceptable.  A measurable set is a finite union of disjoint
closed-open intervals with rational endpoints inside [0, 1].
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .errors import ContractError
from .oracle import (KneserSQInstance, SubsetOracle, Violation,
                     violation_from_nested)
from .sets import Subset

Rational = Fraction
MassVector = tuple  # tuple[Fraction, ...], entries in [0, 1]

ZERO = Fraction(0)
ONE = Fraction(1)


def rational(value: Union[str, int, float, Fraction]) -> Fraction:
    """Parse a rational from "p/q" or decimal-string form (floats rejected)."""
    if isinstance(value, float):
        raise ContractError("refusing a float where an exact rational is required")
    return Fraction(value)


class MeasurableSet:
    """Finite union of disjoint, non-adjacent closed-open intervals in [0, 1]."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[tuple[Fraction, Fraction]] = (),
                 _normalized: bool = False):
        if _normalized:
            self.intervals = tuple(intervals)
            return
        cleaned = []
        for lo, hi in intervals:
            lo, hi = Fraction(lo), Fraction(hi)
            if not (ZERO <= lo and hi <= ONE):
                raise ContractError(f"interval [{lo}, {hi}) leaves [0, 1]")
            if lo > hi:
                raise ContractError(f"interval [{lo}, {hi}) is reversed")
            if lo < hi:
                cleaned.append((lo, hi))
        cleaned.sort()
        merged: list[tuple[Fraction, Fraction]] = []
        for lo, hi in cleaned:
            if merged and lo <= merged[-1][1]:
                last_lo, last_hi = merged[-1]
                merged[-1] = (last_lo, max(last_hi, hi))
            else:
                merged.append((lo, hi))
        self.intervals = tuple(merged)

    @classmethod
    def empty(cls) -> "MeasurableSet":
        return cls((), _normalized=True)

    @classmethod
    def unit(cls) -> "MeasurableSet":
        return cls(((ZERO, ONE),), _normalized=True)

    @classmethod
    def of(cls, *pairs) -> "MeasurableSet":
        return cls((rational(a), rational(b)) for a, b in pairs)

    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), ZERO)

    def contains_point(self, x: Fraction) -> bool:
        for lo, hi in self.intervals:
            if lo <= x < hi:
                return True
            if lo > x:
                break
        return False

    def _combine(self, other: "MeasurableSet", keep: Callable[[bool, bool], bool]) -> "MeasurableSet":
        points = sorted({ZERO, ONE,
                         *(p for iv in self.intervals for p in iv),
                         *(p for iv in other.intervals for p in iv)})
        out = []
        for lo, hi in zip(points, points[1:]):
            if keep(self.contains_point(lo), other.contains_point(lo)):
                if out and out[-1][1] == lo:
                    out[-1] = (out[-1][0], hi)
                else:
                    out.append((lo, hi))
        return MeasurableSet(out, _normalized=True)

    def union(self, other: "MeasurableSet") -> "MeasurableSet":
        return self._combine(other, lambda a, b: a or b)

    def intersection(self, other: "MeasurableSet") -> "MeasurableSet":
        return self._combine(other, lambda a, b: a and b)

    def difference(self, other: "MeasurableSet") -> "MeasurableSet":
        return self._combine(other, lambda a, b: a and not b)

    def symmetric_difference(self, other: "MeasurableSet") -> "MeasurableSet":
        return self._combine(other, lambda a, b: a != b)

    def complement(self) -> "MeasurableSet":
        return MeasurableSet.unit().difference(self)

    def measure_within(self, lo: Fraction, hi: Fraction) -> Fraction:
        total = ZERO
        for a, b in self.intervals:
            if b <= lo:
                continue
            if a >= hi:
                break
            total += min(b, hi) - max(a, lo)
        return total

    def __eq__(self, other) -> bool:
        return isinstance(other, MeasurableSet) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:
        body = " u ".join(f"[{lo}, {hi})" for lo, hi in self.intervals)
        return f"MeasurableSet({body or 'empty'})"

    def to_json(self) -> dict:
        return {"intervals": [[str(lo), str(hi)] for lo, hi in self.intervals]}

    @classmethod
    def from_json(cls, data: dict) -> "MeasurableSet":
        return cls((rational(a), rational(b)) for a, b in data["intervals"])


def measure(E: MeasurableSet) -> Fraction:
    return E.measure()


def sym_diff_measure(E1: MeasurableSet, E2: MeasurableSet) -> Fraction:
    return E1.symmetric_difference(E2).measure()


def subinterval(j: int, n: int) -> MeasurableSet:
    """I_j as a measurable set: the j-th of n equal pieces of [0, 1]."""
    if not 1 <= j <= n:
        raise ContractError(f"index {j} outside [1, {n}]")
    return MeasurableSet(((Fraction(j - 1, n), Fraction(j, n)),), _normalized=True)


def indicator_set(B: Subset, n: int) -> MeasurableSet:
    """Union of the subintervals I_j for j in B."""
    if B.n != n:
        raise ContractError("mismatched ground-set sizes")
    return MeasurableSet(((Fraction(j - 1, n), Fraction(j, n)) for j in B.elements()))


def mass_vector(E: MeasurableSet, n: int) -> MassVector:
    """x_j = n * measure(E intersect I_j) with I_j the open j-th subinterval.

    Endpoints have measure zero, so the closed-open representation computes
    the same masses.
    """
    if n < 1:
        raise ContractError("need n >= 1")
    return tuple(n * E.measure_within(Fraction(j - 1, n), Fraction(j, n))
                 for j in range(1, n + 1))


def _sorted_order(x: Sequence[Fraction]) -> list[int]:
    # ascending masses, ties broken by ascending index; returns 1-based indices
    return sorted(range(1, len(x) + 1), key=lambda j: (x[j - 1], j))


def _suffix_sets(order: list[int], n: int) -> list[Subset]:
    # T_j = {order[j-1], ..., order[n-1]} for j = 1..n
    suffixes: list[Subset] = [None] * n  # type: ignore[list-item]
    mask = 0
    for pos in range(n - 1, -1, -1):
        mask |= 1 << (order[pos] - 1)
        suffixes[pos] = Subset(n, mask)
    return suffixes


def valuation_on_masses(S: SubsetOracle, i: int, x: Sequence[Fraction]) -> Fraction:
    """Telescoping valuation: sort x ascending (ties by index) and accumulate
    (x_(j) - x_(j-1)) * S(suffix_j, i) with x_(0) = 0.

    The coefficients are non-negative and sum to at most 1, so the value lies
    in [0, 1] no matter what the oracle answers.
    """
    n = len(x)
    order = _sorted_order(x)
    suffixes = _suffix_sets(order, n)
    total = ZERO
    prev = ZERO
    for pos in range(n):
        cur = x[order[pos] - 1]
        step = cur - prev
        if step and S.query(suffixes[pos], i):
            total += step
        prev = cur
    return total


def threshold_on_masses(S: SubsetOracle, i: int, x: Sequence[Fraction]) -> Fraction:
    """Largest level a with S({j : x_j >= a}, i) = 1, else 0.

    The level set is constant between consecutive mass values, so only the
    distinct masses need to be scanned, from the largest down.
    """
    n = len(x)
    for level in sorted(set(x), reverse=True):
        mask = 0
        for j in range(1, n + 1):
            if x[j - 1] >= level:
                mask |= 1 << (j - 1)
        if S.query(Subset(n, mask), i):
            return level
    return ZERO


def evaluate_valuation(S: SubsetOracle, i: int, E: MeasurableSet, n: int) -> Fraction:
    """v_i(E): the telescoping valuation evaluated at the mass vector of E."""
    return valuation_on_masses(S, i, mass_vector(E, n))


def threshold_value(S: SubsetOracle, i: int, E: MeasurableSet, n: int) -> Fraction:
    """a^E_i: the largest level whose super-level index set answers 1."""
    return threshold_on_masses(S, i, mass_vector(E, n))


def valuation_violation_witness(inst: KneserSQInstance, E: MeasurableSet,
                                i: int) -> Violation:
    """Given v_i(E) != a^E_i, locate a suffix pair where the oracle's answers
    fail monotonicity and convert it into a violation witness."""
    n = inst.family.n
    x = mass_vector(E, n)
    if valuation_on_masses(inst.oracle, i, x) == threshold_on_masses(inst.oracle, i, x):
        raise ContractError("witness requires v_i(E) != a^E_i")
    order = _sorted_order(x)
    suffixes = _suffix_sets(order, n)
    answers = [inst.oracle.query(T, i) for T in suffixes]
    for pos in range(n - 1):
        if answers[pos] == 0 and answers[pos + 1] == 1:
            return violation_from_nested(inst, suffixes[pos + 1], suffixes[pos], i)
    raise AssertionError("v != a yet the suffix answers are monotone")


def _consistent_threshold(inst: KneserSQInstance, E: MeasurableSet, i: int):
    """Return (x, a) if v_i(E) = a^E_i, else a ready violation."""
    n = inst.family.n
    x = mass_vector(E, n)
    v = valuation_on_masses(inst.oracle, i, x)
    a = threshold_on_masses(inst.oracle, i, x)
    if v != a:
        return x, None, valuation_violation_witness(inst, E, i)
    return x, a, None


def _level_set(x: Sequence[Fraction], level: Fraction) -> Subset:
    n = len(x)
    mask = 0
    for j in range(1, n + 1):
        if x[j - 1] >= level:
            mask |= 1 << (j - 1)
    return Subset(n, mask)


def monotonicity_violation_to_S(inst: KneserSQInstance, E1: MeasurableSet,
                                E2: MeasurableSet, i: int) -> Violation:
    """Turn v_i(E2) < v_i(E1) with E1 inside E2 into an oracle violation.

    Both values are first normalized to threshold form; the level set of E1 at
    its threshold answers 1 while the corresponding level set of E2 answers 0,
    and the two sets nest.
    """
    n = inst.family.n
    if E1.difference(E2).measure() != 0:
        raise ContractError("need E1 contained in E2 (up to measure zero)")
    v1 = evaluate_valuation(inst.oracle, i, E1, n)
    v2 = evaluate_valuation(inst.oracle, i, E2, n)
    if not v2 < v1:
        raise ContractError("monotonicity witness requires v_i(E2) < v_i(E1)")
    x1, a1, bad = _consistent_threshold(inst, E1, i)
    if bad is not None:
        return bad
    x2, a2, bad = _consistent_threshold(inst, E2, i)
    if bad is not None:
        return bad
    assert a2 < a1 and a1 > 0
    D1 = _level_set(x1, a1)
    D2 = _level_set(x2, a1)
    assert inst.oracle.query(D1, i) == 1 and inst.oracle.query(D2, i) == 0
    return violation_from_nested(inst, D1, D2, i)


def lipschitz_violation_to_S(inst: KneserSQInstance, E1: MeasurableSet,
                             E2: MeasurableSet, i: int) -> Violation:
    """Turn |v_i(E1) - v_i(E2)| > n * measure(E1 xor E2) into a violation.

    A monotonicity break against E3 = E1 union E2 is delegated; otherwise the
    threshold of E3 exceeds the threshold of E2 by more than n * delta, which
    nests a positive level set of E3 inside a negative one of E2.

    Note: the telescoping valuation equals the integral of the oracle's answer
    over level sets, which is n-Lipschitz for every oracle, so the checked
    precondition rejects all inputs built from subset queries; the case chain
    is kept for contract completeness.
    """
    n = inst.family.n
    delta = sym_diff_measure(E1, E2)
    v1 = evaluate_valuation(inst.oracle, i, E1, n)
    v2 = evaluate_valuation(inst.oracle, i, E2, n)
    if not abs(v1 - v2) > n * delta:
        raise ContractError("Lipschitz witness requires |v_i(E1) - v_i(E2)| > n * delta")
    if v1 < v2:
        E1, E2 = E2, E1
        v1, v2 = v2, v1
    E3 = E1.union(E2)
    v3 = evaluate_valuation(inst.oracle, i, E3, n)
    if v3 < v1:
        return monotonicity_violation_to_S(inst, E1, E3, i)
    x2, a2, bad = _consistent_threshold(inst, E2, i)
    if bad is not None:
        return bad
    x3, a3, bad = _consistent_threshold(inst, E3, i)
    if bad is not None:
        return bad
    assert a3 > a2 + n * delta
    D3 = _level_set(x3, a3)
    D2 = _level_set(x2, a3 - n * delta)
    assert inst.oracle.query(D3, i) == 1 and inst.oracle.query(D2, i) == 0
    return violation_from_nested(inst, D3, D2, i)
