"""Subset-query oracles: honest construction, fault injection, violation
witnesses, and the descent algorithms that turn bad answers into witnesses."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Union

from .errors import ContractError
from .kneser import Coloring
from .sets import FamilyDescriptor, Subset


class SubsetOracle:
    """Total oracle on (subset, color) pairs answering whether the subset
    contains a family member of that color."""

    n: int
    m: int

    def query(self, D: Subset, i: int) -> int:
        raise NotImplementedError

    def _check(self, D: Subset, i: int) -> None:
        if D.n != self.n:
            raise ContractError("mismatched ground-set sizes")
        if not 1 <= i <= self.m:
            raise ContractError(f"color {i} outside [1, {self.m}]")


class HonestOracle(SubsetOracle):
    """S(D, i) = 1 iff some family member B with B contained in D has color i.

    Answers are memoized; the valuation layer asks the same suffix sets over
    and over.
    """

    def __init__(self, family: FamilyDescriptor, coloring: Coloring):
        if coloring.n != family.n:
            raise ContractError("coloring and family disagree on the ground set")
        self.family = family
        self.coloring = coloring
        self.n = family.n
        self.m = coloring.m
        self._memo: dict[tuple[int, int], int] = {}

    def query(self, D: Subset, i: int) -> int:
        self._check(D, i)
        key = (D.mask, i)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        ans = 0
        for b in self.family.members_within(D):
            if self.coloring(b) == i:
                ans = 1
                break
        self._memo[key] = ans
        return ans


class FlipOracle(SubsetOracle):
    """Wrapper that inverts the base oracle's answer on the listed (set, color)
    pairs.  Test fixture for the violation machinery."""

    def __init__(self, base: SubsetOracle, flips: set[tuple[int, int]]):
        self.base = base
        self.n = base.n
        self.m = base.m
        self.flips = frozenset(flips)

    def query(self, D: Subset, i: int) -> int:
        ans = self.base.query(D, i)
        if (D.mask, i) in self.flips:
            return 1 - ans
        return ans


def honest_subset_oracle(family: FamilyDescriptor, coloring: Coloring) -> SubsetOracle:
    return HonestOracle(family, coloring)


def corrupt_oracle(oracle: SubsetOracle, fault: Optional[dict], seed: int = 0) -> SubsetOracle:
    """Apply a fault spec to an oracle.

    Fault spec keys: "flips" (explicit [{"set": [...], "color": i}, ...]) and
    "random_flips" (a count of seeded uniform (set, color) pairs).  An empty
    spec returns the oracle unchanged.
    """
    if not fault:
        return oracle
    flips: set[tuple[int, int]] = set()
    for entry in fault.get("flips", ()):
        D = Subset.of(oracle.n, entry["set"])
        i = int(entry["color"])
        if not 1 <= i <= oracle.m:
            raise ContractError(f"fault color {i} outside [1, {oracle.m}]")
        flips.add((D.mask, i))
    count = int(fault.get("random_flips", 0))
    if count:
        rng = random.Random(seed)
        target = len(flips) + count
        while len(flips) < target:
            flips.add((rng.randrange(1 << oracle.n), rng.randrange(1, oracle.m + 1)))
    if not flips:
        return oracle
    return FlipOracle(oracle, flips)


@dataclass(frozen=True)
class FalseNegative:
    """B is a member of color i inside D, yet S(D, i) = 0."""

    member: Subset
    superset: Subset
    color: int

    def to_json(self) -> dict:
        return {"type": "false_negative", "member": self.member.to_json(),
                "superset": self.superset.to_json(), "color": self.color}


@dataclass(frozen=True)
class FalsePositive:
    """S(D, i) = 1, every single-element-removal child answers 0, and D is not
    a member of color i."""

    subset: Subset
    color: int

    def to_json(self) -> dict:
        return {"type": "false_positive", "subset": self.subset.to_json(),
                "color": self.color}


Violation = Union[FalseNegative, FalsePositive]


def violation_from_json(n: int, data: dict) -> Violation:
    if data["type"] == "false_negative":
        return FalseNegative(Subset.of(n, data["member"]),
                             Subset.of(n, data["superset"]), int(data["color"]))
    if data["type"] == "false_positive":
        return FalsePositive(Subset.of(n, data["subset"]), int(data["color"]))
    raise ContractError(f"unknown violation type {data['type']!r}")


@dataclass
class KneserSQInstance:
    """A subset-query search instance: family, coloring circuit, subset oracle,
    and the uniformity r of the target hypergraph."""

    family: FamilyDescriptor
    coloring: Coloring
    oracle: SubsetOracle
    r: int

    def __post_init__(self):
        if self.coloring.n != self.family.n or self.oracle.n != self.family.n:
            raise ContractError("family, coloring, and oracle disagree on the ground set")
        if self.oracle.m != self.coloring.m:
            raise ContractError("oracle and coloring disagree on the color count")
        if self.r < 2:
            raise ContractError("need r >= 2")

    @classmethod
    def honest(cls, family: FamilyDescriptor, coloring: Coloring, r: int) -> "KneserSQInstance":
        return cls(family, coloring, honest_subset_oracle(family, coloring), r)

    def with_fault(self, fault: Optional[dict], seed: int = 0) -> "KneserSQInstance":
        return KneserSQInstance(self.family, self.coloring,
                                corrupt_oracle(self.oracle, fault, seed), self.r)


def descend_colored_subset(inst: KneserSQInstance, D: Subset,
                           i: int) -> Union[Subset, Violation]:
    """Walk down from D while the oracle keeps answering 1.

    Returns a member of color i inside D, or a false positive at the set where
    every child answers 0.  Children are scanned by ascending removed element;
    the walk shrinks D each round, so it ends within n steps.
    """
    if inst.oracle.query(D, i) != 1:
        raise ContractError("descend requires S(D, i) = 1")
    steps = 0
    while True:
        if inst.family.contains(D) and inst.coloring(D) == i:
            return D
        child = None
        for e in D.elements():
            cand = D.remove(e)
            if inst.oracle.query(cand, i) == 1:
                child = cand
                break
        if child is None:
            return FalsePositive(D, i)
        D = child
        steps += 1
        assert steps <= inst.family.n, "descent exceeded the ground-set size"


def violation_from_nested(inst: KneserSQInstance, D1: Subset, D2: Subset,
                          i: int) -> Violation:
    """Turn a nested pair D1 within D2 with S(D1, i) = 1 and S(D2, i) = 0 into
    an explicit violation witness."""
    if not D1.issubset(D2):
        raise ContractError("need D1 contained in D2")
    if inst.oracle.query(D1, i) != 1 or inst.oracle.query(D2, i) != 0:
        raise ContractError("need S(D1, i) = 1 and S(D2, i) = 0")
    if inst.family.contains(D1) and inst.coloring(D1) == i:
        return FalseNegative(D1, D2, i)
    got = descend_colored_subset(inst, D1, i)
    if isinstance(got, Subset):
        return FalseNegative(got, D2, i)
    return got


def check_violation(inst: KneserSQInstance, v: Violation) -> bool:
    """Evaluate the violation predicates literally against the instance."""
    if isinstance(v, FalseNegative):
        B, D, i = v.member, v.superset, v.color
        if B.n != inst.family.n or D.n != inst.family.n or not 1 <= i <= inst.coloring.m:
            return False
        return (inst.family.contains(B) and B.issubset(D)
                and inst.coloring(B) == i and inst.oracle.query(D, i) == 0)
    if isinstance(v, FalsePositive):
        D, i = v.subset, v.color
        if D.n != inst.family.n or not 1 <= i <= inst.coloring.m:
            return False
        if inst.oracle.query(D, i) != 1:
            return False
        for e in D.elements():
            if inst.oracle.query(D.remove(e), i) != 0:
                return False
        return not (inst.family.contains(D) and inst.coloring(D) == i)
    return False
