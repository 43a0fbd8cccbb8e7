"""Approximate consensus division with strict tolerance: divisions of [0, 1],
solution checking, the coloring-to-valuations reduction, a grid-refinement
solver, and the division-to-hyperedge extraction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .errors import ContractError, SolverExhausted
from .kneser import Hyperedge
from .measure import (MeasurableSet, ZERO, ONE, evaluate_valuation,
                      indicator_set, mass_vector, monotonicity_violation_to_S,
                      rational, threshold_on_masses, valuation_violation_witness)
from .oracle import (FalseNegative, KneserSQInstance, Violation,
                     descend_colored_subset)
from .sets import ALLK, FamilyDescriptor, Subset, colorability_defect
from .zptucker import is_prime


@dataclass(frozen=True)
class Division:
    """A partition of [0, 1] into p labelled pieces.

    `cuts` are the cut points in ascending order (duplicates allowed; each
    occurrence counts against the budget); `labels` assigns a piece in [p] to
    every segment between consecutive cuts, with 0 and 1 as implicit sentinels.
    """

    p: int
    cuts: tuple[Fraction, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        if self.p < 2:
            raise ContractError("need p >= 2 pieces")
        if len(self.labels) != len(self.cuts) + 1:
            raise ContractError("need exactly one label per segment")
        prev = ZERO
        for c in self.cuts:
            if not ZERO <= c <= ONE:
                raise ContractError(f"cut {c} outside [0, 1]")
            if c < prev:
                raise ContractError("cuts must be sorted")
            prev = c
        for t in self.labels:
            if not 1 <= t <= self.p:
                raise ContractError(f"label {t} outside [1, {self.p}]")

    def to_json(self) -> dict:
        return {"p": self.p, "cuts": [str(c) for c in self.cuts],
                "labels": list(self.labels)}

    @classmethod
    def from_json(cls, data: dict) -> "Division":
        return cls(int(data["p"]),
                   tuple(rational(c) for c in data["cuts"]),
                   tuple(int(t) for t in data["labels"]))


def pieces(d: Division) -> list[MeasurableSet]:
    """The p label-unions; zero-width segments vanish and the measures sum to 1."""
    bounds = [ZERO, *d.cuts, ONE]
    per_label: list[list[tuple]] = [[] for _ in range(d.p)]
    for seg, t in enumerate(d.labels):
        lo, hi = bounds[seg], bounds[seg + 1]
        if lo < hi:
            per_label[t - 1].append((lo, hi))
    return [MeasurableSet(ivs) for ivs in per_label]


Valuation = Callable[[MeasurableSet], Fraction]


@dataclass
class CondivInstance:
    """m valuation evaluators with a Lipschitz parameter and strict tolerance."""

    p: int
    m: int
    valuations: tuple[Valuation, ...]
    lipschitz: Fraction
    eps: Fraction
    n: int
    source: Optional[KneserSQInstance] = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.valuations) != self.m:
            raise ContractError("need one evaluator per color")
        if not ZERO < self.eps <= ONE:
            raise ContractError("tolerance must lie in (0, 1]")

    def cut_budget(self) -> int:
        return (self.p - 1) * self.m


def default_eps(p: int) -> Fraction:
    return Fraction(1) if p == 2 else Fraction(1, 2)


def mandated_colors(family: FamilyDescriptor, p: int, cd: Optional[int] = None) -> int:
    """Color budget of the search problem this reduction consumes: cd_2 - 1
    for halving, floor((cd_p - 1)/(p - 1)) for p >= 3."""
    if cd is None:
        cd = colorability_defect(family, p,
                                 "formula" if family.kind == ALLK else "bruteforce")
    return cd - 1 if p == 2 else (cd - 1) // (p - 1)


def reduce_kneser_to_condiv(inst: KneserSQInstance, p: int,
                            eps: Optional[Fraction] = None,
                            cd: Optional[int] = None) -> CondivInstance:
    """Package a subset-query coloring instance as valuations over [0, 1].

    The i-th valuation is the telescoping suffix-query evaluation for color i;
    the Lipschitz parameter is the ground-set size n.
    """
    if not is_prime(p):
        raise ContractError(f"p = {p} is not prime")
    if inst.r != p:
        raise ContractError(f"instance has uniformity {inst.r}, reduction wants {p}")
    if cd is None:
        cd = colorability_defect(inst.family, p,
                                 "formula" if inst.family.kind == ALLK else "bruteforce")
    if cd < p:
        raise ContractError(f"degenerate budget: defect {cd} < p = {p}")
    m = mandated_colors(inst.family, p, cd)
    if inst.coloring.m != m:
        raise ContractError(
            f"coloring must use {m} colors for this reduction, got {inst.coloring.m}")
    n = inst.family.n
    if eps is None:
        eps = default_eps(p)

    def make(i: int) -> Valuation:
        return lambda E: evaluate_valuation(inst.oracle, i, E, n)

    return CondivInstance(p, m, tuple(make(i) for i in range(1, m + 1)),
                          Fraction(n), Fraction(eps), n, source=inst)


def check_solution(inst: CondivInstance, d: Division) -> bool:
    """Exact strict check: cut budget respected and every pair of pieces agrees
    to within eps under every valuation, with strict inequality."""
    if d.p != inst.p:
        return False
    if len(d.cuts) > inst.cut_budget():
        return False
    parts = pieces(d)
    for v in inst.valuations:
        vals = [v(A) for A in parts]
        lo, hi = min(vals), max(vals)
        if not hi - lo < inst.eps:
            return False
    return True


@dataclass
class GridSolveResult:
    division: Division
    denominator: int
    examined: int


def grid_solve(inst: CondivInstance, initial_denominator: Optional[int] = None,
               max_doublings: int = 6) -> GridSolveResult:
    """Exhaustive search over cut placements on a rational grid.

    Grid denominators are multiples of n so that cut candidates include every
    subinterval boundary; a boundary cut sits inside no open subinterval and
    costs nothing toward the removal set.  Candidates are ordered by number of
    cuts, then cut positions, then labelings; the first passing division wins.
    On failure the denominator doubles, a configured number of times.
    """
    n = inst.n
    D = initial_denominator or 4 * n
    if D % n:
        D = n * -(-D // n)
    examined = 0
    budget = inst.cut_budget()
    for _ in range(max_doublings + 1):
        grid = [Fraction(i, D) for i in range(D + 1)]
        for ncuts in range(budget + 1):
            for cuts in itertools.combinations_with_replacement(grid, ncuts):
                for labels in itertools.product(range(1, inst.p + 1), repeat=ncuts + 1):
                    d = Division(inst.p, cuts, labels)
                    examined += 1
                    if check_solution(inst, d):
                        return GridSolveResult(d, D, examined)
        D *= 2
    raise SolverExhausted(
        f"no strict solution on grids up to denominator {D // 2}",
        details={"examined": examined, "denominator": D // 2})


def _cut_index_set(d: Division, n: int) -> Subset:
    """Y: the indices whose open subinterval properly contains a cut."""
    mask = 0
    for c in d.cuts:
        scaled = c * n
        if scaled.denominator != 1:
            j = int(scaled) + 1  # strictly inside I_j
            mask |= 1 << (j - 1)
    return Subset(n, mask)


def extract_solution(inst: KneserSQInstance, d: Division, p: int,
                     eps: Optional[Fraction] = None) -> Union[Hyperedge, Violation]:
    """Pull a checked division back to a monochromatic hyperedge or a violation.

    Fewer than cd_p subintervals contain cuts, so whole subintervals of one
    piece hold a family member B; its color is forced to full value on that
    piece, the strict tolerance forces every other piece above 1 - eps, and a
    descent through each piece's threshold level set either finds disjoint
    same-colored members or exposes an oracle violation.
    """
    condiv = reduce_kneser_to_condiv(inst, p, eps=eps)
    if not check_solution(condiv, d):
        raise ContractError("division is not a strict solution of the reduced instance")
    n = inst.family.n
    oracle, coloring, family = inst.oracle, inst.coloring, inst.family
    parts = pieces(d)
    masses = [mass_vector(A, n) for A in parts]
    ycut = _cut_index_set(d, n)
    full_mask = [0] * p
    for j in range(1, n + 1):
        if j in ycut:
            continue
        for t in range(p):
            if masses[t][j - 1] == 1:
                full_mask[t] |= 1 << (j - 1)
                break
        else:
            raise AssertionError(f"subinterval {j} holds no cut yet lies in no piece")
    b_first: Optional[Subset] = None
    t1 = -1
    for t in range(p):
        found = family.min_member_subset(Subset(n, full_mask[t]))
        if found is not None:
            b_first, t1 = found, t
            break
    if b_first is None:
        raise AssertionError(
            "cut budget below the defect guarantees a member inside some piece")
    ell = coloring(b_first)
    if oracle.query(b_first, ell) == 0:
        return FalseNegative(b_first, b_first, ell)
    # b_first's subintervals sit inside piece t1, so its color has full value there
    e_member = indicator_set(b_first, n).intersection(parts[t1])
    v_t1 = condiv.valuations[ell - 1](parts[t1])
    if v_t1 < 1:
        return monotonicity_violation_to_S(inst, e_member, parts[t1], ell)
    targets = range(p) if p >= 3 else [1 - t1]
    edge: list[Subset] = [] if p >= 3 else [b_first]
    for t in targets:
        x = masses[t]
        v_t = condiv.valuations[ell - 1](parts[t])
        a_t = threshold_on_masses(oracle, ell, x)
        if v_t != a_t:
            return valuation_violation_witness(inst, parts[t], ell)
        if p >= 3 and not a_t > Fraction(1, 2):
            raise ContractError(
                "extraction for p >= 3 needs every piece above 1/2; rerun with eps <= 1/2")
        if p == 2 and a_t == 0:
            raise AssertionError("strict tolerance leaves the other piece positive")
        level = Subset(n, sum(1 << (j - 1) for j in range(1, n + 1) if x[j - 1] >= a_t))
        got = descend_colored_subset(inst, level, ell)
        if not isinstance(got, Subset):
            return got
        edge.append(got)
    return tuple(edge)
