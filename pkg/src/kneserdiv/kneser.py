"""Kneser hypergraphs K^r(F): hyperedge streams, exact chromatic number, and
the named colorings used as reduction inputs."""

from __future__ import annotations

import itertools
import random
from typing import Callable, Iterator, Optional, Sequence

from .errors import ContractError
from .sets import DEFAULT_FAMILY_CAP, FamilyDescriptor, Subset

Hyperedge = tuple  # tuple[Subset, ...], r pairwise disjoint family members


class Coloring:
    """Total color map on the subsets of [n] with values in [m].

    Defined on every subset so it can stand in for a circuit input; only its
    restriction to family members carries meaning.
    """

    def __init__(self, n: int, m: int, fn: Callable[[Subset], int], spec: dict):
        if m < 1:
            raise ContractError("a coloring needs at least one color")
        self.n = n
        self.m = m
        self._fn = fn
        self.spec = spec

    def __call__(self, B: Subset) -> int:
        if B.n != self.n:
            raise ContractError("mismatched ground-set sizes")
        c = self._fn(B)
        assert 1 <= c <= self.m, f"coloring produced {c} outside [1, {self.m}]"
        return c

    def to_json(self) -> dict:
        return dict(self.spec)


def table_coloring(n: int, m: int, mapping: dict[int, int], default: int = 1) -> Coloring:
    """Coloring backed by a mask -> color table; unlisted subsets get `default`."""
    for mask, c in mapping.items():
        if not 1 <= c <= m:
            raise ContractError(f"table color {c} outside [1, {m}]")
        if mask < 0 or mask >> n:
            raise ContractError("table key outside the ground set")
    if not 1 <= default <= m:
        raise ContractError("default color out of range")
    spec = {
        "type": "table",
        "m": m,
        "default": default,
        "entries": [{"set": Subset(n, mask).to_json(), "color": c}
                    for mask, c in sorted(mapping.items())],
    }
    return Coloring(n, m, lambda B: mapping.get(B.mask, default), spec)


def constant_coloring(n: int, m: int = 1, color: int = 1) -> Coloring:
    return table_coloring(n, m, {}, default=color)


def _upper_bound_params(n: int, k: int, r: int) -> tuple[int, list[int]]:
    if r < 2 or k < 1 or n < r * k:
        raise ContractError(f"upper-bound coloring needs r >= 2 and n >= r*k, got {(n, k, r)}")
    t = -((n - r * (k - 1)) // -(r - 1))
    blocks = []
    for i in range(1, t):
        lo = (i - 1) * (r - 1) + 1
        mask = 0
        for e in range(lo, lo + r - 1):
            mask |= 1 << (e - 1)
        blocks.append(mask)
    return t, blocks


def upper_bound_coloring(n: int, k: int, r: int) -> Coloring:
    """The pigeonhole coloring with ceil((n - r(k-1)) / (r-1)) colors.

    Blocks X_i = {(i-1)(r-1)+1, ..., i(r-1)} for i < t; a set gets the least i
    with B meeting X_i, and t when it avoids them all.  Proper on K^r(n, k).
    """
    return merged_upper_bound_coloring(n, k, r, ())


def merged_upper_bound_coloring(n: int, k: int, r: int,
                                merge: Sequence[Sequence[int]]) -> Coloring:
    """Upper-bound coloring with the listed color groups fused into one color each."""
    t, blocks = _upper_bound_params(n, k, r)
    groups = [sorted(set(g)) for g in merge]
    seen: set[int] = set()
    for g in groups:
        if not g:
            raise ContractError("empty merge group")
        for c in g:
            if not 1 <= c <= t:
                raise ContractError(f"merge color {c} outside [1, {t}]")
            if c in seen:
                raise ContractError(f"color {c} in two merge groups")
            seen.add(c)
    group_of = {c: g[0] for g in groups for c in g}
    remap: dict[int, int] = {}
    nxt = 1
    for c in range(1, t + 1):
        rep = group_of.get(c, c)
        if rep not in remap:
            remap[rep] = nxt
            nxt += 1
    m = nxt - 1

    def fn(B: Subset) -> int:
        raw = t
        for i, bmask in enumerate(blocks, start=1):
            if B.mask & bmask:
                raw = i
                break
        return remap[group_of.get(raw, raw)]

    spec = {"type": "merged_upper_bound", "r": r, "merge": [list(g) for g in groups]}
    return Coloring(n, m, fn, spec)


def seeded_coloring(family: FamilyDescriptor, m: int, seed: int) -> Coloring:
    """Seeded uniform coloring of the family members, with all m colors in use.

    Non-members get color 1; that choice never reaches any member-level check.
    """
    members = family.members()
    if m < 1:
        raise ContractError("need m >= 1")
    if m > len(members):
        raise ContractError(f"cannot use {m} colors on {len(members)} members")
    rng = random.Random(seed)
    colors = [rng.randrange(1, m + 1) for _ in members]
    anchors = rng.sample(range(len(members)), m)
    forced = list(range(1, m + 1))
    rng.shuffle(forced)
    for idx, c in zip(anchors, forced):
        colors[idx] = c
    mapping = {b.mask: c for b, c in zip(members, colors)}
    coloring = table_coloring(family.n, m, mapping)
    coloring.spec = {"type": "seeded", "m": m, "seed": seed}
    return coloring


def hard_coloring(family: FamilyDescriptor, r: int, m: int, seed: int,
                  mode: str = "random") -> Coloring:
    """Test-input generator: a coloring of the family with exactly m colors in use.

    Mode "random" draws a seeded assignment; mode "merge" fuses the trailing
    colors of the upper-bound coloring down to m classes.
    """
    if m < 1:
        raise ContractError("need m >= 1")
    if mode == "random":
        return seeded_coloring(family, m, seed)
    if mode == "merge":
        if family.k is None:
            raise ContractError("merge mode needs a parametric family")
        t, _ = _upper_bound_params(family.n, family.k, r)
        if m > t:
            raise ContractError(f"cannot merge {t} colors up to {m}")
        merge = [list(range(m, t + 1))] if m < t else []
        return merged_upper_bound_coloring(family.n, family.k, r, merge)
    raise ContractError(f"unknown hard-coloring mode {mode!r}")


def astab_coloring_from_stab(n: int, k: int, r: int, c_stab: Coloring) -> Coloring:
    """Lift a coloring of the stable k-subsets to the almost stable ones.

    Sets containing n get the fresh color m+1; every other almost stable set is
    stable and keeps its color.  A monochromatic hyperedge of the result avoids
    color m+1 (those vertices pairwise intersect), hence is stable and solves
    the original instance.
    """
    if r < 2 or n < r * k:
        raise ContractError("need r >= 2 and n >= r*k")
    expected = (n - r * k) // (r - 1)
    if c_stab.m != expected:
        raise ContractError(f"stable coloring must use {expected} colors, got {c_stab.m}")
    if c_stab.n != n:
        raise ContractError("mismatched ground-set sizes")
    m2 = c_stab.m + 1

    def fn(B: Subset) -> int:
        if n in B:
            return m2
        return c_stab(B)

    spec = {"type": "astab_from_stab", "n": n, "k": k, "r": r, "base": c_stab.to_json()}
    return Coloring(n, m2, fn, spec)


def load_coloring(spec: dict, family: FamilyDescriptor, k: Optional[int] = None) -> Coloring:
    """Materialize a coloring from its JSON spec against a family context."""
    kind = spec.get("type")
    if kind == "table":
        mapping = {Subset.of(family.n, e["set"]).mask: int(e["color"])
                   for e in spec.get("entries", [])}
        return table_coloring(family.n, int(spec["m"]), mapping,
                              default=int(spec.get("default", 1)))
    if kind == "seeded":
        return seeded_coloring(family, int(spec["m"]), int(spec["seed"]))
    if kind == "merged_upper_bound":
        kk = k if k is not None else family.k
        if kk is None:
            raise ContractError("merged_upper_bound coloring needs a member size k")
        return merged_upper_bound_coloring(family.n, kk, int(spec["r"]), spec.get("merge", []))
    if kind == "astab_from_stab":
        n, kk, r = int(spec["n"]), int(spec["k"]), int(spec["r"])
        base = load_coloring(spec["base"], FamilyDescriptor.stable(n, kk), kk)
        return astab_coloring_from_stab(n, kk, r, base)
    raise ContractError(f"unknown coloring spec type {kind!r}")


def enumerate_hyperedges(family: FamilyDescriptor, r: int,
                         cap: int = DEFAULT_FAMILY_CAP) -> Iterator[Hyperedge]:
    """All r-tuples of pairwise disjoint members, each exactly once, in
    canonical (member-order lexicographic) order."""
    if r < 2:
        raise ContractError("hyperedges need r >= 2")
    members = family.members(cap)

    def rec(start: int, acc: list[Subset], used: int) -> Iterator[Hyperedge]:
        if len(acc) == r:
            yield tuple(acc)
            return
        for i in range(start, len(members)):
            b = members[i]
            if used & b.mask:
                continue
            acc.append(b)
            yield from rec(i + 1, acc, used | b.mask)
            acc.pop()

    yield from rec(0, [], 0)


def find_monochromatic_hyperedge(family: FamilyDescriptor, r: int,
                                 coloring: Coloring,
                                 cap: int = DEFAULT_FAMILY_CAP) -> Optional[Hyperedge]:
    """First monochromatic hyperedge in canonical order, or None (proper)."""
    members = family.members(cap)
    by_color: dict[int, list[Subset]] = {}
    for b in members:
        by_color.setdefault(coloring(b), []).append(b)

    def rec(pool: list[Subset], start: int, acc: list[Subset], used: int) -> Optional[Hyperedge]:
        if len(acc) == r:
            return tuple(acc)
        for i in range(start, len(pool)):
            b = pool[i]
            if used & b.mask:
                continue
            acc.append(b)
            got = rec(pool, i + 1, acc, used | b.mask)
            if got is not None:
                return got
            acc.pop()
        return None

    for b in members:
        c = coloring(b)
        pool = by_color[c]
        got = rec(pool, pool.index(b) + 1, [b], b.mask)
        if got is not None:
            return got
    return None


def verify_hyperedge(family: FamilyDescriptor, r: int, coloring: Coloring,
                     edge: Sequence[Subset]) -> bool:
    """True iff edge is r pairwise disjoint, equal-colored family members."""
    if len(edge) != r:
        return False
    used = 0
    for b in edge:
        if not isinstance(b, Subset) or b.n != family.n or not family.contains(b):
            return False
        if used & b.mask:
            return False
        used |= b.mask
    colors = {coloring(b) for b in edge}
    return len(colors) == 1


def lift_solution_r1_r2(edge: Sequence[Subset], r1: int) -> Hyperedge:
    """Project a monochromatic r2-hyperedge to its first r1 sets (r1 <= r2)."""
    if r1 < 1 or r1 > len(edge):
        raise ContractError(f"cannot take {r1} sets from an edge of {len(edge)}")
    return tuple(edge[:r1])


def chromatic_formula(n: int, k: int, r: int) -> int:
    """ceil((n - r(k-1)) / (r-1))."""
    return -((n - r * (k - 1)) // -(r - 1))


def _hypergraph_colorable(num_v: int, edges: list[tuple[int, ...]], t: int) -> bool:
    if t < 1:
        return num_v == 0
    if not edges:
        return True
    edges_of: list[list[tuple[int, ...]]] = [[] for _ in range(num_v)]
    for e in edges:
        for v in e:
            edges_of[v].append(e)
    degree = [len(edges_of[v]) for v in range(num_v)]
    full = (1 << t) - 1
    color = [0] * num_v
    avail = [full] * num_v
    unassigned = set(range(num_v))

    def propagate(v: int, c: int, trail: list[int]) -> bool:
        # returns False on a forced monochromatic edge
        cbit = 1 << (c - 1)
        for e in edges_of[v]:
            lone = -1
            mono = True
            for u in e:
                if u == v:
                    continue
                cu = color[u]
                if cu == 0:
                    if lone >= 0:
                        mono = False
                        break
                    lone = u
                elif cu != c:
                    mono = False
                    break
            if not mono:
                continue
            if lone < 0:
                return False
            if avail[lone] & cbit:
                avail[lone] &= ~cbit
                trail.append(lone)
                if avail[lone] == 0:
                    return False
        return True

    def pick() -> int:
        best, best_key = -1, None
        for v in unassigned:
            key = (avail[v].bit_count(), -degree[v], v)
            if best_key is None or key < best_key:
                best, best_key = v, key
        return best

    def rec(max_used: int) -> bool:
        if not unassigned:
            return True
        v = pick()
        cand = avail[v] & ((1 << min(max_used + 1, t)) - 1)
        if cand == 0:
            return False
        unassigned.discard(v)
        c = 0
        while cand:
            bit = cand & -cand
            cand ^= bit
            c = bit.bit_length()
            color[v] = c
            trail: list[int] = []
            if propagate(v, c, trail) and rec(max(max_used, c)):
                return True
            cbit_masks = 1 << (c - 1)
            for u in trail:
                avail[u] |= cbit_masks
            color[v] = 0
        unassigned.add(v)
        return False

    return rec(0)


def chromatic_number_exact(family: FamilyDescriptor, r: int,
                           cap: int = DEFAULT_FAMILY_CAP) -> int:
    """Exact chromatic number of K^r(family) by backtracking search.

    Colorability is decided by a fail-first search over vertices with
    forced-color propagation on hyperedges and new-color symmetry breaking;
    nothing is assumed from closed-form bounds.
    """
    if r < 2:
        raise ContractError("chromatic number defined for r >= 2")
    members = family.members(cap)
    index = {b.mask: i for i, b in enumerate(members)}
    edges = [tuple(index[b.mask] for b in e) for e in enumerate_hyperedges(family, r, cap)]
    if not edges:
        return 1
    for t in itertools.count(1):
        if _hypergraph_colorable(len(members), edges, t):
            return t
    raise AssertionError("unreachable")
