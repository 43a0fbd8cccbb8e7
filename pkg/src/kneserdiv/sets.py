"""Ground-set subsets, set families, canonical orders, and the colorability defect.

Everything downstream (colorings, oracles, valuations, signed vectors) speaks
in terms of `Subset` and `FamilyDescriptor`.  All operations are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator, Optional

from .errors import ContractError, SizeCapError

DEFAULT_GROUND_CAP = 12
DEFAULT_FAMILY_CAP = 1 << 12

ALLK = "allk"
STABLE = "stable"
ALMOST_STABLE = "almost_stable"
EXPLICIT = "explicit"

_PARAMETRIC_KINDS = (ALLK, STABLE, ALMOST_STABLE)
_ALL_KINDS = _PARAMETRIC_KINDS + (EXPLICIT,)


@dataclass(frozen=True)
class Subset:
    """A subset of [n] = {1, ..., n}, stored as a bitmask (bit j-1 <-> element j)."""

    n: int
    mask: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ContractError("ground-set size must be >= 0")
        if self.mask < 0 or self.mask >> self.n:
            raise ContractError(f"mask {bin(self.mask)} does not fit ground set [{self.n}]")

    @classmethod
    def of(cls, n: int, elements: Iterable[int] = ()) -> "Subset":
        mask = 0
        for e in elements:
            if not 1 <= e <= n:
                raise ContractError(f"element {e} outside [1, {n}]")
            mask |= 1 << (e - 1)
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> "Subset":
        return cls(n, (1 << n) - 1)

    def elements(self) -> tuple[int, ...]:
        return tuple(j + 1 for j in range(self.n) if self.mask >> j & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, e: int) -> bool:
        return 1 <= e <= self.n and self.mask >> (e - 1) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements())

    def _mate(self, other: "Subset") -> None:
        if not isinstance(other, Subset) or self.n != other.n:
            raise ContractError("mismatched ground-set sizes")

    def __or__(self, other: "Subset") -> "Subset":
        self._mate(other)
        return Subset(self.n, self.mask | other.mask)

    def __and__(self, other: "Subset") -> "Subset":
        self._mate(other)
        return Subset(self.n, self.mask & other.mask)

    def __sub__(self, other: "Subset") -> "Subset":
        self._mate(other)
        return Subset(self.n, self.mask & ~other.mask)

    def __xor__(self, other: "Subset") -> "Subset":
        self._mate(other)
        return Subset(self.n, self.mask ^ other.mask)

    def issubset(self, other: "Subset") -> bool:
        self._mate(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "Subset") -> bool:
        self._mate(other)
        return self.mask & other.mask == 0

    def remove(self, e: int) -> "Subset":
        if e not in self:
            raise ContractError(f"element {e} not present")
        return Subset(self.n, self.mask & ~(1 << (e - 1)))

    def min_element(self) -> int:
        if self.mask == 0:
            raise ContractError("empty subset has no minimum")
        return (self.mask & -self.mask).bit_length()

    def to_json(self) -> list[int]:
        return list(self.elements())

    def __repr__(self) -> str:
        return f"Subset({self.n}, {{{', '.join(map(str, self.elements()))}}})"


def mask_order_leq(m1: int, m2: int) -> bool:
    """B1 <= B2 iff B1 == B2 or the smallest element of B1 xor B2 lies in B1."""
    d = m1 ^ m2
    return d == 0 or bool(m1 & (d & -d))


def _has_linear_adjacent(mask: int) -> bool:
    return mask & (mask >> 1) != 0


def _has_cyclic_adjacent(mask: int, n: int) -> bool:
    if _has_linear_adjacent(mask):
        return True
    if n >= 2 and (mask & 1) and (mask >> (n - 1) & 1):
        return True
    return False


class FamilyDescriptor:
    """A set family over [n]: all k-subsets, the stable or almost stable ones, or
    an explicit list of non-empty subsets.

    Stable members contain no two elements consecutive modulo n; almost stable
    members contain no two consecutive elements but may contain both 1 and n.
    Membership of the parametric kinds is decided directly from the bitmask,
    never by enumeration.
    """

    def __init__(self, kind: str, n: int, k: Optional[int] = None,
                 members: Optional[Iterable[Subset]] = None):
        if kind not in _ALL_KINDS:
            raise ContractError(f"unknown family kind {kind!r}")
        if n < 1:
            raise ContractError("ground-set size must be positive")
        self.kind = kind
        self.n = n
        if kind in _PARAMETRIC_KINDS:
            if k is None or not 1 <= k <= n:
                raise ContractError(f"need n >= k >= 1, got n={n}, k={k}")
            self.k = k
            self.explicit_members = None
        else:
            if members is None:
                raise ContractError("explicit family needs a member list")
            mems = []
            for b in members:
                if not isinstance(b, Subset) or b.n != n:
                    raise ContractError("explicit members must be subsets of the same ground set")
                if len(b) == 0:
                    raise ContractError("explicit members must be non-empty")
                mems.append(b)
            seen = set()
            uniq = [b for b in mems if b.mask not in seen and not seen.add(b.mask)]
            self.k = None
            self.explicit_members = tuple(sorted(uniq, key=lambda b: _order_sort_key(b.mask, n)))
        self._members_cache = None
        self._min_cache: dict[int, Optional[int]] = {}

    @classmethod
    def all_k(cls, n: int, k: int) -> "FamilyDescriptor":
        return cls(ALLK, n, k)

    @classmethod
    def stable(cls, n: int, k: int) -> "FamilyDescriptor":
        return cls(STABLE, n, k)

    @classmethod
    def almost_stable(cls, n: int, k: int) -> "FamilyDescriptor":
        return cls(ALMOST_STABLE, n, k)

    @classmethod
    def explicit(cls, n: int, members: Iterable[Subset]) -> "FamilyDescriptor":
        return cls(EXPLICIT, n, members=members)

    def __eq__(self, other):
        return (isinstance(other, FamilyDescriptor)
                and (self.kind, self.n, self.k, self.explicit_members)
                == (other.kind, other.n, other.k, other.explicit_members))

    def __repr__(self):
        if self.kind == EXPLICIT:
            return f"FamilyDescriptor.explicit(n={self.n}, {len(self.explicit_members)} members)"
        return f"FamilyDescriptor({self.kind!r}, n={self.n}, k={self.k})"

    def _contains_mask(self, mask: int) -> bool:
        if self.kind == EXPLICIT:
            return any(b.mask == mask for b in self.explicit_members)
        if mask.bit_count() != self.k:
            return False
        if self.kind == STABLE:
            return not _has_cyclic_adjacent(mask, self.n)
        if self.kind == ALMOST_STABLE:
            return not _has_linear_adjacent(mask)
        return True

    def contains(self, B: Subset) -> bool:
        if B.n != self.n:
            raise ContractError("mismatched ground-set sizes")
        return self._contains_mask(B.mask)

    def order_leq(self, B1: Subset, B2: Subset) -> bool:
        """Total order on members: B1 <= B2 iff min(B1 xor B2) belongs to B1."""
        if not (self.contains(B1) and self.contains(B2)):
            raise ContractError("order is defined on family members only")
        return mask_order_leq(B1.mask, B2.mask)

    def members(self, cap: int = DEFAULT_FAMILY_CAP) -> tuple[Subset, ...]:
        """All members, in increasing canonical order."""
        if self._members_cache is None:
            if self.kind == EXPLICIT:
                self._members_cache = self.explicit_members
            else:
                if comb(self.n, self.k) > cap:
                    raise SizeCapError(
                        f"family of up to C({self.n},{self.k}) members exceeds cap {cap}")
                out = []
                for combo in itertools.combinations(range(1, self.n + 1), self.k):
                    mask = 0
                    for e in combo:
                        mask |= 1 << (e - 1)
                    if self._contains_mask(mask):
                        out.append(Subset(self.n, mask))
                self._members_cache = tuple(out)
        if len(self._members_cache) > cap:
            raise SizeCapError(f"family has {len(self._members_cache)} members, cap {cap}")
        return self._members_cache

    def members_within(self, D: Subset) -> Iterator[Subset]:
        """Members contained in D, in increasing canonical order."""
        if D.n != self.n:
            raise ContractError("mismatched ground-set sizes")
        if self.kind == EXPLICIT:
            for b in self.explicit_members:
                if b.issubset(D):
                    yield b
            return
        elems = D.elements()
        if len(elems) < self.k:
            return
        for combo in itertools.combinations(elems, self.k):
            mask = 0
            for e in combo:
                mask |= 1 << (e - 1)
            if self._contains_mask(mask):
                yield Subset(self.n, mask)

    def min_member_subset(self, D: Subset) -> Optional[Subset]:
        """The order-minimal member contained in D, or None.

        For the all-k family this is the k smallest elements of D; lexicographic
        enumeration of k-subsets of D visits members in canonical order, so the
        first hit is the minimum for every kind.
        """
        if D.n != self.n:
            raise ContractError("mismatched ground-set sizes")
        cached = self._min_cache.get(D.mask, -1)
        if cached != -1:
            return None if cached is None else Subset(self.n, cached)
        found = next(self.members_within(D), None)
        self._min_cache[D.mask] = None if found is None else found.mask
        return found

    def find_member_subset(self, D: Subset) -> Optional[Subset]:
        """Some member contained in D, or None; canonically the minimal one."""
        return self.min_member_subset(D)

    def to_json(self) -> dict:
        data = {"kind": self.kind, "n": self.n}
        if self.kind in _PARAMETRIC_KINDS:
            data["k"] = self.k
        else:
            data["members"] = [b.to_json() for b in self.explicit_members]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "FamilyDescriptor":
        kind = data["kind"]
        n = int(data["n"])
        if kind in _PARAMETRIC_KINDS:
            return cls(kind, n, int(data["k"]))
        members = [Subset.of(n, elems) for elems in data["members"]]
        return cls(EXPLICIT, n, members=members)


def _order_sort_key(mask: int, n: int) -> tuple[int, ...]:
    # sorting key consistent with mask_order_leq: present bits sort before absent ones
    return tuple(1 - (mask >> j & 1) for j in range(n))


def _r_colorable_ground(n: int, edge_masks: list[int], r: int) -> bool:
    """Can the elements of [n] be r-colored with no edge monochromatic?"""
    if not edge_masks:
        return True
    if any(m.bit_count() == 1 for m in edge_masks):
        return False
    verts = sorted({j for m in edge_masks for j in range(n) if m >> j & 1})
    edges = [tuple(j for j in verts if m >> j & 1) for m in edge_masks]
    edges_of: dict[int, list[tuple[int, ...]]] = {v: [] for v in verts}
    for e in edges:
        for v in e:
            edges_of[v].append(e)
    verts.sort(key=lambda v: -len(edges_of[v]))
    color: dict[int, int] = {}

    def ok(v: int, c: int) -> bool:
        for e in edges_of[v]:
            mono = True
            for u in e:
                if u == v:
                    continue
                cu = color.get(u)
                if cu is None or cu != c:
                    mono = False
                    break
            if mono:
                return False
        return True

    def rec(idx: int, used: int) -> bool:
        if idx == len(verts):
            return True
        v = verts[idx]
        for c in range(1, min(used + 1, r) + 1):
            if ok(v, c):
                color[v] = c
                if rec(idx + 1, max(used, c)):
                    return True
                del color[v]
        return False

    return rec(0, 0)


def colorability_defect(family: FamilyDescriptor, r: int, mode: str = "bruteforce",
                        ground_cap: int = DEFAULT_GROUND_CAP) -> int:
    """Smallest |Y| such that removing Y from the ground set leaves the family
    hypergraph r-colorable.

    Brute-force mode enumerates removal sets Y by size then lexicographically
    and decides r-colorability of the induced hypergraph by backtracking.
    Formula mode applies only to the all-k family, where the value is n - r(k-1).
    """
    if r < 2:
        raise ContractError("defect is defined for r >= 2")
    if mode == "formula":
        if family.kind != ALLK:
            raise ContractError("formula mode applies to all-k families only")
        return family.n - r * (family.k - 1)
    if mode != "bruteforce":
        raise ContractError(f"unknown mode {mode!r}")
    n = family.n
    if n > ground_cap:
        raise SizeCapError(f"brute-force defect capped at n <= {ground_cap}")
    edge_masks = [b.mask for b in family.members()]
    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            ymask = 0
            for j in combo:
                ymask |= 1 << j
            kept = [m for m in edge_masks if not m & ymask]
            if _r_colorable_ground(n, kept, r):
                return size
    raise AssertionError("unreachable: removing all elements leaves no hyperedge")
