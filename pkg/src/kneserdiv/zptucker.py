"""The Z_p-Tucker search problem: signed vectors over Z_p u {0}, equivariant
label maps built from hypergraph colorings, a complete desk-scale chain
solver, and the chain-to-hyperedge extractions.

Signs are integers in [1, p], where value t stands for the group element w^t
(so w^p is the identity and the canonical representative of a rotation orbit
has first nonzero sign p).  Vectors are plain tuples over {0, 1, ..., p}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import ContractError, SizeCapError, SolverExhausted
from .kneser import Coloring
from .sets import ALLK, FamilyDescriptor, Subset, colorability_defect, mask_order_leq

SignedVector = tuple  # tuple[int, ...] with entries in {0, 1, ..., p}
TuckerLabel = tuple  # (sign in [p], index in [s])

DEFAULT_WORK_CAP = 6_000_000


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def as_signed_vector(entries: Sequence[int], p: int) -> SignedVector:
    x = tuple(int(v) for v in entries)
    for v in x:
        if not 0 <= v <= p:
            raise ContractError(f"entry {v} outside {{0, ..., {p}}}")
    return x


def preceq(x: SignedVector, y: SignedVector) -> bool:
    """x precedes y iff every nonzero entry of x agrees with y."""
    if len(x) != len(y):
        raise ContractError("mismatched vector lengths")
    return all(a == 0 or a == b for a, b in zip(x, y))


def omega_mul(t: int, x: SignedVector, p: int) -> SignedVector:
    """Rotate every nonzero sign by w^t."""
    if not any(x):
        raise ContractError("the zero vector is outside the domain")
    return tuple(0 if v == 0 else (v + t - 1) % p + 1 for v in x)


def support_size(x: SignedVector) -> int:
    return sum(1 for v in x if v)


def sign_parts(x: SignedVector, p: int) -> list[int]:
    """Bitmask of positions carrying each sign; index t-1 holds the w^t part."""
    parts = [0] * p
    for j, v in enumerate(x):
        if v:
            parts[v - 1] |= 1 << j
    return parts


def alt(x: SignedVector) -> int:
    """Length of a longest alternating subsequence of nonzero entries.

    The greedy scan that takes every entry differing from the last taken is
    optimal (checked against brute force in the test suite).
    """
    last = 0
    length = 0
    for v in x:
        if v and v != last:
            length += 1
            last = v
    return length


@dataclass
class TuckerInstance:
    """An equivariant label map on the nonzero signed vectors of length n.

    `base` is evaluated only on canonical representatives (first nonzero sign
    equal to p); `lam` rotates its argument to canonical form and rotates the
    sign of the answer back, which enforces equivariance by construction.
    """

    n: int
    p: int
    s: int
    base: Callable[[SignedVector], TuckerLabel]
    name: str = "tucker"
    label_order: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise ContractError(f"p = {self.p} is not prime")
        if self.p >= 16:
            raise ContractError("desk-scale solver supports p < 16")
        if not 1 <= self.s <= (self.n - 1) // (self.p - 1):
            raise ContractError(
                f"need 1 <= s <= floor((n-1)/(p-1)) = {(self.n - 1) // (self.p - 1)}, got s={self.s}")

    def lam(self, x: SignedVector) -> TuckerLabel:
        if len(x) != self.n:
            raise ContractError("vector length differs from the instance size")
        t0 = 0
        for v in x:
            if v:
                t0 = v
                break
        if t0 == 0:
            raise ContractError("the zero vector is outside the domain")
        rot = (self.p - t0) % self.p
        xc = omega_mul(rot, x, self.p) if rot else x
        sign, idx = self.base(xc)
        assert 1 <= sign <= self.p and 1 <= idx <= self.s, \
            f"label ({sign}, {idx}) outside Z_{self.p} x [{self.s}]"
        return ((sign - rot - 1) % self.p + 1, idx)


def check_equivariance(inst: TuckerInstance, x: SignedVector, t: int) -> bool:
    sign, idx = inst.lam(x)
    rsign, ridx = inst.lam(omega_mul(t, x, inst.p))
    return ridx == idx and rsign == (sign + t - 1) % inst.p + 1


def _pad_length(n: int, p: int) -> int:
    return (-(n - 1)) % (p - 1) if p > 2 else 0


def _first_sign(x: SignedVector) -> int:
    for v in x:
        if v:
            return v
    raise ContractError("the zero vector is outside the domain")


def _ceil_div(a: int, b: int) -> int:
    return -(a // -b)


def lambda_general(family: FamilyDescriptor, coloring: Coloring, p: int,
                   x: SignedVector, cd: Optional[int] = None) -> TuckerLabel:
    """Label map for an arbitrary family with known colorability defect.

    Small vectors are labelled by their size and first sign; once the zero
    pattern is too small to witness removability, some sign class contains a
    family member, and the order-minimal such member contributes its color.
    Vectors live over a padded ground set whose extra elements belong to no
    member.
    """
    n_pad = len(x)
    if n_pad < family.n:
        raise ContractError("vector shorter than the family's ground set")
    if (n_pad - 1) % (p - 1) != 0:
        raise ContractError("padded length must satisfy (p-1) | (n-1)")
    if cd is None:
        cd = colorability_defect(family, p,
                                 "formula" if family.kind == ALLK else "bruteforce")
    band = _ceil_div(n_pad - cd, p - 1)
    size = support_size(x)
    if size == 0:
        raise ContractError("the zero vector is outside the domain")
    if size <= n_pad - cd:
        return (_first_sign(x), _ceil_div(size, p - 1))
    ground = (1 << family.n) - 1
    best_mask = -1
    best_t = -1
    for t, part in enumerate(sign_parts(x, p), start=1):
        b = family.min_member_subset(Subset(family.n, part & ground))
        if b is not None and (best_mask < 0 or mask_order_leq(b.mask, best_mask)):
            best_mask = b.mask
            best_t = t
    if best_t < 0:
        raise ContractError(
            "no sign class contains a member: the supplied defect value is wrong")
    return (best_t, coloring(Subset(family.n, best_mask)) + band)


def lambda_almost_stable(n: int, k: int, p: int, coloring: Coloring,
                         x: SignedVector) -> TuckerLabel:
    """Label map for the almost stable k-subsets, driven by alternation length.

    Low-alternation vectors are labelled by alt and first sign; a vector whose
    alternation exceeds p(k-1)+a contains, within its first n entries, k
    same-signed pairwise non-adjacent positions, so some sign class holds an
    almost stable k-subset and the minimal one contributes its color.
    """
    a = (-(p * (k - 1))) % (p - 1) if p > 2 else 0
    if len(x) != n + a:
        raise ContractError(f"vector must have padded length {n + a}")
    threshold = p * (k - 1) + a
    band = threshold // (p - 1)
    value = alt(x)
    if value == 0:
        raise ContractError("the zero vector is outside the domain")
    if value <= threshold:
        return (_first_sign(x), _ceil_div(value, p - 1))
    family = FamilyDescriptor.almost_stable(n, k)
    ground = (1 << n) - 1
    best_mask = -1
    best_t = -1
    for t, part in enumerate(sign_parts(x, p), start=1):
        b = family.min_member_subset(Subset(n, part & ground))
        if b is not None and (best_mask < 0 or mask_order_leq(b.mask, best_mask)):
            best_mask = b.mask
            best_t = t
    assert best_t >= 0, "alternation above the threshold guarantees a member"
    return (best_t, coloring(Subset(n, best_mask)) + band)


@dataclass
class TuckerReduction:
    """A coloring instance packaged as a Z_p-Tucker instance, with enough
    provenance to pull chains back to hyperedges."""

    construction: str
    family: FamilyDescriptor
    coloring: Coloring
    p: int
    band: int
    padded_n: int
    instance: TuckerInstance = field(repr=False)
    cd: Optional[int] = None
    k: Optional[int] = None


def reduce_kneser_to_tucker(family: FamilyDescriptor, coloring: Coloring, p: int,
                            cd: Optional[int] = None) -> TuckerReduction:
    """Build the general Tucker instance for a coloring of K^p(family)."""
    if not is_prime(p):
        raise ContractError(f"p = {p} is not prime")
    if cd is None:
        cd = colorability_defect(family, p,
                                 "formula" if family.kind == ALLK else "bruteforce")
    if cd < p:
        raise ContractError(f"degenerate budget: defect {cd} < p = {p}")
    m_expected = (cd - 1) // (p - 1)
    if coloring.m != m_expected:
        raise ContractError(
            f"coloring must use {m_expected} colors for this reduction, got {coloring.m}")
    n_pad = family.n + _pad_length(family.n, p)
    band = _ceil_div(n_pad - cd, p - 1)
    s = (n_pad - 1) // (p - 1)
    assert s == coloring.m + band
    cd_val = cd

    def base(xc: SignedVector) -> TuckerLabel:
        return lambda_general(family, coloring, p, xc, cd_val)

    order = tuple(range(band + 1, s + 1)) + tuple(range(1, band + 1))
    inst = TuckerInstance(n_pad, p, s, base,
                          name=f"general:{family.kind}(n={family.n})", label_order=order)
    return TuckerReduction("general", family, coloring, p, band, n_pad, inst, cd=cd)


def reduce_astab_to_tucker(n: int, k: int, p: int, coloring: Coloring) -> TuckerReduction:
    """Build the alternation-based Tucker instance for a coloring of the
    almost stable k-subsets of [n]."""
    if not is_prime(p):
        raise ContractError(f"p = {p} is not prime")
    if n < p * k:
        raise ContractError("need n >= p*k")
    m_expected = (n - p * (k - 1) - 1) // (p - 1)
    if m_expected < 1:
        raise ContractError("degenerate budget: no colors available")
    if coloring.m != m_expected:
        raise ContractError(
            f"coloring must use {m_expected} colors for this reduction, got {coloring.m}")
    a = (-(p * (k - 1))) % (p - 1) if p > 2 else 0
    n_pad = n + a
    band = (p * (k - 1) + a) // (p - 1)
    s = (n_pad - 1) // (p - 1)
    assert s == coloring.m + band
    family = FamilyDescriptor.almost_stable(n, k)

    def base(xc: SignedVector) -> TuckerLabel:
        return lambda_almost_stable(n, k, p, coloring, xc)

    order = tuple(range(band + 1, s + 1)) + tuple(range(1, band + 1))
    inst = TuckerInstance(n_pad, p, s, base,
                          name=f"almost_stable(n={n},k={k})", label_order=order)
    return TuckerReduction("almost_stable", family, coloring, p, band, n_pad, inst, k=k)


def _encode(x: SignedVector, p: int) -> int:
    enc = 0
    for v in reversed(x):
        enc = enc * (p + 1) + v
    return enc


def _decode(enc: int, n: int, p: int) -> SignedVector:
    digits = []
    for _ in range(n):
        enc, v = divmod(enc, p + 1)
        digits.append(v)
    return tuple(digits)


def _canonical_vectors(n: int, p: int):
    # all vectors whose first nonzero sign is w^p, i.e. one orbit representative each
    for j0 in range(n):
        prefix = (0,) * j0 + (p,)
        for rest in itertools.product(range(p + 1), repeat=n - 1 - j0):
            yield prefix + rest


@dataclass
class ChainSolveResult:
    chain: list[SignedVector]
    label: int
    signs: list[int]
    vectors: int
    probes: int


def chain_solve(inst: TuckerInstance, work_cap: int = DEFAULT_WORK_CAP) -> ChainSolveResult:
    """Exhaustive chain search.

    Every nonzero vector is labelled and bucketed by its label index; within a
    bucket, chains are grown downward from each candidate top by zeroing
    support subsets, probing the bucket table, and requiring a fresh sign at
    every step.  The first chain in this search order is returned.
    """
    n, p, s = inst.n, inst.p, inst.s
    total = (p + 1) ** n - 1
    if total > work_cap:
        raise SizeCapError(f"{total} signed vectors exceed the work cap {work_cap}")
    places = [(p + 1) ** j for j in range(n)]
    table: dict[int, int] = {}
    orders: list[list[int]] = [[] for _ in range(s + 1)]
    vectors = 0
    for xc in _canonical_vectors(n, p):
        sign, idx = inst.base(xc)
        assert 1 <= sign <= p and 1 <= idx <= s, \
            f"label ({sign}, {idx}) outside Z_{p} x [{s}]"
        encs = [0] * p
        for j, v in enumerate(xc):
            if v:
                for r in range(p):
                    encs[r] += ((v + r - 1) % p + 1) * places[j]
            # zero digits contribute nothing
        for r in range(p):
            rsign = (sign + r - 1) % p + 1
            table[encs[r]] = (idx << 4) | rsign
            orders[idx].append(encs[r])
            vectors += 1

    probes = 0
    label_order = inst.label_order or tuple(range(s, 0, -1))

    def extend(enc: int, used: int, chain: list[int], idx: int) -> bool:
        nonlocal probes
        if len(chain) == p:
            return True
        digits = _decode(enc, n, p)
        support = [j for j in range(n) if digits[j]]
        contrib = [digits[j] * places[j] for j in support]
        want = idx << 4
        for zbits in range(1, 1 << len(support)):
            cand = enc
            zb = zbits
            while zb:
                b = zb & -zb
                zb ^= b
                cand -= contrib[b.bit_length() - 1]
            probes += 1
            packed = table.get(cand)
            if packed is None or packed & ~15 != want:
                continue
            sgn_bit = 1 << (packed & 15)
            if used & sgn_bit:
                continue
            chain.append(cand)
            if extend(cand, used | sgn_bit, chain, idx):
                return True
            chain.pop()
        return False

    for idx in label_order:
        for top in orders[idx]:
            chain_encs = [top]
            if extend(top, 1 << (table[top] & 15), chain_encs, idx):
                chain = [_decode(e, n, p) for e in reversed(chain_encs)]
                signs = [inst.lam(x)[0] for x in chain]
                return ChainSolveResult(chain, idx, signs, vectors, probes)
    raise SolverExhausted(
        f"no chain exists: {inst.name} violates the Tucker contract",
        details={"n": n, "p": p, "s": s, "vectors": vectors, "probes": probes})


def check_chain_solution(inst: TuckerInstance, chain: Sequence[SignedVector]) -> bool:
    """A solution is an ascending chain of p vectors sharing one label index
    with pairwise distinct label signs."""
    if len(chain) != inst.p:
        return False
    for a, b in zip(chain, chain[1:]):
        if not preceq(a, b):
            return False
    labels = [inst.lam(x) for x in chain]
    if len({idx for _, idx in labels}) != 1:
        return False
    return len({sign for sign, _ in labels}) == inst.p


def extract_from_chain(red: TuckerReduction, chain: Sequence[SignedVector]) -> tuple:
    """Pull a verified chain back to a monochromatic hyperedge.

    The shared label index must exceed the size band, so each chain element's
    signed part holds a member; the chain order makes these members pairwise
    disjoint, and their colors all equal the label offset.
    """
    if not check_chain_solution(red.instance, chain):
        raise ContractError("not a chain solution for this instance")
    ground = (1 << red.family.n) - 1
    edge = []
    for x in chain:
        sign, idx = red.instance.lam(x)
        assert idx > red.band, "chain label inside the size band: construction bug"
        part = sign_parts(x, red.p)[sign - 1] & ground
        b = red.family.min_member_subset(Subset(red.family.n, part))
        assert b is not None, "labelled part lost its member during extraction"
        assert red.coloring(b) + red.band == idx
        edge.append(b)
    return tuple(edge)


def random_table(n: int, p: int, s: int, seed: int) -> dict[int, TuckerLabel]:
    """Seeded label table on canonical representatives (keys are encodings)."""
    import random as _random

    rng = _random.Random(seed)
    return {_encode(xc, p): (rng.randrange(1, p + 1), rng.randrange(1, s + 1))
            for xc in _canonical_vectors(n, p)}


def instance_from_table(n: int, p: int, s: int,
                        table: dict[int, TuckerLabel], name: str = "table") -> TuckerInstance:
    def base(xc: SignedVector) -> TuckerLabel:
        return table[_encode(xc, p)]

    return TuckerInstance(n, p, s, base, name=name)


def random_instance(n: int, p: int, s: Optional[int] = None, seed: int = 0) -> TuckerInstance:
    if s is None:
        s = (n - 1) // (p - 1)
    return instance_from_table(n, p, s, random_table(n, p, s, seed),
                               name=f"random(n={n},p={p},s={s},seed={seed})")


def table_to_json(n: int, p: int, s: int, table: dict[int, TuckerLabel]) -> dict:
    return {"n": n, "p": p, "s": s,
            "table": {",".join(map(str, _decode(enc, n, p))): [sign, idx]
                      for enc, (sign, idx) in sorted(table.items())}}


def table_from_json(data: dict) -> TuckerInstance:
    n, p, s = int(data["n"]), int(data["p"]), int(data["s"])
    table = {}
    for key, (sign, idx) in data["table"].items():
        x = tuple(int(v) for v in key.split(","))
        table[_encode(x, p)] = (int(sign), int(idx))
    return instance_from_table(n, p, s, table, name="json-table")
