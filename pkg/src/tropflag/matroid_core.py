"""Matroids on [n] given by their bases.

Subsets of the ground set [n] = {1, ..., n} are bitmasks: element i is bit
i-1.  The ground set is assumed small (n <= 9), so subsets print as digit
strings like "134" and brute-force checks over all 2^n subsets are cheap.
Rank of a subset S is computed as max |S & B| over bases B, which is all the
downstream machinery ever needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

Mask = int


def mask_of(elements: Iterable[int]) -> Mask:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def elements_of(mask: Mask) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def subset_str(mask: Mask) -> str:
    return "".join(str(e) for e in elements_of(mask)) or "{}"


def parse_subset(s) -> Mask:
    if isinstance(s, int):
        return s if s >= 0 else 0
    if isinstance(s, str):
        return mask_of(int(ch) for ch in s if ch.isdigit())
    return mask_of(s)


def full_mask(n: int) -> Mask:
    return (1 << n) - 1


def all_subsets(n: int, size: int) -> list[Mask]:
    return [mask_of(c) for c in combinations(range(1, n + 1), size)]


def exchange_witness(bases: Sequence[Mask]) -> tuple[Mask, Mask, int] | None:
    """First violation of the basis-exchange axiom, or None if none exists."""
    bset = set(bases)
    for b1 in bases:
        for b2 in bases:
            diff = b1 & ~b2
            x = diff
            while x:
                bit = x & -x
                ok = False
                y = b2 & ~b1
                while y:
                    ybit = y & -y
                    if (b1 & ~bit) | ybit in bset:
                        ok = True
                        break
                    y &= y - 1
                if not ok:
                    return b1, b2, bit.bit_length()
                x &= x - 1
    return None


def validate_matroid(n: int, bases: Iterable[Mask]) -> bool:
    """True iff the collection satisfies the basis-exchange axiom.

    Raises ValueError on malformed input: empty collection, mixed
    cardinalities, or elements outside [n].
    """
    blist = sorted(set(bases))
    if not blist:
        raise ValueError("empty basis collection")
    sizes = {b.bit_count() for b in blist}
    if len(sizes) != 1:
        raise ValueError("bases of mixed cardinality")
    if any(b & ~full_mask(n) for b in blist):
        raise ValueError("basis element outside ground set")
    return exchange_witness(blist) is None


@dataclass(frozen=True)
class Matroid:
    n: int
    rank: int
    bases: tuple[Mask, ...]

    @classmethod
    def from_bases(cls, n: int, bases: Iterable[Mask], check: bool = False) -> "Matroid":
        blist = tuple(sorted(set(bases)))
        if not blist:
            raise ValueError("empty basis collection")
        r = blist[0].bit_count()
        if check and not validate_matroid(n, blist):
            raise ValueError("bases fail the exchange axiom")
        return cls(n=n, rank=r, bases=blist)

    @classmethod
    def uniform(cls, r: int, n: int) -> "Matroid":
        return cls(n=n, rank=r, bases=tuple(all_subsets(n, r)))

    def rank_of(self, subset: Mask) -> int:
        return max((subset & b).bit_count() for b in self.bases)

    def closure(self, subset: Mask) -> Mask:
        r = self.rank_of(subset)
        cl = subset
        for i in range(self.n):
            bit = 1 << i
            if not cl & bit and self.rank_of(subset | bit) == r:
                cl |= bit
        return cl

    def loops(self) -> Mask:
        covered = 0
        for b in self.bases:
            covered |= b
        return full_mask(self.n) & ~covered

    def is_basis(self, subset: Mask) -> bool:
        return subset in set(self.bases)

    def to_json(self) -> dict:
        return {"n": self.n, "rank": self.rank, "bases": [list(elements_of(b)) for b in self.bases]}

    @classmethod
    def from_json(cls, data: dict, check: bool = True) -> "Matroid":
        bases = [parse_subset(b) for b in data["bases"]]
        m = cls.from_bases(int(data["n"]), bases, check=check)
        if "rank" in data and int(data["rank"]) != m.rank:
            raise ValueError("declared rank does not match bases")
        return m

    def __str__(self) -> str:
        return "{" + ",".join(subset_str(b) for b in self.bases) + "}"


_FLATS_CACHE: dict[Matroid, frozenset[Mask]] = {}


def flats(m: Matroid) -> frozenset[Mask]:
    """All closed subsets, from the rank function derived from the bases."""
    cached = _FLATS_CACHE.get(m)
    if cached is not None:
        return cached
    out = {m.closure(s) for s in range(1 << m.n)}
    result = frozenset(out)
    _FLATS_CACHE[m] = result
    return result


def is_quotient(top: Matroid, bottom: Matroid) -> bool:
    """True iff `bottom` is a quotient of `top`: every flat of bottom is a flat of top."""
    if top.n != bottom.n:
        raise ValueError("ground sets differ")
    return flats(bottom) <= flats(top)


def quotient_witness(top: Matroid, bottom: Matroid) -> Mask | None:
    """A flat of `bottom` that is not a flat of `top`, or None."""
    bad = flats(bottom) - flats(top)
    return min(bad) if bad else None


def dual(m: Matroid) -> Matroid:
    f = full_mask(m.n)
    return Matroid.from_bases(m.n, (f & ~b for b in m.bases))


def restrict(m: Matroid, lam: Mask) -> Matroid:
    """Restriction to lam, on the ground set lam (labels kept, as a matroid on [n])."""
    r = m.rank_of(lam)
    return Matroid(n=m.n, rank=r, bases=tuple(sorted({b & lam for b in m.bases if (b & lam).bit_count() == r})))


def contract(m: Matroid, lam: Mask) -> Matroid:
    r = m.rank_of(lam)
    return Matroid(
        n=m.n,
        rank=m.rank - r,
        bases=tuple(sorted({b & ~lam for b in m.bases if (b & lam).bit_count() == r})),
    )


def relabel(m: Matroid, perm: Sequence[int]) -> Matroid:
    """Apply the permutation i -> perm[i-1] of [n] to every basis."""
    def img(mask: Mask) -> Mask:
        return mask_of(perm[e - 1] for e in elements_of(mask))
    return Matroid(n=m.n, rank=m.rank, bases=tuple(sorted(img(b) for b in m.bases)))


def direct_sum(m1: Matroid, m2: Matroid) -> Matroid:
    """Direct sum, with the second ground set shifted to n1+1, ..., n1+n2."""
    shifted = [b << m1.n for b in m2.bases]
    return Matroid(
        n=m1.n + m2.n,
        rank=m1.rank + m2.rank,
        bases=tuple(sorted(b1 | b2 for b1 in m1.bases for b2 in shifted)),
    )


def direct_sum_on(m1: Matroid, m2: Matroid) -> Matroid:
    """Direct sum of matroids on complementary subsets of the same [n].

    m1's bases live inside some lam, m2's inside its complement; no
    relabeling happens.
    """
    if m1.n != m2.n:
        raise ValueError("ground sets differ")
    supp1 = 0
    for b in m1.bases:
        supp1 |= b
    supp2 = 0
    for b in m2.bases:
        supp2 |= b
    if supp1 & supp2:
        raise ValueError("summand supports overlap")
    return Matroid(
        n=m1.n,
        rank=m1.rank + m2.rank,
        bases=tuple(sorted(b1 | b2 for b1 in m1.bases for b2 in m2.bases)),
    )


def face_at(m: Matroid, v: Sequence) -> Matroid:
    """The face Q_v: bases minimizing sum of v over their elements.

    v is an arbitrary rational vector of length n; the result only depends
    on v modulo constants since all bases have the same size.
    """
    vals = [Fraction(x) for x in v]

    def weight(b: Mask) -> Fraction:
        return sum((vals[e - 1] for e in elements_of(b)), Fraction(0))

    best = min(weight(b) for b in m.bases)
    return Matroid(n=m.n, rank=m.rank, bases=tuple(sorted(b for b in m.bases if weight(b) == best)))


def bergman_member(m: Matroid, v: Sequence) -> bool:
    """Whether v lies in the Bergman fan of m.

    Loops of m itself are deleted first (their coordinates in v are
    ignored); membership then asks that the face of the loopless restriction
    selected by v is itself loopless.
    """
    nonloops = full_mask(m.n) & ~m.loops()
    mm = restrict(m, nonloops)
    vals = [Fraction(x) for x in v]

    def weight(b: Mask) -> Fraction:
        return sum((vals[e - 1] for e in elements_of(b)), Fraction(0))

    best = min(weight(b) for b in mm.bases)
    covered = 0
    for b in mm.bases:
        if weight(b) == best:
            covered |= b
    return covered == nonloops


def all_matroids(r: int, n: int) -> list[Matroid]:
    """Every rank-r matroid on [n]; exhaustive filter, so n must stay <= 5."""
    if n > 5:
        raise ValueError("exhaustive matroid enumeration is capped at n = 5")
    ground = all_subsets(n, r)
    out = []
    for size in range(1, len(ground) + 1):
        for combo in combinations(ground, size):
            if exchange_witness(combo) is None:
                out.append(Matroid(n=n, rank=r, bases=tuple(sorted(combo))))
    return out
