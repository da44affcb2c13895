"""Flag matroids: chains of matroid quotients on a common ground set.

A flag matroid is stored as its tuple of constituents with weakly increasing
ranks; `normalize` removes repeated ranks (the constituents are then forced
to coincide).  The symmetry group used throughout is the product of the
symmetric group on [n] with the two-element group acting by duality; orbit
representatives are canonicalized as the lexicographically minimal
serialization over the group.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

from .matroid_core import (
    Mask,
    Matroid,
    contract,
    direct_sum,
    direct_sum_on,
    dual,
    elements_of,
    face_at,
    flats,
    full_mask,
    is_quotient,
    mask_of,
    parse_subset,
    quotient_witness,
    relabel,
    restrict,
    subset_str,
    all_matroids,
)


@dataclass(frozen=True)
class SymmetryElement:
    """A permutation of [n] (i maps to perm[i-1]) possibly followed by duality."""

    perm: tuple[int, ...]
    dualize: bool = False

    @classmethod
    def identity(cls, n: int) -> "SymmetryElement":
        return cls(perm=tuple(range(1, n + 1)), dualize=False)

    def inverse(self) -> "SymmetryElement":
        n = len(self.perm)
        inv = [0] * n
        for i, p in enumerate(self.perm):
            inv[p - 1] = i + 1
        # duality commutes with relabeling, so the inverse keeps the flag
        return SymmetryElement(perm=tuple(inv), dualize=self.dualize)


@dataclass(frozen=True)
class FlagMatroid:
    n: int
    ranks: tuple[int, ...]
    constituents: tuple[Matroid, ...]

    @classmethod
    def from_constituents(cls, constituents: Sequence[Matroid], check: bool = False) -> "FlagMatroid":
        cs = tuple(constituents)
        if not cs:
            raise ValueError("a flag matroid needs at least one constituent")
        n = cs[0].n
        fm = cls(n=n, ranks=tuple(m.rank for m in cs), constituents=cs)
        if check:
            validate_flag(fm)
        return fm

    @classmethod
    def uniform(cls, ranks: Sequence[int], n: int) -> "FlagMatroid":
        return cls.from_constituents([Matroid.uniform(r, n) for r in ranks])

    @classmethod
    def from_nonbases(cls, n: int, ranks: Sequence[int], nonbases: Iterable, check: bool = False) -> "FlagMatroid":
        masks = [parse_subset(s) for s in nonbases]
        cs = []
        for r in ranks:
            from .matroid_core import all_subsets

            excluded = {m for m in masks if m.bit_count() == r}
            bases = [b for b in all_subsets(n, r) if b not in excluded]
            cs.append(Matroid.from_bases(n, bases))
        return cls.from_constituents(cs, check=check)

    def bases_union(self) -> frozenset[Mask]:
        out: set[Mask] = set()
        for m in self.constituents:
            out.update(m.bases)
        return frozenset(out)

    def nonbases(self) -> tuple[Mask, ...]:
        from .matroid_core import all_subsets

        out = []
        for m in self.constituents:
            present = set(m.bases)
            out.extend(b for b in all_subsets(self.n, m.rank) if b not in present)
        return tuple(sorted(out))

    def serialize(self) -> tuple:
        return (self.n, self.ranks, tuple(m.bases for m in self.constituents))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "ranks": list(self.ranks),
            "constituents": [m.to_json() for m in self.constituents],
        }

    @classmethod
    def from_json(cls, data: dict, check: bool = True) -> "FlagMatroid":
        n = int(data["n"])
        if "constituents" in data:
            cs = [Matroid.from_json(d, check=check) for d in data["constituents"]]
            fm = cls.from_constituents(cs, check=check)
        elif "nonbases" in data:
            ranks = [int(r) for r in data["ranks"]]
            fm = cls.from_nonbases(n, ranks, data["nonbases"], check=check)
        else:
            raise ValueError("flag matroid JSON needs 'constituents' or 'nonbases'")
        if "ranks" in data and tuple(int(r) for r in data["ranks"]) != fm.ranks:
            raise ValueError("declared ranks do not match constituents")
        return fm

    def __str__(self) -> str:
        return "(" + ", ".join(str(m) for m in self.constituents) + ")"


def validate_flag(fm: FlagMatroid) -> bool:
    """True iff consecutive constituents satisfy the quotient relation.

    Raises ValueError if the rank vector is not weakly increasing.
    """
    if any(r2 < r1 for r1, r2 in zip(fm.ranks, fm.ranks[1:])):
        raise ValueError("rank vector must be weakly increasing")
    for lower, upper in zip(fm.constituents, fm.constituents[1:]):
        if not is_quotient(upper, lower):
            return False
    return True


def flag_quotient_witness(fm: FlagMatroid) -> tuple[int, Mask] | None:
    """(index i, flat) such that constituent i's flat is missing from constituent i+1."""
    for i, (lower, upper) in enumerate(zip(fm.constituents, fm.constituents[1:])):
        w = quotient_witness(upper, lower)
        if w is not None:
            return i, w
    return None


def normalize(fm: FlagMatroid) -> FlagMatroid:
    """Remove consecutive equal-rank constituents, asserting they coincide."""
    kept: list[Matroid] = []
    for m in fm.constituents:
        if kept and kept[-1].rank == m.rank:
            if kept[-1].bases != m.bases:
                raise ValueError("equal-rank constituents differ; not a flag matroid")
            continue
        kept.append(m)
    return FlagMatroid.from_constituents(kept)


def flag_face(fm: FlagMatroid, v: Sequence) -> FlagMatroid:
    return FlagMatroid.from_constituents([face_at(m, v) for m in fm.constituents])


def flag_dual(fm: FlagMatroid) -> FlagMatroid:
    return FlagMatroid.from_constituents([dual(m) for m in reversed(fm.constituents)])


def _compress_to(lam: Mask, n: int):
    els = elements_of(lam)
    pos = {e: i + 1 for i, e in enumerate(els)}

    def img(mask: Mask) -> Mask:
        return mask_of(pos[e] for e in elements_of(mask))

    return len(els), img


def flag_restrict(fm: FlagMatroid, lam: Mask) -> FlagMatroid:
    """Componentwise restriction, relabeled onto the ground set [|lam|]."""
    k, img = _compress_to(lam, fm.n)
    cs = []
    for m in fm.constituents:
        rm = restrict(m, lam)
        cs.append(Matroid(n=k, rank=rm.rank, bases=tuple(sorted(img(b) for b in rm.bases))))
    return normalize(FlagMatroid.from_constituents(cs))


def flag_contract(fm: FlagMatroid, lam: Mask) -> FlagMatroid:
    """Componentwise contraction, relabeled onto the ground set [n - |lam|]."""
    comp = full_mask(fm.n) & ~lam
    k, img = _compress_to(comp, fm.n)
    cs = []
    for m in fm.constituents:
        cm = contract(m, lam)
        cs.append(Matroid(n=k, rank=cm.rank, bases=tuple(sorted(img(b) for b in cm.bases))))
    return normalize(FlagMatroid.from_constituents(cs))


def flag_direct_sum(fm1: FlagMatroid, fm2: FlagMatroid) -> FlagMatroid:
    """Componentwise direct sum with the second ground set shifted by n1."""
    if len(fm1.constituents) != len(fm2.constituents):
        raise ValueError("direct sum needs equally long flags")
    return normalize(
        FlagMatroid.from_constituents(
            [direct_sum(a, b) for a, b in zip(fm1.constituents, fm2.constituents)]
        )
    )


def restriction_contraction_sum(fm: FlagMatroid, lam: Mask) -> FlagMatroid:
    """The flag (Q|lam) + (Q/lam) on the original ground set [n], labels kept."""
    cs = []
    for m in fm.constituents:
        cs.append(direct_sum_on(restrict(m, lam), contract(m, lam)))
    return normalize(FlagMatroid.from_constituents(cs))


def apply_symmetry(g: SymmetryElement, fm: FlagMatroid) -> FlagMatroid:
    out = FlagMatroid.from_constituents([relabel(m, g.perm) for m in fm.constituents])
    if g.dualize:
        out = flag_dual(out)
    return out


def group_elements(n: int, with_duality: bool = True) -> list[SymmetryElement]:
    gens = []
    for perm in permutations(range(1, n + 1)):
        gens.append(SymmetryElement(perm=perm, dualize=False))
        if with_duality:
            gens.append(SymmetryElement(perm=perm, dualize=True))
    return gens


def _self_dual_ranks(ranks: Sequence[int], n: int) -> bool:
    return tuple(ranks) == tuple(n - r for r in reversed(ranks))


def canonical_form(fm: FlagMatroid) -> tuple:
    """Lexicographically minimal serialization over the symmetry group.

    Duality is only used when the rank vector is preserved by it, so the
    orbit stays inside the same family of flag matroids.
    """
    use_dual = _self_dual_ranks(fm.ranks, fm.n)
    return min(apply_symmetry(g, fm).serialize() for g in group_elements(fm.n, use_dual))


def orbit_size(fm: FlagMatroid) -> int:
    use_dual = _self_dual_ranks(fm.ranks, fm.n)
    return len({apply_symmetry(g, fm).serialize() for g in group_elements(fm.n, use_dual)})


def enumerate_flags(ranks: Sequence[int], n: int) -> list[FlagMatroid]:
    """Every valid flag matroid with the given rank vector on [n] (n <= 5)."""
    if n > 5:
        raise ValueError("flag enumeration is capped at n = 5")
    pools = [all_matroids(r, n) for r in ranks]
    out: list[FlagMatroid] = []

    def grow(prefix: list[Matroid], depth: int):
        if depth == len(pools):
            out.append(FlagMatroid.from_constituents(prefix))
            return
        for m in pools[depth]:
            if not prefix or is_quotient(m, prefix[-1]):
                prefix.append(m)
                grow(prefix, depth + 1)
                prefix.pop()

    grow([], 0)
    return out


@dataclass(frozen=True)
class OrbitInfo:
    representative: FlagMatroid
    size: int
    dim: int


def enumerate_orbits(ranks: Sequence[int], n: int) -> list[OrbitInfo]:
    """Symmetry classes of flag matroids with the given ranks on [n].

    Returns one lexicographically minimal representative per class together
    with the orbit size and the dimension of the flag matroid polytope.
    """
    seen: dict[tuple, FlagMatroid] = {}
    for fm in enumerate_flags(ranks, n):
        key = canonical_form(fm)
        if key not in seen:
            seen[key] = FlagMatroid.from_constituents(
                [Matroid(n=n, rank=m[0].bit_count() if m else 0, bases=m) for m in key[2]]
            )
    infos = []
    for key in sorted(seen):
        rep = seen[key]
        infos.append(OrbitInfo(representative=rep, size=orbit_size(rep), dim=polytope_dim(rep)))
    return infos


def vertex_points(fm: FlagMatroid) -> list[tuple[int, ...]]:
    """Vertices of the flag matroid polytope, as integer points of Z^n.

    The normal fan coarsens the braid arrangement, so running the
    componentwise minimization over all n! generic orderings of the ground
    set hits every vertex.
    """
    pts: set[tuple[int, ...]] = set()
    n = fm.n
    for perm in permutations(range(n)):
        v = [Fraction(0)] * n
        for pos, idx in enumerate(perm):
            v[idx] = Fraction(pos)
        total = [0] * n
        for m in fm.constituents:
            b = min(m.bases, key=lambda bb: sum(v[e - 1] for e in elements_of(bb)))
            for e in elements_of(b):
                total[e - 1] += 1
        pts.add(tuple(total))
    return sorted(pts)


def label_points(fm: FlagMatroid) -> list[tuple[int, ...]]:
    """All distinct coordinate points of the defining configuration."""
    pts = {(0,) * fm.n}
    for m in fm.constituents:
        new = set()
        for p in pts:
            for b in m.bases:
                q = list(p)
                for e in elements_of(b):
                    q[e - 1] += 1
                new.add(tuple(q))
        pts = new
    return sorted(pts)


def polytope_dim(fm: FlagMatroid) -> int:
    from .exact_linalg import rank as mat_rank

    pts = vertex_points(fm)
    if len(pts) <= 1:
        return 0
    base = pts[0]
    return mat_rank([[p[i] - base[i] for i in range(fm.n)] for p in pts[1:]])


_FACES_CACHE: dict[FlagMatroid, dict[FlagMatroid, tuple[Mask, ...]]] = {}


def faces_of(fm: FlagMatroid) -> dict[FlagMatroid, tuple[Mask, ...]]:
    """All faces of the flag matroid polytope, keyed by a witness chain.

    Faces correspond to chains of proper nonempty subsets of [n]: the chain
    lam_1 c ... c lam_k selects the face at -(indicator sum).  Chains are
    swept in decreasing order; the map sends each face to one witness chain.
    """
    cached = _FACES_CACHE.get(fm)
    if cached is not None:
        return cached
    n = fm.n
    proper = list(range(1, full_mask(n)))
    found: dict[FlagMatroid, tuple[Mask, ...]] = {fm: ()}
    frontier: list[tuple[Mask, ...]] = [()]
    while frontier:
        nxt = []
        for chain in frontier:
            last = chain[-1] if chain else None
            for lam in proper:
                if last is not None and not (lam | last == last and lam != last):
                    continue
                v = [0] * n
                for c in chain + (lam,):
                    for e in elements_of(c):
                        v[e - 1] -= 1
                sub = flag_face(fm, v)
                if sub not in found:
                    found[sub] = chain + (lam,)
                nxt.append(chain + (lam,))
        frontier = nxt
    _FACES_CACHE[fm] = found
    return found


def is_face_of(face: FlagMatroid, ambient: FlagMatroid) -> bool:
    return face in faces_of(ambient)


_FACETS_CACHE: dict[FlagMatroid, list] = {}


def _ambient_facets(ambient: FlagMatroid) -> list:
    cached = _FACETS_CACHE.get(ambient)
    if cached is None:
        from .pointconfig_subdiv import facet_hyperplanes

        cached = facet_hyperplanes([list(p) for p in vertex_points(ambient)])
        _FACETS_CACHE[ambient] = cached
    return cached


def is_internal(face: FlagMatroid, ambient: FlagMatroid) -> bool:
    """Whether the polytope of `face` meets the relative interior of the
    ambient flag matroid polytope.

    `face` may be any cell lying inside the ambient polytope (a face of it,
    or a cell of a subdivision of it).  Checked exactly: the barycenter of
    the cell's vertex set must satisfy every ambient facet inequality
    strictly; containment of all vertices is verified first.
    """
    facets = _ambient_facets(ambient)
    verts = vertex_points(face)
    for normal, offset in facets:
        for p in verts:
            if sum(Fraction(a) * b for a, b in zip(normal, p)) < offset:
                raise ValueError("cell does not lie inside the ambient polytope")
    k = len(verts)
    bary = [Fraction(sum(p[i] for p in verts), k) for i in range(ambient.n)]
    for normal, offset in facets:
        val = sum(Fraction(a) * b for a, b in zip(normal, bary))
        if val <= offset:
            return False
    return True
