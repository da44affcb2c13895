"""Affine-chart presentations of complete flag matroid strata.

For a complete flag matroid on [n] whose bases contain the standard flag
{1} c {1,2} c ... the chart is read off the unitriangular matrix whose
(i, j) entry is the variable x_ij when the block-i label [i-1] u {j} is a
basis and 0 otherwise.  Minors indexed by nonbases generate the chart
ideal; minors indexed by bases generate the unit semigroup.

Limit reports assemble, for a weight in the flag Dressian, the matroidal
subdivision, its adjacency graph, per-cell charts and symmetry-class
labels, and the smooth-dominant certificates used to analyze the inverse
limit over the graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .flag_matroid import (
    FlagMatroid,
    SymmetryElement,
    apply_symmetry,
    canonical_form,
    faces_of,
    is_internal,
)
from .matroid_core import Mask, elements_of, full_mask, mask_of, parse_subset, subset_str
from .poly import Poly, var_str
from .pointconfig_subdiv import (
    Cell,
    Subdivision,
    WeightedConfig,
    is_connected,
    is_matroidal,
    regular_subdivision,
)
from .trop_flag import load_fixture


def complete_chains(bases: frozenset[Mask], n: int) -> list[tuple[Mask, ...]]:
    """All complete flags of subsets (sizes 1..n-1) inside the given bases."""
    by_size = {k: sorted(b for b in bases if b.bit_count() == k) for k in range(1, n)}
    chains: list[tuple[Mask, ...]] = [()]
    for k in range(1, n):
        chains = [c + (b,) for c in chains for b in by_size.get(k, []) if not c or (c[-1] | b) == b]
    return chains


def standardize(fm: FlagMatroid) -> tuple[SymmetryElement, FlagMatroid]:
    """Relabel so the standard flag {1} c {1,2} c ... lies in the bases.

    Prefers the identity when the standard flag is already present,
    otherwise uses the lexicographically first complete chain found.
    """
    n = fm.n
    bases = fm.bases_union()
    standard = tuple(mask_of(range(1, k + 1)) for k in range(1, n))
    if all(b in bases for b in standard):
        return SymmetryElement.identity(n), fm
    chains = complete_chains(bases, n)
    if not chains:
        raise ValueError("no complete flag of subsets lies in the bases")
    chain = chains[0]
    perm = [0] * n
    prev = 0
    for k, lam in enumerate(chain, start=1):
        (new,) = elements_of(lam & ~prev)
        perm[new - 1] = k
        prev = lam
    (last,) = elements_of(full_mask(n) & ~prev)
    perm[last - 1] = n
    g = SymmetryElement(perm=tuple(perm), dualize=False)
    return g, apply_symmetry(g, fm)


def _xvar(i: int, j: int):
    return ("x", i, j)


def chart_matrix(fm: FlagMatroid) -> list[list[Poly]]:
    """The unitriangular chart matrix with nonbasis variables set to zero."""
    n = fm.n
    bases = fm.bases_union()
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            if i == j:
                row.append(Poly.const(1))
            elif i < j and (mask_of(range(1, i)) | mask_of([j])) in bases:
                row.append(Poly.variable(_xvar(i, j)))
            else:
                row.append(Poly.zero())
        rows.append(row)
    return rows


def chart_minor(matrix: Sequence[Sequence[Poly]], lam: Mask) -> Poly:
    from .poly import det_symbolic

    cols = elements_of(lam)
    k = len(cols)
    sub = [[matrix[i][j - 1] for j in cols] for i in range(k)]
    return det_symbolic(sub)


@dataclass(frozen=True)
class ChartPresentation:
    variables: tuple[tuple, ...]
    ideal: tuple[Poly, ...]
    semigroup_raw: tuple[Poly, ...]
    semigroup: tuple[Poly, ...]

    def variable_names(self) -> list[str]:
        return [var_str(v) for v in self.variables]

    def rendered_ideal(self) -> list[str]:
        return [str(g) for g in self.ideal]

    def rendered_semigroup(self) -> list[str]:
        return [str(g) for g in self.semigroup]


def _reduce_by_principal(g: Poly, relation: Poly) -> Poly:
    """Eliminate via a binomial relation monomial - variable, when present."""
    target = None
    rest = None
    for m, c in relation.terms:
        if len(m) == 1 and m[0][1] == 1 and abs(c) == 1:
            target = (m, c)
    if target is None:
        return g
    (mono, coeff) = target
    var = mono[0][0]
    remainder = relation - Poly(((mono, coeff),))
    # relation = coeff * var + remainder = 0  =>  var = -remainder / coeff
    replacement = remainder.scale(Fraction(-1, 1) / coeff)
    out = g
    while var in out.variables():
        out = out.substitute({var: replacement})
    return out


def chart_presentation(fm: FlagMatroid) -> ChartPresentation:
    """Variables, ideal generators, and semigroup generators of the chart.

    The flag must already contain the standard flag (see `standardize`).
    The display semigroup list drops units, deduplicates up to sign, and
    removes monomial generators that factor into listed single variables;
    multi-term generators congruent to such monomials modulo a principal
    ideal are dropped the same way.
    """
    n = fm.n
    bases = fm.bases_union()
    standard = tuple(mask_of(range(1, k + 1)) for k in range(1, n))
    if not all(b in bases for b in standard):
        raise ValueError("flag must contain the standard flag; standardize first")
    matrix = chart_matrix(fm)
    variables = tuple(
        _xvar(i, j)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        if (mask_of(range(1, i)) | mask_of([j])) in bases
    )
    ideal: dict = {}
    semi: dict = {}
    for size in range(1, n):
        for lam in _subsets_of_size(n, size):
            minor = chart_minor(matrix, lam)
            if lam in bases:
                if minor.is_zero():
                    raise AssertionError("basis minor vanished")
                norm = minor.sign_normalized()
                if not norm.is_unit_constant():
                    semi.setdefault(norm.terms, norm)
            else:
                if not minor.is_zero():
                    norm = minor.sign_normalized()
                    ideal.setdefault(norm.terms, norm)
    ideal_gens = tuple(sorted(ideal.values(), key=str))
    raw = tuple(sorted(semi.values(), key=lambda p: (p.total_degree(), len(p.terms), str(p))))

    single_vars = {p.terms[0][0][0][0] for p in raw if p.is_monomial() and len(p.terms[0][0]) == 1 and p.terms[0][0][0][1] == 1}
    display = []
    relation = ideal_gens[0] if len(ideal_gens) == 1 else None
    for p in raw:
        q = p
        if not p.is_monomial() and relation is not None:
            q = _reduce_by_principal(p, relation).sign_normalized()
        if q.is_zero() or q.is_unit_constant():
            continue
        if q.is_monomial():
            mono = q.terms[0][0]
            if len(mono) == 1 and mono[0][1] == 1:
                display.append(p)
                continue
            if all(v in single_vars for v, _ in mono):
                continue
            display.append(p)
        else:
            display.append(p)
    seen = {}
    for p in display:
        seen.setdefault(p.terms, p)
    display_gens = tuple(seen.values())
    return ChartPresentation(
        variables=variables,
        ideal=ideal_gens,
        semigroup_raw=raw,
        semigroup=display_gens,
    )


@lru_cache(maxsize=None)
def _subsets_of_size(n: int, size: int):
    from .matroid_core import all_subsets

    return tuple(all_subsets(n, size))


def stratum_dimension(cp: ChartPresentation) -> int | None:
    """Chart dimension: |vars| for a zero ideal, |vars| - 1 for a principal
    nonzero ideal, None (undetermined) otherwise."""
    if not cp.ideal:
        return len(cp.variables)
    if len(cp.ideal) == 1 and not cp.ideal[0].is_zero():
        return len(cp.variables) - 1
    return None


def flag_dimension(fm: FlagMatroid) -> int | None:
    """Stratum dimension of an arbitrary complete flag matroid."""
    _, std = standardize(fm)
    return stratum_dimension(chart_presentation(std))


def morphism_criterion(facet: FlagMatroid, ambient: FlagMatroid, chain: Sequence[Mask], d: int) -> bool:
    """The dimension-counting certificate for a facet pair.

    chain is the complete flag lam_1 c ... c lam_{n-1} (lam_0 = empty is
    implicit); every lam_k must be a basis of the facet.  Counts the pairs
    (i, a) with a outside lam_{i+1} and lam_i u {a} a basis of the ambient
    rank-(i+1) constituent, and compares with d.
    """
    bases = facet.bases_union()
    if any(lam not in bases for lam in chain):
        raise ValueError("chain must consist of bases of the facet")
    n = ambient.n
    chain = tuple(chain)
    count = 0
    for i in range(n - 1):
        lam_i = chain[i - 1] if i >= 1 else 0
        lam_next = chain[i]
        qi = ambient.constituents[i]
        for a in range(1, n + 1):
            bit = 1 << (a - 1)
            if lam_next & bit:
                continue
            if (lam_i | bit) in set(qi.bases):
                count += 1
    return count == d


def criterion_search(facet: FlagMatroid, ambient: FlagMatroid, d: int) -> tuple[Mask, ...] | None:
    """First complete flag in the facet's bases passing the criterion, if any."""
    for chain in complete_chains(facet.bases_union(), facet.n):
        if morphism_criterion(facet, ambient, chain, d):
            return chain
    return None


# --- symmetry-class labels against the classification table ------------------


@lru_cache(maxsize=1)
def _table1_rows() -> list[dict]:
    return load_fixture("table1.json")["rows"]


@lru_cache(maxsize=1)
def _table1_canonical() -> dict[tuple, int]:
    out = {}
    for row in _table1_rows():
        fm = FlagMatroid.from_nonbases(4, (1, 2, 3), row["nonbases"])
        out[canonical_form(fm)] = row["row"]
    return out


def table1_flag(row: int) -> FlagMatroid:
    data = _table1_rows()[row - 1]
    return FlagMatroid.from_nonbases(4, (1, 2, 3), data["nonbases"])


def orbit_label(fm: FlagMatroid) -> int:
    """Class number (1..15) of a full-dimensional flag matroid on [4]."""
    key = canonical_form(fm)
    table = _table1_canonical()
    if key not in table:
        raise ValueError("flag matroid is not in any full-dimensional class")
    return table[key]


# --- limit diagrams -----------------------------------------------------------


@dataclass
class LimitVertex:
    cell: Cell
    flag: FlagMatroid
    orbit: int
    dim: int | None
    chart_variables: list[str]


@dataclass
class LimitEdge:
    i: int
    j: int
    cell: Cell
    internal: bool
    criterion: dict[int, tuple[Mask, ...] | None]


@dataclass
class LimitDiagram:
    subdivision: Subdivision
    vertices: list[LimitVertex]
    edges: list[LimitEdge]
    is_tree: bool

    def to_json(self) -> dict:
        return {
            "is_tree": self.is_tree,
            "vertices": [
                {
                    "bases": [subset_str(b) for b in v.cell.sorted_bases()],
                    "orbit": v.orbit,
                    "dim": v.dim,
                    "chart_variables": v.chart_variables,
                }
                for v in self.vertices
            ],
            "edges": [
                {
                    "between": [e.i, e.j],
                    "bases": [subset_str(b) for b in e.cell.sorted_bases()],
                    "internal": e.internal,
                    "criterion_flags": {
                        str(k): [subset_str(x) for x in v] if v is not None else None
                        for k, v in e.criterion.items()
                    },
                }
                for e in self.edges
            ],
        }

    def render(self) -> str:
        lines = ["limit diagram" + (" (tree)" if self.is_tree else " (has cycles)")]
        for i, v in enumerate(self.vertices):
            lines.append(f"  vertex {i}: orbit ({v.orbit}), dim {v.dim}, bases {v.cell.bases_str()}")
        for e in self.edges:
            wit = {k: ("<".join(subset_str(x) for x in v) if v else "none") for k, v in e.criterion.items()}
            lines.append(
                f"  edge {e.i}-{e.j}: internal={e.internal}, shared {e.cell.bases_str()}, flags {wit}"
            )
        return "\n".join(lines)

    def to_dot(self) -> str:
        lines = ["graph limit {"]
        for i, v in enumerate(self.vertices):
            lines.append(f'  c{i} [label="({v.orbit})"];')
        for e in self.edges:
            lines.append(f"  c{e.i} -- c{e.j};")
        lines.append("}")
        return "\n".join(lines)


def limit_report(fm: FlagMatroid, weights: Sequence[Mapping[Mask, Fraction]]) -> LimitDiagram:
    """Assemble the limit-diagram certificates for a flag-Dressian weight."""
    wc = WeightedConfig.from_flag(fm, weights)
    s = regular_subdivision(wc)
    if not is_matroidal(s):
        raise ValueError("the weight vector induces a non-matroidal subdivision")
    vertices = []
    for cell in s.cells:
        flag = cell.to_flag()
        _, std = standardize(flag)
        cp = chart_presentation(std)
        vertices.append(
            LimitVertex(
                cell=cell,
                flag=flag,
                orbit=orbit_label(flag),
                dim=stratum_dimension(cp),
                chart_variables=cp.variable_names(),
            )
        )
    edges = []
    graph_edges = s.edges
    for (i, j) in graph_edges:
        shared = s.cells[i].blockwise_intersection(s.cells[j])
        shared_flag = shared.to_flag()
        internal = is_internal(shared_flag, fm)
        crit: dict[int, tuple[Mask, ...] | None] = {}
        for end in (i, j):
            d = vertices[end].dim
            crit[end] = None if d is None else criterion_search(shared_flag, s.cells[end].to_flag(), d)
        edges.append(LimitEdge(i=i, j=j, cell=shared, internal=internal, criterion=crit))
    nvert = len(vertices)
    graph = s.graph()
    is_tree = is_connected(graph) and len(graph_edges) == nvert - 1
    return LimitDiagram(subdivision=s, vertices=vertices, edges=edges, is_tree=is_tree)
