"""Point configurations, mixed weights, and regular subdivisions.

A weighted configuration carries one block per flag constituent: the block's
labels are that constituent's bases and its weight vector assigns a rational
to each label (missing labels weigh zero).  Mixing adds the per-block weights
over label tuples, which lifts the summed indicator points; the regular
subdivision projects the lower hull back down.

Maximal cells are found exactly, without floating point and without a
general convex hull: a cell of full dimension is the argmin set at a vertex
of the arrangement cut out by the tie hyperplanes

    <a(lam) - a(xi), v> = w(xi) - w(lam)        (lam, xi in one block),

so solving all d-subsets of those hyperplanes (d = dim of the subdivided
polytope, after restricting v to the span of the tie normals) and keeping
the full-dimensional argmin cells enumerates every maximal cell with an
explicit witness vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .exact_linalg import clear_denominators, kernel_basis, rank, rref, solve
from .flag_matroid import FlagMatroid, validate_flag
from .matroid_core import Mask, Matroid, elements_of, subset_str, validate_matroid


def indicator(mask: Mask, n: int) -> tuple[int, ...]:
    return tuple(1 if mask >> i & 1 else 0 for i in range(n))


@dataclass(frozen=True)
class PointConfiguration:
    """Labeled lattice points; labels are tuples of per-block bitmasks."""

    n: int
    labels: tuple[tuple[Mask, ...], ...]

    def coord(self, label: tuple[Mask, ...]) -> tuple[int, ...]:
        total = [0] * self.n
        for mask in label:
            for e in elements_of(mask):
                total[e - 1] += 1
        return tuple(total)

    def points(self) -> list[tuple[int, ...]]:
        return sorted({self.coord(t) for t in self.labels})


def minkowski_config(fm: FlagMatroid) -> PointConfiguration:
    from itertools import product

    labels = tuple(product(*[m.bases for m in fm.constituents]))
    return PointConfiguration(n=fm.n, labels=labels)


@dataclass(frozen=True)
class WeightedConfig:
    """Per-block label sets with rational weight vectors."""

    n: int
    blocks: tuple[tuple[Mask, ...], ...]
    weights: tuple[tuple[tuple[Mask, int | Fraction], ...], ...] = ()

    @classmethod
    def from_flag(cls, fm: FlagMatroid, weights: Sequence[Mapping[Mask, Fraction]] | None = None) -> "WeightedConfig":
        ws = []
        weights = weights or [{} for _ in fm.constituents]
        if len(weights) != len(fm.constituents):
            raise ValueError("one weight vector per constituent is required")
        for m, w in zip(fm.constituents, weights):
            bad = set(w) - set(m.bases)
            if bad:
                raise ValueError(f"weight on non-label {sorted(bad)}")
            ws.append(tuple(sorted((k, Fraction(v)) for k, v in w.items())))
        return cls(n=fm.n, blocks=tuple(m.bases for m in fm.constituents), weights=tuple(ws))

    def weight(self, block: int, label: Mask) -> Fraction:
        for k, v in self.weights[block]:
            if k == label:
                return Fraction(v)
        return Fraction(0)

    def block_weight_map(self, block: int) -> dict[Mask, Fraction]:
        return {label: self.weight(block, label) for label in self.blocks[block]}

    def ranks(self) -> tuple[int, ...]:
        return tuple(b[0].bit_count() for b in self.blocks)


def mix_weights(wc: WeightedConfig) -> dict[tuple[Mask, ...], Fraction]:
    """The mixed weight of a label tuple: the sum of its per-block weights."""
    from itertools import product

    out = {}
    for tup in product(*wc.blocks):
        out[tup] = sum((wc.weight(i, lab) for i, lab in enumerate(tup)), Fraction(0))
    return out


@dataclass(frozen=True)
class Cell:
    """A product cell: one label subset per block."""

    n: int
    blocks: tuple[tuple[Mask, ...], ...]

    def bases_union(self) -> frozenset[Mask]:
        out: set[Mask] = set()
        for b in self.blocks:
            out.update(b)
        return frozenset(out)

    def to_flag(self) -> FlagMatroid:
        cs = [Matroid(n=self.n, rank=b[0].bit_count(), bases=tuple(sorted(b))) for b in self.blocks]
        return FlagMatroid.from_constituents(cs)

    def blockwise_intersection(self, other: "Cell") -> "Cell | None":
        inter = []
        for a, b in zip(self.blocks, other.blocks):
            common = tuple(sorted(set(a) & set(b)))
            if not common:
                return None
            inter.append(common)
        return Cell(n=self.n, blocks=tuple(inter))

    def blockwise_subset(self, other: "Cell") -> bool:
        return all(set(a) <= set(b) for a, b in zip(self.blocks, other.blocks))

    def sorted_bases(self) -> list[Mask]:
        return sorted(self.bases_union(), key=lambda b: (b.bit_count(), elements_of(b)))

    def bases_str(self) -> str:
        return "{" + ",".join(subset_str(b) for b in self.sorted_bases()) + "}"

    def __str__(self) -> str:
        return "(" + ", ".join("{" + ",".join(subset_str(x) for x in blk) + "}" for blk in self.blocks) + ")"


def weighted_face(wc: WeightedConfig, v: Sequence) -> Cell:
    """Per-block argmin of <indicator, v> + weight."""
    vals = [Fraction(x) for x in v]
    blocks = []
    for i, labels in enumerate(wc.blocks):
        def score(lab: Mask) -> Fraction:
            return sum((vals[e - 1] for e in elements_of(lab)), Fraction(0)) + wc.weight(i, lab)

        best = min(score(lab) for lab in labels)
        blocks.append(tuple(sorted(lab for lab in labels if score(lab) == best)))
    return Cell(n=wc.n, blocks=tuple(blocks))


def cell_dim(cell: Cell) -> int:
    """Dimension of the cell polytope (a Minkowski sum of per-block faces)."""
    rows = []
    for blk in cell.blocks:
        base = indicator(blk[0], cell.n)
        for lab in blk[1:]:
            ind = indicator(lab, cell.n)
            rows.append([ind[i] - base[i] for i in range(cell.n)])
    if not rows:
        return 0
    return rank(rows)


def _tie_hyperplanes(wc: WeightedConfig) -> list[tuple[tuple[int, ...], Fraction]]:
    """Deduplicated tie hyperplanes (normal, offset): <normal, v> = offset."""
    seen = {}
    for i, labels in enumerate(wc.blocks):
        for a, b in combinations(labels, 2):
            ia, ib = indicator(a, wc.n), indicator(b, wc.n)
            normal = [ia[k] - ib[k] for k in range(wc.n)]
            offset = wc.weight(i, b) - wc.weight(i, a)
            scaled = clear_denominators(normal + [offset])
            norm, off = scaled[:-1], scaled[-1]
            if all(x == 0 for x in norm):
                continue
            flip = next(x for x in norm if x != 0) < 0
            if flip:
                norm = tuple(-x for x in norm)
                off = -off
            seen[(tuple(norm), off)] = (list(norm), Fraction(off))
    return [(tuple(n), o) for n, o in seen.values()]


@dataclass
class Subdivision:
    wc: WeightedConfig
    cells: list[Cell]
    witnesses: list[tuple[Fraction, ...]]
    dim: int
    edges: list[tuple[int, int]] = field(default_factory=list)

    def graph(self) -> dict[int, set[int]]:
        g: dict[int, set[int]] = {i: set() for i in range(len(self.cells))}
        for i, j in self.edges:
            g[i].add(j)
            g[j].add(i)
        return g

    def all_faces(self) -> list[Cell]:
        """Every cell of the subdivision: the faces of the maximal cells."""
        from .flag_matroid import faces_of

        seen: dict[tuple, Cell] = {}
        for cell in self.cells:
            fm = cell.to_flag()
            for face in faces_of(fm):
                sub = Cell(n=cell.n, blocks=tuple(m.bases for m in face.constituents))
                seen[sub.blocks] = sub
        return [seen[k] for k in sorted(seen)]

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "cells": [
                {
                    "blocks": [[subset_str(x) for x in blk] for blk in cell.blocks],
                    "bases": sorted(subset_str(b) for b in cell.bases_union()),
                    "witness": [str(x) for x in wit],
                }
                for cell, wit in zip(self.cells, self.witnesses)
            ],
            "edges": [list(e) for e in self.edges],
        }

    def to_dot(self, labels: Sequence[str] | None = None) -> str:
        names = labels or [c.bases_str() for c in self.cells]
        lines = ["graph subdivision {"]
        for i, name in enumerate(names):
            lines.append(f'  c{i} [label="{name}"];')
        for i, j in self.edges:
            lines.append(f"  c{i} -- c{j};")
        lines.append("}")
        return "\n".join(lines)


def regular_subdivision(wc: WeightedConfig) -> Subdivision:
    """The regular (coherent mixed) subdivision induced by the block weights.

    Every maximal cell is returned with an exact witness vector v at which
    `weighted_face` reproduces the cell.
    """
    hyperplanes = _tie_hyperplanes(wc)
    normals = [list(h[0]) for h in hyperplanes]
    d = rank(normals) if normals else 0

    trivial_witness = tuple(Fraction(0) for _ in range(wc.n))
    if d == 0:
        cell = weighted_face(wc, trivial_witness)
        return Subdivision(wc=wc, cells=[cell], witnesses=[trivial_witness], dim=0)

    basis_rows, _ = rref(normals)
    basis = [row for row in basis_rows if any(x != 0 for x in row)]

    # restrict v to the span of the tie normals: v = c . basis
    reduced = []
    for (normal, offset) in hyperplanes:
        coeffs = [sum(Fraction(normal[k]) * basis[j][k] for k in range(wc.n)) for j in range(d)]
        reduced.append((coeffs, offset))

    found: dict[tuple, tuple[Cell, tuple[Fraction, ...]]] = {}

    def consider(v: tuple[Fraction, ...]):
        cell = weighted_face(wc, v)
        if cell.blocks in found:
            return
        if cell_dim(cell) == d:
            found[cell.blocks] = (cell, v)

    for combo in combinations(range(len(reduced)), d):
        rows = [reduced[i][0] for i in combo]
        rhs = [reduced[i][1] for i in combo]
        if rank(rows) < d:
            continue
        c = solve(rows, rhs)
        if c is None:
            continue
        v = tuple(sum(c[j] * Fraction(basis[j][k]) for j in range(d)) for k in range(wc.n))
        consider(v)

    if not found:
        # weights induced by a linear functional: the subdivision is trivial
        rows = [r for r, _ in reduced]
        rhs = [o for _, o in reduced]
        c = solve(rows, rhs)
        if c is None:
            raise AssertionError("no maximal cell found for a nontrivial subdivision")
        v = tuple(sum(c[j] * Fraction(basis[j][k]) for j in range(d)) for k in range(wc.n))
        consider(v)

    cells = []
    witnesses = []
    for key in sorted(found):
        cell, wit = found[key]
        cells.append(cell)
        witnesses.append(wit)

    edges = []
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            inter = cells[i].blockwise_intersection(cells[j])
            if inter is not None and cell_dim(inter) == d - 1:
                edges.append((i, j))
    return Subdivision(wc=wc, cells=cells, witnesses=witnesses, dim=d, edges=edges)


def is_matroidal(s: Subdivision) -> bool:
    """Whether every maximal cell is a flag matroid (constituents included)."""
    for cell in s.cells:
        for blk in cell.blocks:
            try:
                if not validate_matroid(s.wc.n, blk):
                    return False
            except ValueError:
                return False
        if not validate_flag(cell.to_flag()):
            return False
    return True


def flag_dressian_member(fm: FlagMatroid, weights: Sequence[Mapping[Mask, Fraction]]) -> bool:
    """Membership of the weight tuple in the flag Dressian of fm."""
    return is_matroidal(regular_subdivision(WeightedConfig.from_flag(fm, weights)))


def adjacency_graph(s: Subdivision) -> dict[int, set[int]]:
    return s.graph()


def subgraph_above(s: Subdivision, cell: Cell) -> dict[int, set[int]]:
    """The induced adjacency graph on maximal cells having `cell` as a face."""
    keep = {i for i, c in enumerate(s.cells) if cell.blockwise_subset(c)}
    g = s.graph()
    return {i: {j for j in g[i] if j in keep} for i in keep}


def is_connected(graph: Mapping[int, set[int]]) -> bool:
    nodes = list(graph)
    if not nodes:
        return True
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        cur = stack.pop()
        for nb in graph[cur]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(nodes)


# --- exact polytope helpers -------------------------------------------------


def affine_basis(points: Sequence[Sequence]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """(origin, basis of direction space) for the affine span of the points."""
    pts = [[Fraction(x) for x in p] for p in points]
    origin = pts[0]
    diffs = [[p[i] - origin[i] for i in range(len(origin))] for p in pts[1:]]
    basis_rows, _ = rref(diffs) if diffs else ([], [])
    basis = [row for row in basis_rows if any(x != 0 for x in row)]
    return origin, basis


def facet_hyperplanes(points: Sequence[Sequence]) -> list[tuple[tuple[int, ...], Fraction]]:
    """Facet inequalities <normal, x> >= offset of the convex hull of the points.

    Exact brute force: every hyperplane spanned by points is tested for
    supporting the whole set; intended for small vertex counts.
    """
    pts = sorted({tuple(Fraction(x) for x in p) for p in points})
    if len(pts) <= 1:
        return []
    dim_amb = len(pts[0])
    origin, basis = affine_basis(pts)
    d = len(basis)
    if d == 0:
        return []

    # dual basis in the ambient space: <dual[j], basis[k]> = delta_jk, so a
    # chart functional pulls back to the ambient functional with the same
    # coefficients
    gram = [[sum(basis[a][i] * basis[b][i] for i in range(dim_amb)) for b in range(d)] for a in range(d)]
    dual = []
    for j in range(d):
        y = solve(gram, [Fraction(int(k == j)) for k in range(d)])
        dual.append([sum(y[k] * basis[k][i] for k in range(d)) for i in range(dim_amb)])

    # coordinates of each point in the affine chart
    chart = []
    for p in pts:
        target = [p[i] - origin[i] for i in range(dim_amb)]
        chart.append(tuple(sum(dual[j][i] * target[i] for i in range(dim_amb)) for j in range(d)))

    facets = {}
    for combo in combinations(range(len(pts)), d):
        rows = [[chart[i][j] for j in range(d)] + [Fraction(1)] for i in combo]
        ker = kernel_basis(rows)
        if len(ker) != 1:
            continue
        normal_c, offset_c = ker[0][:d], -ker[0][d]
        vals = [sum(chart[i][j] * normal_c[j] for j in range(d)) for i in range(len(pts))]
        lo, hi = min(vals), max(vals)
        if lo < offset_c < hi:
            continue
        if offset_c == hi and offset_c != lo:
            normal_c = tuple(-x for x in normal_c)
            offset_c = -offset_c
            vals = [-x for x in vals]
        if sum(1 for x in vals if x == offset_c) < d:
            continue
        # translate the chart functional back to ambient coordinates
        normal_amb = [sum(normal_c[j] * dual[j][i] for j in range(d)) for i in range(dim_amb)]
        offset_amb = offset_c + sum(normal_amb[i] * origin[i] for i in range(dim_amb))
        scaled = clear_denominators(normal_amb + [offset_amb])
        key = (scaled[:-1], scaled[-1])
        if key not in facets:
            facets[key] = (scaled[:-1], Fraction(scaled[-1]))
    return sorted(facets.values())


def polytope_volume(points: Sequence[Sequence]) -> Fraction:
    """Volume of the convex hull in the chart dropping the last coordinate.

    All configurations here have constant coordinate sum, so dropping the
    last coordinate is an affine isomorphism onto its image and the chart is
    shared by every cell of one subdivision; volumes are therefore directly
    additive.
    """
    pts = sorted({tuple(Fraction(x) for x in p)[:-1] for p in points})
    return _volume_rec([list(p) for p in pts])


def _volume_rec(pts: list[list[Fraction]]) -> Fraction:
    origin, basis = affine_basis(pts)
    d = len(basis)
    if d == 0:
        return Fraction(0)
    if len(pts[0]) != d:
        # re-express in a full-dimensional chart first
        cols = [list(col) for col in zip(*basis)]
        chart = []
        for p in pts:
            target = [p[i] - origin[i] for i in range(len(origin))]
            chart.append(list(solve(cols, target)))
        pts = chart
    if d != len(pts[0]):
        raise AssertionError("chart reduction failed")
    return _volume_fulldim(pts, d)


def _volume_fulldim(pts: list[list[Fraction]], d: int) -> Fraction:
    if d == 1:
        xs = [p[0] for p in pts]
        return max(xs) - min(xs)
    apex = min(pts)
    total = Fraction(0)
    for normal, offset in facet_hyperplanes(pts):
        apex_val = sum(Fraction(normal[i]) * apex[i] for i in range(d))
        if apex_val == offset:
            continue
        face_pts = [p for p in pts if sum(Fraction(normal[i]) * p[i] for i in range(d)) == offset]
        total += _cone_volume(apex, face_pts, d)
    return total


def _cone_volume(apex: Sequence[Fraction], face_pts: list[list[Fraction]], d: int) -> Fraction:
    """Volume of the cone over a (d-1)-face, via simplicial decomposition."""
    simplices = _triangulate(face_pts)
    total = Fraction(0)
    for simplex in simplices:
        rows = [[p[i] - apex[i] for i in range(d)] for p in simplex]
        total += abs(_det(rows)) / _factorial(d)
    return total


def _triangulate(pts: list[list[Fraction]]) -> list[list[list[Fraction]]]:
    """Decompose the hull of the points into simplices of its own dimension."""
    origin, basis = affine_basis(pts)
    d = len(basis)
    if d == 0:
        return [[pts[0]]]
    cols = [list(col) for col in zip(*basis)]
    chart = {}
    for p in pts:
        target = [p[i] - origin[i] for i in range(len(origin))]
        chart[tuple(p)] = list(solve(cols, target))
    chart_pts = sorted({tuple(c) for c in chart.values()})
    if d == 1:
        lo = min(chart_pts)
        hi = max(chart_pts)
        back = {tuple(v): k for k, v in chart.items()}
        return [[list(back[lo]), list(back[hi])]]
    apex_c = min(chart_pts)
    out = []
    for normal, offset in facet_hyperplanes([list(p) for p in chart_pts]):
        apex_val = sum(Fraction(normal[i]) * apex_c[i] for i in range(d))
        if apex_val == offset:
            continue
        face = [list(p) for p in chart_pts if sum(Fraction(normal[i]) * p[i] for i in range(d)) == offset]
        for sub in _triangulate(face):
            out.append([list(apex_c)] + sub)
    back = {tuple(v): k for k, v in chart.items()}
    result = []
    for simplex in out:
        result.append([list(back[tuple(p)]) for p in simplex])
    return result


def _det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    m = [row[:] for row in rows]
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        inv = Fraction(1) / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out
