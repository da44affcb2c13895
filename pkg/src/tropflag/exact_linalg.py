"""Exact rational and integer linear algebra.

Everything here works over Python's ``Fraction`` (or plain ints for lattice
computations); no floating point is used anywhere in the package.  Matrices
are lists of equal-length rows.  Sizes stay well below 100x100, so the simple
textbook algorithms are the right tool.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

Vec = tuple[Fraction, ...]


def _to_fraction_rows(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (matrix, pivot column indices)."""
    m = _to_fraction_rows(rows)
    if not m:
        return [], []
    nrows, ncols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank over the rationals."""
    return len(rref(rows)[1])


def kernel_basis(rows: Sequence[Sequence]) -> list[Vec]:
    """Basis of the right kernel, normalized to reduced row echelon form.

    Returns the empty list iff the matrix has full column rank.
    """
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    normalized, _ = rref(basis)
    return [tuple(row) for row in normalized if any(x != 0 for x in row)]


def solve(rows: Sequence[Sequence], rhs: Sequence) -> Vec | None:
    """One solution of A x = b, or None if the system is inconsistent."""
    if not rows:
        return None if any(Fraction(x) != 0 for x in rhs) else ()
    ncols = len(rows[0])
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return tuple(x)


def solve_affine(rows: Sequence[Sequence], rhs: Sequence) -> tuple[Vec, list[Vec]] | None:
    """Full solution set of A x = b as (particular, kernel basis), or None."""
    part = solve(rows, rhs)
    if part is None:
        return None
    return part, kernel_basis(rows)


def primitive(vec: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries (orientation kept)."""
    g = 0
    for x in vec:
        g = gcd(g, abs(int(x)))
    if g <= 1:
        return tuple(int(x) for x in vec)
    return tuple(int(x) // g for x in vec)


def clear_denominators(vec: Sequence) -> tuple[int, ...]:
    """Scale a rational vector by a positive rational into a primitive integer vector."""
    fracs = [Fraction(x) for x in vec]
    lcm = 1
    for f in fracs:
        lcm = lcm * f.denominator // gcd(lcm, f.denominator)
    return primitive([int(f * lcm) for f in fracs])


def smith_normal_form(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith normal form of an integer matrix.

    Returns (U, D, V) with U*A*V = D, U and V unimodular, D diagonal with
    each diagonal entry dividing the next.  Pivoting is on the minimal
    nonzero absolute value.
    """
    d = [[int(x) for x in row] for row in rows]
    nrows = len(d)
    ncols = len(d[0]) if nrows else 0
    u = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    v = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        d[dst] = [a + c * b for a, b in zip(d[dst], d[src])]
        u[dst] = [a + c * b for a, b in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in d:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    t = 0
    while True:
        entries = [(abs(d[i][j]), i, j) for i in range(t, nrows) for j in range(t, ncols) if d[i][j] != 0]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)
        dirty = False
        for i in range(t + 1, nrows):
            if d[i][t] != 0:
                q = d[i][t] // d[t][t]
                add_row(t, i, -q)
                if d[i][t] != 0:
                    dirty = True
        for j in range(t + 1, ncols):
            if d[t][j] != 0:
                q = d[t][j] // d[t][t]
                add_col(t, j, -q)
                if d[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        # enforce divisibility of later entries by the pivot
        bad = None
        for i in range(t + 1, nrows):
            for j in range(t + 1, ncols):
                if d[i][j] % d[t][t] != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            add_row(bad, t, 1)
            continue
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
        if t == min(nrows, ncols):
            break
    return u, d, v


def invariant_factors(rows: Sequence[Sequence[int]]) -> list[int]:
    _, d, _ = smith_normal_form(rows)
    n = min(len(d), len(d[0]) if d else 0)
    return [d[i][i] for i in range(n) if d[i][i] != 0]


def int_matrix_inverse(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Inverse of a unimodular integer matrix (exact, integer entries)."""
    n = len(rows)
    aug = [[Fraction(rows[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    inv = [[red[i][n + j] for j in range(n)] for i in range(n)]
    for row in inv:
        for x in row:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in inv]


@dataclass(frozen=True)
class IntegerLattice:
    """A saturated sublattice of Z^ambient_rank, given by a basis of rows."""

    ambient_rank: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def is_saturated(self) -> bool:
        if not self.basis:
            return True
        return all(f == 1 for f in invariant_factors(list(self.basis)))

    def spans_same_rational_space(self, vectors: Sequence[Sequence]) -> bool:
        a = rref(list(self.basis))[0] if self.basis else []
        b = rref(list(vectors))[0] if vectors else []
        a = [row for row in a if any(x != 0 for x in row)]
        b = [row for row in b if any(x != 0 for x in row)]
        return a == b

    def contains(self, vec: Sequence[int]) -> bool:
        if not self.basis:
            return all(int(x) == 0 for x in vec)
        sol = solve([list(col) for col in zip(*self.basis)], list(vec))
        return sol is not None and all(x.denominator == 1 for x in sol)


def saturate_image(rows: Sequence[Sequence[int]]) -> IntegerLattice:
    """Saturation of the column span of an integer matrix inside Z^rows.

    Computed via Smith normal form: if U A V = D with r nonzero diagonal
    entries, the saturation is spanned by the first r columns of U^-1.
    """
    nrows = len(rows)
    u, d, _ = smith_normal_form(rows)
    r = sum(1 for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i] != 0)
    uinv = int_matrix_inverse(u)
    basis = tuple(tuple(uinv[i][j] for i in range(nrows)) for j in range(r))
    return IntegerLattice(ambient_rank=nrows, basis=basis)


def extend_to_unimodular(basis_rows: Sequence[Sequence[int]], ambient: int) -> list[list[int]]:
    """Complete a saturated lattice basis (rows) to a Z-basis of Z^ambient.

    The first len(basis_rows) rows of the result span the same lattice.
    """
    k = len(basis_rows)
    if k == 0:
        return [[int(i == j) for j in range(ambient)] for i in range(ambient)]
    u, d, v = smith_normal_form(basis_rows)
    for i in range(k):
        if i >= min(k, ambient) or d[i][i] != 1:
            raise ValueError("basis rows must be independent and saturated")
    vinv = int_matrix_inverse(v)
    return vinv


class QuotientMap:
    """Integer coordinates on Z^ambient / (saturated lattice)."""

    def __init__(self, lattice_rows: Sequence[Sequence[int]], ambient: int):
        self.ambient = ambient
        self.k = len(lattice_rows)
        full = extend_to_unimodular(lattice_rows, ambient)
        self._v = int_matrix_inverse(full)  # x @ v = coords w.r.t. rows of `full`

    def __call__(self, vec: Sequence[int]) -> tuple[int, ...]:
        coords = [sum(int(vec[i]) * self._v[i][j] for i in range(self.ambient)) for j in range(self.ambient)]
        return tuple(coords[self.k:])
