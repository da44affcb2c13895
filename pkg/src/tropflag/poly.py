"""Sparse multivariate polynomials over the rationals.

Variables are structured, hashable keys rather than strings:

* ``("p", k, mask)`` -- homogeneous coordinate indexed by a size-k subset
  of the ground set, encoded as a bitmask;
* ``("x", i, j)``    -- affine chart coordinate, 1 <= i < j <= n.

A monomial is a sorted tuple of (variable, exponent) pairs with positive
exponents; a polynomial maps monomials to nonzero Fraction coefficients.
Printing follows a fixed variable order so rendered strings are stable and
directly comparable against golden data ("uy-w", "p1p23-p2p13+p3p12").
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Var = tuple
Monomial = tuple[tuple[Var, int], ...]

# shorthand used for the n=4 chart coordinates
CHART_SHORTHAND = {(1, 2): "u", (1, 3): "v", (1, 4): "w", (2, 3): "x", (2, 4): "y", (3, 4): "z"}


def var_sort_key(v: Var):
    if v[0] == "p":
        _, k, mask = v
        return (0, k, _mask_elements(mask))
    if v[0] == "x":
        return (1, v[1], v[2])
    return (2, v)


def _mask_elements(mask: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def var_str(v: Var) -> str:
    if v[0] == "p":
        return "p" + "".join(str(e) for e in _mask_elements(v[2]))
    if v[0] == "x":
        i, j = v[1], v[2]
        if (i, j) in CHART_SHORTHAND:
            return CHART_SHORTHAND[(i, j)]
        return f"x{i}{j}"
    return str(v)


@dataclass(frozen=True)
class Poly:
    terms: Monomial | tuple  # mapping stored as a sorted tuple of (monomial, coeff)

    # --- construction -------------------------------------------------

    @staticmethod
    def _canon(d: Mapping[Monomial, Fraction]) -> "Poly":
        items = tuple(sorted(((m, c) for m, c in d.items() if c != 0), key=lambda mc: mc[0]))
        return Poly(items)

    @classmethod
    def zero(cls) -> "Poly":
        return cls(())

    @classmethod
    def const(cls, c) -> "Poly":
        c = Fraction(c)
        return cls._canon({(): c}) if c else cls.zero()

    @classmethod
    def variable(cls, v: Var) -> "Poly":
        return cls((( ((v, 1),), Fraction(1)),))

    # --- queries -------------------------------------------------------

    def as_dict(self) -> dict[Monomial, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m, _ in self.terms)

    def is_unit_constant(self) -> bool:
        return self.is_constant() and not self.is_zero()

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def variables(self) -> set[Var]:
        return {v for m, _ in self.terms for v, _ in m}

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m, _ in self.terms), default=0)

    # --- arithmetic ----------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        d = self.as_dict()
        for m, c in other.terms:
            d[m] = d.get(m, Fraction(0)) + c
        return Poly._canon(d)

    def __neg__(self) -> "Poly":
        return Poly(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        d: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms:
            e1 = dict(m1)
            for m2, c2 in other.terms:
                e = dict(e1)
                for v, k in m2:
                    e[v] = e.get(v, 0) + k
                m = tuple(sorted(e.items(), key=lambda ve: var_sort_key(ve[0])))
                d[m] = d.get(m, Fraction(0)) + c1 * c2
        return Poly._canon(d)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly.zero()
        return Poly(tuple((m, coef * c) for m, coef in self.terms))

    # --- the operations used by the rest of the package ----------------

    def substitute_zero(self, vars_to_kill: Iterable[Var]) -> "Poly":
        """Drop every term containing one of the given variables."""
        kill = set(vars_to_kill)
        return Poly(tuple((m, c) for m, c in self.terms if not any(v in kill for v, _ in m)))

    def substitute(self, assignments: Mapping[Var, "Poly"]) -> "Poly":
        """Replace variables by polynomials."""
        out = Poly.zero()
        for m, c in self.terms:
            term = Poly.const(c)
            for v, e in m:
                rep = assignments.get(v, Poly.variable(v))
                for _ in range(e):
                    term = term * rep
            out = out + term
        return out

    def initial_form(self, weights: Mapping[Var, Fraction]) -> "Poly":
        """Sum of the terms of minimal total weight (min convention)."""
        if self.is_zero():
            return self
        def wt(m: Monomial) -> Fraction:
            return sum((Fraction(weights[v]) * e for v, e in m), Fraction(0))
        values = [(wt(m), m, c) for m, c in self.terms]
        lo = min(w for w, _, _ in values)
        return Poly(tuple((m, c) for w, m, c in values if w == lo))

    def sign_normalized(self) -> "Poly":
        """Scale by -1 if the leading coefficient is negative."""
        if self.is_zero():
            return self
        lead = min(self.terms, key=lambda mc: _print_key(mc[0]))
        return -self if lead[1] < 0 else self

    # --- printing -------------------------------------------------------

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for m, c in sorted(self.terms, key=lambda mc: _print_key(mc[0])):
            mono = "".join(var_str(v) if e == 1 else f"{var_str(v)}^{e}" for v, e in
                           sorted(m, key=lambda ve: var_sort_key(ve[0])))
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += sign + body
        return out


def _print_key(m: Monomial):
    # lexicographically largest exponent vector first; the (4,) sentinel makes
    # a monomial sort before any of its proper divisors
    if not m:
        return ((4,),)
    pairs = sorted(((var_sort_key(v), -e) for v, e in m))
    return tuple(pairs) + ((4,),)


def det_symbolic(matrix: Sequence[Sequence[Poly]]) -> Poly:
    """Exact determinant by cofactor expansion (intended for sizes <= 4)."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    if n == 0:
        return Poly.const(1)
    if n == 1:
        return matrix[0][0]
    total = Poly.zero()
    for j in range(n):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        minor = [[matrix[i][k] for k in range(n) if k != j] for i in range(1, n)]
        cof = det_symbolic(minor)
        term = entry * cof
        total = total + (term if j % 2 == 0 else -term)
    return total


def det_leibniz(matrix: Sequence[Sequence[Poly]]) -> Poly:
    """Brute-force determinant via the permutation sum; test oracle only."""
    from itertools import permutations

    n = len(matrix)
    total = Poly.zero()
    for perm in permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        prod = Poly.const(1)
        for i in range(n):
            prod = prod * matrix[i][perm[i]]
        total = total + (prod if inversions % 2 == 0 else -prod)
    return total
