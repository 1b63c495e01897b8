"""Linear forms over ring elements, coefficient matching, exact nullspaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Hashable, Iterable, Sequence

from .ring import Monomial, RingElem


class NonlinearError(RuntimeError):
    """An equation template turned out not to be linear in the unknowns."""


class LinearForm:
    """``sum_u unknown_u * coeff_u`` with ring-element coefficients."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: dict[int, RingElem] | None = None):
        self.n = n
        self.coeffs = {u: c for u, c in (coeffs or {}).items() if not c.is_zero()}

    @classmethod
    def unknown(cls, n: int, index: int, coeff: RingElem | None = None) -> LinearForm:
        return cls(n, {index: coeff if coeff is not None else RingElem.const(n, 1)})

    @classmethod
    def combination(cls, n: int, indices: Sequence[int], elems: Sequence[RingElem]) -> LinearForm:
        return cls(n, dict(zip(indices, elems)))

    def __add__(self, other: LinearForm) -> LinearForm:
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, LinearForm):
            raise NonlinearError("cannot add a constant to a homogeneous linear form")
        out = dict(self.coeffs)
        for u, c in other.coeffs.items():
            out[u] = out[u] + c if u in out else c
        return LinearForm(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> LinearForm:
        return LinearForm(self.n, {u: -c for u, c in self.coeffs.items()})

    def __sub__(self, other: LinearForm) -> LinearForm:
        return self + (-other)

    def __mul__(self, other) -> LinearForm:
        if isinstance(other, LinearForm):
            if other.is_zero() or self.is_zero():
                return LinearForm(self.n)
            raise NonlinearError("product of two linear forms is not linear")
        if isinstance(other, (int, Fraction)):
            return LinearForm(self.n, {u: c.scale(other) for u, c in self.coeffs.items()})
        if isinstance(other, RingElem):
            return LinearForm(self.n, {u: c * other for u, c in self.coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.coeffs

    def partial(self, axis: int) -> LinearForm:
        return LinearForm(self.n, {u: c.partial(axis) for u, c in self.coeffs.items()})

    def evaluate(self, values: Sequence) -> RingElem:
        out = RingElem.zero(self.n)
        for u, c in self.coeffs.items():
            v = values[u]
            if v:
                out = out + c.scale(v)
        return out


def zero_form(n: int) -> LinearForm:
    return LinearForm(n)


@dataclass
class ConstraintSystem:
    unknown_labels: list[Hashable]
    rows: list[dict[int, Fraction]] = field(default_factory=list)
    row_labels: list[tuple] = field(default_factory=list)

    @property
    def ncols(self) -> int:
        return len(self.unknown_labels)

    def dense(self) -> list[list[Fraction]]:
        return [[row.get(j, Fraction(0)) for j in range(self.ncols)] for row in self.rows]

    def apply(self, vec: Sequence) -> list[Fraction]:
        return [sum((c * vec[j] for j, c in row.items()), Fraction(0)) for row in self.rows]


def assemble(unknown_labels: Sequence[Hashable],
             equations: Iterable[tuple[Hashable, LinearForm]]) -> ConstraintSystem:
    """One row per (equation, canonical monomial); entries are the rational
    coefficients of each unknown. Rows are ordered by equation order then
    monomial order."""
    system = ConstraintSystem(list(unknown_labels))
    for label, form in equations:
        if not isinstance(form, LinearForm):
            raise NonlinearError(f"equation {label!r} is not a linear form")
        by_mono: dict[Monomial, dict[int, Fraction]] = {}
        for u, elem in form.coeffs.items():
            if not 0 <= u < system.ncols:
                raise IndexError(f"unknown index {u} outside the {system.ncols} labels")
            for mono, c in elem.terms.items():
                by_mono.setdefault(mono, {})[u] = c
        for mono in sorted(by_mono, key=Monomial.sort_key):
            system.rows.append(by_mono[mono])
            system.row_labels.append((label, mono))
    return system


# -- exact elimination ----------------------------------------------------

def _integer_row(row: dict[int, Fraction]) -> dict[int, int]:
    den = reduce(lcm, (c.denominator for c in row.values()), 1)
    out = {j: int(c * den) for j, c in row.items() if c}
    return _primitive(out)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    if not row:
        return row
    g = reduce(gcd, row.values())
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g != 1:
        row = {j: v // g for j, v in row.items()}
    return row


def echelon(rows: Iterable[dict[int, Fraction]]) -> dict[int, dict[int, int]]:
    """Fraction-free row echelon form keyed by pivot column.

    Each input row is scaled to integers and reduced against the pivots found
    so far (smallest pivot column first); rows are kept primitive.
    """
    pivots: dict[int, dict[int, int]] = {}
    for raw in rows:
        row = _integer_row(raw)
        while row:
            hits = [j for j in row if j in pivots]
            if not hits:
                break
            c = min(hits)
            prow = pivots[c]
            a, b = prow[c], row[c]
            g = gcd(a, b)
            a, b = a // g, b // g
            new = {j: v * a for j, v in row.items()}
            for j, v in prow.items():
                w = new.get(j, 0) - b * v
                if w:
                    new[j] = w
                else:
                    new.pop(j, None)
            row = _primitive(new)
        if row:
            pivots[min(row)] = row
    return pivots


def rank(rows: Iterable[dict[int, Fraction]]) -> int:
    return len(echelon(rows))


def primitive_vector(vec: Sequence[Fraction]) -> list[int]:
    """Clear denominators, divide by the gcd, make the first nonzero entry positive."""
    vec = [Fraction(v) for v in vec]
    den = reduce(lcm, (v.denominator for v in vec), 1)
    ints = [int(v * den) for v in vec]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return ints
    first = next(v for v in ints if v)
    if first < 0:
        g = -g
    return [v // g for v in ints]


def nullspace_rows(rows: Iterable[dict[int, Fraction]], ncols: int) -> list[list[int]]:
    """Integer-primitive kernel basis; one vector per free column, in column order."""
    piv = echelon(rows)
    order = sorted(piv, reverse=True)
    free = [j for j in range(ncols) if j not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for c in order:
            prow = piv[c]
            s = sum((Fraction(v) * x[j] for j, v in prow.items() if j != c), Fraction(0))
            x[c] = -s / prow[c]
        basis.append(primitive_vector(x))
    return basis


def nullspace(system: ConstraintSystem | Sequence[Sequence]) -> list[list[int]]:
    if isinstance(system, ConstraintSystem):
        return nullspace_rows(system.rows, system.ncols)
    dense = [list(r) for r in system]
    ncols = len(dense[0]) if dense else 0
    rows = [{j: Fraction(v) for j, v in enumerate(r) if v} for r in dense]
    return nullspace_rows(rows, ncols)


def span_rank(vectors: Iterable[Sequence]) -> int:
    return rank({j: Fraction(v) for j, v in enumerate(vec) if v} for vec in vectors)


def in_span(vector: Sequence, basis: Sequence[Sequence]) -> bool:
    return span_rank([*basis, vector]) == span_rank(basis)
