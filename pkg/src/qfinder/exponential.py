"""Exponential-in-time integrals ``I = e^{lambda t} (-L_(a;b) v^a v^b + lambda L_a v^a + L_a V^,a)``.

The conditions ``(L.gradV)_,a + 2 L_(a;b) V^,b + lambda^2 L_a = 0`` are linear in
``L`` with a pencil ``(A + mu B) x = 0`` over ``mu = lambda^2``. Critical rates
are the ``mu != 0`` where the kernel jumps; candidates come from the pivots of
a fraction-free elimination over ``Z[mu]`` and each is confirmed by an exact
nullspace at that value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Hashable

import numpy as np
import sympy

from .constraints import Potential, _Unknowns, _l_blocks, _l_condition, _scale_tensor
from .geometry import GeometryConfig
from .linalg import nullspace_rows
from .qfi import QFI, ExponentialRate, TimeBasis, make_term
from .ring import Monomial

MU = sympy.Symbol("mu")


@dataclass
class Pencil:
    """Rows ``A_i + mu B_i`` of the rate-dependent system, one per (axis, monomial)."""

    unknown_labels: list[Hashable]
    A: list[dict[int, Fraction]]
    B: list[dict[int, Fraction]]
    row_labels: list[tuple]
    template: list = field(repr=False, default_factory=list)

    @property
    def ncols(self) -> int:
        return len(self.unknown_labels)

    def at(self, mu) -> list[dict[int, Fraction]]:
        mu = Fraction(mu)
        rows = []
        for a, b in zip(self.A, self.B):
            row = dict(a)
            for j, c in b.items():
                v = row.get(j, 0) + mu * c
                if v:
                    row[j] = v
                else:
                    row.pop(j, None)
            rows.append(row)
        return rows

    def numeric(self, mu: float) -> np.ndarray:
        M = np.zeros((len(self.A), self.ncols))
        for i, (a, b) in enumerate(zip(self.A, self.B)):
            for j, c in a.items():
                M[i, j] += float(c)
            for j, c in b.items():
                M[i, j] += mu * float(c)
        return M


def build_pencil(g: GeometryConfig, V: Potential) -> Pencil:
    n = g.dim
    if V.dim != n:
        raise ValueError("potential and geometry dimensions differ")
    u = _Unknowns(n)
    Lb = _l_blocks(u, "L", g)
    LV, eqs = _l_condition(Lb.L, Lb.LS, V)
    A, B, labels = [], [], []
    for a in range(n):
        amap: dict[Monomial, dict[int, Fraction]] = {}
        bmap: dict[Monomial, dict[int, Fraction]] = {}
        for j, elem in eqs[a].coeffs.items():
            for m, c in elem.terms.items():
                amap.setdefault(m, {})[j] = c
        for j, elem in Lb.L[a].coeffs.items():
            for m, c in elem.terms.items():
                bmap.setdefault(m, {})[j] = c
        for m in sorted(set(amap) | set(bmap), key=Monomial.sort_key):
            A.append(amap.get(m, {}))
            B.append(bmap.get(m, {}))
            labels.append((("rate-condition", a), m))
    # the kernel at mu gives I = e^{lt}(-LS v v + l L v + LV)
    template = (_scale_tensor(Lb.LS, -1), Lb.L, LV)
    return Pencil(u.labels, A, B, labels, template)


def _poly_matrix(P: Pencil) -> list[list[sympy.Poly]]:
    zero = sympy.Poly(0, MU, domain="ZZ")
    out = []
    for a, b in zip(P.A, P.B):
        den = reduce(lcm, (c.denominator for c in (*a.values(), *b.values())), 1)
        row = [zero] * P.ncols
        for j in set(a) | set(b):
            ca = int(a.get(j, 0) * den)
            cb = int(b.get(j, 0) * den)
            row[j] = sympy.Poly(ca + cb * MU, MU, domain="ZZ")
        out.append(row)
    return out


def bareiss_pivots(P: Pencil) -> list[sympy.Poly]:
    """Pivots of fraction-free elimination of ``A + mu B`` over ``Z[mu]``.

    Away from the roots of the pivots the rank is the generic rank, so any
    critical rate is a root of one of them.
    """
    M = _poly_matrix(P)
    nrows, ncols = len(M), P.ncols
    prev = sympy.Poly(1, MU, domain="ZZ")
    pivots = []
    r = 0
    for col in range(ncols):
        cands = [i for i in range(r, nrows) if not M[i][col].is_zero]
        if not cands:
            continue
        best = min(cands, key=lambda i: (M[i][col].degree(), i))
        M[r], M[best] = M[best], M[r]
        p = M[r][col]
        for i in range(r + 1, nrows):
            e = M[i][col]
            for j in range(col + 1, ncols):
                if e.is_zero:
                    val = p * M[i][j]
                else:
                    val = p * M[i][j] - e * M[r][j]
                if not val.is_zero:
                    val = val.exquo(prev)
                M[i][j] = val
            M[i][col] = sympy.Poly(0, MU, domain="ZZ")
        pivots.append(p)
        prev = p
        r += 1
        if r == nrows:
            break
    return pivots


@dataclass
class CriticalRate:
    mu: Fraction
    kernel: list[list[int]]

    @property
    def rate(self) -> ExponentialRate:
        return ExponentialRate(self.mu)


@dataclass
class InexactRate:
    """A critical value outside Q.

    The rank drop is confirmed exactly over ``Q[mu]/(factor)``; the value
    itself is only reported numerically.
    """

    mu: complex
    factor: str
    residual: float


@dataclass
class RateSearch:
    generic_kernel: int
    exact: list[CriticalRate]
    inexact: list[InexactRate]


def critical_rates(P: Pencil) -> RateSearch:
    pivots = bareiss_pivots(P)
    generic = P.ncols - len(pivots)
    rational: set[Fraction] = set()
    irreducible: dict[sympy.Poly, None] = {}
    for p in pivots:
        if p.degree() < 1:
            continue
        _, factors = p.factor_list()
        for f, _ in factors:
            if f.degree() == 1:
                a, b = f.all_coeffs()
                rational.add(Fraction(-int(b), int(a)))
            else:
                irreducible[f.monic() if f.LC() > 0 else f] = None
    exact = []
    for mu in sorted(rational):
        if not mu:
            continue
        kernel = nullspace_rows(P.at(mu), P.ncols)
        if len(kernel) > generic:
            exact.append(CriticalRate(mu, kernel))
    inexact = []
    for f in irreducible:
        if _kernel_dimension_mod(P, f) <= generic:
            continue
        for root in f.nroots(n=30):
            z = complex(root)
            if abs(z.imag) > 1e-12 * max(1.0, abs(z)):
                continue
            mu = z.real
            M = P.numeric(mu)
            sv = np.linalg.svd(M, compute_uv=False)
            residual = float(sv[-1] / sv[0]) if M.shape[0] >= M.shape[1] and sv[0] else 0.0
            inexact.append(InexactRate(mu, str(f.as_expr()), residual))
    return RateSearch(generic, exact, inexact)


def _kernel_dimension_mod(P: Pencil, f: sympy.Poly) -> int:
    """Kernel dimension of ``A + mu B`` over the field ``Q[mu] / (f)``, ``f`` irreducible."""
    f = f.set_domain(sympy.QQ)
    rows = []
    for a, b in zip(P.A, P.B):
        row = {}
        for j in set(a) | set(b):
            ca, cb = a.get(j, Fraction(0)), b.get(j, Fraction(0))
            e = sympy.Poly(sympy.Rational(ca.numerator, ca.denominator)
                           + sympy.Rational(cb.numerator, cb.denominator) * MU, MU, domain="QQ").rem(f)
            if not e.is_zero:
                row[j] = e
        if row:
            rows.append(row)
    rank = 0
    for col in range(P.ncols):
        piv = next((r for r in rows if col in r), None)
        if piv is None:
            continue
        rows.remove(piv)
        inv = piv[col].invert(f)
        piv = {j: (v * inv).rem(f) for j, v in piv.items()}
        for r in rows:
            if col in r:
                c = r[col]
                for j, v in piv.items():
                    e = (r.get(j, 0) - c * v).rem(f) if j in r else (-c * v).rem(f)
                    if e.is_zero:
                        r.pop(j, None)
                    else:
                        r[j] = e
        rows = [r for r in rows if r]
        rank += 1
    return P.ncols - rank


@dataclass
class ExponentialSolution:
    mu: Fraction
    kernel: list[list[int]]
    plus: list[QFI]
    minus: list[QFI]

    @property
    def rate(self) -> ExponentialRate:
        return ExponentialRate(self.mu)

    @property
    def dimension(self) -> int:
        return len(self.kernel)

    @property
    def qfis(self) -> list[QFI]:
        return [*self.plus, *self.minus]


def instantiate(P: Pencil, mu: Fraction, vec, sign: int, n: int) -> QFI:
    """``e^{lt}(-LS v v + l L v + LV)``; ``l`` stays symbolic when irrational."""
    LS, L, LV = P.template
    k2 = [[f.evaluate(vec) for f in row] for row in LS]
    k1 = [f.evaluate(vec) for f in L]
    k0 = LV.evaluate(vec)
    rate = ExponentialRate(mu, sign)
    lam = rate.exact()
    if lam is not None:
        return QFI(n, [make_term(n, TimeBasis.exp(mu, sign), k2, [c * lam for c in k1], k0)])
    return QFI(n, [
        make_term(n, TimeBasis.exp(mu, sign), k2, None, k0),
        make_term(n, TimeBasis.exp(mu, sign, 1), None, k1, None),
    ])


def solve_integral3(g: GeometryConfig, V: Potential) -> tuple[list[ExponentialSolution], RateSearch]:
    P = build_pencil(g, V)
    search = critical_rates(P)
    out = []
    for cr in search.exact:
        plus = [instantiate(P, cr.mu, v, 1, g.dim) for v in cr.kernel]
        minus = [instantiate(P, cr.mu, v, -1, g.dim) for v in cr.kernel]
        out.append(ExponentialSolution(cr.mu, cr.kernel, plus, minus))
    return out, search
