"""Killing tensors and Killing-vector generators of the Euclidean plane and space.

The parameterized families are hardcoded (general second-order Killing tensor
and the vector fields ``L`` whose symmetrized derivative is a Killing tensor).
Parameter order is fixed so reported parameter vectors are reproducible:

* E^3 tensors and vectors: ``a1 .. a20``;
* E^2 tensors: ``gamma, a, beta, A, B, C``;
* E^2 vectors: ``a, beta, A, B, a8, a9, a10, a11``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Sequence

from .ring import RingElem

Matrix = list[list[RingElem]]

KT_PARAMS = {
    2: ("gamma", "a", "beta", "A", "B", "C"),
    3: tuple(f"a{i}" for i in range(1, 21)),
}
L_PARAMS = {
    2: ("a", "beta", "A", "B", "a8", "a9", "a10", "a11"),
    3: tuple(f"a{i}" for i in range(1, 21)),
}


class UnsupportedDimension(ValueError):
    pass


@dataclass(frozen=True)
class GeometryConfig:
    """Flat configuration space with kinetic metric delta_ab (no connection, no curvature)."""

    dim: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise UnsupportedDimension(f"only n = 2 or 3 is supported, got {self.dim}")


@dataclass(frozen=True)
class KillingTensor:
    dim: int
    components: tuple[tuple[RingElem, ...], ...]
    params: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        for a in range(self.dim):
            for b in range(a):
                if self.components[a][b] != self.components[b][a]:
                    raise ValueError("Killing tensor components must be symmetric")

    def __getitem__(self, ab: tuple[int, int]) -> RingElem:
        a, b = ab
        return self.components[a][b]

    def matrix(self) -> Matrix:
        return [list(row) for row in self.components]


@dataclass(frozen=True)
class VectorField:
    dim: int
    components: tuple[RingElem, ...]
    params: tuple[Fraction, ...] | None = field(default=None)

    def __getitem__(self, a: int) -> RingElem:
        return self.components[a]


def _xyz(n):
    return [RingElem.coord(n, i) for i in range(n)]


def _general_kt_e3(a: Sequence[Fraction]) -> Matrix:
    a = (None, *a)  # 1-based like the parameter names
    x, y, z = _xyz(3)
    h = Fraction(1, 2)
    c11 = h * a[6] * y * y + h * a[1] * z * z + a[4] * y * z + a[5] * y + a[2] * z + a[3]
    c12 = (h * a[10] * z * z - h * a[6] * x * y - h * a[4] * x * z - h * a[14] * y * z
           - h * a[5] * x - h * a[15] * y + a[16] * z + a[17])
    c13 = (h * a[14] * y * y - h * a[4] * x * y - h * a[1] * x * z - h * a[10] * y * z
           - h * a[2] * x + a[18] * y - h * a[11] * z + a[19])
    c22 = h * a[6] * x * x + h * a[7] * z * z + a[14] * x * z + a[15] * x + a[12] * z + a[13]
    c23 = (h * a[4] * x * x - h * a[14] * x * y - h * a[10] * x * z - h * a[7] * y * z
           - (a[16] + a[18]) * x - h * a[12] * y - h * a[8] * z + a[20])
    c33 = h * a[1] * x * x + h * a[7] * y * y + a[10] * x * y + a[11] * x + a[8] * y + a[9]
    return [[c11, c12, c13], [c12, c22, c23], [c13, c23, c33]]


def _general_kt_e2(p: Sequence[Fraction]) -> Matrix:
    gamma, a, beta, A, B, C = p
    x, y = _xyz(2)
    c11 = gamma * y * y + 2 * a * y + A
    c12 = -gamma * x * y - a * x - beta * y + C
    c22 = gamma * x * x + 2 * beta * x + B
    return [[c11, c12], [c12, c22]]


def _l_vector_e3(a: Sequence[Fraction]) -> list[RingElem]:
    a = (None, *a)
    x, y, z = _xyz(3)
    l1 = (-a[15] * y * y - a[11] * z * z + a[5] * x * y + a[2] * x * z
          + 2 * (a[16] + a[18]) * y * z + a[3] * x + 2 * a[4] * y + 2 * a[1] * z + a[6])
    l2 = (-a[5] * x * x - a[8] * z * z + a[15] * x * y - 2 * a[18] * x * z + a[12] * y * z
          + 2 * (a[17] - a[4]) * x + a[13] * y + 2 * a[7] * z + a[14])
    l3 = (-a[2] * x * x - a[12] * y * y - 2 * a[16] * x * y + a[11] * x * z + a[8] * y * z
          + 2 * (a[19] - a[1]) * x + 2 * (a[20] - a[7]) * y + a[9] * z + a[10])
    return [l1, l2, l3]


def _l_vector_e2(p: Sequence[Fraction]) -> list[RingElem]:
    a, beta, A, B, a8, a9, a10, a11 = p
    x, y = _xyz(2)
    l1 = -2 * beta * y * y + 2 * a * x * y + A * x + a8 * y + a11
    l2 = -2 * a * x * x + 2 * beta * x * y + a10 * x + B * y + a9
    return [l1, l2]


_KT_FORMULA: dict[int, Callable] = {2: _general_kt_e2, 3: _general_kt_e3}
_L_FORMULA: dict[int, Callable] = {2: _l_vector_e2, 3: _l_vector_e3}


def _units(k: int) -> list[tuple[Fraction, ...]]:
    return [tuple(Fraction(int(i == j)) for j in range(k)) for i in range(k)]


def kt_from_params(n: int, params: Sequence) -> KillingTensor:
    GeometryConfig(n)
    params = tuple(Fraction(p) for p in params)
    m = _KT_FORMULA[n](params)
    return KillingTensor(n, tuple(tuple(row) for row in m), params)


def l_from_params(n: int, params: Sequence) -> VectorField:
    GeometryConfig(n)
    params = tuple(Fraction(p) for p in params)
    return VectorField(n, tuple(_L_FORMULA[n](params)), params)


def kt_basis(g: GeometryConfig) -> list[KillingTensor]:
    """One tensor per parameter (that parameter 1, the rest 0)."""
    return [kt_from_params(g.dim, u) for u in _units(len(KT_PARAMS[g.dim]))]


def l_family_basis(g: GeometryConfig) -> list[VectorField]:
    return [l_from_params(g.dim, u) for u in _units(len(L_PARAMS[g.dim]))]


def kt_dimension_bound(n: int) -> int:
    return n * (n + 1) ** 2 * (n + 2) // 12


def symm_deriv(v: VectorField | Sequence[RingElem]) -> Matrix:
    """``L_(a;b) = (d_a L_b + d_b L_a) / 2``; flat space so covariant = partial."""
    comps = v.components if isinstance(v, VectorField) else list(v)
    n = len(comps)
    half = Fraction(1, 2)
    grads = [c.gradient() for c in comps]  # grads[b][a] = d_a L_b
    out = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            s = (grads[b][a] + grads[a][b]) * half
            out[a][b] = out[b][a] = s
    return out


def kt_condition(c: KillingTensor | Matrix) -> list[RingElem]:
    """Independent components of ``C_(ab;c)`` for ``a <= b <= c``."""
    m = c.matrix() if isinstance(c, KillingTensor) else c
    n = len(m)
    out = []
    for a, b, cc in combinations_with_replacement(range(n), 3):
        out.append(m[a][b].partial(cc) + m[b][cc].partial(a) + m[cc][a].partial(b))
    return out


def is_killing_tensor(c: KillingTensor | Matrix) -> bool:
    return all(e.is_zero() for e in kt_condition(c))


def levi_civita(a: int, b: int, c: int) -> int:
    return (a - b) * (b - c) * (c - a) // 2


def crampin_kt(A, B, lam, D) -> Matrix:
    """Covariant form of the general E^3 Killing tensor.

    ``A`` and ``D`` symmetric 3x3, ``B`` symmetric traceless 3x3, ``lam`` a
    3-vector, all rational constants.
    """
    n = 3
    q = _xyz(n)
    eps = levi_civita
    half = Fraction(1, 2)
    out = [[RingElem.zero(n) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = RingElem.zero(n)
            for k in range(n):
                for l in range(n):
                    coeff = Fraction(0)
                    for m in range(n):
                        for nn in range(n):
                            coeff += (eps(i, k, m) * eps(j, l, nn) + eps(j, k, m) * eps(i, l, nn)) * Fraction(A[m][nn])
                    if coeff:
                        acc = acc + q[k] * q[l] * coeff
            for k in range(n):
                coeff = Fraction(0)
                for l in range(n):
                    coeff += half * (Fraction(B[i][l]) * eps(j, k, l) + Fraction(B[j][l]) * eps(i, k, l))
                coeff += half * (Fraction(lam[i]) * (j == k) + Fraction(lam[j]) * (i == k))
                coeff -= (i == j) * Fraction(lam[k])
                if coeff:
                    acc = acc + q[k] * coeff
            out[i][j] = acc + Fraction(D[i][j])
    return out
