from __future__ import annotations

import random
from fractions import Fraction

import pytest

from qfinder.geometry import (GeometryConfig, KillingTensor, UnsupportedDimension, crampin_kt,
                              is_killing_tensor, kt_basis, kt_dimension_bound, kt_from_params,
                              l_family_basis, symm_deriv)
from qfinder.linalg import span_rank
from qfinder.ring import RingElem


def flat(matrix) -> dict:
    out = {}
    n = len(matrix)
    for a in range(n):
        for b in range(a, n):
            for m, c in matrix[a][b].terms.items():
                out[(a, b, m)] = c
    return out


def rank_of(mats) -> int:
    keys: dict = {}
    rows = []
    for M in mats:
        d = flat(M)
        rows.append({keys.setdefault(k, len(keys)): v for k, v in d.items()})
    return span_rank([[r.get(j, 0) for j in range(len(keys))] for r in rows])


@pytest.mark.parametrize("n,size", [(2, 6), (3, 20)])
def test_basis_sizes_match_bound(n, size):
    g = GeometryConfig(n)
    basis = kt_basis(g)
    assert len(basis) == size == kt_dimension_bound(n)
    assert all(is_killing_tensor(c) for c in basis)
    assert rank_of([c.matrix() for c in basis]) == size


@pytest.mark.parametrize("n,size,kernel", [(2, 8, 3), (3, 20, 6)])
def test_l_family_generates_killing_tensors(n, size, kernel):
    fam = l_family_basis(GeometryConfig(n))
    assert len(fam) == size
    sds = [symm_deriv(v) for v in fam]
    assert all(is_killing_tensor(s) for s in sds)
    # Killing vectors of E^n: 3 in the plane, 6 in space
    assert size - rank_of(sds) == kernel


def test_unsupported_dimension():
    with pytest.raises(UnsupportedDimension):
        GeometryConfig(4)


def test_position_times_identity_is_not_killing():
    x = RingElem.coord(3, 0)
    zero = RingElem.zero(3)
    m = [[x if a == b else zero for b in range(3)] for a in range(3)]
    assert not is_killing_tensor(m)


def test_killing_tensor_must_be_symmetric():
    x, one = RingElem.coord(2, 0), RingElem.const(2, 1)
    with pytest.raises(ValueError):
        KillingTensor(2, ((one, x), (one, one)))


def test_covariant_form_spans_the_same_family():
    rng = random.Random(0)

    def sym(traceless=False):
        m = [[Fraction(rng.randint(-3, 3)) for _ in range(3)] for _ in range(3)]
        m = [[m[i][j] + m[j][i] for j in range(3)] for i in range(3)]
        if traceless:
            t = sum(m[i][i] for i in range(3)) / 3
            for i in range(3):
                m[i][i] -= t
        return m

    samples = []
    for _ in range(30):
        lam = [Fraction(rng.randint(-3, 3)) for _ in range(3)]
        samples.append(crampin_kt(sym(), sym(True), lam, sym()))
    assert all(is_killing_tensor(c) for c in samples)
    basis = [c.matrix() for c in kt_basis(GeometryConfig(3))]
    assert rank_of(samples) == 20
    assert rank_of(samples + basis) == 20


def test_parameterized_tensor_is_linear_in_params():
    p = [Fraction(i % 5 - 2) for i in range(20)]
    c = kt_from_params(3, p)
    acc = None
    for coeff, b in zip(p, kt_basis(GeometryConfig(3))):
        part = [[e * coeff for e in row] for row in b.matrix()]
        acc = part if acc is None else [[u + v for u, v in zip(r1, r2)] for r1, r2 in zip(acc, part)]
    assert c.matrix() == acc
