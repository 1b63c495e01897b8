from __future__ import annotations

from fractions import Fraction

import pytest

from conftest import kepler_family
from qfinder import catalog
from qfinder.constraints import (Potential, qfi_in_span, qfi_span_dimension, solve_integral1,
                                 solve_integral2, unsound_members)
from qfinder.geometry import GeometryConfig
from qfinder.ring import RingElem

# (dim, k, l) -> (Integral-1 dim, Integral-2 full dim, Integral-2 time-dependent dim)
EXPECTED = {
    (3, 1, 1): (10, 3, 0),
    (3, 1, -2): (12, 3, 0),
    (3, 1, 2): (8, 4, 1),
    (3, 1, 3): (7, 3, 0),
    (2, 1, 1): (4, 1, 0),
    (3, Fraction(-1, 2), -2): (12, 3, 0),
}


@pytest.mark.parametrize("key", EXPECTED)
def test_dimensions(key):
    n, k, ell = key
    g, V = GeometryConfig(n), kepler_family(n, k, ell)
    s1, s2 = solve_integral1(g, V), solve_integral2(g, V)
    assert (s1.dimension, s2.dimension, s2.nontrivial_dimension) == EXPECTED[key]
    assert unsound_members(s1.basis, V) == []
    assert unsound_members(s2.basis, V) == []


def test_free_motion(e3):
    V = Potential(3, RingElem.zero(3))
    s1, s2 = solve_integral1(e3, V), solve_integral2(e3, V)
    assert s1.dimension == 29
    assert s1.time_dependent_dimension == 9
    assert s2.dimension == 20
    assert s2.trivial == 6


def test_kepler_integrals_in_span(e3):
    V = kepler_family(3, 1, 1)
    span = solve_integral1(e3, V).basis
    H = catalog.energy(3, V.expr)
    assert qfi_in_span(H, span)
    for i in range(3):
        assert qfi_in_span(catalog.runge_lenz(3, 1, i), span)
    assert not qfi_in_span(catalog.angular_momentum(3, 0), span)


def test_solution_space_scales_with_potential(e3):
    # (C, L, G) solves for V iff (C, cL, cG) solves for cV
    V = kepler_family(3, 1, 2)
    W = Potential(3, V.expr * 3)
    a, b = solve_integral1(e3, V), solve_integral1(e3, W)
    assert a.dimension == b.dimension
    L = catalog.angular_momentum(3, 0)
    squares = [catalog.energy(3, V.expr)]
    assert qfi_in_span(squares[0], a.basis)
    assert qfi_in_span(catalog.energy(3, W.expr), b.basis)
    assert not qfi_in_span(L, a.basis)


def test_larger_ansatz_gives_same_dimension(e3):
    V = kepler_family(3, 1, 1)
    base = solve_integral1(e3, V)
    wide = solve_integral1(e3, V, extra_degree=2, extra_r=3)
    assert wide.dimension == base.dimension
    assert qfi_span_dimension(base.basis + wide.basis) == base.dimension


def test_basis_is_linearly_independent(e3):
    s = solve_integral1(e3, kepler_family(3, 1, -2))
    assert qfi_span_dimension(s.basis) == s.dimension


def test_non_central_potential(e2):
    # V = x^2 + 4 y^2 separates, so both 1-d energies are integrals
    x, y = RingElem.coord(2, 0), RingElem.coord(2, 1)
    V = Potential(2, x * x + y * y * 4)
    s = solve_integral1(e2, V)
    assert unsound_members(s.basis, V) == []
    half = Fraction(1, 2)
    zero = RingElem.zero(2)
    from qfinder.qfi import QFI, TimeBasis, make_term

    Ex = QFI(2, [make_term(2, TimeBasis(), [[RingElem.const(2, half), zero], [zero, zero]], None, x * x)])
    assert qfi_in_span(Ex, s.basis)


def test_dimension_mismatch_is_rejected(e2):
    with pytest.raises(ValueError):
        solve_integral1(e2, kepler_family(3, 1, 1))
