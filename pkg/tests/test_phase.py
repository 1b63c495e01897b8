from __future__ import annotations

from fractions import Fraction

import pytest

from properties import Counter, check_poisson
from qfinder import catalog
from qfinder.phase import (IncompatibleRates, PhaseFunction, TimeKey, as_phase,
                           functional_independence, involution_check, is_first_integral,
                           poisson_bracket, total_derivative)
from qfinder.ring import RingElem


def canonical_pair(n=3):
    q = [PhaseFunction.coordinate(n, a) for a in range(n)]
    p = [PhaseFunction.momentum(n, a) for a in range(n)]
    return q, p


def test_canonical_brackets():
    q, p = canonical_pair()
    for a in range(3):
        for b in range(3):
            assert poisson_bracket(q[a], p[b]) == PhaseFunction.const(3, int(a == b))
            assert poisson_bracket(q[a], q[b]).is_zero()


def test_hamiltonian_is_conserved():
    V = catalog.power_potential(3, 1, 1)
    H = PhaseFunction.hamiltonian(V)
    assert total_derivative(H, H).is_zero()
    assert is_first_integral(catalog.energy(3, V), V)


def test_non_integral_is_detected():
    # q.p grows along Kepler orbits
    q, p = canonical_pair()
    virial = sum((q[a] * p[a] for a in range(3)), PhaseFunction(3))
    V = catalog.power_potential(3, 1, 1)
    assert not total_derivative(virial, PhaseFunction.hamiltonian(V)).is_zero()


def test_explicit_time_derivative():
    t2 = PhaseFunction.time(3, 2)
    assert t2.dt() == PhaseFunction.time(3, 1).scale(2)
    I = as_phase(catalog.exponential_linear(3, 1, 0, 1))
    # d/dt e^{lt}(v - l x) = l e^{lt}(v - l x)
    lam_key = TimeKey.make(0, 0, 2, 1)
    lam = PhaseFunction(3, {(lam_key, (0, 0, 0)): RingElem.const(3, 1)})
    assert I.dt() == lam * I


def test_opposite_rates_cancel_exactly():
    plus = as_phase(catalog.exponential_linear(3, 1, 1, 1))
    minus = as_phase(catalog.exponential_linear(3, 1, 1, -1))
    prod = plus * minus
    assert prod.is_autonomous()
    assert prod == as_phase(catalog.jauch_hill_fradkin(3, 1, 1, 1))


def test_incompatible_surds_raise():
    a = as_phase(catalog.exponential_linear(3, 1, 0, 1))  # sqrt(2)
    b = as_phase(catalog.exponential_linear(3, Fraction(3, 2), 0, 1))  # sqrt(3)
    with pytest.raises(IncompatibleRates):
        a * b


def test_involution_matrix():
    L = [catalog.angular_momentum(3, i) for i in range(3)]
    H = catalog.energy(3, catalog.power_potential(3, 1, 1))
    m = involution_check([H, *L])
    assert all(m[0])
    assert not m[1][2]


def test_independence_of_coordinates_and_momenta():
    q, p = canonical_pair()
    assert functional_independence([*q, *p]) == 6
    assert functional_independence([q[0], q[0].scale(2)]) == 1
    assert functional_independence([]) == 0


@pytest.mark.parametrize("k", [1, Fraction(3, 2)])
def test_named_identities(k):
    assert all(ok for _, ok in catalog.bracket_identities(3, k, 1))
    assert all(ok for _, ok in catalog.bracket_identities(2, k, 1))
    assert all(ok for _, ok in catalog.bracket_identities(3, k, -2))


def test_poisson_algebra_randomized():
    c = Counter()
    check_poisson(c)
    assert c.n >= 150
