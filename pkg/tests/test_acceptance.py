"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line PASS/FAIL verdict (shown in the terminal summary)
before asserting, so a failing criterion is reported rather than hidden.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest

from conftest import kepler_family
from properties import (Counter, check_canonical_uniqueness, check_leibniz, check_nullspace,
                        check_parser_roundtrip, check_poisson, check_ring_axioms)
from qfinder import catalog
from qfinder.constraints import Potential, qfi_in_span, solve_integral1, solve_integral2, unsound_members
from qfinder.dynamics import drift, initial_conditions, integrate, integrate_batch, quadrature_solution
from qfinder.exponential import build_pencil, solve_integral3
from qfinder.geometry import GeometryConfig, is_killing_tensor, kt_basis
from qfinder.linalg import nullspace_rows
from qfinder.phase import as_phase, functional_independence, phase_in_span
from qfinder.qfi import NoetherGenerator, noether_generator
from qfinder.ring import RingElem
from qfinder.search import find_integrals

pytestmark = pytest.mark.acceptance

# every potential the soundness gate runs on: name -> Potential
TEST_POTENTIALS = {
    "kepler 3d": kepler_family(3, 1, 1),
    "kepler 2d": kepler_family(2, 1, 1),
    "repulsive l=-2, k=1": kepler_family(3, 1, -2),
    "oscillator k=-1/2": kepler_family(3, Fraction(-1, 2), -2),
    "inverse square": kepler_family(3, 1, 2),
    "inverse cube": kepler_family(3, 1, 3),
    "free 3d": Potential(3, RingElem.zero(3)),
    "free 2d": Potential(2, RingElem.zero(2)),
}


@lru_cache(maxsize=None)
def report_for(name: str):
    return find_integrals(TEST_POTENTIALS[name])


@lru_cache(maxsize=None)
def solutions(n: int, k, ell):
    g, V = GeometryConfig(n), kepler_family(n, k, ell)
    return solve_integral1(g, V), solve_integral2(g, V)


def span_of(n, k, ell):
    s1, s2 = solutions(n, k, ell)
    return s1.basis + s2.basis


def test_criterion_1_killing_tensors(criterion):
    b2, b3 = kt_basis(GeometryConfig(2)), kt_basis(GeometryConfig(3))
    ok = len(b2) == 6 and len(b3) == 20 and all(is_killing_tensor(c) for c in b2 + b3)
    criterion(1, ok, f"kt_basis sizes {len(b2)}, {len(b3)}; all satisfy C_(ab;c) = 0: "
                     f"{all(is_killing_tensor(c) for c in b2 + b3)}")
    assert ok


def test_criterion_2_kepler(criterion):
    s1, s2 = solutions(3, 1, 1)
    V = kepler_family(3, 1, 1)
    span = span_of(3, 1, 1)
    named = [catalog.energy(3, V.expr)]
    named += [catalog.angular_momentum(3, i) for i in range(3)]
    named += [catalog.runge_lenz(3, 1, i) for i in range(3)]
    members = all(qfi_in_span(I, span) for I in named)
    i3, _ = solve_integral3(GeometryConfig(3), V)
    ok = s1.dimension == 10 and members and s2.nontrivial_dimension == 0 and i3 == []
    criterion(2, ok, f"I1 dim {s1.dimension}; E, L, R in span: {members}; "
                     f"I2 beyond Killing-vector LFIs {s2.nontrivial_dimension}; I3 rates {len(i3)}")
    assert ok


def test_criterion_3_oscillator_family(criterion):
    s1, _ = solutions(3, 1, -2)
    span = s1.basis
    b_in = all(qfi_in_span(catalog.jauch_hill_fradkin(3, 1, i, j), span) for i in range(3) for j in range(i, 3))
    g, V = GeometryConfig(3), kepler_family(3, 1, -2)
    sols, _ = solve_integral3(g, V)
    rates = {str(s.mu): s.dimension for s in sols}
    P = build_pencil(g, V)
    mu4 = nullspace_rows(P.at(4), P.ncols) == []
    products = all(
        as_phase(catalog.exponential_linear(3, 1, a, 1)) * as_phase(catalog.exponential_linear(3, 1, a, -1))
        == as_phase(catalog.jauch_hill_fradkin(3, 1, a, a))
        for a in range(3))
    mu8 = next((s for s in sols if s.mu == 8), None)
    squares = mu8 is not None and all(
        phase_in_span(as_phase(catalog.exponential_linear(3, 1, a, sign))
                      * as_phase(catalog.exponential_linear(3, 1, b, sign)), outs)
        for sign, outs in ((1, mu8.plus), (-1, mu8.minus)) for a in range(3) for b in range(a, 3))
    ok = s1.dimension == 12 and b_in and rates == {"2": 11, "8": 6} and mu4 and products and squares
    criterion(3, ok, f"I1 dim {s1.dimension}; B_ij in span: {b_in}; rates {rates}; mu=4 not critical: {mu4}; "
                     f"I+ I- = B_aa: {products}; squares in mu=8 span: {squares}")
    assert ok


def test_criterion_4_inverse_square(criterion):
    s1, s2 = solutions(3, 1, 2)
    i1, i2 = catalog.dilation_pair(3, 1)
    produced = qfi_in_span(i1, s1.basis) and qfi_in_span(i2, s2.basis)
    ok = produced and s1.time_dependent_dimension == 1 and s2.nontrivial_dimension == 1
    criterion(4, ok, f"dilation I1, I2 produced: {produced}; extra time-dependent dims "
                     f"{s1.time_dependent_dimension}, {s2.nontrivial_dimension}")
    assert ok


def test_criterion_5_inverse_cube(criterion):
    s1, s2 = solutions(3, 1, 3)
    V = kepler_family(3, 1, 3)
    L = [as_phase(catalog.angular_momentum(3, i)) for i in range(3)]
    quads = [L[i] * L[j] for i in range(3) for j in range(i, 3)] + [as_phase(catalog.energy(3, V.expr))]
    spanned = all(phase_in_span(F, s1.basis) for F in quads)
    ok = s1.dimension == 7 and spanned and s1.time_dependent_dimension == 0 and s2.nontrivial_dimension == 0
    criterion(5, ok, f"I1 dim {s1.dimension} (L_i L_j and H in span: {spanned}); time-dependent "
                     f"{s1.time_dependent_dimension} + {s2.nontrivial_dimension}")
    assert ok


def test_criterion_6_geodesics(criterion):
    g, V = GeometryConfig(3), Potential(3, RingElem.zero(3))
    s1, s2 = solve_integral1(g, V), solve_integral2(g, V)
    i3, _ = solve_integral3(g, V)
    autonomous = s1.dimension - s1.time_dependent_dimension
    ok = autonomous == 20 and s1.time_dependent_dimension == 9 and s2.dimension == 20 and i3 == []
    criterion(6, ok, f"I1 {autonomous} + {s1.time_dependent_dimension} time-dependent; I2 dim {s2.dimension}; "
                     f"I3 rates {len(i3)}")
    assert ok


def test_criterion_7_soundness_gate(criterion):
    unsound, worst = [], {}
    for name, V in TEST_POTENTIALS.items():
        report = report_for(name)
        qfis = report.all_qfis()
        unsound += [name for _ in unsound_members(qfis, V)]
        Q, W = initial_conditions(V, 10, seed=0)
        trajs = integrate_batch(V, Q, W, 10.0, 1e-3)
        worst[name] = max((drift(I, tr) for I in qfis for tr in trajs), default=0.0)
    failing = {k: v for k, v in worst.items() if not v < 1e-8}
    ok = not unsound and not failing
    detail = f"exact dI/dt = 0 for all outputs: {not unsound}; "
    detail += "drift < 1e-8 everywhere" if not failing else \
        "drift above 1e-8 on " + ", ".join(f"{k} ({v:.2e})" for k, v in failing.items())
    criterion(7, ok, detail)
    assert not unsound
    assert not failing


def test_criterion_8_brackets(criterion):
    identities = all(ok for k in (1, Fraction(3, 2)) for n in (2, 3) for _, ok in catalog.bracket_identities(n, k, 1))
    identities &= all(ok for k in (1, Fraction(3, 2)) for _, ok in catalog.bracket_identities(3, k, -2))
    ranks = [functional_independence([I for _, I in catalog.named_set(3, 1, ell)]) for ell in (1, -2)]
    ok = identities and ranks == [5, 5]
    criterion(8, ok, f"identities at k = 1, 3/2: {identities}; independence ranks {ranks}")
    assert ok


def test_criterion_9_noether_roundtrip(criterion):
    count, bad = 0, 0
    for name in TEST_POTENTIALS:
        for I in report_for(name).all_qfis():
            g = noether_generator(I)
            back = NoetherGenerator.from_json(g.to_json())
            count += 1
            bad += not (g.to_qfi() == I and back == g and back.to_qfi() == I)
    criterion(9, bad == 0, f"{count - bad}/{count} solver outputs round-trip exactly (direct and via JSON)")
    assert bad == 0


def test_criterion_10_quadrature(criterion):
    worst = {}
    for k in (1, Fraction(-1, 2)):
        V = kepler_family(3, k, -2)
        Q, W = initial_conditions(V, 5, seed=0)
        err = 0.0
        for q0, v0 in zip(Q, W):
            tr = integrate(V, q0, v0, 5.0, 1e-3)
            err = max(err, float(np.max(np.abs(quadrature_solution(k, q0, v0).position(tr.times) - tr.q.T))))
        worst[str(k)] = err
    ok = all(e < 1e-6 for e in worst.values())
    criterion(10, ok, "sup-norm error vs RK4 on [0, 5]: " + ", ".join(f"k = {k}: {e:.1e}" for k, e in worst.items()))
    assert ok


def test_criterion_11_property_suites(criterion):
    ring, poisson, null, parse = Counter(), Counter(), Counter(), Counter()
    check_ring_axioms(ring, examples=500)
    check_leibniz(ring, examples=500)
    check_canonical_uniqueness(ring, examples=200)
    check_poisson(poisson)
    check_nullspace(null)
    check_parser_roundtrip(parse)
    ok = ring.n >= 1000 and poisson.n > 0 and null.n > 0 and parse.n > 0
    criterion(11, ok, f"ring + Leibniz {ring.n} cases, Poisson {poisson.n}, nullspace {null.n}, parser {parse.n}")
    assert ok
