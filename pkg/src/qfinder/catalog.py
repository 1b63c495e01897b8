"""Closed-form integrals of ``V = -k / r^l`` used as references by tests and the CLI."""

from __future__ import annotations

from fractions import Fraction

from .geometry import levi_civita
from .qfi import QFI, TimeBasis, make_term
from .ring import RingElem

HALF = Fraction(1, 2)


def _q(n):
    return [RingElem.coord(n, a) for a in range(n)]


def _zero(n):
    return [[RingElem.zero(n) for _ in range(n)] for _ in range(n)]


def _ident(n, c=1):
    return [[RingElem.const(n, c if a == b else 0) for b in range(n)] for a in range(n)]


def power_potential(n: int, k, ell: int) -> RingElem:
    return RingElem.radial(n, -ell, -Fraction(k))


def energy(n: int, V: RingElem) -> QFI:
    return QFI(n, [make_term(n, TimeBasis(), _ident(n, HALF), None, V)])


def angular_momentum(n: int, i: int = 2) -> QFI:
    """``L_i = eps_ijk q_j v_k``; in the plane only ``i = 2`` (``x vy - y vx``) exists."""
    q = _q(n)
    if n == 2:
        if i != 2:
            raise ValueError("the plane has a single angular momentum")
        k1 = [-q[1], q[0]]
    else:
        k1 = [RingElem.zero(n) for _ in range(n)]
        for j in range(3):
            for k in range(3):
                e = levi_civita(i, j, k)
                if e:
                    k1[k] = k1[k] + q[j] * e
    return QFI(n, [make_term(n, TimeBasis(), None, k1, None)])


def runge_lenz(n: int, k, i: int) -> QFI:
    """``R_i = v^2 q_i - (q.v) v_i - k q_i / r`` for ``V = -k/r``."""
    q = _q(n)
    k2 = _zero(n)
    for a in range(n):
        k2[a][a] = k2[a][a] + q[i]
        k2[a][i] = k2[a][i] - q[a] * HALF
        k2[i][a] = k2[i][a] - q[a] * HALF
    k0 = q[i] * RingElem.radial(n, -1, -Fraction(k))
    return QFI(n, [make_term(n, TimeBasis(), k2, None, k0)])


def jauch_hill_fradkin(n: int, k, i: int, j: int) -> QFI:
    """``B_ij = v_i v_j - 2k q_i q_j`` for ``V = -k r^2``."""
    q = _q(n)
    k2 = _zero(n)
    k2[i][j] = k2[i][j] + HALF
    k2[j][i] = k2[j][i] + HALF
    return QFI(n, [make_term(n, TimeBasis(), k2, None, q[i] * q[j] * Fraction(-2 * Fraction(k)))])


def dilation_pair(n: int, k) -> tuple[QFI, QFI]:
    """For ``V = -k/r^2``: ``-t^2 H + t (q.v) - r^2/2`` and ``-t H + (q.v)/2``."""
    q = _q(n)
    V = power_potential(n, k, 2)
    i1 = QFI(n, [
        make_term(n, TimeBasis.poly(2), _ident(n, -HALF), None, -V),
        make_term(n, TimeBasis.poly(1), None, q, None),
        make_term(n, TimeBasis(), None, None, RingElem.rho(n) * -HALF),
    ])
    i2 = QFI(n, [
        make_term(n, TimeBasis.poly(1), _ident(n, -HALF), None, -V),
        make_term(n, TimeBasis(), None, [c * HALF for c in q], None),
    ])
    return i1, i2


def exponential_linear(n: int, k, a: int, sign: int) -> QFI:
    """``e^{lambda t} (v_a - lambda q_a)`` with ``lambda^2 = 2k`` for ``V = -k r^2``."""
    mu = 2 * Fraction(k)
    e = [RingElem.const(n, int(c == a)) for c in range(n)]
    return QFI(n, [
        make_term(n, TimeBasis.exp(mu, sign), None, e, None),
        make_term(n, TimeBasis.exp(mu, sign, 1), None, None, -_q(n)[a]),
    ])


def named_set(n: int, k, ell: int) -> list[tuple[str, QFI]]:
    """Integrals used for bracket and independence reports of ``V = -k/r^l``."""
    V = power_potential(n, k, ell)
    out = [("H", energy(n, V))]
    if n == 2:
        out.append(("L", angular_momentum(2)))
    else:
        out += [(f"L{i + 1}", angular_momentum(3, i)) for i in range(3)]
    if ell == 1:
        out += [(f"R{i + 1}", runge_lenz(n, k, i)) for i in range(n)]
    elif ell == -2:
        out.append(("B11", jauch_hill_fradkin(n, k, 0, 0)))
    return out


def bracket_identities(n: int, k, ell: int) -> list[tuple[str, bool]]:
    """Named Poisson-bracket identities, each checked exactly."""
    from .phase import PhaseFunction, as_phase, poisson_bracket

    k = Fraction(k)
    V = power_potential(n, k, ell)
    H = PhaseFunction.hamiltonian(V)
    out = []
    if n == 2:
        L = as_phase(angular_momentum(2))
        out.append(("{H, L} = 0", poisson_bracket(H, L).is_zero()))
        if ell == 1:
            R = [as_phase(runge_lenz(2, k, i)) for i in range(2)]
            out.append(("{R_1, L} = -R_2, {R_2, L} = R_1",
                        poisson_bracket(R[0], L) == -R[1] and poisson_bracket(R[1], L) == R[0]))
            out.append(("{R_1, R_2} = -2 L H", poisson_bracket(R[0], R[1]) == -(L * H).scale(2)))
            out.append(("R^2 = k^2 + 2 H L^2", R[0] * R[0] + R[1] * R[1] == (H * L * L).scale(2) + k * k))
        return out
    L = [as_phase(angular_momentum(3, i)) for i in range(3)]
    eps = levi_civita

    def comb(vecs, a, b):
        acc = PhaseFunction(n)
        for c in range(3):
            if eps(a, b, c):
                acc = acc + vecs[c].scale(eps(a, b, c))
        return acc

    pairs = [(a, b) for a in range(3) for b in range(3)]
    out.append(("{L_a, L_b} = eps_abc L_c", all(poisson_bracket(L[a], L[b]) == comb(L, a, b) for a, b in pairs)))
    out.append(("{H, L_a} = 0", all(poisson_bracket(H, x).is_zero() for x in L)))
    if ell == 1:
        R = [as_phase(runge_lenz(3, k, i)) for i in range(3)]
        LH = [x * H for x in L]
        out.append(("{R_a, L_b} = eps_abc R_c", all(poisson_bracket(R[a], L[b]) == comb(R, a, b) for a, b in pairs)))
        out.append(("{R_a, R_b} = -2 eps_abc L_c H",
                    all(poisson_bracket(R[a], R[b]) == comb(LH, a, b).scale(-2) for a, b in pairs)))
        out.append(("{H, R_a} = 0", all(poisson_bracket(H, x).is_zero() for x in R)))
        out.append(("R.L = 0", sum((R[i] * L[i] for i in range(3)), PhaseFunction(n)).is_zero()))
        L2 = sum((x * x for x in L), PhaseFunction(n))
        R2 = sum((x * x for x in R), PhaseFunction(n))
        out.append(("R^2 = k^2 + 2 H L^2", R2 == (H * L2).scale(2) + k * k))
    elif ell == -2:
        B = {(i, j): as_phase(jauch_hill_fradkin(3, k, i, j)) for i in range(3) for j in range(i, 3)}
        out.append(("{H, B_ij} = 0", all(poisson_bracket(H, b).is_zero() for b in B.values())))
        out.append(("B_11 + B_22 + B_33 = 2 H", B[0, 0] + B[1, 1] + B[2, 2] == H.scale(2)))
    return out
