"""Linear systems for the polynomial-in-time families of quadratic first integrals.

Family 1::

    I = -t^2/2 L_(a;b) v^a v^b + C_ab v^a v^b + t L_a v^a + t^2/2 L_a V^,a + G
    (L_b V^,b)_,a = -2 L_(a;b) V^,b,   G_,a = 2 C_ab V^,b - L_a

Family 2::

    I = -t^3/3 L_(a;b) v^a v^b + t^2 L_a v^a + t^3/3 L_a V^,a
        - t B_(a;b) v^a v^b + B_a v^a + t B_a V^,a
    (L_b V^,b)_,a = -2 L_(a;b) V^,b,   (B_b V^,b)_,a = -2 B_(a;b) V^,b - 2 L_a

``C`` runs over the general Killing tensor family and ``L``, ``B`` over the
vector fields generating Killing tensors, so the Killing-tensor conditions hold
by construction. ``G`` is an ansatz over canonical monomials with the constant
monomial left out, which quotients away additive constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Sequence

from .geometry import GeometryConfig, kt_basis, l_family_basis, symm_deriv
from .linalg import ConstraintSystem, LinearForm, assemble, nullspace, span_rank
from .phase import PhaseFunction, total_derivative
from .qfi import QFI, TimeBasis, make_term
from .ring import Monomial, RingElem, antiderivative_ansatz_basis

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


@dataclass(frozen=True)
class Potential:
    dim: int
    expr: RingElem

    def __post_init__(self):
        if self.expr.n != self.dim:
            raise ValueError("potential lives in a different dimension")

    @cached_property
    def gradient(self) -> list[RingElem]:
        return self.expr.gradient()

    @cached_property
    def hamiltonian(self) -> PhaseFunction:
        return PhaseFunction.hamiltonian(self.expr)

    def power_law(self) -> tuple[Fraction, int] | None:
        """``(k, l)`` if the potential is exactly ``-k / r^l`` with ``k, l != 0``."""
        unit = self.expr.as_radial_power()
        if unit is None or unit[1] == 0:
            return None
        c, power = unit
        return -c, -power

    def __str__(self) -> str:
        return str(self.expr)


@dataclass
class SolutionSpace:
    """Exact solution space of one family.

    ``basis[:trivial]`` are the autonomous Killing-vector integrals ``B_a v^a``
    that family 2 also produces; the rest are genuinely new directions.
    """

    family: str
    basis: list[QFI]
    param_basis: list[list[int]]
    unknown_labels: list[Hashable]
    trivial: int = 0
    system: ConstraintSystem | None = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def nontrivial(self) -> list[QFI]:
        return self.basis[self.trivial:]

    @property
    def nontrivial_dimension(self) -> int:
        return self.dimension - self.trivial

    @property
    def time_dependent_dimension(self) -> int:
        """Dimension of the span modulo autonomous members."""
        auto = [I for I in self.basis if I.is_autonomous()]
        return qfi_span_dimension(self.basis) - qfi_span_dimension(auto)


def qfi_span_dimension(qfis: Sequence[QFI]) -> int:
    keys: dict = {}
    rows = []
    for I in qfis:
        row = {}
        for k, c in I.coefficients().items():
            row[keys.setdefault(k, len(keys))] = c
        rows.append(row)
    return span_rank([[row.get(j, 0) for j in range(len(keys))] for row in rows])


def qfi_in_span(I: QFI, basis: Sequence[QFI]) -> bool:
    return qfi_span_dimension([*basis, I]) == qfi_span_dimension(basis)


class _Unknowns:
    def __init__(self, n: int):
        self.n = n
        self.labels: list[Hashable] = []

    def block(self, tag: str, elems_or_count) -> list[int]:
        start = len(self.labels)
        count = elems_or_count if isinstance(elems_or_count, int) else len(elems_or_count)
        for i in range(count):
            self.labels.append((tag, i))
        return list(range(start, start + count))

    def labelled(self, tag: str, names: Sequence) -> list[int]:
        start = len(self.labels)
        self.labels.extend((tag, name) for name in names)
        return list(range(start, start + len(names)))


def _tensor_forms(n, idx, tensors) -> list[list[LinearForm]]:
    return [[LinearForm.combination(n, idx, [T[a][b] for T in tensors]) for b in range(n)] for a in range(n)]


def _vector_forms(n, idx, vectors) -> list[LinearForm]:
    return [LinearForm.combination(n, idx, [v[a] for v in vectors]) for a in range(n)]


def _contract(vec: Sequence[LinearForm], grad: Sequence[RingElem]) -> LinearForm:
    out = LinearForm(len(grad))
    for f, g in zip(vec, grad):
        out = out + f * g
    return out


def _l_condition(L, LS, V: Potential) -> tuple[LinearForm, list[LinearForm]]:
    """``L.gradV`` and the components of ``(L.gradV)_,a + 2 L_(a;b) V^,b``."""
    n = V.dim
    LV = _contract(L, V.gradient)
    eqs = []
    for a in range(n):
        e = LV.partial(a)
        for b in range(n):
            e = e + LS[a][b] * (V.gradient[b] * 2)
        eqs.append(e)
    return LV, eqs


@dataclass
class _Blocks:
    n: int
    L: list[LinearForm]
    LS: list[list[LinearForm]]


def _l_blocks(u: _Unknowns, tag: str, g: GeometryConfig) -> _Blocks:
    n = g.dim
    fam = l_family_basis(g)
    idx = u.block(tag, fam)
    L = _vector_forms(n, idx, [v.components for v in fam])
    LS = _tensor_forms(n, idx, [symm_deriv(v) for v in fam])
    return _Blocks(n, L, LS)


def _instantiate(template, vec, n) -> QFI:
    terms = []
    for time, k2, k1, k0 in template:
        terms.append(make_term(
            n, time,
            None if k2 is None else [[f.evaluate(vec) for f in row] for row in k2],
            None if k1 is None else [f.evaluate(vec) for f in k1],
            None if k0 is None else k0.evaluate(vec),
        ))
    return QFI(n, terms)


def _scale_tensor(T, c):
    return [[f * c for f in row] for row in T]


def integral1_system(g: GeometryConfig, V: Potential, extra_degree: int = 1,
                     extra_r: int = 2) -> tuple[ConstraintSystem, list]:
    n = g.dim
    if V.dim != n:
        raise ValueError("potential and geometry dimensions differ")
    u = _Unknowns(n)
    kts = kt_basis(g)
    c_idx = u.block("C", kts)
    C = _tensor_forms(n, c_idx, [k.components for k in kts])
    Lb = _l_blocks(u, "L", g)

    # ansatz for G from the monomials that can appear in its gradient
    rhs = []
    for k in kts:
        for a in range(n):
            s = RingElem.zero(n)
            for b in range(n):
                s = s + k.components[a][b] * V.gradient[b]
            rhs.append(s)
    for v in l_family_basis(g):
        rhs.extend(v.components)
    monos = _ansatz(rhs, n, extra_degree, extra_r)
    g_idx = u.labelled("G", [_mono_label(m, n) for m in monos])
    G = LinearForm.combination(n, g_idx, [RingElem.monomial(n, m) for m in monos])

    LV, l_eqs = _l_condition(Lb.L, Lb.LS, V)
    equations = [(("L-condition", a), e) for a, e in enumerate(l_eqs)]
    for a in range(n):
        e = G.partial(a) + Lb.L[a]
        for b in range(n):
            e = e - C[a][b] * (V.gradient[b] * 2)
        equations.append((("G-gradient", a), e))
    system = assemble(u.labels, equations)

    template = [
        (TimeBasis.poly(0), C, None, G),
        (TimeBasis.poly(1), None, Lb.L, None),
        (TimeBasis.poly(2), _scale_tensor(Lb.LS, -HALF), None, LV * HALF),
    ]
    return system, template


def _ansatz(rhs, n, extra_degree, extra_r) -> list[Monomial]:
    nonzero = [e for e in rhs if not e.is_zero()]
    if not nonzero:
        return []
    if (extra_degree, extra_r) == (1, 2):
        monos = antiderivative_ansatz_basis(nonzero, n)
    else:
        from .ring import canonical_monomials

        deg = max(e.max_degree for e in nonzero) + extra_degree
        monos = canonical_monomials(n, deg, min(e.min_r for e in nonzero),
                                    max(e.max_r for e in nonzero) + extra_r)
    one = Monomial((0,) * n, 0)
    return [m for m in monos if m != one]


def _mono_label(m: Monomial, n: int) -> str:
    s = str(RingElem.monomial(n, m))
    return s


def solve_integral1(g: GeometryConfig, V: Potential, **ansatz) -> SolutionSpace:
    system, template = integral1_system(g, V, **ansatz)
    vectors = nullspace(system)
    basis = [_instantiate(template, v, g.dim) for v in vectors]
    return SolutionSpace("integral1", basis, vectors, system.unknown_labels, 0, system)


def integral2_system(g: GeometryConfig, V: Potential) -> tuple[ConstraintSystem, list, list]:
    n = g.dim
    if V.dim != n:
        raise ValueError("potential and geometry dimensions differ")
    u = _Unknowns(n)
    Lb = _l_blocks(u, "L", g)
    Bb = _l_blocks(u, "B", g)
    LV, l_eqs = _l_condition(Lb.L, Lb.LS, V)
    BV, b_eqs = _l_condition(Bb.L, Bb.LS, V)
    equations = [(("L-condition", a), e) for a, e in enumerate(l_eqs)]
    equations += [(("B-condition", a), e + Lb.L[a] * 2) for a, e in enumerate(b_eqs)]
    system = assemble(u.labels, equations)

    # extra rows that single out time-independent members: L = 0, B_(a;b) = 0, B.gradV = 0
    autonomous = list(equations)
    autonomous += [(("L=0", a), Lb.L[a]) for a in range(n)]
    autonomous += [(("B_(a;b)=0", a, b), Bb.LS[a][b]) for a in range(n) for b in range(a, n)]
    autonomous += [(("B.gradV=0",), BV)]
    auto_system = assemble(u.labels, autonomous)

    template = [
        (TimeBasis.poly(0), None, Bb.L, None),
        (TimeBasis.poly(1), _scale_tensor(Bb.LS, -1), None, BV),
        (TimeBasis.poly(2), None, Lb.L, None),
        (TimeBasis.poly(3), _scale_tensor(Lb.LS, -THIRD), None, LV * THIRD),
    ]
    return system, template, auto_system


def solve_integral2(g: GeometryConfig, V: Potential) -> SolutionSpace:
    system, template, auto_system = integral2_system(g, V)
    full = nullspace(system)
    auto = nullspace(auto_system)
    vectors = list(auto)
    current = span_rank(vectors) if vectors else 0
    for v in full:
        if span_rank([*vectors, v]) > current:
            vectors.append(v)
            current += 1
    basis = [_instantiate(template, v, g.dim) for v in vectors]
    return SolutionSpace("integral2", basis, vectors, system.unknown_labels, len(auto), system)


def unsound_members(qfis: Sequence[QFI], V: Potential) -> list[int]:
    """Indices of integrals whose total time derivative is not identically zero."""
    H = V.hamiltonian
    return [i for i, I in enumerate(qfis) if not total_derivative(I, H).is_zero()]
