"""Phase-space functions, Poisson brackets and the total-time-derivative test.

A phase function is a polynomial in the momenta ``p_a`` (equal to the
velocities, the kinetic metric being Euclidean) whose coefficients are radical
ring elements multiplied by a time factor ``t^k exp(c sqrt(s) t) sqrt(s)^e``.
Keeping ``c`` rational and ``s`` squarefree lets products of exponential
integrals with rates ``+lambda`` and ``-lambda`` cancel exactly, and splits
every check into its parts even and odd in ``sqrt(s)``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .qfi import QFI, TimeBasis, format_surd
from .ring import RingElem, _mono_factors, coord_names, format_terms


class IncompatibleRates(ValueError):
    pass


class TimeKey(NamedTuple):
    power: int = 0
    rate: Fraction = Fraction(0)
    radicand: int = 1
    surd: int = 0  # power of sqrt(radicand), 0 or 1

    @classmethod
    def make(cls, power, rate, radicand, surd) -> TimeKey:
        rate = Fraction(rate)
        if radicand == 1:
            surd = 0
        if not rate and not surd:
            radicand = 1
        return cls(power, rate, radicand, surd)

    def times(self, other: TimeKey) -> tuple[TimeKey, int]:
        """Product key and the integer factor produced by ``sqrt(s)^2``."""
        s1, s2 = self.radicand, other.radicand
        if s1 != 1 and s2 != 1 and s1 != s2:
            raise IncompatibleRates(f"cannot combine sqrt({s1}) and sqrt({s2})")
        s = s1 if s1 != 1 else s2
        if s != 1 and ((self.rate and s1 == 1) or (other.rate and s2 == 1)):
            raise IncompatibleRates("cannot add a rational rate to an irrational one")
        e = self.surd + other.surd
        factor = 1
        if e == 2:
            e, factor = 0, s
        return TimeKey.make(self.power + other.power, self.rate + other.rate, s, e), factor

    def numeric_rate(self) -> complex:
        return complex(float(self.rate)) * np.sqrt(complex(self.radicand))

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = t**self.power if self.power else np.ones_like(t)
        out = out.astype(complex)
        if self.rate:
            out = out * np.exp(self.numeric_rate() * t)
        if self.surd:
            out = out * np.sqrt(complex(self.radicand))
        return out

    def is_real(self) -> bool:
        return self.radicand > 0 or (not self.rate and not self.surd)

    def factors(self) -> tuple[Fraction, list[str]]:
        out = []
        if self.power == 1:
            out.append("t")
        elif self.power:
            out.append(f"t^{self.power}")
        if self.surd:
            out.append(format_surd(Fraction(1), self.radicand))
        if self.rate:
            out.append(f"exp({format_surd(self.rate, self.radicand)}*t)")
        return Fraction(1), out


Key = tuple[TimeKey, tuple[int, ...]]


def _time_key_of(tb: TimeBasis) -> tuple[TimeKey, Fraction]:
    if tb.rate is None:
        return TimeKey.make(tb.power, 0, 1, 0), Fraction(1)
    c = tb.rate.sign * tb.rate.magnitude
    s = tb.rate.radicand
    if s == 1:
        return TimeKey.make(tb.power, c, 1, 0), (c if tb.lambda_power else Fraction(1))
    return TimeKey.make(tb.power, c, s, tb.lambda_power), (c if tb.lambda_power else Fraction(1))


class PhaseFunction:
    """Immutable ``sum T_k(t) * coeff_k(q) * p^e_k``."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[Key, RingElem] | None = None):
        self.n = n
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_ring(cls, elem: RingElem, time: TimeKey = TimeKey()) -> PhaseFunction:
        return cls(elem.n, {(time, (0,) * elem.n): elem})

    @classmethod
    def const(cls, n: int, c) -> PhaseFunction:
        return cls.from_ring(RingElem.const(n, c))

    @classmethod
    def momentum(cls, n: int, a: int) -> PhaseFunction:
        e = [0] * n
        e[a] = 1
        return cls(n, {(TimeKey(), tuple(e)): RingElem.const(n, 1)})

    @classmethod
    def coordinate(cls, n: int, a: int) -> PhaseFunction:
        return cls.from_ring(RingElem.coord(n, a))

    @classmethod
    def time(cls, n: int, power: int = 1) -> PhaseFunction:
        return cls.from_ring(RingElem.const(n, 1), TimeKey.make(power, 0, 1, 0))

    @classmethod
    def from_qfi(cls, I: QFI) -> PhaseFunction:
        n = I.dim
        acc: dict[Key, RingElem] = {}

        def put(key, elem):
            if elem.is_zero():
                return
            acc[key] = acc[key] + elem if key in acc else elem

        for term in I.terms:
            tk, scalar = _time_key_of(term.time)
            for a in range(n):
                for b in range(n):
                    e = [0] * n
                    e[a] += 1
                    e[b] += 1
                    put((tk, tuple(e)), term.k2[a][b].scale(scalar))
                e = [0] * n
                e[a] = 1
                put((tk, tuple(e)), term.k1[a].scale(scalar))
            put((tk, (0,) * n), term.k0.scale(scalar))
        return cls(n, acc)

    @classmethod
    def hamiltonian(cls, V: RingElem) -> PhaseFunction:
        n = V.n
        out = cls.from_ring(V)
        for a in range(n):
            p = cls.momentum(n, a)
            out = out + (p * p).scale(Fraction(1, 2))
        return out

    # -- algebra ----------------------------------------------------------
    def _check(self, other: PhaseFunction) -> None:
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other) -> PhaseFunction:
        if isinstance(other, (int, Fraction)):
            other = PhaseFunction.const(self.n, other)
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return PhaseFunction(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> PhaseFunction:
        return PhaseFunction(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> PhaseFunction:
        if isinstance(other, (int, Fraction)):
            other = PhaseFunction.const(self.n, other)
        return self + (-other)

    def __rsub__(self, other) -> PhaseFunction:
        return (-self) + other

    def scale(self, c) -> PhaseFunction:
        return PhaseFunction(self.n, {k: v.scale(c) for k, v in self.terms.items()})

    def __mul__(self, other) -> PhaseFunction:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, RingElem):
            other = PhaseFunction.from_ring(other)
        if not isinstance(other, PhaseFunction):
            return NotImplemented
        self._check(other)
        acc: dict[Key, RingElem] = {}
        for (t1, e1), c1 in self.terms.items():
            for (t2, e2), c2 in other.terms.items():
                tk, factor = t1.times(t2)
                key = (tk, tuple(a + b for a, b in zip(e1, e2)))
                val = c1 * c2
                if factor != 1:
                    val = val.scale(factor)
                acc[key] = acc[key] + val if key in acc else val
        return PhaseFunction(self.n, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> PhaseFunction:
        out = PhaseFunction.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = PhaseFunction.const(self.n, other)
        if not isinstance(other, PhaseFunction):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def is_autonomous(self) -> bool:
        return all(tk == TimeKey() for tk, _ in self.terms)

    def surd_parts(self) -> tuple[PhaseFunction, PhaseFunction]:
        """Split into the parts even and odd in ``sqrt(s)``."""
        even = {k: v for k, v in self.terms.items() if not k[0].surd}
        odd = {k: v for k, v in self.terms.items() if k[0].surd}
        return PhaseFunction(self.n, even), PhaseFunction(self.n, odd)

    # -- calculus ---------------------------------------------------------
    def dq(self, a: int) -> PhaseFunction:
        acc: dict[Key, RingElem] = {}
        for key, c in self.terms.items():
            d = c.partial(a)
            if not d.is_zero():
                acc[key] = d
        return PhaseFunction(self.n, acc)

    def dp(self, a: int) -> PhaseFunction:
        acc: dict[Key, RingElem] = {}
        for (tk, e), c in self.terms.items():
            if e[a]:
                ee = list(e)
                ee[a] -= 1
                key = (tk, tuple(ee))
                val = c.scale(e[a])
                acc[key] = acc[key] + val if key in acc else val
        return PhaseFunction(self.n, acc)

    def dt(self) -> PhaseFunction:
        """Explicit time derivative: d t^k = k t^(k-1), d exp(lt) = l exp(lt)."""
        acc: dict[Key, RingElem] = {}

        def put(key, val):
            acc[key] = acc[key] + val if key in acc else val

        for (tk, e), c in self.terms.items():
            if tk.power:
                put((TimeKey.make(tk.power - 1, tk.rate, tk.radicand, tk.surd), e), c.scale(tk.power))
            if tk.rate:
                # multiply by rate * sqrt(s)
                if tk.radicand == 1:
                    put((tk, e), c.scale(tk.rate))
                elif tk.surd:
                    put((TimeKey.make(tk.power, tk.rate, tk.radicand, 0), e), c.scale(tk.rate * tk.radicand))
                else:
                    put((TimeKey.make(tk.power, tk.rate, tk.radicand, 1), e), c.scale(tk.rate))
        return PhaseFunction(self.n, acc)

    # -- numerics ---------------------------------------------------------
    def evaluate(self, t, q, p):
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        total = 0.0
        for (tk, e), c in self.terms.items():
            val = c.evaluate(q)
            for pa, ea in zip(p, e):
                if ea:
                    val = val * pa**ea
            total = total + tk.value(t) * val
        return total

    def __str__(self) -> str:
        names = coord_names(self.n)
        pn = [f"p{c}" for c in names]
        items = []
        for (tk, e) in sorted(self.terms, key=lambda k: (k[0], tuple(-x for x in k[1]))):
            _, tf = tk.factors()
            for m, c in self.terms[(tk, e)]:
                pf = [pn[i] if x == 1 else f"{pn[i]}^{x}" for i, x in enumerate(e) if x]
                items.append(([*tf, *_mono_factors(m, names), *pf], c))
        return format_terms(items)

    def __repr__(self) -> str:
        return f"PhaseFunction({self.n}, {str(self)!r})"


def as_phase(F) -> PhaseFunction:
    if isinstance(F, PhaseFunction):
        return F
    if isinstance(F, QFI):
        return PhaseFunction.from_qfi(F)
    if isinstance(F, RingElem):
        return PhaseFunction.from_ring(F)
    raise TypeError(f"cannot treat {type(F).__name__} as a phase function")


def poisson_bracket(F, G) -> PhaseFunction:
    """``{F, G} = sum_a dF/dq_a dG/dp_a - dF/dp_a dG/dq_a``."""
    F, G = as_phase(F), as_phase(G)
    F._check(G)
    out = PhaseFunction(F.n)
    for a in range(F.n):
        out = out + F.dq(a) * G.dp(a) - F.dp(a) * G.dq(a)
    return out


def total_derivative(I, H) -> PhaseFunction:
    """``dI/dt = dI/dt|explicit + {I, H}`` along the flow of an autonomous ``H``."""
    I, H = as_phase(I), as_phase(H)
    if not H.is_autonomous():
        raise ValueError("the Hamiltonian must be autonomous")
    return I.dt() + poisson_bracket(I, H)


def is_first_integral(I, V: RingElem) -> bool:
    return total_derivative(I, PhaseFunction.hamiltonian(V)).is_zero()


def involution_check(functions: Sequence) -> list[list[bool]]:
    fs = [as_phase(f) for f in functions]
    m = len(fs)
    out = [[True] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            z = poisson_bracket(fs[i], fs[j]).is_zero()
            out[i][j] = out[j][i] = z
    return out


class SingularSamples(RuntimeError):
    pass


def functional_independence(functions: Sequence, samples: int = 8, seed: int = 0,
                            threshold: float = 1e-8, t: float = 0.0) -> int:
    """Numeric rank of the (q, p)-gradients at random regular phase points.

    Returns the largest rank seen over ``samples`` points; singular values
    below ``threshold`` times the largest are treated as zero.
    """
    fs = [as_phase(f) for f in functions]
    if not fs:
        return 0
    if samples < len(fs):
        raise ValueError("need at least as many samples as functions")
    n = fs[0].n
    grads = [[f.dq(a) for a in range(n)] + [f.dp(a) for a in range(n)] for f in fs]
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(samples):
        direction = rng.normal(size=n)
        q = direction / np.linalg.norm(direction) * rng.uniform(0.7, 1.5)
        p = rng.normal(size=n)
        with np.errstate(all="ignore"):
            J = np.array([[complex(g.evaluate(t, q, p)) for g in row] for row in grads])
        if not np.all(np.isfinite(J)):
            continue
        sv = np.linalg.svd(J, compute_uv=False)
        top = sv[0] if sv.size else 0.0
        r = 0 if top == 0 else int(np.sum(sv > threshold * top))
        best = r if best is None else max(best, r)
    if best is None:
        raise SingularSamples("every sample point was singular")
    return best



def rate_constant(n: int, rate) -> PhaseFunction:
    """The number ``lambda`` of an ``ExponentialRate`` as a constant phase function."""
    c = rate.sign * rate.magnitude
    if rate.is_rational:
        return PhaseFunction.const(n, c)
    return PhaseFunction(n, {(TimeKey.make(0, 0, rate.radicand, 1), (0,) * n): RingElem.const(n, c)})


def phase_span_dimension(functions: Sequence) -> int:
    from .linalg import span_rank

    keys: dict = {}
    rows = []
    for F in functions:
        row = {}
        for (tk, e), c in as_phase(F).terms.items():
            for m, v in c.terms.items():
                row[keys.setdefault((tk, e, m), len(keys))] = v
        rows.append(row)
    return span_rank([[r.get(j, 0) for j in range(len(keys))] for r in rows])


def phase_in_span(F, basis: Sequence) -> bool:
    return phase_span_dimension([*basis, F]) == phase_span_dimension(basis)
