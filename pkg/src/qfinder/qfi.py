"""Quadratic first integrals ``I = sum_terms T(t) (K_ab v^a v^b + K_a v^a + K)``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Sequence

from sympy import factorint

from .ring import RingElem, coord_names, format_rational, format_terms, _mono_factors


@dataclass(frozen=True)
class ExponentialRate:
    """``lambda = sign * sqrt(lambda_squared)`` kept exact as ``c * sqrt(s)``.

    ``s`` is a squarefree integer (negative for imaginary rates) and ``c`` a
    positive rational, so rates that differ by a rational factor share ``s``.
    """

    lambda_squared: Fraction
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "lambda_squared", Fraction(self.lambda_squared))
        if not self.lambda_squared:
            raise ValueError("exponential rate needs lambda^2 != 0")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @cached_property
    def _split(self) -> tuple[Fraction, int]:
        mu = self.lambda_squared
        p, q = mu.numerator, mu.denominator
        m = abs(p * q)
        f, s = 1, 1
        for prime, e in factorint(m).items():
            f *= prime ** (e // 2)
            if e % 2:
                s *= prime
        if p < 0:
            s = -s
        return Fraction(f, q), s

    @property
    def magnitude(self) -> Fraction:
        return self._split[0]

    @property
    def radicand(self) -> int:
        return self._split[1]

    @property
    def is_rational(self) -> bool:
        return self.radicand == 1

    @property
    def is_imaginary(self) -> bool:
        return self.lambda_squared < 0

    @property
    def reality(self) -> str:
        return "imaginary" if self.is_imaginary else "real"

    def exact(self) -> Fraction | None:
        return self.sign * self.magnitude if self.is_rational else None

    def numeric(self) -> complex | float:
        c = float(self.sign * self.magnitude)
        s = self.radicand
        if s < 0:
            return complex(0.0, c * math.sqrt(-s))
        return c * math.sqrt(s)

    def negated(self) -> ExponentialRate:
        return ExponentialRate(self.lambda_squared, -self.sign)

    def __str__(self) -> str:
        return format_surd(self.sign * self.magnitude, self.radicand)


def format_surd(c: Fraction, s: int) -> str:
    """``c * sqrt(s)`` with ``i`` for negative radicands."""
    parts = []
    if s < 0:
        parts.append("i")
        s = -s
    if s != 1:
        parts.append(f"sqrt({s})")
    neg = c < 0
    a = -c if neg else c
    if a != 1 or not parts:
        parts.insert(0, format_rational(a))
    body = "*".join(parts)
    return f"-{body}" if neg else body


@dataclass(frozen=True)
class TimeBasis:
    """``t^power * exp(lambda t) * lambda^lambda_power``; no rate means polynomial."""

    power: int = 0
    rate: ExponentialRate | None = None
    lambda_power: int = 0

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("time power must be non-negative")
        if self.lambda_power not in (0, 1):
            raise ValueError("lambda_power is 0 or 1")
        if self.rate is None and self.lambda_power:
            raise ValueError("lambda_power needs an exponential rate")

    @classmethod
    def poly(cls, power: int = 0) -> TimeBasis:
        return cls(power)

    @classmethod
    def exp(cls, lambda_squared, sign: int = 1, lambda_power: int = 0) -> TimeBasis:
        return cls(0, ExponentialRate(Fraction(lambda_squared), sign), lambda_power)

    @property
    def is_exp(self) -> bool:
        return self.rate is not None

    def sort_key(self) -> tuple:
        if self.rate is None:
            return (0, self.power)
        return (1, self.rate.lambda_squared, -self.rate.sign, self.power, self.lambda_power)

    def value(self, t):
        import numpy as np

        out = np.asarray(t, dtype=float) ** self.power if self.power else 1.0
        if self.rate is not None:
            lam = self.rate.numeric()
            out = out * np.exp(lam * np.asarray(t, dtype=float))
            if self.lambda_power:
                out = out * lam
        return out

    def factor_strings(self) -> tuple[Fraction, list[str]]:
        """Rational prefactor and symbolic factors used by the display."""
        coeff = Fraction(1)
        factors = []
        if self.rate is not None:
            r = self.rate
            if self.lambda_power:
                if r.is_rational:
                    coeff *= r.exact()
                else:
                    coeff *= r.sign * r.magnitude
                    factors.append(format_surd(Fraction(1), r.radicand))
            factors.append(f"exp({r}*t)")
        if self.power == 1:
            factors.insert(0, "t")
        elif self.power:
            factors.insert(0, f"t^{self.power}")
        return coeff, factors

    def to_json(self) -> dict:
        if self.rate is None:
            return {"poly": self.power}
        out = {"exp_lambda2": format_rational(self.rate.lambda_squared), "sign": self.rate.sign}
        if self.power:
            out["poly"] = self.power
        if self.lambda_power:
            out["lambda_power"] = self.lambda_power
        return out

    @classmethod
    def from_json(cls, doc: dict) -> TimeBasis:
        if "exp_lambda2" in doc:
            rate = ExponentialRate(Fraction(str(doc["exp_lambda2"])), int(doc.get("sign", 1)))
            return cls(int(doc.get("poly", 0)), rate, int(doc.get("lambda_power", 0)))
        return cls(int(doc.get("poly", 0)))


def _zero_vec(n):
    return tuple(RingElem.zero(n) for _ in range(n))


def _zero_mat(n):
    return tuple(_zero_vec(n) for _ in range(n))


@dataclass(frozen=True)
class QFITerm:
    time: TimeBasis
    k2: tuple[tuple[RingElem, ...], ...]
    k1: tuple[RingElem, ...]
    k0: RingElem

    def is_zero(self) -> bool:
        return (self.k0.is_zero() and all(e.is_zero() for e in self.k1)
                and all(e.is_zero() for row in self.k2 for e in row))


class QFI:
    """Immutable quadratic first-integral candidate.

    Terms sharing a time basis are merged and zero terms dropped, so equality
    is structural.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Iterable[QFITerm | tuple] = ()):
        self.dim = dim
        merged: dict[TimeBasis, list] = {}
        for term in terms:
            if not isinstance(term, QFITerm):
                term = make_term(dim, *term)
            slot = merged.get(term.time)
            if slot is None:
                merged[term.time] = [term.k2, term.k1, term.k0]
            else:
                slot[0] = tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(slot[0], term.k2))
                slot[1] = tuple(a + b for a, b in zip(slot[1], term.k1))
                slot[2] = slot[2] + term.k0
        out = []
        for time in sorted(merged, key=TimeBasis.sort_key):
            k2, k1, k0 = merged[time]
            t = QFITerm(time, k2, k1, k0)
            if not t.is_zero():
                out.append(t)
        self.terms: tuple[QFITerm, ...] = tuple(out)

    # -- algebra ----------------------------------------------------------
    def __add__(self, other: QFI) -> QFI:
        return QFI(self.dim, [*self.terms, *other.terms])

    def scale(self, c) -> QFI:
        c = Fraction(c)
        return QFI(self.dim, [
            QFITerm(t.time,
                    tuple(tuple(e.scale(c) for e in row) for row in t.k2),
                    tuple(e.scale(c) for e in t.k1),
                    t.k0.scale(c))
            for t in self.terms])

    def __neg__(self) -> QFI:
        return self.scale(-1)

    def __sub__(self, other: QFI) -> QFI:
        return self + (-other)

    def __eq__(self, other) -> bool:
        return isinstance(other, QFI) and self.dim == other.dim and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.dim, self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def is_autonomous(self) -> bool:
        return all(t.time == TimeBasis() for t in self.terms)

    def coefficients(self) -> dict[tuple, Fraction]:
        """Flat exact coordinates; used for span and membership tests."""
        out = {}
        for term in self.terms:
            tk = term.time
            for a in range(self.dim):
                for b in range(a, self.dim):
                    for m, c in term.k2[a][b].terms.items():
                        out[(tk, 2, a, b, m)] = c
                for m, c in term.k1[a].terms.items():
                    out[(tk, 1, a, m)] = c
            for m, c in term.k0.terms.items():
                out[(tk, 0, m)] = c
        return out

    # -- numerics ---------------------------------------------------------
    def evaluate(self, t, q, v):
        """Value at phase points; arrays broadcast over trailing axes."""
        import numpy as np

        q = np.asarray(q, dtype=float)
        v = np.asarray(v, dtype=float)
        total = 0.0
        for term in self.terms:
            acc = term.k0.evaluate(q)
            for a in range(self.dim):
                if not term.k1[a].is_zero():
                    acc = acc + term.k1[a].evaluate(q) * v[a]
                for b in range(self.dim):
                    if not term.k2[a][b].is_zero():
                        acc = acc + term.k2[a][b].evaluate(q) * v[a] * v[b]
            total = total + term.time.value(t) * acc
        return total

    def needs_complex(self) -> bool:
        return any(t.time.rate is not None and t.time.rate.is_imaginary for t in self.terms)

    # -- display / serialization -----------------------------------------
    def __str__(self) -> str:
        return canonical_display(self)

    def __repr__(self) -> str:
        return f"QFI({self.dim}, {str(self)!r})"

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [
                {
                    "time": t.time.to_json(),
                    "k2": [[str(e) for e in row] for row in t.k2],
                    "k1": [str(e) for e in t.k1],
                    "k0": str(t.k0),
                }
                for t in self.terms
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> QFI:
        from .parser import parse_ring_elem

        n = int(doc["dim"])
        terms = []
        for t in doc["terms"]:
            k2 = tuple(tuple(parse_ring_elem(s, n) for s in row) for row in t["k2"])
            k1 = tuple(parse_ring_elem(s, n) for s in t["k1"])
            k0 = parse_ring_elem(t["k0"], n)
            terms.append(QFITerm(TimeBasis.from_json(t["time"]), k2, k1, k0))
        return cls(n, terms)


def make_term(n: int, time: TimeBasis, k2=None, k1=None, k0=None) -> QFITerm:
    """Build a term, defaulting missing parts to zero and symmetrizing ``k2``."""
    if k2 is None:
        k2t = _zero_mat(n)
    else:
        half = Fraction(1, 2)
        k2t = tuple(tuple(k2[a][b] if a == b else (k2[a][b] + k2[b][a]) * half
                          for b in range(n)) for a in range(n))
    k1t = _zero_vec(n) if k1 is None else tuple(k1)
    k0t = RingElem.zero(n) if k0 is None else k0
    return QFITerm(time, k2t, k1t, k0t)


def velocity_names(n: int) -> tuple[str, ...]:
    return tuple(f"v{c}" for c in coord_names(n))


def _velocity_monomials(n: int) -> list[tuple[tuple[int, ...], int, int]]:
    # (exponent vector, a, b) with a = b = -1 for the constant, b = -1 for linear
    out = []
    for a in range(n):
        for b in range(a, n):
            e = [0] * n
            e[a] += 1
            e[b] += 1
            out.append((tuple(e), a, b))
    for a in range(n):
        e = [0] * n
        e[a] = 1
        out.append((tuple(e), a, -1))
    out.append(((0,) * n, -1, -1))
    return out


def canonical_display(I: QFI) -> str:
    """Deterministic text; terms ordered by time basis, then coordinate monomial,
    then velocity monomial."""
    n = I.dim
    names = coord_names(n)
    vnames = velocity_names(n)
    items = []
    for term in I.terms:
        tcoeff, tfactors = term.time.factor_strings()
        rows = []
        for vexp, a, b in _velocity_monomials(n):
            if a < 0:
                elem = term.k0
            elif b < 0:
                elem = term.k1[a]
            else:
                elem = term.k2[a][b] * (1 if a == b else 2)
            for m, c in elem.terms.items():
                rows.append((m, vexp, c))
        rows.sort(key=lambda x: (x[0].sort_key(), -sum(x[1]), tuple(-e for e in x[1])))
        for m, vexp, c in rows:
            vf = []
            for name, e in zip(vnames, vexp):
                if e == 1:
                    vf.append(name)
                elif e:
                    vf.append(f"{name}^{e}")
            items.append(([*tfactors, *_mono_factors(m, names), *vf], c * tcoeff))
    return format_terms(items)


@dataclass(frozen=True)
class NoetherTerm:
    time: TimeBasis
    eta_velocity: tuple[tuple[RingElem, ...], ...]  # coefficient of v^b in eta_a
    eta_free: tuple[RingElem, ...]
    gauge: RingElem


@dataclass(frozen=True)
class NoetherGenerator:
    """Gauged generator ``eta_a = -K_ab v^b - K_a`` and gauge function ``f = K``."""

    dim: int
    terms: tuple[NoetherTerm, ...]

    def to_qfi(self) -> QFI:
        return QFI(self.dim, [
            QFITerm(t.time,
                    tuple(tuple(-e for e in row) for row in t.eta_velocity),
                    tuple(-e for e in t.eta_free),
                    t.gauge)
            for t in self.terms])

    def eta_display(self) -> list[str]:
        n = self.dim
        vn = velocity_names(n)
        out = []
        for a in range(n):
            parts = []
            for t in self.terms:
                tcoeff, tf = t.time.factor_strings()
                for b in range(n):
                    for m, c in t.eta_velocity[a][b].terms.items():
                        parts.append((m, b, [*tf, *_mono_factors(m, coord_names(n)), vn[b]], c * tcoeff))
                for m, c in t.eta_free[a].terms.items():
                    parts.append((m, n, [*tf, *_mono_factors(m, coord_names(n))], c * tcoeff))
            parts.sort(key=lambda x: (x[0].sort_key(), x[1]))
            out.append(format_terms((p[2], p[3]) for p in parts))
        return out

    def gauge_display(self) -> str:
        return str(QFI(self.dim, [QFITerm(t.time, _zero_mat(self.dim), _zero_vec(self.dim), t.gauge)
                                  for t in self.terms]))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "eta": self.eta_display(),
            "f": self.gauge_display(),
            "terms": [
                {
                    "time": t.time.to_json(),
                    "eta_velocity": [[str(e) for e in row] for row in t.eta_velocity],
                    "eta_free": [str(e) for e in t.eta_free],
                    "f": str(t.gauge),
                }
                for t in self.terms
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> NoetherGenerator:
        from .parser import parse_ring_elem

        n = int(doc["dim"])
        return cls(n, tuple(
            NoetherTerm(TimeBasis.from_json(t["time"]),
                        tuple(tuple(parse_ring_elem(s, n) for s in row) for row in t["eta_velocity"]),
                        tuple(parse_ring_elem(s, n) for s in t["eta_free"]),
                        parse_ring_elem(t["f"], n))
            for t in doc["terms"]))


def noether_generator(I: QFI) -> NoetherGenerator:
    return NoetherGenerator(I.dim, tuple(
        NoetherTerm(t.time,
                    tuple(tuple(-e for e in row) for row in t.k2),
                    tuple(-e for e in t.k1),
                    t.k0)
        for t in I.terms))


def qfi_from_parts(n: int, parts: Sequence[tuple[TimeBasis, Any, Any, Any]]) -> QFI:
    return QFI(n, [make_term(n, *p) for p in parts])


def evaluate(I: QFI, t, q, v):
    return I.evaluate(t, q, v)
