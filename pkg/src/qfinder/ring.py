"""Exact arithmetic in Q[q1..qn][r, 1/r] modulo r^2 = q1^2 + ... + qn^2.

Every element is kept in a unique normal form:

* r-exponents are at most 1 (``r^k`` with ``k >= 2`` is expanded through
  ``r^2 = rho``);
* for every negative r-exponent the polynomial coefficient is reduced modulo
  ``rho`` by rewriting the square of the *last* coordinate,
  ``z^2 r^k = r^(k+2) - (x^2 + y^2) r^k``.

With these rules two elements are equal iff their term maps are equal, which
gives the exact zero test the constraint solver relies on.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence

COORD_NAMES = {2: ("x", "y"), 3: ("x", "y", "z")}


class DimensionMismatch(ValueError):
    pass


class Monomial(NamedTuple):
    exps: tuple[int, ...]
    r: int = 0

    @property
    def degree(self) -> int:
        return sum(self.exps)

    def sort_key(self) -> tuple:
        # graded order on the total homogeneity degree, then lex
        return (-(self.degree + self.r), tuple(-e for e in self.exps), -self.r)


def coord_names(n: int) -> tuple[str, ...]:
    if n in COORD_NAMES:
        return COORD_NAMES[n]
    return tuple(f"q{i + 1}" for i in range(n))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise TypeError("floats are not exact; pass a Fraction or int")
    return Fraction(c)


def _canonical(n: int, raw: Iterable[tuple[Monomial, Fraction]]) -> dict[Monomial, Fraction]:
    out: dict[Monomial, Fraction] = {}
    last = n - 1
    stack = list(raw)
    while stack:
        (exps, k), c = stack.pop()
        if not c:
            continue
        if k >= 2:
            for i in range(n):
                e = list(exps)
                e[i] += 2
                stack.append((Monomial(tuple(e), k - 2), c))
        elif k < 0 and exps[last] >= 2:
            e0 = list(exps)
            e0[last] -= 2
            stack.append((Monomial(tuple(e0), k + 2), c))
            for i in range(last):
                e = list(e0)
                e[i] += 2
                stack.append((Monomial(tuple(e), k), -c))
        else:
            m = Monomial(exps, k)
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


class RingElem:
    """Immutable element of the radical ring in ``n`` coordinates."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: dict[Monomial, Fraction] | None = None, *, _canon: bool = True):
        self.n = n
        if terms is None:
            terms = {}
        elif _canon:
            terms = _canonical(n, terms.items())
        self.terms = terms
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, n: int, c=1) -> RingElem:
        c = _as_fraction(c)
        if not c:
            return cls(n)
        return cls(n, {Monomial((0,) * n, 0): c}, _canon=False)

    @classmethod
    def zero(cls, n: int) -> RingElem:
        return cls(n)

    @classmethod
    def coord(cls, n: int, i: int) -> RingElem:
        if not 0 <= i < n:
            raise IndexError(f"coordinate {i} out of range for n={n}")
        e = [0] * n
        e[i] = 1
        return cls(n, {Monomial(tuple(e), 0): Fraction(1)})

    @classmethod
    def radial(cls, n: int, power: int = 1, coeff=1) -> RingElem:
        return cls(n, {Monomial((0,) * n, power): _as_fraction(coeff)})

    @classmethod
    def rho(cls, n: int) -> RingElem:
        return cls.radial(n, 2)

    @classmethod
    def monomial(cls, n: int, mono: Monomial, coeff=1) -> RingElem:
        return cls(n, {Monomial(tuple(mono.exps), mono.r): _as_fraction(coeff)})

    # -- basic protocol ---------------------------------------------------
    def _check(self, other: RingElem) -> None:
        if self.n != other.n:
            raise DimensionMismatch(f"dimension mismatch: {self.n} vs {other.n}")

    def _coerce(self, other) -> RingElem:
        if isinstance(other, RingElem):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return RingElem.const(self.n, other)
        return NotImplemented

    def __add__(self, other) -> RingElem:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                del out[m]
        return RingElem(self.n, out, _canon=False)

    __radd__ = __add__

    def __neg__(self) -> RingElem:
        return RingElem(self.n, {m: -c for m, c in self.terms.items()}, _canon=False)

    def __sub__(self, other) -> RingElem:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> RingElem:
        return (-self) + other

    def scale(self, c) -> RingElem:
        c = _as_fraction(c)
        if not c:
            return RingElem(self.n)
        return RingElem(self.n, {m: v * c for m, v in self.terms.items()}, _canon=False)

    def __mul__(self, other) -> RingElem:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        self._check(other)
        if not self.terms or not other.terms:
            return RingElem(self.n)
        acc: dict[Monomial, Fraction] = {}
        for (e1, k1), c1 in self.terms.items():
            for (e2, k2), c2 in other.terms.items():
                m = Monomial(tuple(a + b for a, b in zip(e1, e2)), k1 + k2)
                acc[m] = acc.get(m, 0) + c1 * c2
        return RingElem(self.n, acc)

    __rmul__ = __mul__

    def __truediv__(self, other) -> RingElem:
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / _as_fraction(other))
        if isinstance(other, RingElem):
            return self * other.inverse()
        return NotImplemented

    def inverse(self) -> RingElem:
        """Inverse of a unit ``c * r^k``; anything else raises ``ValueError``."""
        unit = self.as_radial_power()
        if unit is None:
            raise ValueError(f"{self} is not invertible (only c*r^k is)")
        c, k = unit
        return RingElem.radial(self.n, -k, 1 / c)

    def as_radial_power(self) -> tuple[Fraction, int] | None:
        """``(c, k)`` if this element equals ``c * r^k``, else ``None``.

        For ``k >= 2`` the normal form is expanded, so compare against it.
        """
        if not self.terms:
            return None
        m, c = next(iter(self.terms.items()))
        k = m.degree + m.r
        unit = RingElem.radial(self.n, k)
        if m not in unit.terms:
            return None
        c = c / unit.terms[m]
        return (c, k) if unit.scale(c) == self else None

    def __pow__(self, k: int) -> RingElem:
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = RingElem.const(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RingElem.const(self.n, other)
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(sorted(self.terms.items(), key=lambda t: t[0].sort_key()))

    def coeff(self, mono: Monomial) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    def constant_value(self) -> Fraction | None:
        """The value if this element is a rational constant, else ``None``."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            if m.r == 0 and not any(m.exps):
                return c
        return None

    # -- calculus ---------------------------------------------------------
    def partial(self, axis: int) -> RingElem:
        """Exact derivative along coordinate ``axis`` using dr/dq_a = q_a / r."""
        if not 0 <= axis < self.n:
            raise IndexError(f"axis {axis} out of range for n={self.n}")
        acc: dict[Monomial, Fraction] = {}
        for (exps, k), c in self.terms.items():
            e = exps[axis]
            if e:
                ee = list(exps)
                ee[axis] -= 1
                m = Monomial(tuple(ee), k)
                acc[m] = acc.get(m, 0) + c * e
            if k:
                ee = list(exps)
                ee[axis] += 1
                m = Monomial(tuple(ee), k - 2)
                acc[m] = acc.get(m, 0) + c * k
        return RingElem(self.n, acc)

    def gradient(self) -> list[RingElem]:
        return [self.partial(a) for a in range(self.n)]

    # -- numerics ---------------------------------------------------------
    def evaluate(self, q):
        """Evaluate at ``q`` (floats, or numpy arrays of shape (n, ...))."""
        import numpy as np

        q = np.asarray(q, dtype=float)
        r = np.sqrt(np.sum(q * q, axis=0))
        total = np.zeros(q.shape[1:]) if q.ndim > 1 else 0.0
        for (exps, k), c in self.terms.items():
            v = float(c)
            for qi, e in zip(q, exps):
                if e:
                    v = v * qi**e
            if k:
                v = v * r**k
            total = total + v
        return total

    @property
    def min_r(self) -> int:
        return min((m.r for m in self.terms), default=0)

    @property
    def max_r(self) -> int:
        return max((m.r for m in self.terms), default=0)

    @property
    def max_degree(self) -> int:
        return max((m.degree for m in self.terms), default=0)

    # -- display ----------------------------------------------------------
    def __str__(self) -> str:
        return format_terms(
            ((_mono_factors(m, coord_names(self.n)), c) for m, c in self)
        )

    def __repr__(self) -> str:
        return f"RingElem({self.n}, {str(self)!r})"


def _mono_factors(m: Monomial, names: Sequence[str]) -> list[str]:
    out = []
    for name, e in zip(names, m.exps):
        if e == 1:
            out.append(name)
        elif e:
            out.append(f"{name}^{e}")
    if m.r == 1:
        out.append("r")
    elif m.r:
        out.append(f"r^{m.r}")
    return out


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_terms(items: Iterable[tuple[list[str], Fraction]]) -> str:
    """Join ``(factors, coefficient)`` pairs into ``a*x - 1/2*y^2 + 3`` form."""
    parts: list[str] = []
    for factors, c in items:
        neg = c < 0
        a = -c if neg else c
        if not factors:
            body = format_rational(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = "*".join([format_rational(a), *factors])
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts) if parts else "0"


def canonical_monomials(n: int, max_degree: int, r_min: int, r_max: int) -> list[Monomial]:
    """All canonical monomials spanning the candidates ``q^e r^k`` with
    ``|e| <= max_degree`` and ``r_min <= k <= r_max``."""
    seen: set[Monomial] = set()
    for exps in _exponent_vectors(n, max_degree):
        for k in range(r_min, r_max + 1):
            elem = RingElem.monomial(n, Monomial(exps, k))
            seen.update(elem.terms)
    return sorted(seen, key=Monomial.sort_key)


def _exponent_vectors(n: int, max_degree: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for d in range(max_degree + 1):
        for rest in _exponent_vectors(n - 1, max_degree - d):
            yield (d, *rest)


def antiderivative_ansatz_basis(rhs: Sequence[RingElem], n: int) -> list[Monomial]:
    """Monomial basis for an unknown scalar ``G`` whose gradient should be ``rhs``.

    Covers coordinate degree up to one more than ``rhs`` and r-exponents from
    the lowest in ``rhs`` up to two above the highest. The constant monomial
    is always first.
    """
    one = Monomial((0,) * n, 0)
    nonzero = [e for e in rhs if e.terms]
    if not nonzero:
        return [one]
    deg = max(e.max_degree for e in nonzero) + 1
    r_lo = min(e.min_r for e in nonzero)
    r_hi = max(e.max_r for e in nonzero) + 2
    monos = canonical_monomials(n, deg, r_lo, r_hi)
    return [one] + [m for m in monos if m != one]
