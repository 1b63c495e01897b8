"""Numeric checks: RK4 trajectories, first-integral drift, closed-form oscillator solutions."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .catalog import exponential_linear
from .constraints import Potential
from .qfi import QFI
from .ring import RingElem

SINGULAR_RADIUS = 1e-6


def compile_elem(elem: RingElem) -> Callable[[np.ndarray], np.ndarray]:
    """Fast numpy evaluator for ``q`` of shape ``(n, ...)``."""
    terms = [(float(c), m.exps, m.r) for m, c in elem.terms.items()]
    if not terms:
        return lambda q: np.zeros(np.shape(q)[1:])
    need_r = any(k for _, _, k in terms)

    def f(q):
        r = np.sqrt(np.sum(q * q, axis=0)) if need_r else None
        total = np.zeros(q.shape[1:])
        for c, exps, k in terms:
            v = c
            for qi, e in zip(q, exps):
                if e:
                    v = v * qi**e
            if k:
                v = v * r**k
            total = total + v
        return total

    return f


@dataclass
class Trajectory:
    times: np.ndarray
    q: np.ndarray  # (len(times), n)
    v: np.ndarray
    step: float
    method: str = "RK4"
    aborted: bool = False

    def __post_init__(self):
        if not len(self.times) == len(self.q) == len(self.v):
            raise ValueError("times and states differ in length")

    @property
    def states(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return list(zip(self.q, self.v))


class SingularTrajectory(RuntimeError):
    def __init__(self, trajectory: Trajectory):
        super().__init__(f"trajectory came within r < {SINGULAR_RADIUS} of the origin "
                         f"at t = {trajectory.times[-1]:.6g}")
        self.trajectory = trajectory


def _needs_origin_guard(V: Potential) -> bool:
    return V.expr.min_r < 0


def _segment_distance(a, b):
    """Distance from the origin to each segment ``a[:, j] -> b[:, j]``."""
    d = b - a
    dd = np.sum(d * d, axis=0)
    with np.errstate(all="ignore"):
        s = np.where(dd > 0, -np.sum(a * d, axis=0) / dd, 0.0)
    s = np.clip(np.nan_to_num(s), 0.0, 1.0)
    return np.sqrt(np.sum((a + s * d) ** 2, axis=0))


def integrate_batch(V: Potential, q0, v0, t_end: float, h: float) -> list[Trajectory]:
    """Classic RK4 on ``q'' = -grad V`` for many initial conditions at once.

    ``q0`` and ``v0`` have shape ``(m, n)``. Trajectories that come within
    ``SINGULAR_RADIUS`` of the origin stop there and are flagged ``aborted``.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    q = np.array(q0, dtype=float).T.copy()
    v = np.array(v0, dtype=float).T.copy()
    n, m = q.shape
    if n != V.dim:
        raise ValueError(f"initial conditions have dimension {n}, potential {V.dim}")
    guard = _needs_origin_guard(V)
    force = [compile_elem(-g) for g in V.gradient]

    def acc(x):
        return np.array([f(x) for f in force])

    steps = int(round(t_end / h))
    times = np.arange(steps + 1) * h
    Q = np.empty((steps + 1, n, m))
    W = np.empty((steps + 1, n, m))
    Q[0], W[0] = q, v
    alive = np.ones(m, dtype=bool)
    end = np.full(m, steps)
    if guard:
        bad = np.sqrt(np.sum(q * q, axis=0)) < SINGULAR_RADIUS
        alive &= ~bad
        end[bad] = 0
    for i in range(steps):
        q_old = q
        with np.errstate(all="ignore"):
            k1q, k1v = v, acc(q)
            k2q, k2v = v + 0.5 * h * k1v, acc(q + 0.5 * h * k1q)
            k3q, k3v = v + 0.5 * h * k2v, acc(q + 0.5 * h * k2q)
            k4q, k4v = v + h * k3v, acc(q + h * k3q)
            q = q + h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
            v = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if guard:
            # a fast plunge can cross the origin between samples, so test segments
            near = np.zeros(m, dtype=bool)
            for p in (q_old + 0.5 * h * k1q, q_old + 0.5 * h * k2q, q_old + h * k3q, q):
                near |= _segment_distance(q_old, p) < SINGULAR_RADIUS
        Q[i + 1], W[i + 1] = q, v
        if guard:
            bad = alive & (near | ~np.isfinite(q).all(axis=0))
            if bad.any():
                end[bad] = i + 1
                alive &= ~bad
    out = []
    for j in range(m):
        e = end[j]
        out.append(Trajectory(times[:e + 1].copy(), Q[:e + 1, :, j].copy(), W[:e + 1, :, j].copy(),
                              h, aborted=bool(e < steps)))
    return out


def integrate(V: Potential, q0, v0, t_end: float, h: float, strict: bool = True) -> Trajectory:
    traj = integrate_batch(V, [q0], [v0], t_end, h)[0]
    if traj.aborted and strict:
        raise SingularTrajectory(traj)
    return traj


def values_along(I: QFI, traj: Trajectory) -> np.ndarray:
    return np.asarray(I.evaluate(traj.times, traj.q.T, traj.v.T))


def drift(I: QFI, traj: Trajectory) -> float:
    """``max_t |I(t) - I(0)| / max(1, |I(0)|)``; complex values use the modulus,
    which bounds the real and imaginary drifts."""
    vals = values_along(I, traj)
    ref = vals[0]
    return float(np.max(np.abs(vals - ref)) / max(1.0, abs(ref)))


def drift_parts(I: QFI, traj: Trajectory) -> dict[str, float]:
    vals = values_along(I, traj)
    d = vals - vals[0]
    scale = max(1.0, abs(vals[0]))
    return {
        "modulus": float(np.max(np.abs(d)) / scale),
        "real": float(np.max(np.abs(np.real(d))) / scale),
        "imag": float(np.max(np.abs(np.imag(d))) / scale),
    }


# -- initial conditions ---------------------------------------------------

def _perpendicular(q: np.ndarray, rng) -> np.ndarray:
    if len(q) == 2:
        return np.array([-q[1], q[0]]) / np.linalg.norm(q)
    w = rng.normal(size=3)
    w -= w.dot(q) / q.dot(q) * q
    return w / np.linalg.norm(w)


def initial_conditions(V: Potential, count: int = 10, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Seeded regular initial conditions suited to the potential.

    For ``V = -k/r^l`` with ``k > 0`` the velocities keep the orbit away from
    the origin: near-circular bound orbits for ``l = 1``, angular momentum
    above the collapse threshold for ``l = 2`` and outward escape otherwise.
    """
    rng = np.random.default_rng(seed)
    n = V.dim
    pl = V.power_law()
    Q, W = [], []
    for _ in range(count):
        d = rng.normal(size=n)
        rad = rng.uniform(0.8, 1.2)
        q = d / np.linalg.norm(d) * rad
        e = q / rad
        perp = _perpendicular(q, rng)
        if pl is not None and pl[0] > 0 and pl[1] > 0:
            k, ell = float(pl[0]), pl[1]
            if ell == 1:
                s = np.sqrt(k / rad)
                v = s * rng.uniform(0.9, 1.1) * perp + s * rng.uniform(-0.1, 0.1) * e
            elif ell == 2:
                v = np.sqrt(2 * k) / rad * rng.uniform(1.3, 1.6) * perp + rng.uniform(0.0, 0.5) * e
            else:
                esc = np.sqrt(2 * k / rad**ell)
                v = esc * rng.uniform(1.5, 2.0) * e + rng.uniform(-0.1, 0.1) * perp
        else:
            v = 0.5 * rng.normal(size=n)
        Q.append(q)
        W.append(v)
    return np.array(Q), np.array(W)


# -- closed-form oscillator solution --------------------------------------

@dataclass
class QuadratureSolution:
    """Position of ``V = -k r^2`` from the exponential integrals at ``t = 0``.

    ``coefficients`` holds ``A+, A-, B+, ...`` (``D+, ...`` when ``k < 0``),
    the values ``v_a(0) -+ lambda q_a(0)`` with ``lambda = sqrt(2k)``.
    """

    k: Fraction
    lam: complex
    coefficients: dict[str, complex] = field(default_factory=dict)
    pairs: list[tuple[complex, complex]] = field(default_factory=list)

    def position(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        lam = self.lam
        rows = []
        for plus, minus in self.pairs:
            x = 0.5 * (-plus / lam * np.exp(-lam * t) + minus / lam * np.exp(lam * t))
            rows.append(x)
        return np.real(np.array(rows))


def quadrature_solution(k, q0: Sequence[float], v0: Sequence[float]) -> QuadratureSolution:
    k = Fraction(k)
    if not k:
        raise ValueError("k = 0 has no exponential integrals")
    n = len(q0)
    lam = cmath.sqrt(2 * float(k))
    names = "ABC" if k > 0 else "DEF"
    q = np.asarray(q0, dtype=float)
    v = np.asarray(v0, dtype=float)
    sol = QuadratureSolution(k, lam)
    for a in range(n):
        plus = complex(exponential_linear(n, k, a, 1).evaluate(0.0, q, v))
        minus = complex(exponential_linear(n, k, a, -1).evaluate(0.0, q, v))
        sol.coefficients[f"{names[a]}+"] = plus
        sol.coefficients[f"{names[a]}-"] = minus
        sol.pairs.append((plus, minus))
    return sol
