"""The complex Heisenberg group of lower unipotent 3x3 matrices, its integral
lattice action, and the invariant connection form and metric on the quotient.

A point (x, y, z) stands for the matrix [[1, 0, 0], [x, 1, 0], [z, y, 1]].
Lattice elements (m1, n1, m2) have m1, n1 in Z(1) and m2 in Z(2) and act on
the right.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cover_nerve import sample_points
from .cech_engine import nerve_of
from .exact_algebra import TwistedInteger
from .form_calculus import (
    Const, Expr, Form, ZERO, add, d, eval_form, evaluate, mul, neg, pi_p,
)
from .symbols import HermitianSymbolData, TameSymbolData, _log_f

__all__ = [
    "HeisPoint", "HeisLatticeElem", "lattice_act", "lattice_compose", "heis_matrix",
    "omega_form", "omega_numeric", "log_rho", "log_rho_numeric", "invariance_check",
    "associativity_check", "pullback_check", "section",
]

TWO_PI_I = 2j * np.pi
INV_2PI_I = Const(1, -1)


@dataclass(frozen=True)
class HeisPoint:
    """Coordinates (x, y, z); either Exprs or complex numbers/arrays."""

    x: object
    y: object
    z: object


@dataclass(frozen=True)
class HeisLatticeElem:
    m1: TwistedInteger
    n1: TwistedInteger
    m2: TwistedInteger

    def __post_init__(self):
        if (self.m1.twist, self.n1.twist, self.m2.twist) != (1, 1, 2):
            raise ValueError("lattice elements need twists (1, 1, 2)")

    @classmethod
    def from_ints(cls, a: int, b: int, c: int) -> "HeisLatticeElem":
        return cls(TwistedInteger(a, 1), TwistedInteger(b, 1), TwistedInteger(c, 2))

    def numeric(self) -> tuple[complex, complex, complex]:
        return complex(self.m1.value()), complex(self.n1.value()), complex(self.m2.value())

    def consts(self) -> tuple[Const, Const, Const]:
        return Const(self.m1.n, 1), Const(self.n1.n, 1), Const(self.m2.n, 2)


def heis_matrix(P: HeisPoint) -> np.ndarray:
    return np.array([[1, 0, 0], [P.x, 1, 0], [P.z, P.y, 1]], dtype=complex)


def lattice_act(P: HeisPoint, lam: HeisLatticeElem) -> HeisPoint:
    """P . lambda = (x + m1, y + n1, z + m1 y + m2)."""
    if isinstance(P.x, Expr) or isinstance(P.y, Expr) or isinstance(P.z, Expr):
        m1, n1, m2 = lam.consts()
        return HeisPoint(add(P.x, m1), add(P.y, n1), add(P.z, mul(m1, P.y), m2))
    m1, n1, m2 = lam.numeric()
    return HeisPoint(P.x + m1, P.y + n1, P.z + m1 * P.y + m2)


def lattice_compose(lam: HeisLatticeElem, mu: HeisLatticeElem) -> HeisLatticeElem:
    """Group law of lower unipotent matrices: (lam mu) has m2 = m2 + m2' + n1 m1'."""
    # n1 * m1' = (2 pi i)^2 n1.n m1'.n, an element of Z(2)
    return HeisLatticeElem(
        TwistedInteger(lam.m1.n + mu.m1.n, 1),
        TwistedInteger(lam.n1.n + mu.n1.n, 1),
        TwistedInteger(lam.m2.n + mu.m2.n + lam.n1.n * mu.m1.n, 2),
    )


def omega_form(P: HeisPoint) -> Form:
    """(1/2 pi i)(dz - x dy) for Expr coordinates."""
    return (d(P.z) - d(P.y).scale(P.x)).scale(INV_2PI_I)


def omega_numeric(P: HeisPoint, dP: HeisPoint):
    """omega evaluated on a tangent vector dP at P."""
    return (dP.z - P.x * dP.y) / TWO_PI_I


def log_rho(P: HeisPoint) -> Expr:
    """(1/2 pi i)(pi_1(z) - pi_1(x) pi_0(y))."""
    return mul(INV_2PI_I, add(pi_p(P.z, 1), neg(mul(pi_p(P.x, 1), pi_p(P.y, 0)))))


def _pi(v, parity):
    return 0.5 * (v + (-1) ** parity * np.conj(v))


def log_rho_numeric(P: HeisPoint):
    return (_pi(P.z, 1) - _pi(P.x, 1) * _pi(P.y, 0)) / TWO_PI_I


def _random_lattice(rng, scale: int = 5) -> HeisLatticeElem:
    a, b, c = (int(v) for v in rng.integers(-scale, scale + 1, size=3))
    return HeisLatticeElem.from_ints(a, b, c)


def _random_points(rng, count):
    def cx():
        return rng.normal(size=count) * 2 + 1j * rng.normal(size=count) * 2
    return HeisPoint(cx(), cx(), cx())


def invariance_check(kind: str, trials: int = 100, seed: int = 0, points: int = 20,
                     tol: float = 1e-10) -> dict:
    """Residual of omega or log rho after minus before a random lattice action."""
    if kind not in ("omega", "rho"):
        raise ValueError("kind must be 'omega' or 'rho'")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        lam = _random_lattice(rng)
        P = _random_points(rng, points)
        Q = lattice_act(P, lam)
        if kind == "rho":
            diff = log_rho_numeric(Q) - log_rho_numeric(P)
        else:
            dP = _random_points(rng, points)
            m1, _, _ = lam.numeric()
            # the action is affine in (x, y, z): dm1 = 0 so the tangent map is
            # (dx, dy, dz) -> (dx, dy, dz + m1 dy)
            dQ = HeisPoint(dP.x, dP.y, dP.z + m1 * dP.y)
            diff = omega_numeric(Q, dQ) - omega_numeric(P, dP)
        worst = max(worst, float(np.max(np.abs(diff))))
    return {"kind": kind, "trials": trials, "max_residual": worst, "tolerance": tol,
            "pass": worst < tol}


def associativity_check(trials: int = 50, seed: int = 0, tol: float = 1e-9) -> dict:
    """(P . lam) . mu == P . (lam mu), checked against matrix products."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        lam, mu = _random_lattice(rng), _random_lattice(rng)
        P = _random_points(rng, 1)
        P = HeisPoint(P.x[0], P.y[0], P.z[0])
        a = lattice_act(lattice_act(P, lam), mu)
        b = lattice_act(P, lattice_compose(lam, mu))
        c = heis_matrix(P) @ heis_matrix(HeisPoint(*lam.numeric())) @ heis_matrix(HeisPoint(*mu.numeric()))
        worst = max(worst, float(np.max(np.abs(heis_matrix(a) - heis_matrix(b)))),
                    float(np.max(np.abs(heis_matrix(a) - c))))
    return {"trials": trials, "max_residual": worst, "tolerance": tol, "pass": worst < tol}


def section(T: TameSymbolData, i: int, h: Expr = ZERO) -> HeisPoint:
    """The point (log_i f, log_i g, h) over sector i."""
    return HeisPoint(_log_f(T.f, T.cover, i), _log_f(T.g, T.cover, i), h)


def pullback_check(T: TameSymbolData, H: HermitianSymbolData, h: Expr = ZERO,
                   count: int = 20, seed: int | None = None, tol: float = 1e-10) -> dict:
    """Compare pullbacks of omega and log rho with the symbols' own slots.

    omega pulls back to (1/2 pi i)(dh - log_i f dlog g), the connection form for
    the section with coefficient h / 2 pi i; log rho pulls back to the section
    length functional with coefficient h, and at h = 0 to the metric slot.
    """
    cover = T.cover
    nerve = nerve_of(cover)
    res = {"omega": 0.0, "rho": 0.0, "rho_metric_slot": 0.0}
    for (i,) in [s for s in nerve if len(s) == 1]:
        w = sample_points(cover, nerve[(i,)], count, seed)
        P = section(T, i, h)
        om = omega_form(P) - T.connection(i, mul(INV_2PI_I, h))
        res["omega"] = max(res["omega"], _fmax(om, w))
        lr = evaluate(log_rho(P), w) - evaluate(H.log_length(i, h), w)
        res["rho"] = max(res["rho"], float(np.max(np.abs(lr))))
        P0 = section(T, i)
        slot = H.cocycle.get(2, (i,)).coeff("1")
        r0 = evaluate(log_rho(P0), w) - evaluate(slot, w)
        res["rho_metric_slot"] = max(res["rho_metric_slot"], float(np.max(np.abs(r0))))
    return {k: {"residual": v, "tolerance": tol, "pass": v < tol} for k, v in res.items()}


def _fmax(F: Form, w) -> float:
    vals = eval_form(F, w)
    return max((float(np.max(np.abs(a))) if a.size else 0.0) for a in vals.values())
