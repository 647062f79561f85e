"""Cech cochains with values in complexes of forms, their total differential and cup products.

A coefficient complex is a list of slots (twisted integers, forms of a given
degree, or direct sums of these) with a differential between consecutive
slots.  A cochain of total degree n assigns to every nerve simplex of
dimension q a value in slot p = n - q.  The total differential is
``D = d + (-1)**p * delta`` and the cup product of f_{i0..iq} (slot p) with
g_{iq..iq+s} (slot r) carries the sign ``(-1)**(q*r)``.

Restrictions to smaller open sets are no-ops: every value is a global
expression whose log branches carry their sector tags.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .cover_nerve import SectorCover, Simplex, build_nerve, sample_points
from .errors import BranchGuardViolation, HomotopyUndefined, PairingUndefined, SlotMismatch
from .form_calculus import (
    Const, Expr, Form, IntField, d, evaluate, eval_form, function_form, mul, neg, pi_p, wedge,
)

__all__ = [
    "IntPoly", "RoundedField", "BranchJump", "IntSlot", "FormSlot", "SumSlot", "CoefficientComplex",
    "CechCochain", "total_D", "cup", "deligne_cup", "hermitian_cup", "cone_cup_alpha",
    "is_cocycle", "deligne_complex", "metrized_complex", "hermitian_target_complex",
    "lambda2_complex", "gamma_tilde2_complex", "gamma2_complex", "dhh1_complex",
    "cone_complex", "cone_d", "cone_alpha_homotopy", "cone_combine", "cone_residual",
    "alpha_difference", "iota", "nerve_of", "hermitian_homotopy", "untwist", "deligne_pairing",
    "hermitian_pairing", "cochain_residual", "Report",
]


# ---------------------------------------------------------------------------
# locally constant integer fields


class RoundedField:
    """Integer field round(expr / scale) with a rounding guard.

    Used for branch integers m_ij = (log_j f - log_i f) / 2*pi*i and Chern
    integers; the value is exact wherever the guard holds.
    """

    def __init__(self, expr: Expr, scale: complex, label: str, guard: float = 0.25):
        self.expr = expr
        self.scale = complex(scale)
        self.label = label
        self.guard = guard

    @property
    def key(self) -> str:
        return f"{self.label}|{self.expr.key}"

    def text(self) -> str:
        return self.label

    def at(self, w) -> np.ndarray:
        vals = evaluate(self.expr, w) / self.scale
        n = np.round(vals.real)
        resid = np.max(np.abs(vals - n)) if vals.size else 0.0
        if resid > self.guard:
            raise BranchGuardViolation(f"integer field {self.label} off by {resid:.3g}")
        return n.astype(np.int64)


class BranchJump:
    """The branch integer m_ij = (log_j f - log_i f) / 2*pi*i of a branch assignment."""

    def __init__(self, branch, i: int, j: int):
        self.branch, self.i, self.j = branch, i, j

    @property
    def key(self) -> str:
        return f"m[{self.branch.f.text()}@{hash(self.branch.cover)}]({self.i},{self.j})"

    def text(self) -> str:
        return f"m[{self.branch.f.text()}]({self.i},{self.j})"

    def at(self, w) -> np.ndarray:
        return self.branch.jump(self.i, self.j, np.atleast_1d(np.asarray(w, dtype=complex)))


class IntPoly:
    """Integer polynomial in locally constant integer atoms."""

    __slots__ = ("terms", "atoms")

    def __init__(self, terms: dict | None = None, atoms: dict | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}
        self.atoms = dict(atoms or {})

    @classmethod
    def const(cls, n: int) -> "IntPoly":
        return cls({(): int(n)})

    @classmethod
    def atom(cls, a) -> "IntPoly":
        return cls({(a.key,): 1}, {a.key: a})

    def is_zero(self) -> bool:
        return not self.terms

    def constant(self) -> int | None:
        if not self.terms:
            return 0
        if set(self.terms) == {()}:
            return self.terms[()]
        return None

    def __add__(self, other: "IntPoly") -> "IntPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return IntPoly(out, {**self.atoms, **other.atoms})

    def __neg__(self):
        return IntPoly({m: -c for m, c in self.terms.items()}, self.atoms)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, IntPoly):
            out: dict = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = tuple(sorted(m1 + m2))
                    out[m] = out.get(m, 0) + c1 * c2
            return IntPoly(out, {**self.atoms, **other.atoms})
        k = Fraction(other)
        if k.denominator != 1:
            raise SlotMismatch("integer slots only scale by integers")
        return IntPoly({m: c * int(k) for m, c in self.terms.items()}, self.atoms)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, IntPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    @property
    def key(self) -> str:
        return self.text()

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            mono = "*".join(self.atoms[k].text() for k in m)
            parts.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(parts)

    def at(self, w) -> np.ndarray:
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        cache = {}
        out = np.zeros(w.shape, dtype=np.int64)
        for m, c in self.terms.items():
            term = np.full(w.shape, c, dtype=np.int64)
            for k in m:
                if k not in cache:
                    cache[k] = self.atoms[k].at(w)
                term = term * cache[k]
            out = out + term
        return out


def iota(x: IntPoly, twist: int) -> Expr:
    """The inclusion Z(twist) -> O as an expression."""
    c = x.constant()
    if c is not None:
        return Const(c, twist)
    return mul(Const(1, twist), IntField(x))


# ---------------------------------------------------------------------------
# slots and coefficient complexes


@dataclass(frozen=True)
class IntSlot:
    twist: int
    label: str = ""

    def zero(self):
        return IntPoly()


@dataclass(frozen=True)
class FormSlot:
    degree: int
    label: str = ""

    def zero(self):
        return Form(self.degree)


@dataclass(frozen=True)
class SumSlot:
    parts: tuple
    label: str = ""

    def zero(self):
        return tuple(p.zero() for p in self.parts)


def _check(slot, v):
    if isinstance(slot, IntSlot) and not isinstance(v, IntPoly):
        raise SlotMismatch(f"expected integer value for slot {slot}")
    if isinstance(slot, FormSlot):
        if not isinstance(v, Form) or v.degree != slot.degree:
            raise SlotMismatch(f"expected a {slot.degree}-form for slot {slot}")
    if isinstance(slot, SumSlot):
        if not isinstance(v, tuple) or len(v) != len(slot.parts):
            raise SlotMismatch(f"expected a {len(slot.parts)}-tuple for slot {slot}")
        for s, x in zip(slot.parts, v):
            _check(s, x)


def _vadd(slot, a, b):
    if isinstance(slot, SumSlot):
        return tuple(_vadd(s, x, y) for s, x, y in zip(slot.parts, a, b))
    return a + b


def _vscale(slot, a, c):
    """Multiply a value by a rational (or Expr, for form slots)."""
    if isinstance(slot, SumSlot):
        return tuple(_vscale(s, x, c) for s, x in zip(slot.parts, a))
    if isinstance(slot, IntSlot):
        return a * c
    if isinstance(c, Expr):
        return a.scale(c)
    c = Fraction(c)
    if c == 1:
        return a
    return a.scale(Const(c))


def _vzero(slot, v) -> bool:
    if isinstance(slot, SumSlot):
        return all(_vzero(s, x) for s, x in zip(slot.parts, v))
    return v.is_zero()


def _veval(slot, v, w) -> tuple[float, int]:
    """(max float residual of form parts, max abs of integer parts)."""
    if isinstance(slot, SumSlot):
        res = [_veval(s, x, w) for s, x in zip(slot.parts, v)]
        return max(r[0] for r in res), max(r[1] for r in res)
    if isinstance(slot, IntSlot):
        vals = v.at(w)
        return 0.0, int(np.max(np.abs(vals))) if vals.size else 0
    vals = eval_form(v, w)
    return max((float(np.max(np.abs(a))) if a.size else 0.0) for a in vals.values()), 0


@dataclass
class CoefficientComplex:
    name: str
    slots: list
    diffs: list  # diffs[p] maps slot p to slot p+1

    def __post_init__(self):
        if len(self.diffs) != len(self.slots) - 1:
            raise ValueError("need one differential between consecutive slots")

    def __hash__(self):
        return hash(self.name)

    def __eq__(self, other):
        return isinstance(other, CoefficientComplex) and self.name == other.name

    @property
    def top(self) -> int:
        return len(self.slots) - 1

    def zero(self, p: int):
        return self.slots[p].zero()

    def d(self, p: int, v):
        if p >= self.top:
            return None
        return self.diffs[p](v)


def _iota_map(twist: int):
    return lambda x: function_form(iota(x, twist))


def deligne_complex(j: int) -> CoefficientComplex:
    """Z(j) -> O -> Omega^1 -> ... -> Omega^{j-1} (smooth forms as carriers)."""
    if not 1 <= j <= 3:
        raise ValueError("Deligne complexes of weight 1..3 are supported on curves")
    slots = [IntSlot(j, f"Z({j})")] + [FormSlot(k, f"Omega^{k}") for k in range(j)]
    diffs = [_iota_map(j)] + [d for _ in range(j - 1)]
    return CoefficientComplex(f"Z({j})_D", slots, diffs)


def metrized_complex() -> CoefficientComplex:
    """Z(1) -> O -> E^0 with maps iota and -pi_0 (metrized line bundles)."""
    return CoefficientComplex(
        "Z(1)->O->E0",
        [IntSlot(1, "Z(1)"), FormSlot(0, "O"), FormSlot(0, "E0")],
        [_iota_map(1), lambda u: -pi_p(u, 0)],
    )


def hermitian_target_complex() -> CoefficientComplex:
    """Z(2) -> O -> E^0(1) with maps iota and -pi_1."""
    return CoefficientComplex(
        "Z(2)->O->E0(1)",
        [IntSlot(2, "Z(2)"), FormSlot(0, "O"), FormSlot(0, "E0(1)")],
        [_iota_map(2), lambda u: -pi_p(u, 1)],
    )


def lambda2_complex() -> CoefficientComplex:
    return CoefficientComplex(
        "Lambda(2)",
        [IntSlot(2, "Z(2)"), FormSlot(0, "O"), FormSlot(1, "E1(1)")],
        [_iota_map(2), lambda u: -pi_p(d(u), 1)],
    )


def gamma_tilde2_complex() -> CoefficientComplex:
    return CoefficientComplex(
        "GammaTilde(2)",
        [IntSlot(2, "Z(2)"), FormSlot(0, "O"),
         SumSlot((FormSlot(1, "Omega1"), FormSlot(0, "E0(1)")))],
        [_iota_map(2), lambda u: (d(u), -pi_p(u, 1))],
    )


def gamma2_complex() -> CoefficientComplex:
    return CoefficientComplex(
        "Gamma(2)",
        [IntSlot(2, "Z(2)"), FormSlot(0, "O"),
         SumSlot((FormSlot(1, "Omega1"), FormSlot(0, "E0(1)"))), FormSlot(1, "E1(1)")],
        [_iota_map(2), lambda u: (d(u), -pi_p(u, 1)), lambda ws: pi_p(ws[0], 1) + d(ws[1])],
    )


def dhh1_complex() -> CoefficientComplex:
    """The hermitian holomorphic complex of weight 1 unravelled through degree 3.

    Degree 2 carries (curvature eta, connection xi, half log metric); degree 3
    carries (eta - d xi, pi_0 xi - d sigma).
    """
    return CoefficientComplex(
        "D_hh(1)",
        [IntSlot(1, "Z(1)"), FormSlot(0, "O"),
         SumSlot((FormSlot(2, "A11"), FormSlot(1, "A10"), FormSlot(0, "E0"))),
         SumSlot((FormSlot(2, "A2"), FormSlot(1, "E1")))],
        [_iota_map(1),
         lambda u: (Form(2), -d(u), -pi_p(u, 0)),
         lambda v: (v[0] - d(v[1]), pi_p(v[1], 0) - d(v[2]))],
    )


def cone_complex(twist: int) -> CoefficientComplex:
    """cone(Z(twist) + F^twist A -> A)[-1] on a curve, truncated at degree 2.

    Degree n holds (x in Z(twist) if n == 0, y in F^twist A^n, z in A^{n-1}).
    For twist >= 2 the Hodge piece vanishes on a curve.
    """
    def y_slot(n):
        return FormSlot(n, f"F{twist}A{n}")

    if twist == 1:
        slots = [IntSlot(1, "Z(1)"),
                 SumSlot((y_slot(1), FormSlot(0, "A0"))),
                 SumSlot((y_slot(2), FormSlot(1, "A1")))]
        diffs = [
            lambda x: (Form(1), function_form(iota(x, 1))),
            lambda v: (d(v[0]), -v[0] - d(v[1])),
        ]
    else:
        slots = [IntSlot(twist, f"Z({twist})"), FormSlot(0, "A0"), FormSlot(1, "A1"),
                 FormSlot(2, "A2")]
        diffs = [lambda x: function_form(iota(x, twist)), lambda z: -d(z), lambda z: -d(z)]
    return CoefficientComplex(f"Cone({twist})", slots, diffs)


# ---------------------------------------------------------------------------
# cochains

_NERVES: dict = {}


def nerve_of(cover: SectorCover, max_dim: int = 4) -> dict[tuple, Simplex]:
    key = (cover, max_dim)
    if key not in _NERVES:
        _NERVES[key] = {s.indices: s for s in build_nerve(cover, min(max_dim, cover.N - 1))}
    return _NERVES[key]


@dataclass
class CechCochain:
    complex: CoefficientComplex
    degree: int
    cover: SectorCover
    values: dict = field(default_factory=dict)  # (p, indices) -> value

    def __post_init__(self):
        nerve = nerve_of(self.cover)
        clean = {}
        for (p, idx), v in self.values.items():
            idx = tuple(idx)
            if p < 0 or p > self.complex.top:
                raise SlotMismatch(f"slot {p} outside complex {self.complex.name}")
            if len(idx) - 1 != self.degree - p:
                raise SlotMismatch(f"simplex {idx} has wrong dimension for slot {p}")
            if idx not in nerve:
                raise SlotMismatch(f"simplex {idx} is not in the nerve")
            _check(self.complex.slots[p], v)
            if not _vzero(self.complex.slots[p], v):
                clean[(p, idx)] = v
        self.values = clean

    def get(self, p: int, idx) -> object:
        return self.values.get((p, tuple(idx)), self.complex.zero(p))

    def __add__(self, other: "CechCochain") -> "CechCochain":
        if other.complex != self.complex or other.degree != self.degree:
            raise SlotMismatch("cannot add cochains of different type")
        out = dict(self.values)
        for k, v in other.values.items():
            slot = self.complex.slots[k[0]]
            out[k] = _vadd(slot, out[k], v) if k in out else v
        return CechCochain(self.complex, self.degree, self.cover, out)

    def scale(self, c) -> "CechCochain":
        return CechCochain(self.complex, self.degree, self.cover,
                           {k: _vscale(self.complex.slots[k[0]], v, c) for k, v in self.values.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.values

    def map_slots(self, target: CoefficientComplex, fns: dict, degree_shift: int = 0) -> "CechCochain":
        """Apply per-slot maps {p: (new_p, fn)} to produce a cochain in ``target``."""
        out: dict = {}
        for (p, idx), v in self.values.items():
            if p not in fns:
                continue
            new_p, fn = fns[p]
            nv = fn(v)
            key = (new_p, idx)
            slot = target.slots[new_p]
            out[key] = _vadd(slot, out[key], nv) if key in out else nv
        return CechCochain(target, self.degree + degree_shift, self.cover, out)

    def records(self) -> list[dict]:
        out = []
        for (p, idx), v in sorted(self.values.items()):
            text = v.text() if hasattr(v, "text") else " ; ".join(x.text() for x in v)
            out.append({"slot": p, "simplex": list(idx), "value": text})
        return out


def _delta_terms(c: CechCochain, nerve) -> dict:
    out: dict = {}
    for t in nerve:
        q1 = len(t) - 1
        p = c.degree - q1 + 1
        if p < 0 or p > c.complex.top:
            continue
        slot = c.complex.slots[p]
        acc = None
        for k in range(len(t)):
            face = t[:k] + t[k + 1:]
            v = c.values.get((p, face))
            if v is None:
                continue
            v = _vscale(slot, v, (-1) ** k)
            acc = v if acc is None else _vadd(slot, acc, v)
        if acc is not None:
            out[(p, t)] = _vscale(slot, acc, (-1) ** p)
    return out


def total_D(c: CechCochain) -> CechCochain:
    """D = d + (-1)^p delta on the Cech double complex."""
    nerve = nerve_of(c.cover)
    out = _delta_terms(c, nerve)
    for (p, idx), v in c.values.items():
        dv = c.complex.d(p, v)
        if dv is None:
            continue
        key = (p + 1, idx)
        slot = c.complex.slots[p + 1]
        out[key] = _vadd(slot, out[key], dv) if key in out else dv
    return CechCochain(c.complex, c.degree + 1, c.cover, out)


Pairing = Callable[[int, int, object, object], object]


def cup(a: CechCochain, b: CechCochain, pairing: Pairing, target: CoefficientComplex) -> CechCochain:
    """Front-face/back-face cup product with the Koszul sign (-1)^(q*r)."""
    if a.cover != b.cover:
        raise PairingUndefined("cochains live on different covers")
    nerve = nerve_of(a.cover)
    out: dict = {}
    for (p, I), x in a.values.items():
        q = len(I) - 1
        for (r, J), y in b.values.items():
            if J[0] != I[-1]:
                continue
            K = I + J[1:]
            if K not in nerve:
                continue
            if p + r > target.top:
                continue
            v = pairing(p, r, x, y)
            if v is None:
                continue
            slot = target.slots[p + r]
            if (q * r) % 2:
                v = _vscale(slot, v, -1)
            key = (p + r, K)
            out[key] = _vadd(slot, out[key], v) if key in out else v
    return CechCochain(target, a.degree + b.degree, a.cover, out)


def deligne_pairing(j: int, k: int) -> Pairing:
    """Z(j)_D x Z(k)_D -> Z(j+k)_D: x.y if deg x = 0, x ^ dy if deg y = k, else 0."""
    def pair(p, r, x, y):
        if p == 0:
            if r == 0:
                return x * y
            return y.scale(iota(x, j))
        if r == k:
            return wedge(x, d(y))
        return None
    return pair


def hermitian_pairing(p, r, x, y):
    """(Z(1) -> O) x (Z(1) -> O) -> (Z(2) -> O -> E0(1)), with f x g -> -pi_1(f) pi_0(g)."""
    if p == 0:
        if r == 0:
            return x * y
        return y.scale(iota(x, 1))
    if r == 1:
        fx, gy = x.coeff("1"), y.coeff("1")
        return function_form(neg(mul(pi_p(fx, 1), pi_p(gy, 0))))
    return None


def deligne_cup(a: CechCochain, b: CechCochain) -> CechCochain:
    j = a.complex.slots[0].twist
    k = b.complex.slots[0].twist
    if a.complex.name != f"Z({j})_D" or b.complex.name != f"Z({k})_D":
        raise PairingUndefined("deligne_cup needs Deligne-complex cochains")
    return cup(a, b, deligne_pairing(j, k), deligne_complex(j + k))


def hermitian_cup(a: CechCochain, b: CechCochain) -> CechCochain:
    if a.complex.name != "Z(1)_D" or b.complex.name != "Z(1)_D":
        raise PairingUndefined("hermitian_cup pairs two weight-one Deligne cochains")
    return cup(a, b, hermitian_pairing, hermitian_target_complex())


def hermitian_homotopy(a: CechCochain, b: CechCochain) -> CechCochain:
    """Homotopy between a u b and -(-1)^{|a||b|} b u a for degree-one cochains.

    Function part h(f x g) = f g on vertices; integer part is the Cech cup-one
    correction -a_ij b_ij on edges.
    """
    if a.degree != 1 or b.degree != 1:
        raise HomotopyUndefined("the registered homotopy acts on degree-one cochains")
    target = hermitian_target_complex()
    out = {}
    for (p, I), x in a.values.items():
        y = b.values.get((p, I))
        if y is None:
            continue
        if p == 1:
            out[(1, I)] = function_form(mul(x.coeff("1"), y.coeff("1")))
        else:
            out[(0, I)] = -(x * y)
    return CechCochain(target, 1, a.cover, out)


def untwist(c: CechCochain) -> CechCochain:
    """Divide a Z(2)->O->E0(1) cochain by 2*pi*i, landing in Z(1)->O->E0."""
    if c.complex.name != "Z(2)->O->E0(1)":
        raise SlotMismatch("untwist expects the hermitian target complex")
    inv = Const(1, -1)
    return c.map_slots(metrized_complex(), {
        0: (0, lambda x: x),
        1: (1, lambda v: v.scale(inv)),
        2: (2, lambda v: v.scale(inv)),
    })


# ---------------------------------------------------------------------------
# cone products


def cone_cup_alpha(u1, u2, deg1: int, deg2: int, alpha, twist1: int = 1, twist2: int = 1,
                   h: Callable | None = None, k: Callable | None = None):
    """Cone product of (x1, y1, z1) and (x2, y2, z2) with mixing parameter alpha.

    Elements are given as triples (x, y, z) of an integer part, a Hodge-filtered
    form and a form of one lower degree, any of which may be None for zero.
    ``f`` and ``g`` are the inclusions; ``h`` and ``k`` are homotopies
    (default zero) for the failure of f and g to be multiplicative.
    Returns the triple (x, y, z) of degree deg1 + deg2.
    """
    x1, y1, z1 = u1
    x2, y2, z2 = u2
    alpha = Fraction(alpha)
    if h is None and k is None:
        h = k = (lambda *_: None)
    if h is None or k is None:
        raise HomotopyUndefined("both homotopies must be registered")

    def f_of(x, tw, deg):
        if x is None or deg != 0:
            return None
        return function_form(iota(x, tw))

    x = x1 * x2 if (x1 is not None and x2 is not None) else None
    # F^{j+k} A vanishes on a curve once j + k >= 2
    y = None
    if y1 is not None and y2 is not None and twist1 + twist2 < 2:
        y = _wedge(y1, y2)
    terms = []
    fx1, fx2 = f_of(x1, twist1, deg1), f_of(x2, twist2, deg2)
    left = _lincomb([(1 - alpha, fx1), (alpha, y1)])
    if left is not None and z2 is not None:
        terms.append(_wedge(left, z2))
        if terms[-1] is not None and deg1 % 2:
            terms[-1] = -terms[-1]
    right = _lincomb([(alpha, fx2), (1 - alpha, y2)])
    if z1 is not None and right is not None:
        terms.append(_wedge(z1, right))
    hv = h(x1, x2)
    if hv is not None:
        terms.append(-hv)
    kv = k(y1, y2)
    if kv is not None:
        terms.append(kv)
    z = None
    for t in terms:
        if t is not None:
            z = t if z is None else z + t
    return x, y, z


def _wedge(F, G):
    if F.degree + G.degree > 2:
        return None
    return wedge(F, G)


def cone_d(u, deg: int, twist: int = 1):
    """Cone differential d(x, y, z) = (dx, dy, f(x) - g(y) - dz) on a curve."""
    x, y, z = u
    terms = []
    if x is not None and deg == 0:
        terms.append(function_form(iota(x, twist)))
    if y is not None:
        terms.append(-y)
    if z is not None:
        terms.append(-d(z))
    dy = d(y) if (y is not None and y.degree < 2) else None
    out = None
    for t in terms:
        out = t if out is None else out + t
    return None, dy, out


def cone_alpha_homotopy(u1, u2, deg1: int):
    """h(u1, u2) = (0, 0, (-1)^deg1 z1 ^ z2), relating the alpha products."""
    z1, z2 = u1[2], u2[2]
    if z1 is None or z2 is None:
        return None, None, None
    z = _wedge(z1, z2)
    if z is not None and deg1 % 2:
        z = -z
    return None, None, z


def cone_combine(*pairs):
    """Rational linear combination of cone triples: cone_combine((c1, u1), (c2, u2), ...)."""
    out = [None, None, None]
    for c, u in pairs:
        for i, part in enumerate(u):
            if part is None or c == 0:
                continue
            v = part * int(c) if isinstance(part, IntPoly) else part.scale(Const(c))
            out[i] = v if out[i] is None else out[i] + v
    return tuple(out)


def cone_residual(u, w) -> float:
    """Largest absolute value of the integer and form parts of a cone triple at w."""
    worst = 0.0
    for part in u:
        if part is None:
            continue
        if isinstance(part, IntPoly):
            vals = part.at(w)
            worst = max(worst, float(np.max(np.abs(vals))) if vals.size else 0.0)
        else:
            worst = max(worst, max(float(np.max(np.abs(a))) for a in eval_form(part, w).values()))
    return worst


def alpha_difference(u1, u2, deg1: int, deg2: int, alpha, beta, twist: int = 1):
    """u1 u_alpha u2 - u1 u_beta u2 - (alpha - beta)(D h + h(D u1, u2) + (-1)^deg1 h(u1, D u2)).

    Vanishes identically; returns the triple so callers can evaluate it.
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    diff = cone_combine((1, cone_cup_alpha(u1, u2, deg1, deg2, alpha, twist, twist)),
                        (-1, cone_cup_alpha(u1, u2, deg1, deg2, beta, twist, twist)))
    h0 = cone_alpha_homotopy(u1, u2, deg1)
    hom = cone_combine(
        (1, cone_d(h0, deg1 + deg2 - 1, 2 * twist)),
        (1, cone_alpha_homotopy(cone_d(u1, deg1, twist), u2, deg1 + 1)),
        ((-1) ** deg1, cone_alpha_homotopy(u1, cone_d(u2, deg2, twist), deg1)),
    )
    out = cone_combine((1, diff), (-(alpha - beta), hom))
    # the Hodge piece of the product lives in F^2 A = 0
    return out[0], None, out[2]


def _lincomb(pairs):
    acc = None
    for c, v in pairs:
        if v is None or c == 0:
            continue
        term = v if c == 1 else v.scale(Const(c))
        acc = term if acc is None else acc + term
    return acc


# ---------------------------------------------------------------------------
# verification


@dataclass
class Report:
    complex: str
    degree: int
    tolerance: float
    passed: bool
    max_residual: float
    worst: tuple | None
    records: list

    def as_dict(self) -> dict:
        return {"complex": self.complex, "degree": self.degree, "tolerance": self.tolerance,
                "pass": self.passed, "max_residual": self.max_residual,
                "worst_simplex": list(self.worst[1]) if self.worst else None,
                "records": self.records}


def cochain_residual(c: CechCochain, count: int = 20, seed: int | None = None,
                     tol: float = 1e-10, label: str | None = None) -> Report:
    """Evaluate every component of c on every nerve simplex of the right dimension."""
    nerve = nerve_of(c.cover)
    records, worst, max_res, ok = [], None, 0.0, True
    for idx, simplex in sorted(nerve.items(), key=lambda kv: (len(kv[0]), kv[0])):
        p = c.degree - (len(idx) - 1)
        if p < 0 or p > c.complex.top:
            continue
        v = c.values.get((p, idx))
        if v is None:
            res, ires = 0.0, 0
        else:
            w = sample_points(c.cover, simplex, count, seed)
            res, ires = _veval(c.complex.slots[p], v, w)
        passed = ires == 0 and res < tol
        total = float(res) + float(ires)
        records.append({"complex": label or c.complex.name, "degree": c.degree,
                        "simplex": list(idx), "slot": p, "residual": total,
                        "tolerance": tol, "pass": passed})
        if worst is None or total > max_res:
            worst, max_res = (p, idx), max(max_res, total)
        ok = ok and passed
    return Report(label or c.complex.name, c.degree, tol, ok, max_res, worst, records)


def is_cocycle(c: CechCochain, tol: float = 1e-10, count: int = 20,
               seed: int | None = None) -> Report:
    """Check D c = 0 at sample points; integer slots must vanish exactly."""
    rep = cochain_residual(total_D(c), count=count, seed=seed, tol=tol, label=c.complex.name)
    rep.degree = c.degree
    for r in rep.records:
        r["degree"] = c.degree
    return rep
