"""Tame symbols and their higher analogues as explicit Cech cocycles.

Additive cocycles come straight out of the cup products of the engine.  Next to
each one sits its multiplicative presentation (transition functions and
connection or metric forms) and the identities linking them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bundle_data import LineBundleData, _edges, _tetrahedra, _triangles
from .cech_engine import (
    BranchJump, CechCochain, IntPoly, deligne_complex, deligne_cup, gamma_tilde2_complex,
    hermitian_cup, nerve_of, untwist,
)
from .cover_nerve import SectorCover, branch_for, sample_points
from .errors import InvalidCover
from .exact_algebra import RationalFunction
from .form_calculus import (
    Const, Expr, Form, ZERO, add, d, eval_form, evaluate, function_form, log_abs, log_branch,
    mul, neg, pi_p, rat,
)

__all__ = [
    "function_class", "TameSymbolData", "HermitianSymbolData", "tame_symbol",
    "hermitian_tame_symbol", "forget_connection", "forget_metric", "forgetful_images_agree",
    "symbol_fL", "hermitian_symbol_fL", "symbol_LL", "hermitian_symbol_LL", "r2_form",
    "compatibility_obstruction", "fl_metric_coboundary_residual", "r2_coboundary_residual",
    "pic_cocycle", "multiplicative_fL_residuals", "multiplicative_LL_residuals",
    "tame_multiplicative_residuals", "ll_metric_cocycle_residual",
]

_HALF = Fraction(1, 2)
INV_2PI_I = Const(1, -1)


def _factors(f):
    if isinstance(f, (list, tuple)):
        return [RationalFunction.coerce(x) for x in f]
    return [RationalFunction.coerce(f)]


def function_class(f, cover: SectorCover) -> CechCochain:
    """(2*pi*i m_ij, log_i f) in Z(1)_D.

    A list of factors is treated multiplicatively: log_i(f1 f2) := log_i f1 + log_i f2.
    """
    vals = {}
    for R in _factors(f):
        b = branch_for(R, cover)
        part = {}
        for idx in nerve_of(cover):
            if len(idx) == 1:
                part[(1, idx)] = function_form(log_branch(b, idx[0]))
            elif len(idx) == 2:
                part[(0, idx)] = IntPoly.atom(BranchJump(b, *idx))
        for k, v in part.items():
            vals[k] = vals[k] + v if k in vals else v
    return CechCochain(deligne_complex(1), 1, cover, vals)


def _log_f(f, cover, i) -> Expr:
    return add(*[log_branch(branch_for(R, cover), i) for R in _factors(f)])


def _dlog(f) -> Form:
    return Form(1, {"dz": rat(_product(f).log_derivative())})


def _product(f) -> RationalFunction:
    fs = _factors(f)
    R = fs[0]
    for x in fs[1:]:
        R = R * x
    return R


def _coerced(f):
    """Parse once so later branch and product lookups reuse the same objects."""
    if isinstance(f, (list, tuple)):
        return [RationalFunction.coerce(x) for x in f]
    return RationalFunction.coerce(f)


# ---------------------------------------------------------------------------
# the tame symbol <f, g>


@dataclass
class TameSymbolData:
    f: object
    g: object
    cover: SectorCover
    cocycle: CechCochain
    f_class: CechCochain = field(repr=False)
    g_class: CechCochain = field(repr=False)

    def omega(self, i: int) -> Form:
        """omega_i = log_i f dg/g."""
        return _dlog(self.g).scale(_log_f(self.f, self.cover, i))

    def connection(self, i: int, h: Expr = ZERO) -> Form:
        """Connection applied to the section h_i {log_i f, g}: dh_i - omega_i / 2*pi*i."""
        return d(h) - self.omega(i).scale(INV_2PI_I)

    def branch_integers(self) -> dict:
        out = {}
        for R in _factors(self.f):
            for e, ms in branch_for(R, self.cover).branch_integers.items():
                prev = out.get(e, (0,) * len(ms))
                out[e] = tuple(a + b for a, b in zip(prev, ms))
        return out

    def transitions(self) -> dict:
        """g^(-m_ij) per overlap, one exact rational function per component."""
        G = _product(self.g)
        return {e: tuple(G ** (-m) for m in ms) for e, ms in self.branch_integers().items()}


def tame_symbol(f, g, cover: SectorCover) -> TameSymbolData:
    """Cup product of the classes of f and g: ((2 pi i)^2 m n, -2 pi i m log_j g, log_i f dg/g)."""
    f, g = _coerced(f), _coerced(g)
    a, b = function_class(f, cover), function_class(g, cover)
    return TameSymbolData(f, g, cover, deligne_cup(a, b), a, b)


def tame_multiplicative_residuals(T: TameSymbolData, count: int = 20,
                                  seed: int | None = None) -> dict:
    """Checks of the multiplicative presentation (g^(-m_ij), -omega_i / 2 pi i).

    delta of the form slot must equal dlog g^(-m_ij) on overlaps, and the
    transition functions must multiply to one on triangles.
    """
    cover = T.cover
    nerve = nerve_of(cover)
    G = _product(T.g)
    m_field = {e: T.f_class.get(0, e) for e in _edges(cover)}
    form_res, prod_res = 0.0, 0.0
    for i, j in _edges(cover):
        w = sample_points(cover, nerve[(i, j)], count, seed)
        m = m_field[(i, j)].at(w)
        lhs = eval_form((T.omega(j) - T.omega(i)).scale(neg(INV_2PI_I)), w)["dz"]
        rhs = -m * G.log_derivative()(w)
        form_res = max(form_res, float(np.max(np.abs(lhs - rhs))))
    for t in _triangles(cover):
        i, j, k = t
        w = sample_points(cover, nerve[t], count, seed)
        gv = G(w)
        mij, mjk, mik = (m_field[e].at(w) for e in [(i, j), (j, k), (i, k)])
        val = gv ** (-mjk.astype(float)) * gv ** (mik.astype(float)) * gv ** (-mij.astype(float))
        prod_res = max(prod_res, float(np.max(np.abs(val - 1))))
    return {"form_transition": form_res, "transition_cocycle": prod_res}


@dataclass
class HermitianSymbolData:
    f: object
    g: object
    cover: SectorCover
    cocycle: CechCochain  # in Z(1) -> O -> E0 after division by 2 pi i
    twisted: CechCochain  # in Z(2) -> O -> E0(1), straight from the hermitian cup

    def half_log_rho(self, i: int) -> Expr:
        """-(1/2 pi i) pi_1(log_i f) log|g|."""
        return mul(neg(INV_2PI_I), pi_p(_log_f(self.f, self.cover, i), 1), log_abs(_product(self.g)))

    def log_length(self, i: int, h: Expr = ZERO) -> Expr:
        """log rho(s) for s = h_i {log_i f, g}: (1/2 pi i)(pi_1(h_i) - pi_1(log_i f) log|g|)."""
        core = add(pi_p(h, 1), neg(mul(pi_p(_log_f(self.f, self.cover, i), 1),
                                       log_abs(_product(self.g)))))
        return mul(INV_2PI_I, core)


def hermitian_tame_symbol(f, g, cover: SectorCover) -> HermitianSymbolData:
    f, g = _coerced(f), _coerced(g)
    a, b = function_class(f, cover), function_class(g, cover)
    tw = hermitian_cup(a, b)
    return HermitianSymbolData(f, g, cover, untwist(tw), tw)


def forget_connection(c: CechCochain) -> CechCochain:
    """Z(2)_D -> Z(1)_D: drop the form slot and divide by 2 pi i."""
    return c.map_slots(deligne_complex(1), {0: (0, lambda x: x),
                                            1: (1, lambda v: v.scale(INV_2PI_I))})


def forget_metric(c: CechCochain) -> CechCochain:
    """(Z(1) -> O -> E0) -> Z(1)_D: drop the metric slot."""
    return c.map_slots(deligne_complex(1), {0: (0, lambda x: x), 1: (1, lambda v: v)})


def forgetful_images_agree(T: TameSymbolData, H: HermitianSymbolData) -> bool:
    """Both symbols map to the same underlying line bundle cochain, exactly."""
    return forget_connection(T.cocycle).values == forget_metric(H.cocycle).values


def pic_cocycle(f, g, cover: SectorCover) -> CechCochain:
    """The tame and hermitian data together, with values in Z(2) -> O -> Omega1 + E0(1)."""
    T = tame_symbol(f, g, cover)
    vals = {}
    for (p, idx), v in T.cocycle.values.items():
        if p < 2:
            vals[(p, idx)] = v
    lg = log_abs(_product(g))
    for (i,) in [s for s in nerve_of(cover) if len(s) == 1]:
        sigma = neg(mul(pi_p(_log_f(f, cover, i), 1), lg))
        vals[(2, (i,))] = (T.omega(i), function_form(sigma))
    return CechCochain(gamma_tilde2_complex(), 2, cover, vals)


# ---------------------------------------------------------------------------
# r_2 and the compatibility obstruction


def r2_form(f, g) -> Form:
    """pi_1(dlog f) log|g| - log|f| pi_1(dlog g), a global imaginary 1-form."""
    F, G = _product(f), _product(g)
    a = pi_p(_dlog(F), 1).scale(log_abs(G))
    b = pi_p(_dlog(G), 1).scale(log_abs(F))
    return a - b


def compatibility_obstruction(f, g, cover: SectorCover, count: int = 20,
                              seed: int | None = None, tol: float = 1e-10) -> dict:
    """pi_1(omega_i) + d sigma_i + r_2(f, g) on every sector, and whether r_2 vanishes."""
    nerve = nerve_of(cover)
    r2 = r2_form(f, g)
    G = _product(g)
    ident, r2_max = 0.0, 0.0
    for (i,) in [s for s in nerve if len(s) == 1]:
        w = sample_points(cover, nerve[(i,)], count, seed)
        omega = _dlog(g).scale(_log_f(f, cover, i))
        sigma = neg(mul(pi_p(_log_f(f, cover, i), 1), log_abs(G)))
        expr = pi_p(omega, 1) + d(sigma) + r2
        ident = max(ident, _fmax(expr, w))
        r2_max = max(r2_max, _fmax(r2, w))
    return {
        "identity_residual": ident,
        "identity_pass": ident < tol,
        "r2_max": r2_max,
        "r2_structurally_zero": r2.is_zero(),
        "compatible": r2.is_zero() or r2_max < tol,
        "tolerance": tol,
    }


def _fmax(F: Form, w) -> float:
    vals = eval_form(F, w)
    return max((float(np.max(np.abs(a))) if a.size else 0.0) for a in vals.values())


# ---------------------------------------------------------------------------
# <f, L> and <L, L'>


def symbol_fL(f, L: LineBundleData) -> CechCochain:
    return deligne_cup(function_class(f, L.cover), L.cocycle())


def hermitian_symbol_fL(f, L: LineBundleData) -> CechCochain:
    return untwist(hermitian_cup(function_class(f, L.cover), L.cocycle()))


def symbol_LL(L: LineBundleData, Lp: LineBundleData) -> CechCochain:
    if L.cover != Lp.cover:
        raise InvalidCover("bundles live on different covers")
    return deligne_cup(L.cocycle(), Lp.cocycle())


def hermitian_symbol_LL(L: LineBundleData, Lp: LineBundleData) -> CechCochain:
    if L.cover != Lp.cover:
        raise InvalidCover("bundles live on different covers")
    return untwist(hermitian_cup(L.cocycle(), Lp.cocycle()))


def _sigma_fL(f, L, i, j) -> Expr:
    """-(1/2 pi i) pi_1(log_i f) pi_0(log g_ij)."""
    return mul(neg(INV_2PI_I), pi_p(_log_f(f, L.cover, i), 1), log_abs(L.transition(i, j)))


def fl_metric_coboundary_residual(f, L: LineBundleData, count: int = 20,
                                  seed: int | None = None) -> float:
    """sigma_ij - sigma_ik + sigma_jk + m_ij log|g_jk| on triangles."""
    cover = L.cover
    nerve = nerve_of(cover)
    fc = function_class(f, cover)
    worst = 0.0
    for i, j, k in _triangles(cover):
        w = sample_points(cover, nerve[(i, j, k)], count, seed)
        s = (evaluate(_sigma_fL(f, L, i, j), w) - evaluate(_sigma_fL(f, L, i, k), w)
             + evaluate(_sigma_fL(f, L, j, k), w))
        m = fc.get(0, (i, j)).at(w)
        s = s + m * np.log(np.abs(L.transition(j, k)(w)))
        worst = max(worst, float(np.max(np.abs(s))))
    return worst


def multiplicative_fL_residuals(f, L: LineBundleData, count: int = 20,
                                seed: int | None = None) -> dict:
    """(g_jk^(-m_ij), -(1/2 pi i) log_i f dlog g_ij): delta omega = dlog h, delta h = 1."""
    cover = L.cover
    nerve = nerve_of(cover)
    fc = function_class(f, cover)

    def omega(i, j):
        return Form(1, {"dz": rat(L.transition(i, j).log_derivative())}).scale(
            mul(neg(INV_2PI_I), _log_f(f, cover, i)))

    def h(i, j, k, w):
        m = fc.get(0, (i, j)).at(w).astype(float)
        return L.transition(j, k)(w) ** (-m)

    form_res, coc_res = 0.0, 0.0
    for i, j, k in _triangles(cover):
        w = sample_points(cover, nerve[(i, j, k)], count, seed)
        dw = eval_form(omega(j, k) - omega(i, k) + omega(i, j), w)["dz"]
        m = fc.get(0, (i, j)).at(w)
        dlog_h = -m * L.transition(j, k).log_derivative()(w)
        form_res = max(form_res, float(np.max(np.abs(dw - dlog_h))))
    for i, j, k, l in _tetrahedra(cover):
        w = sample_points(cover, nerve[(i, j, k, l)], count, seed)
        val = h(j, k, l, w) / h(i, k, l, w) * h(i, j, l, w) / h(i, j, k, w)
        coc_res = max(coc_res, float(np.max(np.abs(val - 1))))
    return {"form_transition": form_res, "transition_cocycle": coc_res}


def _sigma_LL(L, Lp, i, j, k) -> Expr:
    """-(1/2 pi i) pi_1(log g_ij) pi_0(log g'_jk)."""
    return mul(neg(INV_2PI_I), pi_p(L.log(i, j), 1), log_abs(Lp.transition(j, k)))


def ll_metric_cocycle_residual(L: LineBundleData, Lp: LineBundleData, count: int = 20,
                  seed: int | None = None) -> float:
    """rho_jkl rho_ikl^-1 rho_ijl rho_ijk^-1 = |h_ijkl|^2 with h_ijkl = g'_kl^(-c_ijk)."""
    cover = L.cover
    nerve = nerve_of(cover)
    worst = 0.0
    for i, j, k, l in _tetrahedra(cover):
        w = sample_points(cover, nerve[(i, j, k, l)], count, seed)

        def s(a, b, c):
            return evaluate(_sigma_LL(L, Lp, a, b, c), w)

        lhs = 2 * (s(j, k, l) - s(i, k, l) + s(i, j, l) - s(i, j, k))
        c = L.chern_field(i, j, k).at(w)
        rhs = 2 * (-c) * np.log(np.abs(Lp.transition(k, l)(w)))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def multiplicative_LL_residuals(L: LineBundleData, Lp: LineBundleData, count: int = 20,
                                seed: int | None = None) -> dict:
    """(g'_kl^(-c_ijk), -(1/2 pi i) log g_ij dlog g'_jk): delta omega = dlog h."""
    cover = L.cover
    nerve = nerve_of(cover)

    def omega(i, j, k):
        return Form(1, {"dz": rat(Lp.transition(j, k).log_derivative())}).scale(
            mul(neg(INV_2PI_I), L.log(i, j)))

    worst = 0.0
    for i, j, k, l in _tetrahedra(cover):
        w = sample_points(cover, nerve[(i, j, k, l)], count, seed)
        dw = eval_form(omega(j, k, l) - omega(i, k, l) + omega(i, j, l) - omega(i, j, k), w)["dz"]
        c = L.chern_field(i, j, k).at(w)
        dlog_h = -c * Lp.transition(k, l).log_derivative()(w)
        worst = max(worst, float(np.max(np.abs(dw - dlog_h))))
    return {"form_transition": worst}


def r2_coboundary_residual(f, L: LineBundleData, count: int = 20, seed: int | None = None) -> float:
    """delta of the 1-cochain r_2(f, g_ij) over triangles."""
    cover = L.cover
    nerve = nerve_of(cover)
    worst = 0.0
    for i, j, k in _triangles(cover):
        w = sample_points(cover, nerve[(i, j, k)], count, seed)
        F = (r2_form(f, L.transition(j, k)) - r2_form(f, L.transition(i, k))
             + r2_form(f, L.transition(i, j)))
        worst = max(worst, _fmax(F, w))
    return worst
