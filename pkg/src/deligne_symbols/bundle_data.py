"""Line bundles given by transition functions on a sector cover, hermitian metrics,
the canonical connection, and the Cech shadows of hermitian gerbes and 2-gerbes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml

from .cech_engine import (
    CechCochain, IntPoly, Report, RoundedField, deligne_complex, dhh1_complex, is_cocycle,
    metrized_complex, nerve_of,
)
from .cover_nerve import SectorCover, branch_for, sample_points
from .errors import InvalidCover, MetricIncompatible, ParseError
from .exact_algebra import RationalFunction
from .form_calculus import (
    Const, Expr, Form, add, conj, d, eval_form, evaluate, function_form, log_branch, mul,
    partial, partialbar, pi_p, power, rat,
)

__all__ = [
    "MetricFactor", "LineBundleData", "HermitianMetricData", "ConnectionData",
    "canonical_connection", "connection_report", "metrized_bundle_cocycle",
    "hh_cocycle", "hh_cocycle_check", "GerbeData", "TwoGerbeData", "synthetic_gerbe",
    "synthetic_two_gerbe", "gerbe_shadow_checks", "load_bundle", "z_power_family",
]

TWO_PI_I = 2j * np.pi
_HALF = Fraction(1, 2)


def _edges(cover):
    return [s for s in nerve_of(cover) if len(s) == 2]


def _triangles(cover):
    return [s for s in nerve_of(cover) if len(s) == 3]


def _tetrahedra(cover):
    return [s for s in nerve_of(cover) if len(s) == 4]


class LineBundleData:
    """Transition functions g_ij (i < j) on the overlaps of a sector cover.

    log g_ij is the branch of g_ij continued over sector i; the Chern integers
    are c_ijk = (log g_jk - log g_ik + log g_ij) / 2*pi*i.
    """

    def __init__(self, cover: SectorCover, transitions: dict, name: str = "L"):
        self.cover = cover
        self.name = name
        g = {}
        for e in _edges(cover):
            R = transitions.get(e)
            if R is None:
                R = transitions.get(e[::-1])
                R = RationalFunction.coerce(1) if R is None else 1 / RationalFunction.coerce(R)
            g[e] = RationalFunction.coerce(R)
        for R in g.values():
            if R.is_zero():
                raise InvalidCover("transition function vanishes identically")
            cover.check_function(R)
        for i, j, k in _triangles(cover):
            if g[(i, j)] * g[(j, k)] != g[(i, k)]:
                raise InvalidCover(f"transition functions fail g_ij g_jk = g_ik on ({i},{j},{k})")
        self.g = g

    def transition(self, i: int, j: int) -> RationalFunction:
        if i < j:
            return self.g[(i, j)]
        return 1 / self.g[(j, i)]

    def log(self, i: int, j: int) -> Expr:
        return log_branch(branch_for(self.g[(i, j)], self.cover), i)

    def chern_field(self, i: int, j: int, k: int) -> IntPoly:
        expr = add(self.log(j, k), -self.log(i, k), self.log(i, j))
        return IntPoly.atom(RoundedField(expr, TWO_PI_I, f"c[{self.name}]({i},{j},{k})"))

    def chern_integers(self) -> dict:
        """c_ijk per triangle, one integer per connected component of U_ijk."""
        out = {}
        rm = self.cover.mid_radius
        for t in _triangles(self.cover):
            comps = nerve_of(self.cover)[t].components
            mids = [self.cover.p + rm * np.exp(1j * (float(a) + float(b)) / 2) for a, b in comps]
            out[t] = tuple(int(v) for v in self.chern_field(*t).at(np.array(mids)))
        return out

    def cocycle(self) -> CechCochain:
        """(2*pi*i c_ijk, log g_ij) in Z(1)_D."""
        vals = {(1, e): function_form(self.log(*e)) for e in _edges(self.cover)}
        for t in _triangles(self.cover):
            vals[(0, t)] = self.chern_field(*t)
        return CechCochain(deligne_complex(1), 2, self.cover, vals)

    def is_trivial(self) -> bool:
        return all(R.is_constant() and R.constant_value() == 1 for R in self.g.values())

    @classmethod
    def trivial(cls, cover: SectorCover, name: str = "L") -> "LineBundleData":
        return cls(cover, {}, name)


@dataclass(frozen=True)
class MetricFactor:
    """The factor |R|^(2k)."""

    R: RationalFunction
    k: int


class HermitianMetricData:
    """rho_i = prod |R|^(2k) on sector i; log rho_i built from log branches."""

    def __init__(self, cover: SectorCover, factors: dict):
        self.cover = cover
        self.factors = {}
        for i in range(cover.N):
            fs = []
            for item in factors.get(i, ()):
                if isinstance(item, MetricFactor):
                    fs.append(item)
                else:
                    R, k = item
                    fs.append(MetricFactor(RationalFunction.coerce(R), int(k)))
            for fct in fs:
                cover.check_function(fct.R)
            self.factors[i] = tuple(fs)

    def rho(self, i: int) -> Expr:
        terms = [power(mul(rat(f.R), conj(rat(f.R))), f.k) for f in self.factors[i]]
        return mul(*terms) if terms else Const(1)

    def log_rho(self, i: int) -> Expr:
        terms = []
        for f in self.factors[i]:
            L = log_branch(branch_for(f.R, self.cover), i)
            terms.append(mul(Const(f.k), add(L, conj(L))))
        return add(*terms) if terms else Const(0)

    def half_log_rho(self, i: int) -> Expr:
        return mul(Const(_HALF), self.log_rho(i))

    def compatibility_residual(self, L: LineBundleData, count: int = 20, seed: int | None = None) -> float:
        """max |log rho_j - log rho_i - log |g_ij|^2| over overlaps."""
        worst = 0.0
        for i, j in _edges(self.cover):
            w = sample_points(self.cover, nerve_of(self.cover)[(i, j)], count, seed)
            lhs = evaluate(self.log_rho(j), w) - evaluate(self.log_rho(i), w)
            rhs = 2 * np.log(np.abs(L.transition(i, j)(w)))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst

    def check_compatible(self, L: LineBundleData, tol: float = 1e-10, count: int = 20,
                         seed: int | None = None) -> float:
        res = self.compatibility_residual(L, count, seed)
        if res > tol:
            raise MetricIncompatible(f"rho_j = rho_i |g_ij|^2 fails, residual {res:.3g}")
        return res

    @classmethod
    def trivial(cls, cover: SectorCover) -> "HermitianMetricData":
        return cls(cover, {})


@dataclass
class ConnectionData:
    cover: SectorCover
    xi: dict  # sector -> (1,0)-Form
    curvature: dict = field(default_factory=dict)  # sector -> (1,1)-Form


def canonical_connection(m: HermitianMetricData, L: LineBundleData | None = None,
                         tol: float = 1e-10) -> ConnectionData:
    """xi_i = del log rho_i and eta_i = delbar del log rho_i."""
    if L is not None:
        m.check_compatible(L, tol)
    xi, eta = {}, {}
    for i in range(m.cover.N):
        lr = m.log_rho(i)
        xi[i] = partial(lr)
        eta[i] = partialbar(partial(lr))
    return ConnectionData(m.cover, xi, eta)


def connection_report(L: LineBundleData, m: HermitianMetricData, conn: ConnectionData,
                      count: int = 20, seed: int | None = None, tol: float = 1e-10) -> dict:
    """Residuals of xi_j - xi_i = dlog g_ij, pi_0 xi_i = 1/2 d log rho_i, eta_i = eta_j."""
    cover = L.cover
    nerve = nerve_of(cover)
    res = {"connection_transition": 0.0, "connection_real_part": 0.0, "curvature_overlap": 0.0}
    for (i,) in [s for s in nerve if len(s) == 1]:
        w = sample_points(cover, nerve[(i,)], count, seed)
        diff = pi_p(conn.xi[i], 0) - d(m.log_rho(i)).scale(Const(_HALF))
        res["connection_real_part"] = max(res["connection_real_part"], _form_max(diff, w))
    for i, j in _edges(cover):
        w = sample_points(cover, nerve[(i, j)], count, seed)
        R = L.transition(i, j)
        dlog = Form(1, {"dz": rat(R.log_derivative())})
        res["connection_transition"] = max(res["connection_transition"],
                                           _form_max(conn.xi[j] - conn.xi[i] - dlog, w))
        res["curvature_overlap"] = max(res["curvature_overlap"],
                                       _form_max(conn.curvature[j] - conn.curvature[i], w))
    return {k: {"residual": v, "tolerance": tol, "pass": v < tol} for k, v in res.items()}


def _form_max(F: Form, w) -> float:
    vals = eval_form(F, w)
    return max((float(np.max(np.abs(a))) if a.size else 0.0) for a in vals.values())


def metrized_bundle_cocycle(L: LineBundleData, m: HermitianMetricData) -> CechCochain:
    """(2*pi*i c_ijk, log g_ij, 1/2 log rho_i) in Z(1) -> O -> E0."""
    if L.cover != m.cover:
        raise InvalidCover("bundle and metric live on different covers")
    vals = {(1, e): function_form(L.log(*e)) for e in _edges(L.cover)}
    for t in _triangles(L.cover):
        vals[(0, t)] = L.chern_field(*t)
    for i in range(L.cover.N):
        vals[(2, (i,))] = function_form(mul(Const(_HALF), m.log_rho(i)))
    return CechCochain(metrized_complex(), 2, L.cover, vals)


def hh_cocycle(L: LineBundleData, m: HermitianMetricData) -> CechCochain:
    """Degree-two cochain (c, log g, (eta, xi, 1/2 log rho)) in the full hermitian complex."""
    conn = canonical_connection(m)
    vals = {(1, e): function_form(L.log(*e)) for e in _edges(L.cover)}
    for t in _triangles(L.cover):
        vals[(0, t)] = L.chern_field(*t)
    for i in range(L.cover.N):
        vals[(2, (i,))] = (conn.curvature[i], conn.xi[i],
                           function_form(mul(Const(_HALF), m.log_rho(i))))
    return CechCochain(dhh1_complex(), 2, L.cover, vals)


def hh_cocycle_check(L: LineBundleData, m: HermitianMetricData, tol: float = 1e-10,
                     count: int = 20, seed: int | None = None) -> Report:
    """Full cocycle check, plus the requirement that each curvature form is imaginary."""
    c = hh_cocycle(L, m)
    rep = is_cocycle(c, tol=tol, count=count, seed=seed)
    nerve = nerve_of(L.cover)
    for i in range(L.cover.N):
        w = sample_points(L.cover, nerve[(i,)], count, seed)
        r = _form_max(pi_p(c.values[(2, (i,))][0], 0), w) if (2, (i,)) in c.values else 0.0
        ok = r < tol
        rep.records.append({"complex": "curvature real part", "degree": 2, "simplex": [i],
                            "slot": 2, "residual": r, "tolerance": tol, "pass": ok})
        rep.passed = rep.passed and ok
        rep.max_residual = max(rep.max_residual, r)
    return rep


def z_power_family(cover: SectorCover, b) -> tuple[LineBundleData, HermitianMetricData]:
    """g_ij = z^(b_j - b_i) and rho_i = |z|^(2 b_i), centred at the cover's centre."""
    b = [int(v) for v in b]
    if len(b) != cover.N:
        raise ValueError("need one exponent per sector")
    zc = RationalFunction.coerce("z") - RationalFunction.coerce(cover.center)
    L = LineBundleData(cover, {e: zc ** (b[e[1]] - b[e[0]]) for e in _edges(cover)})
    m = HermitianMetricData(cover, {i: [MetricFactor(zc, b[i])] for i in range(cover.N)})
    return L, m


# ---------------------------------------------------------------------------
# gerbe and 2-gerbe shadows built from random coboundaries


@dataclass
class GerbeData:
    """g_ijk = R_jk R_ij / R_ik with metrics rho_ij = |R_ij|^2."""

    cover: SectorCover
    R: dict  # edge -> RationalFunction

    def g(self, i, j, k) -> RationalFunction:
        return self.R[(j, k)] * self.R[(i, j)] / self.R[(i, k)]

    def rho(self, i, j) -> Expr:
        R = rat(self.R[(i, j)])
        return mul(R, conj(R))

    def xi(self, i, j) -> Form:
        L = log_branch(branch_for(self.R[(i, j)], self.cover), i)
        return partial(add(L, conj(L)))


@dataclass
class TwoGerbeData:
    """h_ijkl = R_jkl R_ijl / (R_ikl R_ijk) with metrics rho_ijk = |R_ijk|^2."""

    cover: SectorCover
    R: dict  # triangle -> RationalFunction

    def h(self, i, j, k, l) -> RationalFunction:
        R = self.R
        return R[(j, k, l)] * R[(i, j, l)] / (R[(i, k, l)] * R[(i, j, k)])

    def rho(self, i, j, k) -> Expr:
        R = rat(self.R[(i, j, k)])
        return mul(R, conj(R))


def _random_factor(rng, center, avoid_radius: float) -> RationalFunction:
    z = RationalFunction.coerce("z") - RationalFunction.coerce(center)
    a, b = (int(v) for v in rng.integers(-2, 3, size=2))
    c = int(rng.choice([-1, 1])) * (int(np.ceil(avoid_radius)) + 1 + int(rng.integers(0, 3)))
    return z ** a * (z - RationalFunction.coerce(c)) ** b


def synthetic_gerbe(cover: SectorCover, seed: int = 0) -> GerbeData:
    rng = np.random.default_rng(seed)
    return GerbeData(cover, {e: _random_factor(rng, cover.center, cover.outer) for e in _edges(cover)})


def synthetic_two_gerbe(cover: SectorCover, seed: int = 0) -> TwoGerbeData:
    rng = np.random.default_rng(seed + 1)
    return TwoGerbeData(cover, {t: _random_factor(rng, cover.center, cover.outer)
                                for t in _triangles(cover)})


def _abs2(R: RationalFunction, w):
    return np.abs(R(w)) ** 2


def gerbe_shadow_checks(cover: SectorCover, seed: int = 0, count: int = 20,
                        tol: float = 1e-10) -> dict:
    """Relative residuals of the gerbe and 2-gerbe metric identities, and the
    connection identity xi_jk - xi_ik + xi_ij = dlog g_ijk."""
    nerve = nerve_of(cover)
    G = synthetic_gerbe(cover, seed)
    metric_res, conn_res = 0.0, 0.0
    for i, j, k in _triangles(cover):
        w = sample_points(cover, nerve[(i, j, k)], count, seed)
        lhs = evaluate(G.rho(i, j), w) * evaluate(G.rho(j, k), w)
        rhs = _abs2(G.g(i, j, k), w) * evaluate(G.rho(i, k), w)
        metric_res = max(metric_res, float(np.max(np.abs(lhs - rhs) / np.abs(rhs))))
        g = G.g(i, j, k)
        dlog = Form(1, {"dz": rat(g.log_derivative())})
        conn_res = max(conn_res, _form_max(G.xi(j, k) - G.xi(i, k) + G.xi(i, j) - dlog, w))
    out = {
        "gerbe_metric": {"residual": metric_res, "tolerance": tol, "pass": metric_res < tol},
        "gerbe_connection": {"residual": conn_res, "tolerance": tol, "pass": conn_res < tol},
    }
    tets = _tetrahedra(cover)
    if tets:
        H = synthetic_two_gerbe(cover, seed)
        worst = 0.0
        for i, j, k, l in tets:
            w = sample_points(cover, nerve[(i, j, k, l)], count, seed)
            lhs = (evaluate(H.rho(j, k, l), w) / evaluate(H.rho(i, k, l), w)
                   * evaluate(H.rho(i, j, l), w) / evaluate(H.rho(i, j, k), w))
            rhs = _abs2(H.h(i, j, k, l), w)
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / np.abs(rhs))))
        out["two_gerbe_metric"] = {"residual": worst, "tolerance": tol, "pass": worst < tol}
    return out


# ---------------------------------------------------------------------------
# bundle description files


def load_bundle(path, cover: SectorCover | None = None) -> tuple[LineBundleData, HermitianMetricData]:
    """Read a YAML bundle description.

    Either ``exponents: [b0, b1, ...]`` for the z-power family, or
    ``transitions: [[i, j, "expr"], ...]`` with ``metric: {i: [["expr", k], ...]}``.
    A ``cover:`` mapping overrides the cover argument.
    """
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ParseError(f"cannot read bundle file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("bundle file must be a mapping")
    if "cover" in doc:
        cover = SectorCover.from_config(doc["cover"])
    if cover is None:
        raise ParseError("no cover given for the bundle")
    if "exponents" in doc:
        return z_power_family(cover, doc["exponents"])
    trans = {}
    for item in doc.get("transitions", []):
        i, j, expr = item
        trans[(int(i), int(j))] = RationalFunction.coerce(str(expr))
    metric = {}
    for i, facs in (doc.get("metric") or {}).items():
        metric[int(i)] = [(RationalFunction.coerce(str(e)), int(k)) for e, k in facs]
    return LineBundleData(cover, trans, doc.get("name", "L")), HermitianMetricData(cover, metric)
