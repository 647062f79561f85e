"""The mixed Hodge structure on C^3 attached to the Heisenberg period matrix.

Tensors live in C (x)_Q C.  Every side is expanded into a Q-linear combination
of monomials  atom^p ... * i^e * (2 pi i)^j  with e in {0, 1}; only the rational
coefficient moves across the tensor sign, so 2 pi i (x) 1 and 1 (x) 2 pi i stay
distinct.  Kahler differentials are derivations over Q, hence d(2 pi i) is kept
as a generator; it vanishes when the entries are turned into forms on a curve.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import LiftMismatch, NotInKernel
from .exact_algebra import GaussianRational, RationalFunction
from .form_calculus import (
    Const, Expr, Form, IntPow, Prod, Rat, Sum, Var, ZERO, _lift, add, d, evaluate, mul,
    neg, pi_p, power, sub,
)

__all__ = [
    "Expansion", "expand", "TensorQQ", "KahlerForm", "kahler_d", "PeriodData",
    "big_period", "big_period_closed_form", "mult_map", "project_kahler",
    "kahler_closed_form", "project_R1", "r1_closed_form", "ExtensionClass",
    "extension_class", "unique_lift", "half_log_B", "q_invariance_check",
    "functionals", "pair_functionals", "numeric_big_period", "heisenberg_cross_check", "tame_cross_check",
    "extension_exp_closed_form",
]

TWO_PI_I = 2j * np.pi
TWO_PI_I_GEN = "<2pi i>"
_ATOMS: dict[str, Expr] = {}


# ---------------------------------------------------------------------------
# canonical expansions


class Expansion:
    """Finite sum of rational multiples of canonical monomials.

    A monomial is keyed by (core, e, j): core is a sorted tuple of
    (atom key, power), e the power of i (0 or 1), j the power of 2 pi i.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def one(cls) -> "Expansion":
        return cls({((), 0, 0): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, Expansion) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Expansion") -> "Expansion":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Expansion(out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Expansion":
        c = Fraction(c)
        return Expansion({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "Expansion") -> "Expansion":
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k, sign = _mono_mul(k1, k2)
                out[k] = out.get(k, 0) + sign * v1 * v2
        return Expansion(out)

    def single(self):
        """(key, coefficient) if this is one monomial, else None."""
        if len(self.terms) != 1:
            return None
        return next(iter(self.terms.items()))

    def to_expr(self) -> Expr:
        return add(*[_mono_expr(k, c) for k, c in sorted(self.terms.items(), key=_sort_key)])

    def text(self) -> str:
        return self.to_expr().text() if self.terms else "0"

    def __repr__(self):
        return f"Expansion({self.text()})"


def _sort_key(item):
    (core, e, j), _ = item
    return (core, e, j)


def _mono_mul(k1, k2):
    (c1, e1, j1), (c2, e2, j2) = k1, k2
    powers = dict(c1)
    for a, p in c2:
        powers[a] = powers.get(a, 0) + p
    core = tuple(sorted((a, p) for a, p in powers.items() if p != 0))
    e, sign = e1 + e2, 1
    if e >= 2:
        e, sign = e - 2, -1
    return (core, e, j1 + j2), sign


def _mono_expr(key, coeff) -> Expr:
    core, e, j = key
    value = GaussianRational(0, coeff) if e else GaussianRational(coeff)
    return mul(Const(value, j), *[power(_ATOMS[a], p) for a, p in core])


def _atom(e: Expr) -> Expansion:
    _ATOMS.setdefault(e.key, e)
    return Expansion({(((e.key, 1),), 0, 0): 1})


def _gr(value: GaussianRational, j: int = 0) -> Expansion:
    return Expansion({((), 0, j): value.re, ((), 1, j): value.im})


def _invert(ex: Expansion) -> Expansion | None:
    one = ex.single()
    if one is None:
        return None
    (core, e, j), c = one
    # 1 / (c i) = -i / c
    coeff = -1 / c if e else 1 / c
    return Expansion({(tuple((a, -p) for a, p in core), e, -j): coeff})


def expand(e) -> Expansion:
    """Distribute products over sums and split off rational, i and 2 pi i factors."""
    e = _lift(e)
    if isinstance(e, Const):
        return _gr(e.value, e.twist)
    if isinstance(e, Rat):
        # factor out the leading numerator coefficient so Rat(2z) ~ 2 Rat(z)
        lead = e.R.num.lead()
        monic = e.R * RationalFunction.const(lead.inverse())
        return _gr(lead) * _atom(Rat(monic))
    if isinstance(e, Sum):
        out = Expansion()
        for t in e.terms:
            out = out + expand(t)
        return out
    if isinstance(e, Prod):
        out = Expansion.one()
        for f in e.factors:
            out = out * expand(f)
        return out
    if isinstance(e, IntPow):
        base = expand(e.base)
        if e.k < 0:
            inv = _invert(base)
            if inv is None:
                return _atom(e)
            base, k = inv, -e.k
        else:
            k = e.k
        out = Expansion.one()
        for _ in range(k):
            out = out * base
        return out
    return _atom(e)


# ---------------------------------------------------------------------------
# tensors over Q


class TensorQQ:
    """Sum of c * (a (x) b) with rational c, kept in canonical form."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def from_terms(cls, items) -> "TensorQQ":
        """items: iterable of (c, a, b) with c rational and a, b expressions."""
        out = cls()
        for c, a, b in items:
            out = out + cls.pure(a, b).scale(c)
        return out

    @classmethod
    def pure(cls, a, b) -> "TensorQQ":
        terms: dict = {}
        for ka, ca in expand(a).terms.items():
            for kb, cb in expand(b).terms.items():
                terms[(ka, kb)] = terms.get((ka, kb), 0) + ca * cb
        return cls(terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, TensorQQ) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "TensorQQ") -> "TensorQQ":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return TensorQQ(out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TensorQQ":
        c = Fraction(c)
        return TensorQQ({k: v * c for k, v in self.terms.items()})

    def side_product(self, left, right) -> "TensorQQ":
        """Componentwise product (left (x) right) * self."""
        L, R = expand(left), expand(right)
        out = TensorQQ()
        for (ka, kb), c in self.terms.items():
            a = L * Expansion({ka: 1})
            b = R * Expansion({kb: 1})
            out = out + _pure_exp(a, b).scale(c)
        return out

    def pure_terms(self):
        """[(c, a, b)] with a, b canonical monomial expressions, in a fixed order."""
        return [(c, _mono_expr(ka, 1), _mono_expr(kb, 1))
                for (ka, kb), c in sorted(self.terms.items())]

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for c, a, b in self.pure_terms():
            parts.append(f"{c} * [{a.text()}] (x) [{b.text()}]")
        return " + ".join(parts)

    def __repr__(self):
        return f"TensorQQ({self.text()})"


def _pure_exp(a: Expansion, b: Expansion) -> TensorQQ:
    terms: dict = {}
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            terms[(ka, kb)] = terms.get((ka, kb), 0) + ca * cb
    return TensorQQ(terms)


def _mult_expansion(T: TensorQQ) -> Expansion:
    out = Expansion()
    for (ka, kb), c in T.terms.items():
        out = out + (Expansion({ka: c}) * Expansion({kb: 1}))
    return out


def mult_map(T: TensorQQ) -> Expr:
    """Image of T under a (x) b -> ab."""
    return _mult_expansion(T).to_expr()


def functionals(T: TensorQQ, env: dict, w=0.0) -> dict[str, np.ndarray]:
    """The four real bilinear functionals sum c * sigma(a) tau(b), sigma, tau in {Re, Im}."""
    parts = {"re_re": 0.0, "re_im": 0.0, "im_re": 0.0, "im_im": 0.0}
    for c, a, b in T.pure_terms():
        va, vb = evaluate(a, w, env), evaluate(b, w, env)
        c = float(c)
        parts["re_re"] = parts["re_re"] + c * va.real * vb.real
        parts["re_im"] = parts["re_im"] + c * va.real * vb.imag
        parts["im_re"] = parts["im_re"] + c * va.imag * vb.real
        parts["im_im"] = parts["im_im"] + c * va.imag * vb.imag
    return {k: np.asarray(v, dtype=float) * np.ones(np.shape(np.atleast_1d(w)))
            for k, v in parts.items()}


def pair_functionals(pairs) -> dict[str, float]:
    """Four real bilinear functionals of sum a (x) b for plain complex pairs (a, b)."""
    pairs = [(complex(a), complex(b)) for a, b in pairs]
    return {
        "re_re": sum(a.real * b.real for a, b in pairs),
        "re_im": sum(a.real * b.imag for a, b in pairs),
        "im_re": sum(a.imag * b.real for a, b in pairs),
        "im_im": sum(a.imag * b.imag for a, b in pairs),
    }


def numeric_big_period(x: complex, y: complex, z: complex) -> list[tuple[complex, complex]]:
    """Pairing formula with floating matrices and a generic inverse (independent oracle)."""
    M = np.array([[1, 0, 0], [x, 1, 0], [z, y, 1]], dtype=complex)
    D = np.diag([1, TWO_PI_I, TWO_PI_I ** 2])
    Minv_v0 = np.linalg.solve(M, np.array([1, 0, 0], dtype=complex))
    return [((M @ D[:, k])[2] / TWO_PI_I ** 2, Minv_v0[k] / TWO_PI_I ** k) for k in range(3)]


# ---------------------------------------------------------------------------
# Kahler differentials over Q


class KahlerForm:
    """sum_g coeff_g * d(g) over generators g (atoms and 2 pi i)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict | None = None):
        self.coeffs = {g: c for g, c in (coeffs or {}).items() if not c.is_zero()}

    def __eq__(self, other):
        return isinstance(other, KahlerForm) and self.coeffs == other.coeffs

    def __add__(self, other: "KahlerForm") -> "KahlerForm":
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out[g] + c if g in out else c
        return KahlerForm(out)

    def __neg__(self):
        return KahlerForm({g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def times(self, e) -> "KahlerForm":
        ex = e if isinstance(e, Expansion) else expand(e)
        return KahlerForm({g: ex * c for g, c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_form(self) -> Form:
        """Realize on the curve: d(2 pi i) = 0 and d(atom) is the exterior derivative."""
        out = Form(1)
        for g, c in self.coeffs.items():
            if g == TWO_PI_I_GEN:
                continue
            out = out + d(_ATOMS[g]).scale(c.to_expr())
        return out

    def pair(self, env: dict, tangent: dict, w=0.0) -> np.ndarray:
        """Evaluate on a tangent vector: tangent maps symbol names to d(symbol)."""
        out = 0j
        for g, c in self.coeffs.items():
            if g == TWO_PI_I_GEN:
                continue
            atom = _ATOMS[g]
            if not isinstance(atom, Var):
                raise TypeError("tangent pairing needs free-symbol generators")
            out = out + evaluate(c.to_expr(), w, env) * tangent[atom.name]
        return np.asarray(out)

    def text(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c.text()}) d[{_gen_text(g)}]" for g, c in sorted(self.coeffs.items()))

    def __repr__(self):
        return f"KahlerForm({self.text()})"


def _gen_text(g):
    return "2*pi*i" if g == TWO_PI_I_GEN else _ATOMS[g].text()


def kahler_d(e) -> KahlerForm:
    """Universal derivation over Q applied to an expression."""
    ex = e if isinstance(e, Expansion) else expand(e)
    out: dict = {}
    for (core, i_pow, j), c in ex.terms.items():
        for n, (a, p) in enumerate(core):
            rest = list(core)
            rest[n] = (a, p - 1)
            rest = tuple(x for x in rest if x[1] != 0)
            term = Expansion({(rest, i_pow, j): c * p})
            out[a] = out[a] + term if a in out else term
        if j:
            term = Expansion({(core, i_pow, j - 1): c * j})
            out[TWO_PI_I_GEN] = out[TWO_PI_I_GEN] + term if TWO_PI_I_GEN in out else term
    return KahlerForm(out)


def project_kahler(T: TensorQQ) -> KahlerForm:
    """a (x) b -> a db on the kernel of multiplication."""
    if not _mult_expansion(T).is_zero():
        raise NotInKernel("tensor does not multiply to zero")
    out = KahlerForm()
    for (ka, kb), c in T.terms.items():
        out = out + kahler_d(Expansion({kb: 1})).times(Expansion({ka: c}))
    return out


def project_R1(T: TensorQQ) -> Expr:
    """a (x) b -> -pi_1(a) pi_0(b)."""
    parts = []
    for c, a, b in T.pure_terms():
        parts.append(mul(Const(-c), pi_p(a, 1), pi_p(b, 0)))
    return expand(add(*parts)).to_expr()


# ---------------------------------------------------------------------------
# period data


def _v(name):
    return Var(name)


@dataclass(frozen=True)
class PeriodData:
    """Entries of the unipotent period matrix [[1,0,0],[x,1,0],[z,y,1]]."""

    x: Expr = field(default_factory=lambda: _v("x"))
    y: Expr = field(default_factory=lambda: _v("y"))
    z: Expr = field(default_factory=lambda: _v("z"))

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, _lift(getattr(self, name)))

    def M(self) -> list[list[Expr]]:
        one = Const(1)
        return [[one, ZERO, ZERO], [self.x, one, ZERO], [self.z, self.y, one]]

    def A(self) -> list[list[Expr]]:
        """Canonical matrix: column k of M scaled by (2 pi i)^k."""
        M = self.M()
        return [[mul(M[r][k], Const(1, k)) for k in range(3)] for r in range(3)]

    def M_inverse(self) -> list[list[Expr]]:
        """Exact inverse of the lower unitriangular M by forward substitution."""
        M = self.M()
        cols = []
        for k in range(3):
            u = [ZERO, ZERO, ZERO]
            u[k] = Const(1)
            for r in range(k + 1, 3):
                u[r] = neg(add(*[mul(M[r][s], u[s]) for s in range(k, r)]))
            cols.append(u)
        return [[cols[k][r] for k in range(3)] for r in range(3)]

    def numeric(self, env: dict, w=0.0) -> tuple[complex, complex, complex]:
        return tuple(complex(evaluate(e, w, env)[0]) for e in (self.x, self.y, self.z))

    def numeric_A(self, env: dict) -> np.ndarray:
        x, y, z = self.numeric(env)
        t = TWO_PI_I
        return np.array([[1, 0, 0], [x, t, 0], [z, t * y, t * t]], dtype=complex)


def _f(k: int, u: Expr) -> Expr:
    """Dual frame functional: the k-th coordinate divided by (2 pi i)^k."""
    return mul(Const(1, -k), u)


def big_period(P: PeriodData, check: bool = True) -> TensorQQ:
    """sum_k <f_2, M v_k> (x) <f_k, M^-1 v_0> with v_k = (2 pi i)^k e_k."""
    M, Minv = P.M(), P.M_inverse()
    items = []
    for k in range(3):
        Mv = mul(M[2][k], Const(1, k))
        items.append((1, _f(2, Mv), _f(k, Minv[k][0])))
    T = TensorQQ.from_terms(items)
    if check and T != big_period_closed_form(P):
        raise LiftMismatch("pairing formula and closed form disagree after canonicalization")
    return T


def big_period_closed_form(P: PeriodData) -> TensorQQ:
    x, y, z = P.x, P.y, P.z
    s2 = Const(1, -2)
    s1 = Const(1, -1)
    return TensorQQ.from_terms([
        (1, mul(z, s2), 1),
        (-1, 1, mul(z, s2)),
        (1, 1, mul(x, y, s2)),
        (-1, mul(y, s1), mul(x, s1)),
    ])


def kahler_closed_form(P: PeriodData) -> KahlerForm:
    """-d(z/(2 pi i)^2) + (x/2 pi i) d(y/2 pi i)."""
    s1 = Const(1, -1)
    return -kahler_d(mul(P.z, Const(1, -2))) + kahler_d(mul(P.y, s1)).times(mul(P.x, s1))


def r1_closed_form(P: PeriodData) -> Expr:
    """(pi_1(x) pi_0(y) - pi_1(z)) / (2 pi i)^2, i.e. -log rho / 2 pi i.

    Same overall sign as the Kahler image, which is -omega / 2 pi i.
    """
    inner = sub(mul(pi_p(P.x, 1), pi_p(P.y, 0)), pi_p(P.z, 1))
    return expand(mul(Const(1, -2), inner)).to_expr()


# ---------------------------------------------------------------------------
# extension class and its lift


@dataclass
class ExtensionClass:
    e: dict            # coordinates on v_1, v_2
    e_tensor: TensorQQ
    e_exp: dict        # left key -> (left expr, exponent expr): left (x) exp(exponent)

    def e_exp_numeric(self, env: dict, w=0.0) -> list[tuple[complex, complex]]:
        return [(complex(evaluate(a, w, env)[0]), complex(np.exp(evaluate(b, w, env)[0])))
                for a, b in self.e_exp.values()]


def extension_class(P: PeriodData) -> ExtensionClass:
    x, y, z = P.x, P.y, P.z
    zxy = sub(z, mul(x, y))
    e = {1: neg(mul(x, Const(1, -1))), 2: neg(mul(zxy, Const(1, -2)))}
    e_tensor = TensorQQ.from_terms([(-1, y, x), (-1, Const(1, 1), mul(zxy, Const(1, -1)))])
    # c a (x) b becomes a (x) exp(c b); terms sharing a left factor multiply
    e_exp: dict = {}
    for c, a, b in e_tensor.pure_terms():
        prev = e_exp.get(a.key, (a, ZERO))[1]
        e_exp[a.key] = (a, add(prev, mul(Const(c), b)))
    return ExtensionClass(e, e_tensor, e_exp)


def extension_exp_closed_form(P: PeriodData) -> list[tuple[Expr, Expr]]:
    """y (x) e^{-x} + 2 pi i (x) e^{-(z - xy)/2 pi i}, as (left, exponent) pairs."""
    zxy = sub(P.z, mul(P.x, P.y))
    return [(P.y, neg(P.x)), (Const(1, 1), neg(mul(zxy, Const(1, -1))))]


def unique_lift(P: PeriodData) -> TensorQQ:
    """e~ + (z / 2 pi i) (x) 2 pi i, the only correction by C (x) 2 pi i landing in ker m."""
    lift = extension_class(P).e_tensor + TensorQQ.pure(mul(P.z, Const(1, -1)), Const(1, 1))
    if not _mult_expansion(lift).is_zero():
        raise LiftMismatch("lift does not multiply to zero")
    if lift != big_period(P).side_product(Const(1, 1), Const(1, 1)):
        raise LiftMismatch("lift differs from (2 pi i (x) 2 pi i) * P")
    return lift


# ---------------------------------------------------------------------------
# real structure


def half_log_B(P: PeriodData, env: dict) -> dict:
    """Closed form for 1/2 log B with B = A conj(A)^-1 diag(1, -1, 1), against the series.

    B is unipotent, so log B = N - N^2/2 with N = B - I.  The displayed matrix
    carries a unit diagonal; its strictly lower part is what equals 1/2 log B.
    """
    x, y, z = P.numeric(env)
    A = P.numeric_A(env)
    B = A @ np.linalg.inv(A.conj()) @ np.diag([1.0, -1.0, 1.0])
    N = B - np.eye(3)
    series = 0.5 * (N - N @ N / 2)
    p0 = lambda v: v.real  # noqa: E731
    p1 = lambda v: 1j * v.imag  # noqa: E731
    closed = np.array([[1, 0, 0], [p0(x), 1, 0], [p1(z) - p1(x) * p0(y), p0(y), 1]],
                      dtype=complex)
    residual = float(np.max(np.abs((closed - np.eye(3)) - series)))
    return {"B": B, "series": series, "closed": closed, "residual": residual,
            "unipotent_residual": float(np.max(np.abs(N @ N @ N)))}


# ---------------------------------------------------------------------------
# invariance and cross-module checks


def q_invariance_check(P: PeriodData | None = None, trials: int = 100, seed: int = 0,
                       tol: float = 1e-9, denominators: int = 4) -> dict:
    """Apply random lattice elements (2 pi i a, 2 pi i b, (2 pi i)^2 c) with a, b, c rational."""
    P = P or PeriodData()
    T = big_period(P)
    names = [v.name for v in (P.x, P.y, P.z)]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        x, y, z = rng.normal(size=3) * 2 + 1j * rng.normal(size=3) * 2
        a, b, c = (Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, denominators + 1)))
                   for _ in range(3))
        before = dict(zip(names, (x, y, z)))
        m1 = TWO_PI_I * float(a)
        after = dict(zip(names, (x + m1, y + TWO_PI_I * float(b),
                                 z + m1 * y + TWO_PI_I ** 2 * float(c))))
        f0, f1 = functionals(T, before), functionals(T, after)
        scale = max(1.0, max(float(np.max(np.abs(v))) for v in f0.values()))
        for k in f0:
            worst = max(worst, float(np.max(np.abs(f1[k] - f0[k]))) / scale)
    return {"trials": trials, "max_residual": worst, "tolerance": tol, "pass": worst < tol}


def heisenberg_cross_check(points: int = 50, seed: int = 0, tol: float = 1e-10) -> dict:
    """Projections of the big period against the Heisenberg form and metric.

    project_R1(P) = -log rho / 2 pi i and project_kahler(P) = -omega / 2 pi i.
    """
    from .heisenberg_model import HeisPoint, log_rho_numeric, omega_numeric

    P = PeriodData()
    T = big_period(P)
    r1 = project_R1(T)
    K = project_kahler(T)
    rng = np.random.default_rng(seed)
    rho_res = om_res = 0.0
    for _ in range(points):
        x, y, z, dx, dy, dz = rng.normal(size=6) + 1j * rng.normal(size=6)
        env = {"x": x, "y": y, "z": z}
        H, dH = HeisPoint(x, y, z), HeisPoint(dx, dy, dz)
        r = complex(evaluate(r1, 0.0, env)[0])
        rho_res = max(rho_res, abs(r + log_rho_numeric(H) / TWO_PI_I))
        k = complex(np.ravel(K.pair(env, {"x": dx, "y": dy, "z": dz}))[0])
        om_res = max(om_res, abs(k + omega_numeric(H, dH) / TWO_PI_I))
    return {
        "rho": {"residual": rho_res, "tolerance": tol, "pass": rho_res < tol},
        "omega": {"residual": om_res, "tolerance": tol, "pass": om_res < tol},
    }


def tame_cross_check(T, h: Expr = ZERO, count: int = 20, seed: int | None = None,
                     tol: float = 1e-10) -> dict:
    """Substitute (log_i f, log_i g, h) on each sector and compare with the tame symbol.

    The Kahler image becomes a form on the curve equal to -1/(2 pi i) times the
    connection applied to the section with coefficient h / 2 pi i; at h = 0 it is
    omega_i / (2 pi i)^2.
    """
    from .cech_engine import nerve_of
    from .cover_nerve import sample_points
    from .heisenberg_model import section

    cover = T.cover
    nerve = nerve_of(cover)
    worst = {"connection": 0.0, "omega_slot": 0.0}
    for (i,) in [s for s in nerve if len(s) == 1]:
        w = sample_points(cover, nerve[(i,)], count, seed)
        S = section(T, i, h)
        K = project_kahler(big_period(PeriodData(S.x, S.y, S.z))).to_form()
        conn = T.connection(i, mul(Const(1, -1), h)).scale(Const(-1, -1))
        worst["connection"] = max(worst["connection"], _fmax(K - conn, w))
        S0 = section(T, i)
        K0 = project_kahler(big_period(PeriodData(S0.x, S0.y, S0.z))).to_form()
        worst["omega_slot"] = max(worst["omega_slot"],
                                  _fmax(K0 - T.omega(i).scale(Const(1, -2)), w))
    return {k: {"residual": v, "tolerance": tol, "pass": v < tol} for k, v in worst.items()}


def _fmax(F: Form, w) -> float:
    from .form_calculus import eval_form
    vals = eval_form(F, w)
    return max((float(np.max(np.abs(a))) if a.size else 0.0) for a in vals.values())
