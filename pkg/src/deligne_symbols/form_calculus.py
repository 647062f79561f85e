"""Expressions and differential forms on a punctured plane domain.

``Expr`` trees are built from Gaussian-rational constants (optionally times
powers of 2*pi*i), rational functions, log branches, complex conjugation,
sums, products and integer powers.  Differentiation is structural, so d, the
type pieces del and delbar, d^c and the real/imaginary projections pi_p are
all exact operations on trees.  Numeric evaluation happens only at points.

Two auxiliary leaf kinds are provided: ``IntField`` wraps a locally constant
integer field (Cech integer data pushed into function slots) and ``Var`` is a
free symbol used for generic period computations.
"""
from __future__ import annotations

from fractions import Fraction
from functools import cached_property
import re

import numpy as np

from .errors import DegreeOverflow, ParseError, ZeroFunction
from .exact_algebra import GaussianRational, RationalFunction, parse_rational

__all__ = [
    "Expr", "Const", "Rat", "LogBranch", "LogAbs", "Conj", "Sum", "Prod", "IntPow", "IntField", "Var",
    "const", "rat", "add", "mul", "neg", "sub", "power", "conj", "log_branch", "log_abs",
    "del_", "delbar", "evaluate", "Form", "zero_form", "function_form", "d", "dc",
    "partial", "partialbar", "wedge", "pi_p", "conj_form", "eval_form", "ZERO", "ONE",
    "TWO_PI_I", "two_pi_i", "parse_expr", "form_residual", "DEFAULT_TOL", "SECOND_ORDER_TOL",
]

TWO_PI_I = 2j * np.pi
DEFAULT_TOL = 1e-10
SECOND_ORDER_TOL = 1e-9

GR = GaussianRational


class Expr:
    """Base class; subclasses are immutable and compared by canonical key."""

    @cached_property
    def key(self) -> str:
        return self._key()

    def _key(self) -> str:
        return self.text()

    def __eq__(self, other):
        return isinstance(other, Expr) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Expr({self.text()})"

    def __str__(self):
        return self.text()

    # arithmetic sugar
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        if isinstance(other, Form):
            return NotImplemented
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __neg__(self):
        return neg(self)

    def __truediv__(self, other):
        return mul(self, power(_lift(other), -1))

    def __pow__(self, k):
        return power(self, int(k))

    def is_zero(self) -> bool:
        return False


def _lift(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, RationalFunction):
        return rat(x)
    if isinstance(x, str):
        return rat(parse_rational(x))
    return const(x)


class Const(Expr):
    """value * (2*pi*i)**twist with value in Q(i); twist may be negative."""

    def __init__(self, value, twist: int = 0):
        self.value = GR.coerce(value)
        self.twist = int(twist)

    def text(self):
        if self.twist == 0:
            return f"const({self.value.text()})"
        return f"const({self.value.text()},{self.twist})"

    def is_zero(self):
        return self.value.is_zero()

    def numeric(self) -> complex:
        return complex(self.value) * TWO_PI_I ** self.twist


class Rat(Expr):
    def __init__(self, R: RationalFunction):
        self.R = RationalFunction.coerce(R)

    def text(self):
        return f"rat({self.R.text()})"

    def is_zero(self):
        return self.R.is_zero()


class LogBranch(Expr):
    """log_k f for a registered branch assignment."""

    def __init__(self, branch, sector: int):
        self.branch = branch
        self.sector = int(sector)

    def text(self):
        return f"log_{self.sector}({self.branch.f.text()})"

    def _key(self):
        return f"{self.text()}@{hash(self.branch.cover)}"


class LogAbs(Expr):
    """log|R| for a rational function R; real and single-valued away from zeros and poles."""

    def __init__(self, R: RationalFunction):
        self.R = RationalFunction.coerce(R)

    def text(self):
        return f"logabs({self.R.text()})"


class Conj(Expr):
    def __init__(self, arg: Expr):
        self.arg = arg

    def text(self):
        return f"conj({self.arg.text()})"

    def _key(self):
        return f"conj({self.arg.key})"


class Sum(Expr):
    def __init__(self, terms):
        self.terms = tuple(terms)

    def text(self):
        return "(" + " + ".join(t.text() for t in self.terms) + ")"

    def _key(self):
        return "(" + " + ".join(t.key for t in self.terms) + ")"


class Prod(Expr):
    def __init__(self, factors):
        self.factors = tuple(factors)

    def text(self):
        return "(" + " * ".join(f.text() for f in self.factors) + ")"

    def _key(self):
        return "(" + " * ".join(f.key for f in self.factors) + ")"


class IntPow(Expr):
    def __init__(self, base: Expr, k: int):
        self.base = base
        self.k = int(k)

    def text(self):
        return f"{self.base.text()}^({self.k})"

    def _key(self):
        return f"{self.base.key}^({self.k})"


class IntField(Expr):
    """Locally constant integer field; ``field.at(w)`` returns exact integers."""

    def __init__(self, field):
        self.field = field

    def text(self):
        return f"int[{self.field.text()}]"

    def _key(self):
        return f"int[{self.field.key}]"


class Var(Expr):
    def __init__(self, name: str):
        self.name = name

    def text(self):
        return f"var({self.name})"


ZERO = Const(0)
ONE = Const(1)


# ---------------------------------------------------------------------------
# smart constructors


def const(value, twist: int = 0) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, float):
        value = Fraction(value)
    return Const(value, twist)


def two_pi_i(k: int = 1) -> Expr:
    return Const(1, k)


def rat(R) -> Expr:
    R = RationalFunction.coerce(R)
    if R.is_constant():
        return Const(R.constant_value())
    return Rat(R)


def log_branch(branch, sector: int) -> Expr:
    return LogBranch(branch, sector)


def log_abs(R) -> Expr:
    R = RationalFunction.coerce(R)
    if R.is_zero():
        raise ZeroFunction("log|0| is undefined")
    if R.is_constant():
        c = abs(complex(R.constant_value()))
        if c == 1:
            return ZERO
    return LogAbs(R)


def _split(term: Expr):
    """term = (R * (2*pi*i)**j) * core, with R rational and core scalar-free."""
    if isinstance(term, Const):
        return RationalFunction.const(term.value), term.twist, ()
    if isinstance(term, Rat):
        return term.R, 0, ()
    if isinstance(term, Prod):
        R, j, core = RationalFunction.const(1), 0, []
        for f in term.factors:
            if isinstance(f, Const):
                R, j = R * RationalFunction.const(f.value), j + f.twist
            elif isinstance(f, Rat):
                R = R * f.R
            else:
                core.append(f)
        return R, j, tuple(core)
    return RationalFunction.const(1), 0, (term,)


def _assemble(R: RationalFunction, j: int, core: tuple) -> Expr:
    if R.is_zero():
        return ZERO
    out = []
    if R.is_constant():
        c = R.constant_value()
        if c != 1 or j != 0 or not core:
            out.append(Const(c, j))
    else:
        if j != 0:
            out.append(Const(1, j))
        out.append(Rat(R))
    out.extend(core)
    if len(out) == 1:
        return out[0]
    return Prod(out)


def mul(*factors) -> Expr:
    flat = []
    for f in factors:
        f = _lift(f)
        if isinstance(f, Prod):
            flat.extend(f.factors)
        else:
            flat.append(f)
    R, j, core = RationalFunction.const(1), 0, []
    for f in flat:
        if isinstance(f, Const):
            if f.is_zero():
                return ZERO
            R, j = R * RationalFunction.const(f.value), j + f.twist
        elif isinstance(f, Rat):
            R = R * f.R
        else:
            core.append(f)
    # merge repeated bases into integer powers
    powers: dict[str, list] = {}
    order = []
    for f in core:
        base, k = (f.base, f.k) if isinstance(f, IntPow) else (f, 1)
        if base.key not in powers:
            powers[base.key] = [base, 0]
            order.append(base.key)
        powers[base.key][1] += k
    merged = []
    for key in order:
        base, k = powers[key]
        if k == 0:
            continue
        merged.append(base if k == 1 else IntPow(base, k))
    merged.sort(key=lambda e: e.key)
    if len(merged) == 1 and isinstance(merged[0], Sum) and not (R == 1 and j == 0):
        # scalars distribute over sums so linear combinations stay flat
        scalar = _assemble(R, j, ())
        return add(*[mul(scalar, t) for t in merged[0].terms])
    return _assemble(R, j, tuple(merged))


def add(*terms) -> Expr:
    flat = []
    for t in terms:
        t = _lift(t)
        if isinstance(t, Sum):
            flat.extend(t.terms)
        else:
            flat.append(t)
    groups: dict = {}
    order = []
    for t in flat:
        if t.is_zero():
            continue
        R, j, core = _split(t)
        key = (j, tuple(c.key for c in core))
        if key not in groups:
            groups[key] = [R, j, core]
            order.append(key)
        else:
            groups[key][0] = groups[key][0] + R
    out = [_assemble(*groups[k]) for k in order]
    out = [t for t in out if not t.is_zero()]
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    out.sort(key=lambda e: e.key)
    return Sum(out)


def neg(e: Expr) -> Expr:
    return mul(Const(-1), e)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(_lift(b)))


def power(e: Expr, k: int) -> Expr:
    e = _lift(e)
    if k == 0:
        return ONE
    if k == 1:
        return e
    if isinstance(e, Const):
        if e.is_zero() and k < 0:
            raise ZeroDivisionError("negative power of zero")
        return Const(e.value ** k, e.twist * k)
    if isinstance(e, Rat):
        return rat(e.R ** k)
    if isinstance(e, IntPow):
        return power(e.base, e.k * k)
    if isinstance(e, Prod):
        return mul(*[power(f, k) for f in e.factors])
    return IntPow(e, k)


def conj(e: Expr) -> Expr:
    e = _lift(e)
    if isinstance(e, Const):
        return Const(e.value.conjugate() * (-1) ** (e.twist % 2), e.twist)
    if isinstance(e, Conj):
        return e.arg
    if isinstance(e, Sum):
        return add(*[conj(t) for t in e.terms])
    if isinstance(e, Prod):
        return mul(*[conj(f) for f in e.factors])
    if isinstance(e, IntPow):
        return power(conj(e.base), e.k)
    if isinstance(e, (IntField, LogAbs)):
        return e
    return Conj(e)


# ---------------------------------------------------------------------------
# structural derivatives


def del_(e: Expr) -> Expr:
    """Coefficient of dz in d(e)."""
    return _deriv(e, holo=True)


def delbar(e: Expr) -> Expr:
    """Coefficient of dzbar in d(e)."""
    return _deriv(e, holo=False)


def _deriv(e: Expr, holo: bool) -> Expr:
    if isinstance(e, (Const, IntField)):
        return ZERO
    if isinstance(e, Rat):
        return rat(e.R.derivative()) if holo else ZERO
    if isinstance(e, LogBranch):
        return rat(e.branch.f.log_derivative()) if holo else ZERO
    if isinstance(e, LogAbs):
        half = Const(Fraction(1, 2))
        dl = rat(e.R.log_derivative())
        return mul(half, dl if holo else conj(dl))
    if isinstance(e, Conj):
        return conj(_deriv(e.arg, not holo))
    if isinstance(e, Sum):
        return add(*[_deriv(t, holo) for t in e.terms])
    if isinstance(e, Prod):
        parts = []
        fs = e.factors
        for k, f in enumerate(fs):
            df = _deriv(f, holo)
            if df.is_zero():
                continue
            parts.append(mul(*fs[:k], df, *fs[k + 1:]))
        return add(*parts)
    if isinstance(e, IntPow):
        db = _deriv(e.base, holo)
        if db.is_zero():
            return ZERO
        return mul(Const(e.k), power(e.base, e.k - 1), db)
    if isinstance(e, Var):
        raise TypeError("free symbols have no derivative on the domain")
    raise TypeError(f"unknown expression node {type(e).__name__}")


# ---------------------------------------------------------------------------
# numeric evaluation


def evaluate(e: Expr, w, env: dict | None = None) -> np.ndarray:
    """Evaluate e at the points w (array-like); free symbols read from env."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    memo: dict = {}
    return _eval(_lift(e), w, env or {}, memo)


def _eval(e: Expr, w, env, memo):
    hit = memo.get(id(e))
    if hit is not None:
        return hit
    if isinstance(e, Const):
        out = np.full(w.shape, e.numeric(), dtype=complex)
    elif isinstance(e, Rat):
        out = np.asarray(e.R(w), dtype=complex) * np.ones(w.shape)
    elif isinstance(e, LogBranch):
        out = e.branch.log(e.sector, w)
    elif isinstance(e, LogAbs):
        out = np.log(np.abs(np.asarray(e.R(w), dtype=complex))) + 0j
    elif isinstance(e, Conj):
        out = np.conj(_eval(e.arg, w, env, memo))
    elif isinstance(e, Sum):
        out = np.zeros(w.shape, dtype=complex)
        for t in e.terms:
            out = out + _eval(t, w, env, memo)
    elif isinstance(e, Prod):
        out = np.ones(w.shape, dtype=complex)
        for f in e.factors:
            out = out * _eval(f, w, env, memo)
    elif isinstance(e, IntPow):
        out = _eval(e.base, w, env, memo) ** e.k
    elif isinstance(e, IntField):
        out = e.field.at(w).astype(complex)
    elif isinstance(e, Var):
        if e.name not in env:
            raise KeyError(f"no value bound for symbol {e.name}")
        out = np.asarray(env[e.name], dtype=complex) * np.ones(w.shape)
    else:
        raise TypeError(f"unknown expression node {type(e).__name__}")
    memo[id(e)] = out
    return out


# ---------------------------------------------------------------------------
# forms

_MONOMIALS = {0: ("1",), 1: ("dz", "dzb"), 2: ("dzdzb",)}


class Form:
    """A form of total degree 0, 1 or 2 with Expr coefficients.

    Degree 1 forms are ``a dz + b dzbar`` and degree 2 forms ``c dz^dzbar``.
    """

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs: dict | None = None):
        if degree not in _MONOMIALS:
            raise DegreeOverflow(f"forms of degree {degree} are not supported")
        clean = {}
        for mono, c in (coeffs or {}).items():
            if mono not in _MONOMIALS[degree]:
                raise ValueError(f"monomial {mono} does not have degree {degree}")
            c = _lift(c)
            if not c.is_zero():
                clean[mono] = c
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Form is immutable")

    def coeff(self, mono: str) -> Expr:
        return self.coeffs.get(mono, ZERO)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def bidegree(self) -> tuple[int, int] | None:
        """(p, q) when the form is of pure type, else None."""
        if self.degree == 0:
            return (0, 0)
        if self.degree == 2:
            return (1, 1)
        keys = set(self.coeffs)
        if keys == {"dz"}:
            return (1, 0)
        if keys == {"dzb"}:
            return (0, 1)
        return (1, 0) if not keys else None

    def __add__(self, other: "Form") -> "Form":
        if isinstance(other, (int, float)) and other == 0:
            return self
        if not isinstance(other, Form):
            other = function_form(_lift(other))
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = add(out[m], c) if m in out else c
        return Form(self.degree, out)

    __radd__ = __add__

    def __neg__(self):
        return Form(self.degree, {m: neg(c) for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, e) -> "Form":
        e = _lift(e)
        return Form(self.degree, {m: mul(e, c) for m, c in self.coeffs.items()})

    def __mul__(self, e):
        if isinstance(e, Form):
            return wedge(self, e)
        return self.scale(e)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.degree, tuple(sorted((m, c.key) for m, c in self.coeffs.items()))))

    def text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for m in _MONOMIALS[self.degree]:
            if m in self.coeffs:
                c = self.coeffs[m].text()
                parts.append(c if m == "1" else f"{c} {m}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Form[{self.degree}]({self.text()})"


def zero_form(degree: int) -> Form:
    return Form(degree)


def function_form(e) -> Form:
    return Form(0, {"1": _lift(e)})


def _as_form(F) -> Form:
    return F if isinstance(F, Form) else function_form(F)


def d(F) -> Form:
    F = _as_form(F)
    if F.degree == 0:
        f = F.coeff("1")
        return Form(1, {"dz": del_(f), "dzb": delbar(f)})
    if F.degree == 1:
        a, b = F.coeff("dz"), F.coeff("dzb")
        return Form(2, {"dzdzb": sub(del_(b), delbar(a))})
    raise DegreeOverflow("d of a top-degree form")


def partial(F) -> Form:
    F = _as_form(F)
    if F.degree == 0:
        return Form(1, {"dz": del_(F.coeff("1"))})
    if F.degree == 1:
        return Form(2, {"dzdzb": del_(F.coeff("dzb"))})
    raise DegreeOverflow("del of a top-degree form")


def partialbar(F) -> Form:
    F = _as_form(F)
    if F.degree == 0:
        return Form(1, {"dzb": delbar(F.coeff("1"))})
    if F.degree == 1:
        return Form(2, {"dzdzb": neg(delbar(F.coeff("dz")))})
    raise DegreeOverflow("delbar of a top-degree form")


def dc(F) -> Form:
    """d^c = del - delbar (no normalizing constant)."""
    return partial(F) - partialbar(F)


def wedge(F, G) -> Form:
    F, G = _as_form(F), _as_form(G)
    deg = F.degree + G.degree
    if deg > 2:
        raise DegreeOverflow("wedge product exceeds top degree")
    if F.degree == 0:
        return G.scale(F.coeff("1"))
    if G.degree == 0:
        return F.scale(G.coeff("1"))
    c = sub(mul(F.coeff("dz"), G.coeff("dzb")), mul(F.coeff("dzb"), G.coeff("dz")))
    return Form(2, {"dzdzb": c})


def conj_form(F) -> Form:
    F = _as_form(F)
    if F.degree == 0:
        return function_form(conj(F.coeff("1")))
    if F.degree == 1:
        return Form(1, {"dz": conj(F.coeff("dzb")), "dzb": conj(F.coeff("dz"))})
    return Form(2, {"dzdzb": neg(conj(F.coeff("dzdzb")))})


def pi_p(F, parity: int):
    """1/2 (F + (-1)^parity conj F); Exprs in, Exprs out."""
    if isinstance(F, Form):
        half = Const(Fraction(1, 2))
        cf = conj_form(F)
        return (F + (cf if parity % 2 == 0 else -cf)).scale(half)
    e = _lift(F)
    ce = conj(e)
    return mul(Const(Fraction(1, 2)), add(e, ce if parity % 2 == 0 else neg(ce)))


def eval_form(F, w, env: dict | None = None) -> dict[str, np.ndarray]:
    """Numeric coefficients of F at the points w, one array per monomial."""
    F = _as_form(F)
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    memo: dict = {}
    out = {}
    for m in _MONOMIALS[F.degree]:
        c = F.coeffs.get(m)
        out[m] = np.zeros(w.shape, dtype=complex) if c is None else _eval(c, w, env or {}, memo)
    return out


def form_residual(F, w, env: dict | None = None) -> float:
    vals = eval_form(F, w, env)
    return max((float(np.max(np.abs(v))) if v.size else 0.0) for v in vals.values())


# ---------------------------------------------------------------------------
# parsing printed expressions back (debugging aid)

def parse_expr(text: str, cover=None) -> Expr:
    """Parse the canonical text of an Expr; log branches are rebuilt on ``cover``."""
    from .cover_nerve import branch_for

    pos = 0

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def expect(s):
        nonlocal pos
        skip()
        if not text.startswith(s, pos):
            raise ParseError(f"expected {s!r} at {pos} in {text!r}")
        pos += len(s)

    def balanced_arg() -> str:
        nonlocal pos
        depth, start = 0, pos
        while pos < len(text):
            ch = text[pos]
            if ch == "(":
                depth += 1
            elif ch == ")":
                if depth == 0:
                    return text[start:pos]
                depth -= 1
            elif ch == "," and depth == 0:
                return text[start:pos]
            pos += 1
        raise ParseError(f"unbalanced parentheses in {text!r}")

    def node() -> Expr:
        nonlocal pos
        skip()
        m = re.compile(r"const|rat|logabs|log_(\d+)|conj|var|\(").match(text, pos)
        if not m:
            raise ParseError(f"unexpected input at {pos} in {text!r}")
        tok = m.group(0)
        pos = m.end()
        if tok == "(":
            items = [node()]
            skip()
            op = text[pos] if pos < len(text) else ""
            while op in "+*" and op:
                pos += 1
                items.append(node())
                skip()
                op = text[pos] if pos < len(text) else ""
            expect(")")
            e = add(*items) if "+" in text[m.start():pos] and len(items) > 1 and _is_sum(text, m.start()) else mul(*items)
            return _maybe_pow(e)
        expect("(")
        if tok == "const":
            val = parse_rational(balanced_arg()).constant_value()
            twist = 0
            skip()
            if text.startswith(",", pos):
                pos += 1
                twist = int(balanced_arg())
            expect(")")
            return _maybe_pow(Const(val, twist))
        if tok == "rat":
            R = parse_rational(balanced_arg())
            expect(")")
            return _maybe_pow(rat(R))
        if tok == "logabs":
            R = parse_rational(balanced_arg())
            expect(")")
            return _maybe_pow(log_abs(R))
        if tok == "var":
            name = balanced_arg().strip()
            expect(")")
            return _maybe_pow(Var(name))
        if tok == "conj":
            inner = node()
            expect(")")
            return _maybe_pow(conj(inner))
        if cover is None:
            raise ParseError("log branches need a cover to be rebuilt")
        f = parse_rational(balanced_arg())
        expect(")")
        return _maybe_pow(LogBranch(branch_for(f, cover), int(m.group(1))))

    def _maybe_pow(e: Expr) -> Expr:
        nonlocal pos
        skip()
        if text.startswith("^(", pos):
            pos += 2
            k = int(balanced_arg())
            expect(")")
            return power(e, k)
        return e

    out = node()
    skip()
    if pos != len(text):
        raise ParseError(f"trailing input in {text!r}")
    return out


def _is_sum(text: str, start: int) -> bool:
    depth = 0
    for ch in text[start:]:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return False
        elif depth == 1 and ch == "+":
            return True
        elif depth == 1 and ch == "*":
            return False
    return False
