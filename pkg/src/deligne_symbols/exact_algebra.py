"""Exact Gaussian-rational arithmetic and one-variable rational functions.

Everything that feeds an equality assertion is computed with
:class:`fractions.Fraction`; floating point is used only for evaluation at
numeric points.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
import numbers
import re

import numpy as np

from .errors import (
    DegreeCapExceeded,
    IndeterminateSymbol,
    ParseError,
    PoleAtPoint,
    ZeroFunction,
)

__all__ = [
    "GaussianRational",
    "TwistedInteger",
    "Poly",
    "RationalFunction",
    "parse_rational",
    "rf_eval",
    "rf_derivative",
    "rf_valuation",
    "tame_symbol_value",
    "DEGREE_CAP",
    "POLE_TOL",
]

DEGREE_CAP = 32
POLE_TOL = 1e-12
TWO_PI_I = 2j * np.pi


class GaussianRational:
    """An element re + im*i of Q(i), stored in lowest terms."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            re, im = re.re, re.im + Fraction(im)
        if isinstance(re, float) or isinstance(im, float):
            raise TypeError("GaussianRational needs exact components")
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, numbers.Rational):
            return cls(x)
        if isinstance(x, complex) and x.real.is_integer() and x.imag.is_integer():
            return cls(int(x.real), int(x.imag))
        raise TypeError(f"cannot coerce {x!r} to a Gaussian rational")

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, numbers.Integral):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        out = GaussianRational(1)
        for _ in range(abs(int(k))):
            out = out * base
        return out

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def text(self) -> str:
        """Text in the rational-function grammar; parenthesized unless atomic."""
        def frac(q: Fraction) -> str:
            return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"

        if self.im == 0:
            s = frac(self.re)
            return s if (self.re.denominator == 1 and self.re >= 0) else f"({s})"
        im_abs = abs(self.im)
        im_part = "i" if im_abs == 1 else f"{frac(im_abs)}*i"
        if self.re == 0:
            return im_part if self.im > 0 else f"(-{im_part})"
        sign = "+" if self.im > 0 else "-"
        return f"({frac(self.re)}{sign}{im_part})"

    __str__ = text


GR = GaussianRational
_ZERO = GR(0)
_ONE = GR(1)


@total_ordering
@dataclass(frozen=True)
class TwistedInteger:
    """The number n * (2*pi*i)**twist, an element of Z(twist)."""

    n: int
    twist: int = 0

    def __post_init__(self):
        if self.twist < 0:
            raise ValueError("twist must be non-negative")
        object.__setattr__(self, "n", int(self.n))

    def __add__(self, other: "TwistedInteger") -> "TwistedInteger":
        if not isinstance(other, TwistedInteger):
            return NotImplemented
        if other.twist != self.twist:
            raise ValueError("cannot add integers of different twist")
        return TwistedInteger(self.n + other.n, self.twist)

    def __neg__(self):
        return TwistedInteger(-self.n, self.twist)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TwistedInteger):
            return TwistedInteger(self.n * other.n, self.twist + other.twist)
        if isinstance(other, numbers.Integral):
            return TwistedInteger(self.n * int(other), self.twist)
        return NotImplemented

    __rmul__ = __mul__

    def __lt__(self, other):
        return (self.twist, self.n) < (other.twist, other.n)

    def value(self) -> complex:
        return self.n * TWO_PI_I ** self.twist


# ---------------------------------------------------------------------------
# dense polynomials over Q(i)


class Poly:
    """Dense polynomial in z with Gaussian-rational coefficients (low to high)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [GR.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def z(cls) -> "Poly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> GaussianRational:
        return self.coeffs[-1]

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (_ZERO,) * (n - len(self.coeffs))
        b = other.coeffs + (_ZERO,) * (n - len(other.coeffs))
        return Poly([x + y for x, y in zip(a, b)])

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [_ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    def scale(self, c) -> "Poly":
        c = GR.coerce(c)
        return Poly([c * x for x in self.coeffs])

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [_ZERO] * max(len(rem) - len(other.coeffs) + 1, 0)
        inv_lead = other.lead().inverse()
        dq = other.degree
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] * inv_lead
            if c.is_zero():
                continue
            q[k - dq] = c
            for j, b in enumerate(other.coeffs):
                rem[k - dq + j] = rem[k - dq + j] - c * b
        return Poly(q), Poly(rem)

    def monic(self) -> "Poly":
        return self.scale(self.lead().inverse()) if self.coeffs else self

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic() if not a.is_zero() else a

    def derivative(self) -> "Poly":
        return Poly([c * k for k, c in enumerate(self.coeffs)][1:])

    def eval_exact(self, p) -> GaussianRational:
        p = GR.coerce(p)
        acc = _ZERO
        for c in reversed(self.coeffs):
            acc = acc * p + c
        return acc

    def numeric_coeffs(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def conjugate(self) -> "Poly":
        return Poly([c.conjugate() for c in self.coeffs])

    def text(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if not mono:
                parts.append(c.text())
            elif c == _ONE:
                parts.append(mono)
            elif c == -_ONE:
                parts.append(f"(-1)*{mono}")
            else:
                parts.append(f"{c.text()}*{mono}")
        return "+".join(parts)

    def __repr__(self):
        return f"Poly({self.text()})"


def _horner(coeffs: np.ndarray, w):
    w = np.asarray(w, dtype=complex)
    acc = np.zeros_like(w)
    for c in coeffs[::-1]:
        acc = acc * w + c
    return acc


class RationalFunction:
    """Reduced quotient num/den of polynomials over Q(i) with monic denominator."""

    __slots__ = ("num", "den", "_ncoef", "_dcoef", "_logd")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Poly) else Poly.const(num)
        den = Poly.const(1) if den is None else (den if isinstance(den, Poly) else Poly.const(den))
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = Poly(), Poly.const(1)
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num.divmod(g)[0], den.divmod(g)[0]
            lead_inv = den.lead().inverse()
            num, den = num.scale(lead_inv), den.scale(lead_inv)
        if num.degree > DEGREE_CAP or den.degree > DEGREE_CAP:
            raise DegreeCapExceeded(f"degree exceeds cap {DEGREE_CAP}")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_ncoef", num.numeric_coeffs())
        object.__setattr__(self, "_dcoef", den.numeric_coeffs())
        object.__setattr__(self, "_logd", None)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def z(cls) -> "RationalFunction":
        return cls(Poly.z())

    @classmethod
    def const(cls, c) -> "RationalFunction":
        return cls(Poly.const(c))

    @staticmethod
    def coerce(x) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, str):
            return parse_rational(x)
        return RationalFunction.const(GR.coerce(x))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.coeffs[0] if self.num.coeffs else _ZERO

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            try:
                other = RationalFunction.coerce(other)
            except (TypeError, ParseError):
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        o = RationalFunction.coerce(other)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalFunction.coerce(other))

    def __rsub__(self, other):
        return RationalFunction.coerce(other) - self

    def __mul__(self, other):
        o = RationalFunction.coerce(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalFunction.coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) / self

    def __pow__(self, k: int) -> "RationalFunction":
        k = int(k)
        if k < 0:
            if self.is_zero():
                raise ZeroDivisionError("negative power of the zero function")
            return RationalFunction(self.den, self.num) ** (-k)
        if k * max(self.num.degree, self.den.degree, 0) > DEGREE_CAP:
            raise DegreeCapExceeded(f"power would exceed degree cap {DEGREE_CAP}")
        out_n, out_d = Poly.const(1), Poly.const(1)
        for _ in range(k):
            out_n, out_d = out_n * self.num, out_d * self.den
        return RationalFunction(out_n, out_d)

    def conjugate_coefficients(self) -> "RationalFunction":
        return RationalFunction(self.num.conjugate(), self.den.conjugate())

    def __call__(self, w):
        return rf_eval(self, w)

    def eval_exact(self, p) -> GaussianRational:
        d = self.den.eval_exact(p)
        if d.is_zero():
            raise PoleAtPoint(f"pole of {self.text()} at {GR.coerce(p).text()}")
        return self.num.eval_exact(p) / d

    def derivative(self) -> "RationalFunction":
        return rf_derivative(self)

    def log_derivative(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroFunction("log derivative of the zero function")
        if self._logd is None:
            object.__setattr__(self, "_logd", rf_derivative(self) / self)
        return self._logd

    def valuation(self, p) -> int:
        return rf_valuation(self, p)

    def critical_points(self) -> np.ndarray:
        """Numeric zeros and poles (roots of numerator and denominator)."""
        pts = []
        for poly in (self.num, self.den):
            if poly.degree > 0:
                pts.extend(np.roots(poly.numeric_coeffs()[::-1]))
        return np.array(pts, dtype=complex)

    def text(self) -> str:
        if self.den.degree == 0:
            return self.num.text()
        return f"({self.num.text()})/({self.den.text()})"

    __str__ = text

    def __repr__(self):
        return f"RationalFunction({self.text()!r})"


RF = RationalFunction


def rf_eval(R: RationalFunction, w):
    """Horner evaluation of R at a complex point or array of points."""
    den = _horner(R._dcoef, w)
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleAtPoint(f"{R.text()} has a pole near the evaluation point")
    out = _horner(R._ncoef, w) / den
    return complex(out) if np.ndim(out) == 0 else out


def rf_derivative(R: RationalFunction) -> RationalFunction:
    n, d = R.num, R.den
    return RationalFunction(n.derivative() * d - n * d.derivative(), d * d)


def _order_at(poly: Poly, p: GaussianRational) -> int:
    lin = Poly([-p, 1])
    k = 0
    while True:
        q, r = poly.divmod(lin)
        if not r.is_zero():
            return k
        poly, k = q, k + 1


def rf_valuation(R: RationalFunction, p) -> int:
    """Order of vanishing of R at p; negative at poles."""
    if R.is_zero():
        raise ZeroFunction("valuation of the zero function")
    p = GR.coerce(p)
    return _order_at(R.num, p) - _order_at(R.den, p)


def tame_symbol_value(f: RationalFunction, g: RationalFunction, p) -> GaussianRational:
    """(-1)^{v(f)v(g)} (f^{v(g)} / g^{v(f)})(p), computed exactly."""
    p = GR.coerce(p)
    vf, vg = rf_valuation(f, p), rf_valuation(g, p)
    ratio = (f ** vg) / (g ** vf)
    num, den = ratio.num.eval_exact(p), ratio.den.eval_exact(p)
    if num.is_zero() or den.is_zero():
        raise IndeterminateSymbol("valuations failed to cancel in the tame symbol")
    sign = -1 if (vf * vg) % 2 else 1
    return (num / den) * sign


# ---------------------------------------------------------------------------
# parser for the expression grammar

_TOKEN = re.compile(r"\s*(?:(\d+)|([iz])|([-+*/^()]))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        out.append(next(g for g in m.groups() if g is not None))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected or 'token'} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> RationalFunction:
        if not self.toks:
            raise ParseError("empty expression")
        out = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r} in {self.text!r}")
        return out

    def expr(self):
        acc = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
            else:
                if rhs.is_zero():
                    raise ParseError(f"division by zero in {self.text!r}")
                acc = acc / rhs
        return acc

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def exponent(self) -> int:
        sign = 1
        while self.peek() in ("-", "+"):
            if self.take() == "-":
                sign = -sign
        if self.peek() == "(":
            self.take()
            k = self.exponent()
            self.take(")")
            return sign * k
        tok = self.take()
        if not tok.isdigit():
            raise ParseError(f"exponent must be an integer in {self.text!r}")
        return sign * int(tok)

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            k = self.exponent()
            if k < 0 and base.is_zero():
                raise ParseError("negative power of zero")
            base = base ** k
        return base

    def atom(self):
        tok = self.take()
        if tok.isdigit():
            return RationalFunction.const(int(tok))
        if tok == "i":
            return RationalFunction.const(GR(0, 1))
        if tok == "z":
            return RationalFunction.z()
        if tok == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise ParseError(f"unexpected token {tok!r} in {self.text!r}")


def parse_rational(text: str) -> RationalFunction:
    """Parse integers, i, z, + - * / ^ and parentheses into a rational function."""
    if not isinstance(text, str):
        raise ParseError("expression must be a string")
    return _Parser(text).parse()
