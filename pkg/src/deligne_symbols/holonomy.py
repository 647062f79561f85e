"""Holonomy of the tame-symbol connection around the puncture.

A flat section written as phi_a {log_a f, g} satisfies dphi_a / phi_a = omega_a / 2 pi i,
so along each arc it picks up exp((1/2 pi i) * integral of log_a f dg/g); at a switch
from chart a to b the trivializations differ by g^(-k) with k = (log_a f - log_b f) / 2 pi i.
The product reproduces (-1)^(v(f) v(g)) (f^v(g) / g^v(f))(p).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cover_nerve import Arc, Loop, SectorCover, branch_for, winding_loop
from .exact_algebra import GaussianRational, tame_symbol_value
from .errors import IndeterminateSymbol, ZeroFunction
from .form_calculus import Const, Expr, Form, ZERO, d, eval_form
from .symbols import TameSymbolData, _factors, _product, tame_symbol

__all__ = ["integrate_form", "HolonomyResult", "holonomy", "tame_holonomy", "GL_ORDER",
           "DEFAULT_PANELS"]

GL_ORDER = 8
DEFAULT_PANELS = 64
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)
_INV_2PI_I = Const(1, -1)


def integrate_form(F: Form, arc: Arc, steps: int = DEFAULT_PANELS) -> complex:
    """Composite Gauss-Legendre integral of a 1-form along a circular arc."""
    if F.degree != 1:
        raise ValueError("only 1-forms can be integrated along arcs")
    if F.is_zero():
        return 0j
    edges = np.linspace(arc.start, arc.end, steps + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mids = 0.5 * (edges[1:] + edges[:-1])
    theta = (mids[:, None] + half[:, None] * _NODES[None, :]).ravel()
    weights = (half[:, None] * _WEIGHTS[None, :]).ravel()
    w = arc.center + arc.radius * np.exp(1j * theta)
    dz = 1j * arc.radius * np.exp(1j * theta)
    vals = eval_form(F, w)
    integrand = vals["dz"] * dz + vals["dzb"] * np.conj(dz)
    return complex(np.sum(weights * integrand))


@dataclass
class HolonomyResult:
    value: complex
    target: GaussianRational | None
    arc_integrals: list = field(default_factory=list)
    switch_factors: list = field(default_factory=list)

    @property
    def relative_error(self) -> float:
        if self.target is None:
            return float("nan")
        t = complex(self.target)
        return abs(self.value - t) / abs(t)

    def as_dict(self) -> dict:
        return {
            "value_re": self.value.real, "value_im": self.value.imag,
            "target": None if self.target is None else self.target.text(),
            "relative_error": self.relative_error,
        }


def holonomy(T: TameSymbolData, loop: Loop | None = None, steps: int = DEFAULT_PANELS,
             h: Expr = ZERO) -> HolonomyResult:
    """Holonomy of the connection of T around ``loop`` (default: the winding loop).

    ``h`` is a global gauge coefficient; its contribution telescopes away.
    """
    cover = T.cover
    loop = loop or winding_loop(cover)
    G = _product(T.g)
    branches = [branch_for(R, cover) for R in _factors(T.f)]
    dh = d(h)
    log_total = 0j
    arcs, switches = [], []
    for arc in loop.segments:
        form = T.omega(arc.sector).scale(_INV_2PI_I) + dh
        val = integrate_form(form, arc, steps)
        arcs.append(val)
        log_total += val
    for a, b, w in loop.switches():
        pt = np.array([w])
        k = sum(int(br.jump(b, a, pt)[0]) for br in branches)
        factor = complex(G(pt)[0]) ** (-k)
        switches.append(factor)
    value = np.exp(log_total) * np.prod(switches) if switches else np.exp(log_total)
    try:
        target = tame_symbol_value(_product(T.f), G, cover.center)
    except (IndeterminateSymbol, ZeroFunction):
        target = None
    return HolonomyResult(complex(value), target, arcs, switches)


def tame_holonomy(f, g, cover: SectorCover, radius: float | None = None,
                  steps: int = DEFAULT_PANELS) -> HolonomyResult:
    T = tame_symbol(f, g, cover)
    return holonomy(T, winding_loop(cover, radius), steps)
