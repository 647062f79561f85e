"""Sector covers of an annulus, their nerve, sample points, loops and log branches.

A sector cover of the annulus ``inner < |w - p| < outer`` consists of ``N``
open angular sectors centred at ``2*pi*k/N`` with common opening ``width``.
Angles are handled exactly as ``a + b*pi`` with rational ``a`` and ``b``, so
the nerve is decided without rounding.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
import re

import numpy as np

from .errors import BranchGuardViolation, EmptyRegion, InvalidCover, OutOfChart
from .exact_algebra import GaussianRational, RationalFunction

__all__ = [
    "Angle",
    "SectorCover",
    "Simplex",
    "Arc",
    "Loop",
    "LogBranchAssignment",
    "build_nerve",
    "sample_points",
    "winding_loop",
    "assign_branches",
    "branch_for",
    "BRANCH_STEPS",
    "BRANCH_GUARD",
]

BRANCH_STEPS = 256
BRANCH_GUARD = 0.25

# pi to 60 digits brackets every comparison we need
_PI_DIGITS = "3.14159265358979323846264338327950288419716939937510582097494"
_PI_LO = Fraction(_PI_DIGITS)
_PI_HI = _PI_LO + Fraction(1, 10**59)


@dataclass(frozen=True)
class Angle:
    """The real number a + b*pi with rational a, b."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def parse(cls, value) -> "Angle":
        """Accept a number, an Angle, or text like ``4.5``, ``0.6pi``, ``3/5*pi``."""
        if isinstance(value, Angle):
            return value
        if isinstance(value, (int, float, Fraction)):
            return cls(Fraction(value))
        text = str(value).strip().replace(" ", "")
        m = re.fullmatch(r"([-+]?[0-9./]*)\*?(pi|π)", text)
        if m:
            coef = m.group(1)
            coef = "1" if coef in ("", "+") else ("-1" if coef == "-" else coef)
            return cls(0, Fraction(coef))
        try:
            return cls(Fraction(text))
        except ValueError as exc:
            raise InvalidCover(f"cannot parse angle {value!r}") from exc

    def sign(self) -> int:
        if self.b == 0:
            return (self.a > 0) - (self.a < 0)
        lo = self.a + self.b * (_PI_LO if self.b > 0 else _PI_HI)
        hi = self.a + self.b * (_PI_HI if self.b > 0 else _PI_LO)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        raise ArithmeticError("angle comparison too close to decide")

    def __add__(self, other: "Angle") -> "Angle":
        return Angle(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "Angle") -> "Angle":
        return Angle(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return Angle(-self.a, -self.b)

    def scale(self, q) -> "Angle":
        q = Fraction(q)
        return Angle(self.a * q, self.b * q)

    def __lt__(self, other: "Angle") -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: "Angle") -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other: "Angle") -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other: "Angle") -> bool:
        return (self - other).sign() >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * np.pi

    def text(self) -> str:
        if self.b == 0:
            return str(float(self.a))
        if self.a == 0:
            return f"{self.b}*pi"
        return f"{float(self)}"

    def exact_text(self) -> str:
        """Lossless text for parse() whenever one of a, b vanishes."""
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*pi"
        return self.text()


TWO_PI = Angle(0, 2)
PI = Angle(0, 1)

Interval = tuple[Angle, Angle]


@dataclass(frozen=True)
class SectorCover:
    """Sector k spans angles 2*pi*k/N +- width/2 for all radii in (inner, outer)."""

    center: GaussianRational = field(default_factory=lambda: GaussianRational(0))
    inner: float = 0.5
    outer: float = 2.0
    N: int = 3
    width: Angle = field(default_factory=lambda: Angle(Fraction(9, 2)))
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "center", GaussianRational.coerce(self.center))
        object.__setattr__(self, "width", Angle.parse(self.width))
        object.__setattr__(self, "inner", float(self.inner))
        object.__setattr__(self, "outer", float(self.outer))
        if self.N < 1:
            raise InvalidCover("need at least one sector")
        if not 0 < self.inner < self.outer:
            raise InvalidCover("need 0 < inner < outer")
        if self.width.sign() <= 0:
            raise InvalidCover("sector width must be positive")
        if not self.width.scale(self.N) > TWO_PI:
            raise InvalidCover("sectors do not cover the annulus: N*width <= 2*pi")

    @classmethod
    def from_config(cls, cfg: dict) -> "SectorCover":
        """Build from a mapping with keys center, inner, outer, N, width, seed."""
        center = cfg.get("center", 0)
        if isinstance(center, str):
            from .exact_algebra import parse_rational

            center = parse_rational(center).constant_value()
        elif isinstance(center, (list, tuple)):
            center = GaussianRational(Fraction(str(center[0])), Fraction(str(center[1])))
        else:
            center = GaussianRational(Fraction(str(center)))
        return cls(center=center, inner=cfg.get("inner", 0.5), outer=cfg.get("outer", 2.0),
                   N=int(cfg.get("N", 3)), width=Angle.parse(cfg.get("width", 4.5)),
                   seed=int(cfg.get("seed", 0)))

    def to_config(self) -> dict:
        c = self.center
        return {"center": [str(c.re), str(c.im)], "inner": self.inner, "outer": self.outer,
                "N": self.N, "width": self.width.exact_text(), "seed": self.seed}

    @property
    def p(self) -> complex:
        return complex(self.center)

    @property
    def mid_radius(self) -> float:
        return 0.5 * (self.inner + self.outer)

    def sector_center(self, k: int) -> Angle:
        return Angle(0, Fraction(2 * k, self.N))

    def is_full(self) -> bool:
        return self.width >= TWO_PI

    def sector_interval(self, k: int) -> Interval:
        c, h = self.sector_center(k), self.width.scale(Fraction(1, 2))
        return (c - h, c + h)

    def contains(self, k: int, w) -> np.ndarray:
        """Numeric membership of points w in sector k (annulus included)."""
        w = np.asarray(w, dtype=complex) - self.p
        r = np.abs(w)
        ok = (r > self.inner) & (r < self.outer)
        if self.is_full():
            return ok
        delta = _wrap(np.angle(w) - float(self.sector_center(k)))
        return ok & (np.abs(delta) < 0.5 * float(self.width))

    def check_function(self, f: RationalFunction, margin: float = 1e-9) -> None:
        """Raise InvalidCover if f has a zero or pole in the closed annulus."""
        pts = f.critical_points()
        if pts.size == 0:
            return
        r = np.abs(pts - self.p)
        bad = (r >= self.inner - margin) & (r <= self.outer + margin)
        if np.any(bad):
            raise InvalidCover(f"{f.text()} has a zero or pole inside the annulus")

    def region(self, indices) -> list[Interval]:
        return _intersect([self.sector_interval(k) for k in indices], self.is_full(),
                          self.sector_center(indices[0]))


def _wrap(x):
    return (np.asarray(x) + np.pi) % (2 * np.pi) - np.pi


def _intersect(arcs: list[Interval], full: bool, anchor: Angle) -> list[Interval]:
    if full:
        return [(anchor - PI, anchor + PI)]
    comps = [arcs[0]]
    for lo, hi in arcs[1:]:
        nxt = []
        for clo, chi in comps:
            for s in range(-2, 3):
                shift = TWO_PI.scale(s)
                a, b = max(clo, lo + shift), min(chi, hi + shift)
                if a < b:
                    nxt.append((a, b))
        comps = sorted(nxt, key=lambda iv: float(iv[0]))
    return comps


@dataclass(frozen=True)
class Simplex:
    """Increasing tuple of sector indices with its angular intersection."""

    indices: tuple[int, ...]
    components: tuple[Interval, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.indices) - 1

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)


def build_nerve(cover: SectorCover, max_dim: int) -> list[Simplex]:
    """All simplices up to ``max_dim`` with nonempty angular intersection."""
    out = []
    for size in range(1, max_dim + 2):
        for idx in combinations(range(cover.N), size):
            comps = cover.region(idx)
            if comps:
                out.append(Simplex(idx, tuple(comps)))
    return out


def _simplex_of(cover: SectorCover, s) -> Simplex:
    if isinstance(s, Simplex):
        return s
    idx = tuple(s)
    return Simplex(idx, tuple(cover.region(idx)))


def sample_points(cover: SectorCover, s, count: int, seed: int | None = None,
                  avoid=()) -> np.ndarray:
    """Seeded uniform points in the region of simplex ``s``."""
    s = _simplex_of(cover, s)
    if count == 0:
        return np.zeros(0, dtype=complex)
    if not s.components:
        raise EmptyRegion(f"simplex {s.indices} has empty intersection")
    seed = cover.seed if seed is None else seed
    rng = np.random.default_rng([seed, *s.indices])
    lows = np.array([float(a) for a, _ in s.components])
    lens = np.array([float(b) - float(a) for a, b in s.components])
    avoid = np.asarray(list(avoid), dtype=complex)
    pts = []
    while len(pts) < count:
        k = rng.choice(len(lens), p=lens / lens.sum())
        # stay off the boundary rays by a hair
        theta = lows[k] + lens[k] * (0.02 + 0.96 * rng.random())
        r = np.sqrt(rng.uniform(cover.inner**2, cover.outer**2))
        r = min(max(r, cover.inner * 1.001), cover.outer * 0.999)
        w = cover.p + r * np.exp(1j * theta)
        if avoid.size and np.min(np.abs(avoid - w)) < 1e-9:
            continue
        pts.append(w)
    pts = np.array(pts)
    for k in s.indices:
        if not np.all(cover.contains(k, pts)):
            raise EmptyRegion("sampled point fell outside a sector of the simplex")
    return pts


@dataclass(frozen=True)
class Arc:
    """Positively oriented arc of the circle |w - p| = r between two angles."""

    center: complex
    radius: float
    start: float
    end: float
    sector: int

    def points(self, steps: int) -> np.ndarray:
        t = np.linspace(self.start, self.end, steps + 1)
        return self.center + self.radius * np.exp(1j * t)

    def point_at(self, theta: float) -> complex:
        return self.center + self.radius * np.exp(1j * theta)

    @property
    def start_point(self) -> complex:
        return self.point_at(self.start)

    @property
    def end_point(self) -> complex:
        return self.point_at(self.end)


@dataclass(frozen=True)
class Loop:
    center: complex
    radius: float
    segments: tuple[Arc, ...]
    steps_per_arc: int = 64

    def switches(self) -> list[tuple[int, int, complex]]:
        """Chart switches (from sector, to sector, switch point) in loop order."""
        out = []
        n = len(self.segments)
        for k, arc in enumerate(self.segments):
            nxt = self.segments[(k + 1) % n]
            if nxt.sector != arc.sector or n == 1:
                out.append((arc.sector, nxt.sector, arc.end_point))
        return out

    def total_angle(self) -> float:
        return sum(a.end - a.start for a in self.segments)


def winding_loop(cover: SectorCover, r: float | None = None, steps_per_arc: int = 64) -> Loop:
    """Circle of radius r cut at the midpoints of consecutive overlaps."""
    r = cover.mid_radius if r is None else float(r)
    if not cover.inner < r < cover.outer:
        raise InvalidCover("loop radius must lie strictly inside the annulus")
    arcs = []
    for k in range(cover.N):
        c = float(cover.sector_center(k))
        arcs.append(Arc(cover.p, r, c - np.pi / cover.N, c + np.pi / cover.N, k))
    return Loop(cover.p, r, tuple(arcs), steps_per_arc)


class LogBranchAssignment:
    """Continuous branches log_k f on every sector of a cover.

    The branch on sector k is pinned at the base point at mid radius and angle
    2*pi*k/N.  Sector 0 uses the principal value there; every other base value
    is reached by continuing along the mid circle in the positive direction.
    """

    def __init__(self, f: RationalFunction, cover: SectorCover, steps: int = BRANCH_STEPS,
                 guard: float = BRANCH_GUARD):
        f = RationalFunction.coerce(f)
        if f.is_zero():
            raise BranchGuardViolation("log of the zero function")
        cover.check_function(f)
        self.f = f
        self.cover = cover
        self.steps = int(steps)
        self.guard = guard
        self.max_residual = 0.0
        self._cache: dict = {}
        rm = cover.mid_radius
        self.base_points = [cover.p + rm * np.exp(1j * float(cover.sector_center(k)))
                            for k in range(cover.N)]
        logs = [complex(np.log(f(self.base_points[0])))]
        for k in range(1, cover.N):
            a0, a1 = float(cover.sector_center(k - 1)), float(cover.sector_center(k))
            path = cover.p + rm * np.exp(1j * np.linspace(a0, a1, self.steps + 1))
            logs.append(logs[-1] + self._increment(path[None, :])[0])
        self.base_logs = logs

    def _increment(self, paths: np.ndarray) -> np.ndarray:
        vals = self.f(paths)
        # only the argument needs stepping; the modulus part telescopes
        dtheta = np.angle(vals[:, 1:] * np.conj(vals[:, :-1]))
        if np.any(np.abs(dtheta) > np.pi / 2):
            raise BranchGuardViolation("continuation step too coarse for log branch")
        mod = np.log(np.abs(vals[:, -1])) - np.log(np.abs(vals[:, 0]))
        return mod + 1j * dtheta.sum(axis=1)

    def log(self, k: int, w) -> np.ndarray:
        """Value of log_k f at the points w (which must lie in sector k)."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        key = (k, w.tobytes())
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        cover = self.cover
        if not np.all(cover.contains(k, w)):
            raise OutOfChart(f"point outside sector {k} for log branch of {self.f.text()}")
        rel = w - cover.p
        c = float(cover.sector_center(k))
        phi = c + _wrap(np.angle(rel) - c)
        rm = cover.mid_radius
        t = np.linspace(0.0, 1.0, self.steps + 1)[None, :]
        arc = cover.p + rm * np.exp(1j * (c + (phi[:, None] - c) * t))
        radial = cover.p + (rm + (np.abs(rel)[:, None] - rm) * t) * np.exp(1j * phi[:, None])
        acc = self.base_logs[k] + self._increment(arc) + self._increment(radial)
        principal = np.log(self.f(w))
        turns = (acc - principal) / (2j * np.pi)
        n = np.round(turns.real)
        resid = np.max(np.abs(turns - n)) if turns.size else 0.0
        self.max_residual = max(self.max_residual, float(resid))
        if resid > self.guard:
            raise BranchGuardViolation(f"branch rounding residual {resid:.3g} exceeds guard")
        out = principal + 2j * np.pi * n
        if len(self._cache) > 4096:
            self._cache.clear()
        self._cache[key] = out
        return out

    def jump(self, i: int, j: int, w) -> np.ndarray:
        """Exact integers m_ij(w) = (log_j f - log_i f)(w) / 2*pi*i on U_ij."""
        turns = (self.log(j, w) - self.log(i, w)) / (2j * np.pi)
        n = np.round(turns.real)
        resid = np.max(np.abs(turns - n)) if turns.size else 0.0
        self.max_residual = max(self.max_residual, float(resid))
        if resid > self.guard:
            raise BranchGuardViolation(f"branch integer residual {resid:.3g} exceeds guard")
        return n.astype(np.int64)

    @cached_property
    def branch_integers(self) -> dict[tuple[int, int], tuple[int, ...]]:
        """m_ij for i < j, one exact integer per connected component of U_ij."""
        out = {}
        rm = self.cover.mid_radius
        for s in build_nerve(self.cover, 1):
            if s.dim != 1:
                continue
            mids = [self.cover.p + rm * np.exp(1j * float((a + b).scale(Fraction(1, 2))))
                    for a, b in s.components]
            out[s.indices] = tuple(int(v) for v in self.jump(*s.indices, np.array(mids)))
        return out

    def loop_sum(self, loop: Loop) -> int:
        """Sum of branch jumps over the chart switches of a loop."""
        total = 0
        for a, b, w in loop.switches():
            total += int(self.jump(b, a, np.array([w]))[0])
        return total


_BRANCHES: dict = {}


def assign_branches(f: RationalFunction, cover: SectorCover) -> LogBranchAssignment:
    return LogBranchAssignment(f, cover)


def branch_for(f, cover: SectorCover) -> LogBranchAssignment:
    """Shared (memoized) branch assignment of f on a cover."""
    f = RationalFunction.coerce(f)
    key = (f, cover)
    hit = _BRANCHES.get(key)
    if hit is None:
        hit = _BRANCHES[key] = LogBranchAssignment(f, cover)
    return hit
