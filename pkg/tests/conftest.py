import pytest
from hypothesis import HealthCheck, settings

from deligne_symbols.cech_engine import (
    CechCochain, FormSlot, IntPoly, IntSlot, SumSlot, nerve_of,
)
from deligne_symbols.cover_nerve import SectorCover
from deligne_symbols.exact_algebra import Poly, RationalFunction
from deligne_symbols.form_calculus import Form, add, conj, const, mul, rat

settings.register_profile(
    "repo", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("repo")

# roots and poles stay at the centre or well outside the annulus 0.5 < |z| < 2
FAR_ROOTS = [3, -3, 4, -5, 3j, -4j, 3 + 3j, -3 + 4j, 6, 5 - 2j]


def narrow_cover():
    return SectorCover(0, 0.5, 2.0, 3, "4.5")


def wide_cover():
    return SectorCover(0, 0.5, 2.0, 4, "5.0")


@pytest.fixture(params=["narrow", "wide"])
def cover(request):
    return narrow_cover() if request.param == "narrow" else wide_cover()


@pytest.fixture
def narrow():
    return narrow_cover()


@pytest.fixture
def wide():
    return wide_cover()


def random_rational(rng, max_val: int = 3, center_power: int | None = None):
    """z^v * prod (z - r)^{+-1} with v in [-max_val, max_val] and far roots."""
    v = int(rng.integers(-max_val, max_val + 1)) if center_power is None else center_power
    R = RationalFunction.z() ** v if v else RationalFunction.const(1)
    for _ in range(int(rng.integers(0, 3))):
        r = FAR_ROOTS[int(rng.integers(len(FAR_ROOTS)))]
        factor = RationalFunction.coerce(f"z-({int(r.real)}+{int(r.imag)}*i)" if isinstance(r, complex)
                                         else f"z-({r})")
        R = R * (factor if rng.integers(2) else 1 / factor)
    c = int(rng.integers(1, 4)) * (1 if rng.integers(2) else -1)
    return R * RationalFunction.const(c)


def random_smooth(rng):
    """A smooth non-holomorphic coefficient a p(z) + b conj(q(z))."""
    p = RationalFunction(Poly([int(c) for c in rng.integers(-3, 4, size=3)]))
    q = RationalFunction(Poly([int(c) for c in rng.integers(-3, 4, size=2)]))
    a, b = (int(v) for v in rng.integers(1, 4, size=2))
    return add(mul(const(a), rat(p)), mul(const(b), conj(rat(q))), const(int(rng.integers(-2, 3))))


def random_form(rng, degree: int) -> Form:
    monos = {0: ["1"], 1: ["dz", "dzb"], 2: ["dzdzb"]}[degree]
    return Form(degree, {m: random_smooth(rng) for m in monos})


def random_value(rng, slot):
    if isinstance(slot, IntSlot):
        return IntPoly.const(int(rng.integers(-4, 5)))
    if isinstance(slot, FormSlot):
        return random_form(rng, slot.degree)
    if isinstance(slot, SumSlot):
        return tuple(random_value(rng, s) for s in slot.parts)
    raise TypeError(slot)


def random_cochain(rng, complex_, degree: int, cover) -> CechCochain:
    """Arbitrary (not necessarily closed) cochain with every allowed entry filled."""
    vals = {}
    for idx in nerve_of(cover):
        p = degree - (len(idx) - 1)
        if 0 <= p <= complex_.top:
            vals[(p, idx)] = random_value(rng, complex_.slots[p])
    return CechCochain(complex_, degree, cover, vals)


def max_residual(c: CechCochain, count: int = 8, seed: int = 0) -> float:
    from deligne_symbols.cech_engine import cochain_residual
    return cochain_residual(c, count=count, seed=seed).max_residual


def sample_plane(rng, count: int = 10):
    return rng.uniform(-1.5, 1.5, count) + 1j * rng.uniform(-1.5, 1.5, count)




# one summary line per acceptance criterion, printed after the run

_ACCEPTANCE: dict = {}


@pytest.fixture
def criterion(request):
    """Call with (number, title, passed, detail) to log an acceptance line."""
    def log(number, title, passed, detail=""):
        _ACCEPTANCE[number] = (title, bool(passed), detail)
        return passed
    return log


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {title}: {detail}")


__all__ = ["narrow_cover", "wide_cover", "random_rational", "random_form", "random_cochain",
           "max_residual", "sample_plane", "FAR_ROOTS", "criterion"]
