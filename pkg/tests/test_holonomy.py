import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import narrow_cover, random_rational, wide_cover
from deligne_symbols.cover_nerve import SectorCover, winding_loop
from deligne_symbols.exact_algebra import GaussianRational as GR, parse_rational, tame_symbol_value
from deligne_symbols.form_calculus import Form, const, rat
from deligne_symbols.holonomy import holonomy, integrate_form, tame_holonomy
from deligne_symbols.symbols import tame_symbol


def test_integrates_dz_over_z():
    loop = winding_loop(narrow_cover())
    F = Form(1, {"dz": rat(parse_rational("1/z"))})
    total = sum(integrate_form(F, a) for a in loop.segments)
    assert total == pytest.approx(2j * np.pi, abs=1e-12)


def test_only_one_forms_integrate():
    loop = winding_loop(narrow_cover())
    with pytest.raises(ValueError):
        integrate_form(Form(0, {"1": const(1)}), loop.segments[0])


@pytest.mark.parametrize("f,g,want", [
    ("z", "2", GR(1, 0) / 2),
    ("z", "z", GR(-1)),
    ("z^2", "z-3", GR(1, 0) / 9),
    ("(z+4)/z", "z^3", None),
])
def test_holonomy_is_the_tame_symbol(f, g, want):
    r = tame_holonomy(f, g, narrow_cover())
    if want is not None:
        assert r.target == want
    assert r.relative_error < 1e-6


@given(st.integers(0, 10_000))
def test_random_holonomy_matches(seed):
    rng = np.random.default_rng(seed)
    f, g = random_rational(rng), random_rational(rng)
    r = tame_holonomy(f, g, narrow_cover())
    assert r.relative_error < 1e-6


def test_cover_and_radius_independence():
    f, g = parse_rational("z^2*(z+3)"), parse_rational("(z-4)/z")
    a = tame_holonomy(f, g, narrow_cover()).value
    b = tame_holonomy(f, g, SectorCover(0, 0.5, 2.0, 5, "2.2")).value
    c = tame_holonomy(f, g, wide_cover(), radius=1.7).value
    assert abs(a - b) < 1e-8 and abs(a - c) < 1e-8


def test_global_gauge_telescopes():
    T = tame_symbol("z^2", "z+5", narrow_cover())
    h = rat(parse_rational("z^3 - 2*z"))
    assert holonomy(T, h=h).value == pytest.approx(holonomy(T).value, abs=1e-10)


def test_off_centre_cover():
    cv = SectorCover(GR(1, 1), 0.5, 2.0, 3, "4.5")
    f = parse_rational("(z-(1+i))^2")
    g = parse_rational("z+3")
    r = tame_holonomy(f, g, cv)
    assert r.target == tame_symbol_value(f, g, GR(1, 1))
    assert r.relative_error < 1e-6
