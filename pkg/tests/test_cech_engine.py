from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import max_residual, narrow_cover, random_cochain, random_form, random_rational, sample_plane, wide_cover
from deligne_symbols.cech_engine import (
    CechCochain, IntPoly, alpha_difference, cone_complex, cone_cup_alpha, cone_d, cone_residual,
    deligne_complex, deligne_cup, dhh1_complex, gamma2_complex, hermitian_cup, hermitian_homotopy,
    hermitian_target_complex, is_cocycle, metrized_complex, total_D, untwist,
)
from deligne_symbols.errors import HomotopyUndefined, PairingUndefined, SlotMismatch
from deligne_symbols.symbols import function_class

seeds = st.integers(0, 10_000)

COMPLEXES = [
    (deligne_complex(1), 1), (deligne_complex(2), 1), (deligne_complex(2), 2),
    (deligne_complex(3), 2), (metrized_complex(), 2), (hermitian_target_complex(), 1),
    (dhh1_complex(), 2), (gamma2_complex(), 2), (cone_complex(1), 1),
]


@pytest.mark.parametrize("complex_,degree", COMPLEXES, ids=lambda v: getattr(v, "name", str(v)))
def test_D_squared_is_zero(complex_, degree):
    rng = np.random.default_rng(degree)
    for cv in (narrow_cover(), wide_cover()):
        c = random_cochain(rng, complex_, degree, cv)
        assert max_residual(total_D(total_D(c))) < 1e-9


def _leibniz_residual(cup, a, b):
    lhs = total_D(cup(a, b))
    sign = (-1) ** a.degree
    rhs = cup(total_D(a), b) + cup(a, total_D(b)).scale(sign)
    return max_residual(lhs - rhs)


@given(seeds, st.integers(0, 2), st.integers(0, 2))
def test_deligne_cup_leibniz(seed, da, db):
    rng = np.random.default_rng(seed)
    cv = narrow_cover()
    a = random_cochain(rng, deligne_complex(1), da, cv)
    b = random_cochain(rng, deligne_complex(1), db, cv)
    assert _leibniz_residual(deligne_cup, a, b) < 1e-9


@given(seeds, st.integers(0, 2), st.integers(0, 2))
def test_hermitian_cup_leibniz(seed, da, db):
    rng = np.random.default_rng(seed)
    cv = narrow_cover()
    a = random_cochain(rng, deligne_complex(1), da, cv)
    b = random_cochain(rng, deligne_complex(1), db, cv)
    assert _leibniz_residual(hermitian_cup, a, b) < 1e-9


def test_weight_two_by_one_leibniz_on_quadruple_overlaps():
    rng = np.random.default_rng(5)
    cv = wide_cover()
    a = random_cochain(rng, deligne_complex(2), 2, cv)
    b = random_cochain(rng, deligne_complex(1), 1, cv)
    assert _leibniz_residual(deligne_cup, a, b) < 1e-9


@given(seeds)
def test_hermitian_product_is_homotopy_commutative(seed):
    rng = np.random.default_rng(seed)
    cv = narrow_cover()
    a = function_class(random_rational(rng), cv)
    b = function_class(random_rational(rng), cv)
    sym = hermitian_cup(a, b) + hermitian_cup(b, a)
    assert max_residual(total_D(hermitian_homotopy(a, b)) - sym) < 1e-9


def test_homotopy_needs_degree_one():
    cv = narrow_cover()
    c = random_cochain(np.random.default_rng(0), deligne_complex(1), 2, cv)
    with pytest.raises(HomotopyUndefined):
        hermitian_homotopy(c, c)


def test_corrupted_integer_slot_fails():
    cv = narrow_cover()
    a = function_class(random_rational(np.random.default_rng(1), center_power=2), cv)
    b = function_class(random_rational(np.random.default_rng(2), center_power=1), cv)
    c = deligne_cup(a, b)
    assert is_cocycle(c).passed
    vals = dict(c.values)
    vals[(0, (0, 1, 2))] = vals.get((0, (0, 1, 2)), IntPoly()) + IntPoly.const(1)
    bad = CechCochain(c.complex, c.degree, cv, vals)
    rep = is_cocycle(bad)
    assert not rep.passed


def test_cochain_validation():
    cv = narrow_cover()
    with pytest.raises(SlotMismatch):
        CechCochain(deligne_complex(1), 1, cv, {(0, (0,)): IntPoly.const(1)})
    with pytest.raises(SlotMismatch):
        CechCochain(deligne_complex(1), 1, cv, {(1, (0,)): IntPoly.const(1)})


def test_pairing_type_checks():
    cv = narrow_cover()
    a = random_cochain(np.random.default_rng(0), metrized_complex(), 1, cv)
    with pytest.raises(PairingUndefined):
        deligne_cup(a, a)
    with pytest.raises(SlotMismatch):
        untwist(a)


# cone products on a curve, checked pointwise


def _cone_element(rng, deg):
    if deg == 0:
        return IntPoly.const(int(rng.integers(-3, 4))), None, None
    if deg == 1:
        # F^1 A^1 holds (1, 0)-forms
        y = random_form(rng, 1)
        y = type(y)(1, {"dz": y.coeff("dz")})
        return None, y, random_form(rng, 0)
    return None, random_form(rng, 2), random_form(rng, 1)


def _add(u, v):
    return tuple(a if b is None else (b if a is None else a + b) for a, b in zip(u, v))


def _neg(u):
    return tuple(None if a is None else (a * -1 if isinstance(a, IntPoly) else -a) for a in u)


@pytest.mark.parametrize("alpha", [0, Fraction(1, 2), 1])
@given(seed=seeds, d1=st.integers(0, 2), d2=st.integers(0, 2))
def test_cone_product_is_a_chain_map(alpha, seed, d1, d2):
    if d1 + d2 > 2:
        return
    rng = np.random.default_rng(seed)
    u1, u2 = _cone_element(rng, d1), _cone_element(rng, d2)
    lhs = cone_d(cone_cup_alpha(u1, u2, d1, d2, alpha), d1 + d2, 2)
    t1 = cone_cup_alpha(cone_d(u1, d1, 1), u2, d1 + 1, d2, alpha)
    t2 = cone_cup_alpha(u1, cone_d(u2, d2, 1), d1, d2 + 1, alpha)
    rhs = _add(t1, t2 if d1 % 2 == 0 else _neg(t2))
    diff = _add(lhs, _neg(rhs))
    assert cone_residual(diff, sample_plane(rng)) < 1e-9


@given(seed=seeds, d1=st.integers(0, 2), d2=st.integers(0, 2))
def test_alpha_products_differ_by_a_homotopy(seed, d1, d2):
    if d1 + d2 > 2:
        return
    rng = np.random.default_rng(seed)
    u1, u2 = _cone_element(rng, d1), _cone_element(rng, d2)
    for a, b in [(0, 1), (Fraction(1, 2), 0), (1, Fraction(1, 2))]:
        assert cone_residual(alpha_difference(u1, u2, d1, d2, a, b), sample_plane(rng)) < 1e-9
