import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import narrow_cover, random_form, random_smooth, sample_plane
from deligne_symbols.cover_nerve import branch_for, sample_points
from deligne_symbols.errors import DegreeOverflow, ParseError, ZeroFunction
from deligne_symbols.exact_algebra import parse_rational
from deligne_symbols.form_calculus import (
    Const, Form, Var, add, conj, conj_form, const, d, del_, delbar, eval_form, evaluate,
    form_residual, function_form, log_abs, log_branch, mul, parse_expr, partial, partialbar,
    pi_p, power, rat, sub, wedge,
)

seeds = st.integers(0, 10_000)


def _wirtinger(e, w, h=1e-6):
    fx = (evaluate(e, w + h) - evaluate(e, w - h)) / (2 * h)
    fy = (evaluate(e, w + 1j * h) - evaluate(e, w - 1j * h)) / (2 * h)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


@given(seeds)
def test_structural_derivatives_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    e = mul(random_smooth(rng), random_smooth(rng))
    w = sample_plane(rng)
    fz, fzb = _wirtinger(e, w)
    assert np.allclose(evaluate(del_(e), w), fz, atol=1e-5)
    assert np.allclose(evaluate(delbar(e), w), fzb, atol=1e-5)


@given(seeds)
def test_d_squared_vanishes(seed):
    rng = np.random.default_rng(seed)
    f = function_form(random_smooth(rng))
    assert form_residual(d(d(f)), sample_plane(rng)) < 1e-10
    with pytest.raises(DegreeOverflow):
        d(d(random_form(rng, 1)))


@given(seeds)
def test_leibniz_and_wedge_sign(seed):
    rng = np.random.default_rng(seed)
    a, b = random_smooth(rng), random_smooth(rng)
    w = sample_plane(rng)
    lhs = d(mul(a, b))
    rhs = d(a).scale(b) + d(b).scale(a)
    assert form_residual(lhs - rhs, w) < 1e-9
    x, y = random_form(rng, 1), random_form(rng, 1)
    assert form_residual(wedge(x, y) + wedge(y, x), w) < 1e-9


@given(seeds)
def test_pi_projections_split_forms(seed):
    rng = np.random.default_rng(seed)
    F = random_form(rng, 1)
    w = sample_plane(rng)
    assert form_residual(pi_p(F, 0) + pi_p(F, 1) - F, w) < 1e-10
    re = eval_form(pi_p(F, 0), w)
    cf = eval_form(conj_form(pi_p(F, 0)), w)
    # a real form is its own conjugate
    assert all(np.allclose(re[k], cf[k]) for k in re)


def test_d_splits_into_partial_and_partialbar():
    rng = np.random.default_rng(2)
    e = random_smooth(rng)
    w = sample_plane(rng)
    assert form_residual(d(e) - partial(e) - partialbar(e), w) < 1e-12


def test_twisted_constants_conjugate_with_sign():
    c = Const(3, 1)
    assert evaluate(conj(c), 0.0)[0] == pytest.approx(np.conj(c.numeric()))
    assert conj(conj(Var("x"))) == Var("x")


def test_structural_cancellation():
    a = add(rat(parse_rational("z^2")), mul(const(2), conj(rat(parse_rational("z")))))
    assert sub(a, a) == const(0)
    assert power(rat(parse_rational("z")), 0) == const(1)


def test_log_branch_derivative():
    cv = narrow_cover()
    f = parse_rational("z^2*(z+3)")
    L = log_branch(branch_for(f, cv), 1)
    w = sample_points(cv, (1,), 10, seed=0)
    assert np.allclose(evaluate(del_(L), w), f.log_derivative()(w))
    assert evaluate(delbar(L), w) == pytest.approx(np.zeros(10))


def test_log_abs():
    R = parse_rational("z-4")
    e = log_abs(R)
    w = sample_plane(np.random.default_rng(0))
    assert np.allclose(evaluate(e, w), np.log(np.abs(w - 4)))
    fz, fzb = _wirtinger(e, w)
    assert np.allclose(evaluate(del_(e), w), fz, atol=1e-6)
    assert np.allclose(evaluate(delbar(e), w), fzb, atol=1e-6)
    assert log_abs(parse_rational("i")) == const(0)
    with pytest.raises(ZeroFunction):
        log_abs(parse_rational("0"))


def test_free_symbols_read_from_env():
    e = mul(Var("x"), conj(Var("y")))
    assert evaluate(e, 0.0, {"x": 2j, "y": 1j})[0] == pytest.approx(2)
    with pytest.raises(KeyError):
        evaluate(e, 0.0, {"x": 1})


@given(seeds)
def test_parse_round_trip(seed):
    rng = np.random.default_rng(seed)
    cv = narrow_cover()
    e = mul(random_smooth(rng), log_branch(branch_for(parse_rational("z-3"), cv), 2))
    e = add(e, log_abs(parse_rational("z+5")), Const(1, -2))
    assert parse_expr(e.text(), cv) == e


def test_parse_rejects_garbage():
    with pytest.raises(ParseError):
        parse_expr("rat(z) +", narrow_cover())


def test_form_degree_guard():
    with pytest.raises(ValueError):
        Form(1, {"dzdzb": const(1)})
