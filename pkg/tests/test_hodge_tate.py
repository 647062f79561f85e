from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from conftest import narrow_cover, random_rational
from deligne_symbols.errors import NotInKernel
from deligne_symbols.exact_algebra import parse_rational
from deligne_symbols.form_calculus import Const, Var, add, evaluate, mul, rat
from deligne_symbols.hodge_tate import (
    PeriodData, TensorQQ, big_period, big_period_closed_form, extension_class,
    extension_exp_closed_form, functionals, half_log_B, heisenberg_cross_check, kahler_closed_form,
    kahler_d, mult_map, numeric_big_period, pair_functionals, project_kahler, project_R1,
    q_invariance_check, r1_closed_form, tame_cross_check, unique_lift,
)
from deligne_symbols.symbols import tame_symbol

x, y, z = Var("x"), Var("y"), Var("z")
TWO_PI_I = Const(1, 1)
complexes = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)
# logm's Schur step breaks down on near-subnormal entries, so its inputs are rounded
reals = st.floats(-5, 5, allow_subnormal=False).map(lambda v: round(v, 6))
moderate = st.builds(complex, reals, reals)


def env_of(a, b, c):
    return {"x": a, "y": b, "z": c}


def test_rational_scalars_move_across_the_tensor():
    assert TensorQQ.pure(mul(Const(2), x), y) == TensorQQ.pure(x, mul(Const(2), y))
    assert TensorQQ.pure(add(x, y), z) == TensorQQ.pure(x, z) + TensorQQ.pure(y, z)
    assert TensorQQ.pure(x, mul(Const(Fraction(1, 3)), y)).scale(3) == TensorQQ.pure(x, y)


def test_twists_stay_on_their_side():
    assert TensorQQ.pure(mul(TWO_PI_I, x), y) != TensorQQ.pure(x, mul(TWO_PI_I, y))
    assert TensorQQ.pure(mul(Const(1j), x), y) != TensorQQ.pure(x, mul(Const(1j), y))


def test_big_period_matches_closed_form():
    P = PeriodData()
    T = big_period(P)
    assert T == big_period_closed_form(P)
    assert mult_map(T).is_zero()


@given(complexes, complexes, complexes)
def test_big_period_against_numeric_oracle(a, b, c):
    T = big_period(PeriodData())
    got = functionals(T, env_of(a, b, c))
    want = pair_functionals(numeric_big_period(a, b, c))
    for k in want:
        assert got[k][0] == pytest.approx(want[k], abs=1e-9 * (1 + abs(want[k])))


def test_kahler_differential_rules():
    assert kahler_d(mul(x, y)) == kahler_d(x).times(y) + kahler_d(y).times(x)
    assert kahler_d(Const(Fraction(7, 3))).is_zero()
    assert not kahler_d(TWO_PI_I).is_zero()
    # as a form on the curve the 2 pi i generator is constant
    assert kahler_d(TWO_PI_I).to_form().is_zero()


def test_projections_of_the_big_period():
    P = PeriodData()
    T = big_period(P)
    assert project_kahler(T) == kahler_closed_form(P)
    rng = np.random.default_rng(0)
    for _ in range(10):
        env = env_of(*(complex(*rng.normal(size=2)) for _ in range(3)))
        a = evaluate(project_R1(T), 0.0, env)[0]
        b = evaluate(r1_closed_form(P), 0.0, env)[0]
        assert a == pytest.approx(b, abs=1e-12)


def test_kahler_projection_needs_the_kernel():
    with pytest.raises(NotInKernel):
        project_kahler(TensorQQ.pure(x, y))


def test_extension_class_exponentiates():
    P = PeriodData()
    E = extension_class(P)
    env = env_of(0.3 + 0.1j, -1.2 + 0.4j, 0.7 - 0.9j)
    got = sorted(E.e_exp_numeric(env), key=lambda p: (p[0].real, p[0].imag))
    want = sorted(((complex(evaluate(a, 0.0, env)[0]), complex(np.exp(evaluate(b, 0.0, env)[0])))
                   for a, b in extension_exp_closed_form(P)), key=lambda p: (p[0].real, p[0].imag))
    assert np.allclose(got, want)


def test_unique_lift():
    P = PeriodData()
    lift = unique_lift(P)
    assert mult_map(lift).is_zero()
    assert lift == big_period(P).side_product(TWO_PI_I, TWO_PI_I)


# logm probes a norm estimate that divides by zero when B = I
@pytest.mark.filterwarnings("ignore::RuntimeWarning")
@given(moderate, moderate, moderate)
def test_half_log_B(a, b, c):
    out = half_log_B(PeriodData(), env_of(a, b, c))
    assert out["unipotent_residual"] < 1e-8 * (1 + abs(a) + abs(b) + abs(c)) ** 4
    assert out["residual"] < 1e-9 * (1 + abs(a) + abs(b) + abs(c)) ** 2
    ref = 0.5 * scipy.linalg.logm(out["B"])
    assert np.allclose(ref, out["series"], atol=1e-8 * (1 + abs(a) + abs(b) + abs(c)) ** 2)


def test_lattice_invariance():
    assert q_invariance_check(trials=100, seed=3)["pass"]


def test_non_lattice_shift_is_detected():
    T = big_period(PeriodData())
    e0 = env_of(0.4 + 0.2j, -0.3 + 1j, 0.8j)
    e1 = dict(e0, x=e0["x"] + 0.5)
    f0, f1 = functionals(T, e0), functionals(T, e1)
    assert max(abs(f1[k][0] - f0[k][0]) for k in f0) > 1e-3


def test_heisenberg_cross_check():
    out = heisenberg_cross_check(points=50, seed=1)
    assert all(r["pass"] for r in out.values()), out


@given(st.integers(0, 10_000))
def test_tame_cross_check(seed):
    rng = np.random.default_rng(seed)
    T = tame_symbol(random_rational(rng, 2), random_rational(rng, 2), narrow_cover())
    for h in (Const(0), rat(parse_rational("z^2 - 3"))):
        out = tame_cross_check(T, h)
        assert all(r["pass"] for r in out.values()), out
