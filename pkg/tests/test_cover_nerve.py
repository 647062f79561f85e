import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import narrow_cover, random_rational, wide_cover
from deligne_symbols.cover_nerve import (
    LogBranchAssignment, SectorCover, branch_for, build_nerve, sample_points, winding_loop,
)
from deligne_symbols.errors import InvalidCover, OutOfChart
from deligne_symbols.exact_algebra import GaussianRational, parse_rational, rf_valuation


def test_config_round_trip():
    cv = SectorCover(GaussianRational(1, 1), 0.25, 1.5, 5, "2.2", seed=7)
    assert SectorCover.from_config(cv.to_config()) == cv


@pytest.mark.parametrize("args", [
    (0, 0.5, 2.0, 3, "2.0"),    # N * width <= 2 pi
    (0, 2.0, 0.5, 3, "4.5"),    # inner >= outer
    (0, 0.5, 2.0, 0, "4.5"),
])
def test_invalid_covers(args):
    with pytest.raises(InvalidCover):
        SectorCover(*args)


def test_nerve_of_three_sectors():
    nerve = {s.indices: s for s in build_nerve(narrow_cover(), 2)}
    assert set(nerve) == {(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)}


def test_wide_cover_has_a_quadruple_overlap():
    nerve = {s.indices for s in build_nerve(wide_cover(), 3)}
    assert (0, 1, 2, 3) in nerve


@pytest.mark.parametrize("make", [narrow_cover, wide_cover])
def test_samples_lie_in_every_sector_of_the_simplex(make):
    cv = make()
    for s in build_nerve(cv, cv.N - 1):
        w = sample_points(cv, s, 15, seed=3)
        r = np.abs(w - cv.p)
        assert np.all((r > cv.inner) & (r < cv.outer))
        for k in s.indices:
            assert np.all(cv.contains(k, w))


def test_samples_are_seeded():
    cv = narrow_cover()
    a = sample_points(cv, (0, 1), 5, seed=11)
    b = sample_points(cv, (0, 1), 5, seed=11)
    assert np.array_equal(a, b)


def test_function_with_zero_in_annulus_is_rejected():
    with pytest.raises(InvalidCover):
        branch_for(parse_rational("z-1"), narrow_cover())


def test_branches_differ_by_exact_integers():
    cv = narrow_cover()
    br = branch_for(parse_rational("z^2/(z-3)"), cv)
    for s in build_nerve(cv, 1):
        if s.dim != 1:
            continue
        w = sample_points(cv, s, 20, seed=1)
        turns = (br.log(s.indices[1], w) - br.log(s.indices[0], w)) / (2j * np.pi)
        assert np.allclose(turns, np.round(turns.real), atol=1e-12)
        assert np.array_equal(br.jump(*s.indices, w), np.round(turns.real).astype(int))


def test_log_is_a_branch_of_log():
    cv = wide_cover()
    f = parse_rational("(z+4)*z^-3")
    br = branch_for(f, cv)
    w = sample_points(cv, (2,), 10, seed=0)
    assert np.allclose(np.exp(br.log(2, w)), f(w))


def test_log_outside_sector():
    cv = narrow_cover()
    br = branch_for(parse_rational("z"), cv)
    with pytest.raises(OutOfChart):
        br.log(0, np.array([-1.0 + 0j]))


@given(st.integers(0, 10_000))
def test_loop_sum_is_the_valuation(seed):
    rng = np.random.default_rng(seed)
    f = random_rational(rng)
    for cv in (narrow_cover(), wide_cover()):
        br = LogBranchAssignment(f, cv)
        assert br.loop_sum(winding_loop(cv)) == rf_valuation(f, cv.center)
        assert br.max_residual < br.guard


def test_loop_geometry():
    cv = wide_cover()
    loop = winding_loop(cv)
    assert loop.total_angle() == pytest.approx(2 * np.pi)
    assert [a for a, _, _ in loop.switches()] == [0, 1, 2, 3]
    with pytest.raises(InvalidCover):
        winding_loop(cv, r=5.0)
