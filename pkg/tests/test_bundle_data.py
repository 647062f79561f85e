import numpy as np
import pytest
import yaml
from hypothesis import given, strategies as st

from conftest import narrow_cover, random_rational, wide_cover
from deligne_symbols.bundle_data import (
    HermitianMetricData, LineBundleData, MetricFactor, canonical_connection, connection_report,
    gerbe_shadow_checks, hh_cocycle_check, load_bundle, metrized_bundle_cocycle, z_power_family,
)
from deligne_symbols.cech_engine import is_cocycle
from deligne_symbols.errors import InvalidCover, MetricIncompatible, ParseError

seeds = st.integers(0, 10_000)


def coboundary_bundle(rng, cover):
    """g_ij = R_j / R_i with rho_i = |R_i|^2, so the metric is compatible by construction."""
    R = [random_rational(rng, max_val=2) for _ in range(cover.N)]
    trans = {(i, j): R[j] / R[i] for i in range(cover.N) for j in range(i + 1, cover.N)}
    L = LineBundleData(cover, trans)
    m = HermitianMetricData(cover, {i: [MetricFactor(R[i], 1)] for i in range(cover.N)})
    return L, m


@given(seeds)
def test_z_power_family_is_consistent(seed):
    rng = np.random.default_rng(seed)
    for cv in (narrow_cover(), wide_cover()):
        b = rng.integers(-2, 3, size=cv.N)
        L, m = z_power_family(cv, b)
        assert m.compatibility_residual(L, seed=seed) < 1e-10
        rep = connection_report(L, m, canonical_connection(m, L))
        assert all(r["pass"] for r in rep.values()), rep


@given(seeds)
def test_coboundary_bundles_give_cocycles(seed):
    rng = np.random.default_rng(seed)
    cv = narrow_cover()
    L, m = coboundary_bundle(rng, cv)
    assert is_cocycle(L.cocycle()).passed
    assert is_cocycle(metrized_bundle_cocycle(L, m)).passed
    assert hh_cocycle_check(L, m).passed


def test_chern_integers_are_integers():
    cv = wide_cover()
    L, _ = z_power_family(cv, [2, -1, 0, 1])
    ints = L.chern_integers()
    assert set(ints) == {(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)}
    assert all(isinstance(v, int) for vs in ints.values() for v in vs)


def test_trivial_bundle():
    cv = narrow_cover()
    L = LineBundleData.trivial(cv)
    assert L.is_trivial()
    assert all(v == (0,) * len(v) for v in L.chern_integers().values())


def test_transition_cocycle_is_enforced():
    cv = narrow_cover()
    with pytest.raises(InvalidCover):
        LineBundleData(cv, {(0, 1): "z", (1, 2): "z", (0, 2): "z"})


def test_transition_zero_in_annulus_is_rejected():
    with pytest.raises(InvalidCover):
        LineBundleData(narrow_cover(), {(0, 1): "z-1", (0, 2): "z-1"})


def test_incompatible_metric_raises():
    cv = narrow_cover()
    L, _ = z_power_family(cv, [0, 1, 2])
    wrong = HermitianMetricData.trivial(cv)
    with pytest.raises(MetricIncompatible):
        canonical_connection(wrong, L)


@pytest.mark.parametrize("make", [narrow_cover, wide_cover])
def test_gerbe_shadows(make):
    out = gerbe_shadow_checks(make(), seed=3)
    assert all(r["pass"] for r in out.values()), out
    assert ("two_gerbe_metric" in out) == (make is wide_cover)


def test_load_bundle_from_exponents(tmp_path):
    p = tmp_path / "b.yaml"
    p.write_text(yaml.safe_dump({"exponents": [1, 0, -1]}))
    L, m = load_bundle(p, narrow_cover())
    L2, _ = z_power_family(narrow_cover(), [1, 0, -1])
    assert L.g == L2.g


def test_load_bundle_with_transitions(tmp_path):
    doc = {
        "cover": narrow_cover().to_config(),
        "transitions": [[0, 1, "z^2"], [1, 2, "z-3"], [0, 2, "z^2*(z-3)"]],
        "metric": {0: [], 1: [["z", 2]], 2: [["z", 2], ["z-3", 1]]},
    }
    p = tmp_path / "b.yaml"
    p.write_text(yaml.safe_dump(doc))
    L, m = load_bundle(p)
    assert m.check_compatible(L) < 1e-10


def test_load_bundle_errors(tmp_path):
    p = tmp_path / "b.yaml"
    p.write_text("- just a list\n")
    with pytest.raises(ParseError):
        load_bundle(p, narrow_cover())
    with pytest.raises(ParseError):
        load_bundle(tmp_path / "missing.yaml", narrow_cover())
    p.write_text("exponents: [0, 0, 0]\n")
    with pytest.raises(ParseError):
        load_bundle(p)
