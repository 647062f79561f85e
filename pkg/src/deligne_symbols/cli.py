"""Command-line front end: build symbols, run the identity checks, write JSON-lines reports.

Every record has the fields check, identity, residual, tolerance, pass; records are
sorted by check id and followed by one summary record carrying the timestamp.
Exit status: 0 when every check passes, 1 on a failed check, 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from .bundle_data import (
    canonical_connection, connection_report, gerbe_shadow_checks, hh_cocycle_check,
    load_bundle, metrized_bundle_cocycle, z_power_family,
)
from .cover_nerve import SectorCover, branch_for, winding_loop
from .cech_engine import is_cocycle
from .errors import DeligneError
from .exact_algebra import RationalFunction, parse_rational, rf_valuation
from .form_calculus import Const, evaluate, mul
from .heisenberg_model import associativity_check, invariance_check, pullback_check
from .hodge_tate import (
    PeriodData, TensorQQ, big_period, big_period_closed_form, extension_class,
    extension_exp_closed_form, functionals, half_log_B, heisenberg_cross_check,
    kahler_closed_form, mult_map, numeric_big_period, pair_functionals, project_kahler,
    project_R1, q_invariance_check, r1_closed_form, tame_cross_check, unique_lift,
)
from .holonomy import DEFAULT_PANELS, tame_holonomy
from .symbols import (
    compatibility_obstruction, fl_metric_coboundary_residual, forgetful_images_agree,
    hermitian_symbol_fL, hermitian_symbol_LL, hermitian_tame_symbol, ll_metric_cocycle_residual,
    multiplicative_fL_residuals, multiplicative_LL_residuals, pic_cocycle,
    r2_coboundary_residual, r2_form, symbol_fL, symbol_LL, tame_multiplicative_residuals,
    tame_symbol,
)

__all__ = ["RunConfig", "main", "run", "build_parser", "SUITES"]

DEFAULT_F = "z"
DEFAULT_G = "z-3"
DEFAULT_COVER = "3,4.5,0.5,2"
WIDE_COVER = "4,5.0,0.5,2"
HOLONOMY_TOL = 1e-6
COVER_AGREEMENT_TOL = 1e-8
INVARIANCE_TOL = 1e-9


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    f: str = DEFAULT_F
    g: str = DEFAULT_G
    cover: str = DEFAULT_COVER
    bundles: list = field(default_factory=list)
    seed: int = 0
    tol: float = 1e-10
    steps: int = DEFAULT_PANELS
    out: str | None = None
    point: str | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError("tolerance must be positive")
        if self.steps < 1:
            raise InputError("steps must be positive")


# ---------------------------------------------------------------------------
# records


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def record(check: str, identity: str, residual, tol: float, passed: bool | None = None,
           **detail) -> dict:
    res = _num(residual)
    if passed is None:
        passed = res is not None and res < tol
    out = {"check": check, "identity": identity, "residual": res, "tolerance": tol,
           "pass": bool(passed)}
    if detail:
        out["detail"] = detail
    return out


def _from_dict(prefix: str, identities: dict, results: dict, tol: float) -> list[dict]:
    out = []
    for key, ident in identities.items():
        r = results[key]
        res = r["residual"] if isinstance(r, dict) else r
        out.append(record(f"{prefix}.{key}", ident, res, tol))
    return out


def parse_cover(text: str) -> SectorCover:
    """N,width,inner,outer (width in radians, exact decimals allowed)."""
    try:
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("expected N,width,inner,outer")
        N = int(parts[0])
        return SectorCover(0, float(parts[2]), float(parts[3]), N, Fraction(parts[1]))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad cover {text!r}: {exc}") from exc


def _rf(text: str) -> RationalFunction:
    R = parse_rational(text)
    if R.is_zero():
        raise InputError("function must be nonzero")
    return R


def _bundles(cfg: RunConfig, cover: SectorCover, count: int):
    if cfg.bundles:
        loaded = [load_bundle(p, cover) for p in cfg.bundles]
        while len(loaded) < count:
            loaded.append(loaded[-1])
        return loaded[:count]
    rng = np.random.default_rng(cfg.seed)
    return [z_power_family(cover, rng.integers(-2, 3, size=cover.N)) for _ in range(count)]


# ---------------------------------------------------------------------------
# suites


def suite_tame(cfg: RunConfig, cover: SectorCover) -> list[dict]:
    f, g = _rf(cfg.f), _rf(cfg.g)
    T = tame_symbol(f, g, cover)
    tol, seed = cfg.tol, cfg.seed
    out = [record("tame.cocycle", "D{f,g} = 0 in Z(2)_D", is_cocycle(T.cocycle, tol, seed=seed).max_residual, tol)]
    mult = tame_multiplicative_residuals(T, seed=seed)
    out += _from_dict("tame.multiplicative", {
        "form_transition": "omega_j - omega_i = 2 pi i dlog g^(-m_ij)",
        "transition_cocycle": "g^(-m) transitions multiply to 1",
    }, mult, tol)
    cross = tame_cross_check(T, seed=seed, tol=tol)
    out += _from_dict("tame.kahler_projection", {
        "connection": "Kahler image of big period = -connection / 2 pi i",
        "omega_slot": "Kahler image of big period = omega_i / (2 pi i)^2",
    }, cross, tol)
    out += suite_branches(cfg, cover, [f, g], "tame")
    out.append(_holonomy_record("tame.holonomy", f, g, cover, cfg.steps))
    return out


def suite_branches(cfg: RunConfig, cover: SectorCover, funcs, prefix: str) -> list[dict]:
    loop = winding_loop(cover)
    out = []
    for name, R in zip("fg", funcs):
        br = branch_for(R, cover)
        diff = abs(br.loop_sum(loop) - rf_valuation(R, cover.center))
        out.append(record(f"{prefix}.branches.{name}_loop_sum",
                          "sum of m_ij around the loop = valuation at p", diff, 0.5,
                          passed=diff == 0))
        out.append(record(f"{prefix}.branches.{name}_guard",
                          "branch rounding residual below guard", br.max_residual, br.guard))
    return out


def _holonomy_record(check, f, g, cover, steps) -> dict:
    H = tame_holonomy(f, g, cover, steps=steps)
    return record(check, "holonomy = (-1)^(v(f)v(g)) (f^v(g) / g^v(f))(p)",
                  H.relative_error, HOLONOMY_TOL, value=[H.value.real, H.value.imag],
                  target=None if H.target is None else H.target.text())


def suite_hermitian(cfg: RunConfig, cover: SectorCover) -> list[dict]:
    f, g = _rf(cfg.f), _rf(cfg.g)
    tol, seed = cfg.tol, cfg.seed
    T = tame_symbol(f, g, cover)
    H = hermitian_tame_symbol(f, g, cover)
    out = [
        record("hermitian.cocycle", "D<f,g> = 0 in Z(1) -> O -> E0",
               is_cocycle(H.cocycle, tol, seed=seed).max_residual, tol),
        record("hermitian.twisted_cocycle", "D(f u g) = 0 in Z(2) -> O -> E0(1)",
               is_cocycle(H.twisted, tol, seed=seed).max_residual, tol),
        record("hermitian.pic_cocycle", "D = 0 for the combined connection and metric cochain",
               is_cocycle(pic_cocycle(f, g, cover), tol, seed=seed).max_residual, tol),
    ]
    same = forgetful_images_agree(T, H)
    out.append(record("hermitian.same_bundle", "tame and hermitian symbols share c_ijk and log g_ij",
                      0.0 if same else 1.0, tol, passed=same))
    pb = pullback_check(T, H, seed=seed, tol=tol)
    out += _from_dict("hermitian.heisenberg_pullback", {
        "omega": "section pullback of omega = connection form",
        "rho": "section pullback of log rho = log length of the section",
        "rho_metric_slot": "pullback at h = 0 equals the metric slot",
    }, pb, tol)
    return out


def suite_holonomy(cfg: RunConfig, cover: SectorCover) -> list[dict]:
    f, g = _rf(cfg.f), _rf(cfg.g)
    out = [_holonomy_record("holonomy.value", f, g, cover, cfg.steps)]
    base = tame_holonomy(f, g, cover, steps=cfg.steps).value
    other = SectorCover(cover.center, cover.inner, cover.outer, 5, Fraction(11, 5))
    alt = tame_holonomy(f, g, other, steps=cfg.steps).value
    out.append(record("holonomy.cover_independence", "same holonomy on a five-sector cover",
                      abs(alt - base) / abs(base), COVER_AGREEMENT_TOL))
    r = cover.inner + 0.8 * (cover.outer - cover.inner)
    rad = tame_holonomy(f, g, cover, radius=r, steps=cfg.steps).value
    out.append(record("holonomy.radius_independence", "same holonomy on a larger loop",
                      abs(rad - base) / abs(base), COVER_AGREEMENT_TOL))
    return out


def suite_symbol_fl(cfg: RunConfig, cover: SectorCover) -> list[dict]:
    f = _rf(cfg.f)
    (L, _m), = _bundles(cfg, cover, 1)
    tol, seed = cfg.tol, cfg.seed
    out = [
        record("symbol_fl.cocycle", "D<f,L> = 0 in Z(2)_D",
               is_cocycle(symbol_fL(f, L), tol, seed=seed).max_residual, tol),
        record("symbol_fl.hermitian_cocycle", "D<f,L> = 0 in Z(1) -> O -> E0",
               is_cocycle(hermitian_symbol_fL(f, L), tol, seed=seed).max_residual, tol),
        record("symbol_fl.sigma_coboundary",
               "sigma_ij - sigma_ik + sigma_jk + m_ij log|g_jk| = 0",
               fl_metric_coboundary_residual(f, L, seed=seed), tol),
        record("symbol_fl.r2_coboundary", "delta of r2 data vanishes",
               r2_coboundary_residual(f, L, seed=seed), tol),
    ]
    out += _from_dict("symbol_fl.multiplicative", {
        "form_transition": "omega_jk - omega_ik + omega_ij = dlog h_ijk",
        "transition_cocycle": "h_ijk = g_jk^(-m_ij) is a Cech 2-cocycle",
    }, multiplicative_fL_residuals(f, L, seed=seed), tol)
    return out


def suite_symbol_ll(cfg: RunConfig, cover: SectorCover) -> list[dict]:
    (L, _), (Lp, _) = _bundles(cfg, cover, 2)
    tol, seed = cfg.tol, cfg.seed
    out = [
        record("symbol_ll.cocycle", "D<L,L'> = 0 in Z(2)_D",
               is_cocycle(symbol_LL(L, Lp), tol, seed=seed).max_residual, tol),
        record("symbol_ll.hermitian_cocycle", "D<L,L'> = 0 in Z(1) -> O -> E0",
               is_cocycle(hermitian_symbol_LL(L, Lp), tol, seed=seed).max_residual, tol),
        record("symbol_ll.metric_coboundary", "2 delta(sigma) = 2 log|h_ijkl|",
               ll_metric_cocycle_residual(L, Lp, seed=seed), tol),
    ]
    out += _from_dict("symbol_ll.multiplicative", {
        "form_transition": "delta(omega)_ijkl = dlog h_ijkl",
    }, multiplicative_LL_residuals(L, Lp, seed=seed), tol)
    return out


def suite_bundle(cfg: RunConfig, cover: SectorCover) -> list[dict]:
    (L, m), = _bundles(cfg, cover, 1)
    tol, seed = cfg.tol, cfg.seed
    out = [
        record("bundle.metrized_cocycle", "D(c, log g, 1/2 log rho) = 0",
               is_cocycle(metrized_bundle_cocycle(L, m), tol, seed=seed).max_residual, tol),
        record("bundle.hermitian_holomorphic_cocycle",
               "D = 0 in the full hermitian complex, imaginary curvature",
               hh_cocycle_check(L, m, tol, seed=seed).max_residual, tol),
    ]
    conn = canonical_connection(m, L, tol)
    out += _from_dict("bundle.canonical_connection", {
        "connection_transition": "xi_j - xi_i = dlog g_ij",
        "connection_real_part": "pi_0(xi_i) = 1/2 d log rho_i",
        "curvature_overlap": "curvature forms agree on overlaps",
    }, connection_report(L, m, conn, seed=seed, tol=tol), tol)
    out += _from_dict("bundle.gerbe", {
        "gerbe_metric": "rho_ij rho_jk = |g_ijk|^2 rho_ik",
        "gerbe_connection": "xi_jk - xi_ik + xi_ij = dlog g_ijk",
        "two_gerbe_metric": "delta(rho)_ijkl = |h_ijkl|^2",
    }, _gerbe(cover, seed, tol), tol)
    return out


def _gerbe(cover, seed, tol):
    res = gerbe_shadow_checks(cover, seed=seed, tol=tol)
    # without quadruple overlaps there is nothing to test for the 2-gerbe
    res.setdefault("two_gerbe_metric", {"residual": 0.0})
    return res


def suite_heisenberg(cfg: RunConfig, cover: SectorCover) -> list[dict]:
    seed = cfg.seed
    out = []
    for kind, ident in (("omega", "omega invariant under the integral lattice"),
                        ("rho", "log rho invariant under the integral lattice")):
        r = invariance_check(kind, trials=100, seed=seed, points=20, tol=cfg.tol)
        out.append(record(f"heisenberg.invariance.{kind}", ident, r["max_residual"], cfg.tol))
    a = associativity_check(seed=seed)
    out.append(record("heisenberg.associativity", "right action composes like matrices",
                      a["max_residual"], a["tolerance"]))
    return out


def _point(cfg: RunConfig, rng):
    if cfg.point:
        try:
            vals = [complex(p.replace(" ", "").replace("i", "j")) for p in cfg.point.split(",")]
        except ValueError as exc:
            raise InputError(f"bad point {cfg.point!r}") from exc
        if len(vals) != 3:
            raise InputError("point needs three complex numbers x,y,z")
        return [vals]
    return [rng.normal(size=3) * 2 + 1j * rng.normal(size=3) * 2 for _ in range(50)]


def suite_period(cfg: RunConfig, cover: SectorCover | None = None) -> list[dict]:
    tol = cfg.tol
    P = PeriodData()
    T = big_period(P, check=False)
    closed = big_period_closed_form(P)
    out = [
        record("period.big_period_structural", "pairing formula = four-term closed form",
               0.0 if T == closed else 1.0, tol, passed=T == closed, tensor=T.text()),
    ]
    m = mult_map(T)
    out.append(record("period.kernel_of_multiplication", "m(P) = 0", 0.0 if m.is_zero() else 1.0,
                      tol, passed=m.is_zero(), image=m.text()))
    K = project_kahler(T)
    ok = K == kahler_closed_form(P)
    out.append(record("period.kahler_projection_structural",
                      "a (x) b -> a db gives -d(z/(2 pi i)^2) + (x/2 pi i) d(y/2 pi i)",
                      0.0 if ok else 1.0, tol, passed=ok, form=K.text()))
    r1 = project_R1(T)
    ok = r1 == r1_closed_form(P)
    out.append(record("period.r1_projection_structural",
                      "a (x) b -> -pi_1(a) pi_0(b) gives -log rho / 2 pi i",
                      0.0 if ok else 1.0, tol, passed=ok, value=r1.text()))
    try:
        lift = unique_lift(P)
        lift_ok, lift_text = True, lift.text()
    except DeligneError as exc:
        lift_ok, lift_text = False, str(exc)
    out.append(record("period.unique_lift_structural", "e~ + (z/2 pi i) (x) 2 pi i = (2 pi i (x) 2 pi i) P",
                      0.0 if lift_ok else 1.0, tol, passed=lift_ok, tensor=lift_text))

    rng = np.random.default_rng(cfg.seed)
    pts = _point(cfg, rng)
    E = extension_class(P)
    tpi = Const(1, 1)
    lifted = E.e_tensor + TensorQQ.pure(mul(P.z, Const(1, -1)), tpi)
    num_res = kernel_res = lift_res = exp_res = hlb = 0.0
    for x, y, z in pts:
        env = {"x": x, "y": y, "z": z}
        pairs = numeric_big_period(x, y, z)
        num_res = max(num_res, _fdiff(pair_functionals(pairs), functionals(closed, env)))
        kernel_res = max(kernel_res, abs(sum(a * b for a, b in pairs)))
        t = 2j * np.pi
        scaled = pair_functionals([(t * a, t * b) for a, b in pairs])
        lift_res = max(lift_res, _fdiff(functionals(lifted, env), scaled))
        exp_res = max(exp_res, _exp_residual(E, P, env))
        hlb = max(hlb, half_log_B(P, env)["residual"])
    out += [
        record("period.big_period_numeric", "numeric pairing formula = closed form, four functionals", num_res, 1e-12),
        record("period.kernel_numeric", "m(P) = 0 numerically", kernel_res, 1e-12),
        record("period.unique_lift_numeric", "lift = (2 pi i (x) 2 pi i) P, four functionals", lift_res, 1e-10),
        record("period.extension_exp", "(Id (x) exp)(e~) matches the exponentiated closed form", exp_res, tol),
        record("period.half_log_B", "strictly lower part of the displayed matrix = 1/2 log B", hlb, tol),
    ]
    q = q_invariance_check(P, trials=100, seed=cfg.seed, tol=INVARIANCE_TOL)
    out.append(record("period.lattice_invariance", "P invariant under rational lattice shifts",
                      q["max_residual"], INVARIANCE_TOL))
    hc = heisenberg_cross_check(seed=cfg.seed, tol=tol)
    out += _from_dict("period.heisenberg", {
        "rho": "R1 image of P = -log rho / 2 pi i",
        "omega": "Kahler image of P = -omega / 2 pi i",
    }, hc, tol)
    return out


def _fdiff(a: dict, b: dict) -> float:
    return max(float(np.max(np.abs(np.asarray(a[k]) - np.asarray(b[k])))) for k in a)


def _exp_residual(E, P, env) -> float:
    """Compare moduli and arguments of left (x) exp(right) term by term."""
    got = {round(a.real, 12) + 1j * round(a.imag, 12): b for a, b in E.e_exp_numeric(env)}
    worst = 0.0
    for left, expo in extension_exp_closed_form(P):
        a = complex(evaluate(left, 0.0, env)[0])
        want = complex(evaluate(expo, 0.0, env)[0])
        b = got[round(a.real, 12) + 1j * round(a.imag, 12)]
        worst = max(worst, abs(math.log(abs(b)) - want.real),
                    abs(np.angle(b / np.exp(1j * want.imag))))
    return worst


def suite_obstruction(cfg: RunConfig, cover: SectorCover) -> list[dict]:
    f, g = _rf(cfg.f), _rf(cfg.g)
    r = compatibility_obstruction(f, g, cover, seed=cfg.seed, tol=cfg.tol)
    self_zero = r2_form(f, f).is_zero()
    return [
        record("obstruction.identity", "pi_1(omega_i) + d sigma_i + r2(f, g) = 0",
               r["identity_residual"], cfg.tol, r2_max=r["r2_max"], compatible=r["compatible"]),
        record("obstruction.r2_self", "r2(f, f) = 0 structurally", 0.0 if self_zero else 1.0,
               cfg.tol, passed=self_zero),
    ]


def suite_verify_all(cfg: RunConfig, cover: SectorCover) -> list[dict]:
    out = []
    for label, spec in (("narrow", cfg.cover), ("wide", WIDE_COVER)):
        cv = parse_cover(spec)
        for name in ("tame", "hermitian", "symbol-fl", "symbol-ll", "bundle", "obstruction"):
            for r in SUITES[name](cfg, cv):
                r["check"] = f"{label}.{r['check']}"
                out.append(r)
    out += suite_holonomy(cfg, cover)
    out += suite_heisenberg(cfg, cover)
    out += suite_period(cfg, cover)
    return out


SUITES = {
    "tame": suite_tame,
    "hermitian": suite_hermitian,
    "holonomy": suite_holonomy,
    "symbol-fl": suite_symbol_fl,
    "symbol-ll": suite_symbol_ll,
    "bundle": suite_bundle,
    "heisenberg": suite_heisenberg,
    "period": suite_period,
    "obstruction": suite_obstruction,
    "verify-all": suite_verify_all,
}


# ---------------------------------------------------------------------------
# entry points


def run(cfg: RunConfig) -> tuple[int, list[dict]]:
    """Run one subcommand; returns (exit status, sorted records + summary)."""
    cover = parse_cover(cfg.cover)
    records = sorted(SUITES[cfg.command](cfg, cover), key=lambda r: r["check"])
    failed = [r["check"] for r in records if not r["pass"]]
    summary = {
        "summary": f"{len(records) - len(failed)}/{len(records)} checks passed",
        "command": cfg.command, "failed": failed, "pass": not failed,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    return (0 if not failed else 1), records + [summary]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="deligne-symbols",
                                description="Construct and verify Cech-Deligne symbols.")
    p.add_argument("command", choices=sorted(SUITES))
    p.add_argument("--f", default=DEFAULT_F, help="first rational function of z")
    p.add_argument("--g", default=DEFAULT_G, help="second rational function of z")
    p.add_argument("--cover", default=DEFAULT_COVER, help="N,width,inner,outer")
    p.add_argument("--bundle", action="append", default=[], help="YAML bundle file (repeatable)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--steps", type=int, default=DEFAULT_PANELS, help="quadrature panels per arc")
    p.add_argument("--point", help="x,y,z for the period checks, e.g. 1+2i,0.5,-i")
    p.add_argument("--out", help="report path (default: stdout)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.f, args.g, args.cover, args.bundle, args.seed,
                        args.tol, args.steps, args.out, args.point)
        status, lines = run(cfg)
    except (InputError, DeligneError) as exc:
        err = {"check": "input", "error": type(exc).__name__, "message": str(exc), "pass": False}
        print(json.dumps(err), file=sys.stderr)
        return 2
    text = "".join(json.dumps(r, sort_keys=True) + "\n" for r in lines)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(lines[-1]["summary"], file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
