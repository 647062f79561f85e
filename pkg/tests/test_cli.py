import json
import subprocess
import sys

import pytest
import yaml

from deligne_symbols.cli import SUITES, RunConfig, InputError, main, parse_cover, run


def _lines(capsys):
    out = capsys.readouterr().out
    return [json.loads(line) for line in out.splitlines()]


def test_tame_report(capsys):
    assert main(["tame", "--f", "z", "--g", "2"]) == 0
    recs = _lines(capsys)
    hol = next(r for r in recs if r["check"] == "tame.holonomy")
    re, im = hol["detail"]["value"]
    assert re == pytest.approx(0.5, abs=1e-8) and abs(im) < 1e-8
    summary = recs[-1]
    assert summary["pass"] and "timestamp" in summary
    checks = [r["check"] for r in recs[:-1]]
    assert checks == sorted(checks)
    for r in recs[:-1]:
        assert {"check", "identity", "residual", "tolerance", "pass"} <= set(r)


@pytest.mark.parametrize("command", sorted(set(SUITES) - {"verify-all"}))
def test_every_subcommand_passes(command):
    status, recs = run(RunConfig(command))
    assert status == 0, [r for r in recs if not r.get("pass")]


def test_reports_are_deterministic(tmp_path):
    paths = [tmp_path / "a.jsonl", tmp_path / "b.jsonl"]
    for p in paths:
        assert main(["hermitian", "--seed", "4", "--out", str(p)]) == 0
    a, b = (p.read_text().splitlines()[:-1] for p in paths)
    assert a == b


@pytest.mark.parametrize("argv", [
    ["tame", "--f", "z+"],
    ["tame", "--cover", "3,1.0,0.5,2"],
    ["tame", "--cover", "three"],
    ["tame", "--g", "z-1"],
    ["tame", "--tol", "-1"],
    ["period", "--point", "1,2"],
])
def test_bad_input_exits_2(argv, capsys):
    assert main(argv) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["pass"] is False


def test_bundle_files(tmp_path, capsys):
    paths = []
    for k, b in enumerate([[1, 0, -1], [0, 2, 1]]):
        p = tmp_path / f"b{k}.yaml"
        p.write_text(yaml.safe_dump({"exponents": b}))
        paths += ["--bundle", str(p)]
    assert main(["symbol-ll", *paths]) == 0
    assert _lines(capsys)[-1]["pass"]


def test_period_at_a_given_point(capsys):
    assert main(["period", "--point", "1+2i,0.5,-i"]) == 0


def test_parse_cover():
    cv = parse_cover("5,2.2,0.25,1.5")
    assert cv.N == 5 and cv.inner == 0.25
    with pytest.raises(InputError):
        parse_cover("5,2.2")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "deligne_symbols", "obstruction", "--f", "z^2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "checks passed" in proc.stderr
