import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from qexptheta import cli, laplace
from qexptheta.cli import COLUMNS, main
from qexptheta.dioph import best_hits, chebyshev_hits, parse_scale


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_example(capsys):
    code, out, _ = run(capsys, "eval", "q=0.5", "t=1", "n=1", "u=1,0")
    assert code == 0
    (row,) = rows(out)
    assert row["lhs_re"].startswith("+7.795153006939")
    assert float(row["rel_diff"]) <= 1e-60


def test_theta_example(capsys):
    code, out, _ = run(capsys, "theta", "z=1,0", "q=0.5")
    assert code == 0
    (row,) = rows(out)
    assert row["series_re"].startswith("+3.0107673911595")
    assert float(row["rel_diff"]) <= 1e-60


def test_hits_example(capsys):
    code, out, _ = run(capsys, "hits", "t=sqrt:2", "beta=0", "n_max=30")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == list(COLUMNS["hits"])
    row = next(r for r in table if r["n"] == "29")
    assert row["m"] == "41" and row["gamma"].startswith("+1.21933")
    assert row["floor_flag"] == "true"


def test_hits_rational(capsys):
    code, out, _ = run(capsys, "hits", "t=3/2", "lambda=1/2", "count=3")
    assert code == 0
    assert [(r["n"], r["m"]) for r in rows(out)] == [("1", "1"), ("3", "4"), ("5", "7")]


def test_verify_rational_example(capsys):
    code, out, _ = run(capsys, "verify-rational", "q=0.5", "u=1,0", "t=3/2", "lambda=1/2", "count=8")
    assert code == 0
    table = rows(out)
    assert len(table) == 8 and list(table[0]) == list(COLUMNS["verify-rational"])
    assert all(float(r["ratio"]) <= 1 for r in table if int(r["m"]) >= 12)


def test_verify_irrational(capsys):
    code, out, _ = run(capsys, "verify-irrational", "q=0.4", "u=1,1", "t=golden", "beta=0.3", "n_max=300", "count=5")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == list(COLUMNS["verify-irrational"])
    hits = best_hits(chebyshev_hits(parse_scale("golden"), Fraction(3, 10), 300), 5)
    assert [int(r["n"]) for r in table] == [h.n for h in hits]
    assert [int(r["m"]) for r in table] == [h.m for h in hits]


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "q=1/2", "t=3/2", "lambda=0", "count=7")
    assert code == 0
    last = rows(out)[-1]
    assert (last["n"], last["m"]) == ("14", "21")
    assert float(last["abs_r1"]) <= float(last["bound1"])
    assert float(last["abs_r2"]) <= float(last["bound2"])


def test_identities_and_limit(capsys):
    code, out, _ = run(capsys, "identities", "q=0.9", "z=0.5,0.25", "a=2,-1")
    assert code == 0
    assert {r["check"] for r in rows(out)} == {"euler", "triple_product", "q_binomial"}
    code, out, _ = run(capsys, "limit-q1", "z=3,2")
    assert code == 0
    table = rows(out)
    devs = [float(r["deviation"]) for r in table]
    assert all(a > b for a, b in zip(devs, devs[1:]))
    assert all(r["bound_ok"] == "true" for r in table)


def test_json_output_and_config_override(tmp_path, capsys):
    config = tmp_path / "scenario.json"
    config.write_text(json.dumps({"q": "0.5", "u": "1,0", "t": "3/2", "lambda": "1/2", "count": 2, "bits": 128}))
    out = tmp_path / "report.json"
    code = main(["verify-rational", "--config", str(config), "count=3", "--format", "json", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["bits"] == 128 and len(doc["rows"]) == 3
    assert doc["rows"][0]["n"] == 1 and doc["failures"] == []


def test_bits_from_environment(monkeypatch, capsys):
    monkeypatch.setenv(cli.BITS_ENV, "96")
    code, out, _ = run(capsys, "theta", "z=2", "q=1/3", "--format", "json")
    assert code == 0 and json.loads(out)["bits"] == 96
    code, out, _ = run(capsys, "theta", "z=2", "q=1/3", "--format", "json", "--bits", "128")
    assert json.loads(out)["bits"] == 128


@pytest.mark.parametrize(
    "args,field",
    [
        (["eval", "q=2", "t=1", "n=1"], "q"),
        (["eval", "q=0.5", "t=1", "n=zero"], "n"),
        (["eval", "q=0.5", "t=1"], "n"),
        (["verify-rational", "q=0.5", "t=3/2", "lambda=1/3"], "lambda"),
        (["verify-rational", "q=0.5", "t=3/2", "u=0"], "u"),
        (["hits", "t=1.4142135623730951", "n_max=2000"], "t"),
        (["hits", "t=sqrt:4", "n_max=20"], "t"),
        (["theta", "z=1", "q=0.5", "--bits", "32"], "bits"),
        (["theta", "z=1", "q=0.5", "junk"], "junk"),
        (["verify-irrational", "q=0.5", "t=3/2"], "t"),
    ],
)
def test_malformed_config_names_field(capsys, args, field):
    code, _, err = run(capsys, *args)
    assert code == 1
    assert f"field {field}:" in err


def test_short_literal_allowed_for_small_scans(capsys):
    code, out, _ = run(capsys, "hits", "t=1.4142135623730951", "n_max=30")
    assert code == 0 and any(r["n"] == "29" for r in rows(out))


def test_unknown_command_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nope"])
    assert exc.value.code == 1


def test_failed_check_exits_2(capsys, monkeypatch):
    monkeypatch.setattr(laplace, "rational_bound", lambda s, m, ctx: ctx.mp.mpf("1e-300"))
    code, _, err = run(capsys, "verify-rational", "q=0.5", "t=3/2", "count=8")
    assert code == 2 and "ratio" in err


def test_precision_insufficient_exits_3(capsys):
    code, _, err = run(capsys, "verify-rational", "q=0.3", "t=3/2", "n_min=200", "count=1", "--bits", "64")
    assert code == 3 and "noise floor" in err


def test_output_is_deterministic(tmp_path):
    args = ["verify-irrational", "q=0.6", "u=1,1", "t=sqrt:2", "beta=0.77", "n_max=400", "count=6"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(first)]) == 0
    assert main(args + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qexptheta", "theta", "z=1", "q=1/2", "--digits", "6"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].startswith("+3.01077e+000")
