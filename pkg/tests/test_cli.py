import csv
import io
import json

import pytest

from mahlerlab import harness
from mahlerlab.cli import main, parse_number
from mahlerlab.numkit import precision


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--format", "json")
    return code, json.loads(text)


def test_parse_number():
    assert parse_number("0.5") == 0.5
    assert parse_number("-0.3+0.2i") == complex(-0.3, 0.2)
    assert parse_number("2j") == 2j
    assert parse_number("1+0i") == 1.0


def test_eval_auto_agrees():
    code, d = run_json("eval", "--family", "mu", "--t", "0.1")
    assert code == 0
    assert d["value"] == pytest.approx(2.524718069331928, abs=1e-12)
    assert set(d["routes"]) == {"qseries", "integral"}
    assert d["route_spread"] < 1e-10


@pytest.mark.parametrize("method", harness.METHODS)
def test_eval_methods(method):
    code, d = run_json("eval", "--family", "mu", "--t", "0.3", "--method", method)
    assert code == 0 and d["method"] == method
    assert d["value"] == pytest.approx(1.947082843459298, abs=1e-7)


def test_eval_k_and_q():
    code, d = run_json("eval", "--family", "mu", "--k", "2")
    assert code == 0 and d["value"] == pytest.approx(0.5114240670535037, abs=1e-11)
    assert "qseries" in d["skipped"]
    code, d = run_json("eval", "--family", "g", "--q", "0.03", "--method", "qseries")
    assert code == 0 and d["value"] == pytest.approx(3.5388145539480375, abs=1e-12)


def test_eval_k_zero():
    code, d = run_json("eval", "--family", "mu", "--k", "0")
    assert code == 0 and abs(d["value"]) < 1e-12


def test_eval_domain_errors():
    assert run("eval", "--family", "n", "--k", "2")[0] == 2
    assert run("eval", "--family", "mu", "--t", "0", "--method", "qseries")[0] == 2
    assert run("eval", "--family", "r", "--t", "0.5", "--method", "hyp")[0] == 2


def test_eval_extended_digits():
    code, d = run_json("--prec", "extended", "eval", "--family", "mu", "--t", "0.1", "--method", "qseries")
    assert code == 0
    assert d["value_str"].startswith("2.52471806933192802144915617407")
    assert precision().name == "double"


def test_dump_grid(tmp_path):
    path = tmp_path / "grid.csv"
    code, _ = run("eval", "--family", "mu", "--k", "8", "--dump-grid", str(path), "--grid-n", "256")
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["theta", "integrand"] and len(rows) == 257
    mean = sum(float(r[1]) for r in rows[1:]) / 256
    assert mean == pytest.approx(2.045696268214015, abs=1e-9)


def test_verify_single_and_json_roundtrip():
    code, text = run("verify", "--id", "KO", "--format", "json")
    assert code == 0
    (r,) = harness.reports_from_json(text)
    assert r.id == "KO" and r.passed and len(r.samples) == 5


def test_verify_plain_and_csv():
    code, text = run("verify", "--id", "BOYD5")
    assert code == 0 and text.startswith("PASS BOYD5 (conjectural)")
    code, text = run("verify", "--id", "OMEGA_FE", "--format", "csv")
    assert code == 0 and text.splitlines()[0].startswith("id,n_samples")


def test_verify_failure_exit():
    assert run("verify", "--id", "BOYD8", "--tol", "0")[0] == 1
    # a failing conjectural check does not fail the run
    assert run("verify", "--id", "BOYD5", "--tol", "0")[0] == 0


def test_verify_unimplemented_and_unknown():
    assert run("verify", "--id", "R_P11")[0] == 2
    assert run("verify", "--id", "nope")[0] == 2


def test_verify_modular():
    code, text = run("verify", "--id", "QUINTIC_RR", "--q", "0.05", "--format", "json")
    assert code == 0 and harness.reports_from_json(text)[0].passed


def test_verify_all():
    code, text = run("verify", "--all", "--format", "json")
    assert code == 0
    ids = {r.id for r in harness.reports_from_json(text)}
    assert "G3_MODPOLY" in ids and "CLASSICAL_DEG2" in ids


def test_lfun():
    code, d = run_json("lfun", "--k2", "18", "--deriv0")
    assert code == 0 and d["conductor"] == 24
    assert d["lprime_at_0"] == pytest.approx(0.5114240670535036, abs=1e-12)
    code, d = run_json("lfun", "--k2", "32")
    assert d["l_at_2"] == pytest.approx(1.658664498381914 * 4 * 3.141592653589793 ** 2 / 64, rel=1e-12)


def test_lfun_errors(tmp_path):
    assert run("lfun", "--k2", "18", "--deriv0", "--terms", "5")[0] == 3
    assert run("lfun", "--k2", "16")[0] == 2
    assert run("lfun", "--k2", "7")[0] == 2
    # a failed functional-equation test is a convergence failure
    assert run("lfun", "--k2", "32", "--conductor", "32")[0] == 3
    code, _ = run("lfun", "--k2", "1", "--deriv0", "--cache-dir", str(tmp_path))
    assert code == 0 and (tmp_path / "k2_1.txt").exists()


def test_nome():
    code, d = run_json("nome", "--j", "2", "--alpha", "0.1")
    assert code == 0 and d["q"] == pytest.approx(0.00658465155385837027, rel=1e-14)
    code, d = run_json("nome", "--j", "2", "--alpha", "0.1", "--method", "direct")
    assert d["q"] == pytest.approx(0.00658465155385837027, rel=1e-12)
    code, d = run_json("nome", "--j", "2", "--alpha=-0.3+0.2i")
    assert code == 0 and len(d["q"]) == 2
    code, d = run_json("nome", "--family", "g", "--alpha", "0.1")
    assert code == 0
    assert run("nome", "--j", "2", "--alpha", "1.5")[0] == 2
    assert run("nome", "--alpha", "0.1")[0] == 2
