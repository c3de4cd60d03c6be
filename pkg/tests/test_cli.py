import json
import os

import jsonschema
import pytest

from serrehom import cli
from serrehom.errors import PrecisionExhausted
from serrehom.schemas import load

MODDIR = os.path.join(os.path.dirname(__file__), "..", "modules")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    assert code == 0 and out.endswith("\n")
    env = json.loads(out)
    jsonschema.validate(env, load("envelope"))
    return env


def test_order_info(capsys):
    code, out, _ = run(capsys, "order-info", "-D", "-16")
    assert code == 0 and "d=-1 f=2" in out and "[O_F:O]=2" in out
    code, out, _ = run(capsys, "order-info", "-D", "-4")
    assert code == 0 and "f=1" in out and "maximal" in out
    env = run_json(capsys, "order-info", "--d", "-3", "--f", "3")
    assert env["outputs"]["D"] == "-27"


@pytest.mark.parametrize("argv", [
    ["order-info", "-D", "-5"], ["order-info"], ["max-isogeny", "-D", "7"],
    ["class-poly", "-D", "-6"], ["hom", "--module", "nonexistent.mod", "-D", "-4"],
    ["order-info", "-D", "-16", "--d", "-1"], ["no-such-command"],
])
def test_input_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2


def test_max_isogeny(capsys):
    code, out, _ = run(capsys, "max-isogeny", "-D", "-16", "--certify-j")
    assert code == 0 and "degree 2" in out and "j(E) = 287496, j(E') = 1728" in out
    assert out.count("check: pass") == 2
    code, out, _ = run(capsys, "max-isogeny", "-D", "-4")
    assert code == 0 and "degree 1" in out
    env = run_json(capsys, "max-isogeny", "-D", "-27")
    cert = env["outputs"]
    jsonschema.validate(cert, load("isogeny_cert"))
    assert cert["degree"] == "3" and cert["kernel"]["invariants"] == ["3"]


def test_max_isogeny_json_certified(capsys):
    env = run_json(capsys, "max-isogeny", "-D", "-16", "--certify-j")
    cert = env["outputs"]
    jsonschema.validate(cert, load("isogeny_cert"))
    assert (cert["j_source"], cert["j_target"]) == ("1728", "287496")
    assert all(cert["checks"].values())


def test_json_deterministic_and_timing_optional(capsys):
    a = run(capsys, "max-isogeny", "-D", "-16", "--json")[1]
    b = run(capsys, "max-isogeny", "-D", "-16", "--json", "--threads", "3")[1]
    assert a == b and "timing" not in json.loads(a)
    env = json.loads(run(capsys, "max-isogeny", "-D", "-16", "--json", "--timing")[1])
    jsonschema.validate(env, load("envelope"))
    assert env["timing"]["seconds"] >= 0


def test_hom_builtins(capsys):
    env = run_json(capsys, "hom", "--module", "regular", "-D", "-4")
    assert env["outputs"]["dimension"] == 2 and env["outputs"]["equals_Res_E"]
    env = run_json(capsys, "hom", "--module", "unit", "-D", "-16")
    assert env["outputs"]["dimension"] == 1 and env["outputs"]["equals_E"]
    env = run_json(capsys, "hom", "--module", "maximal-quotient", "-D", "-16")
    out = env["outputs"]
    assert out["dimension"] == 0 and out["components"]["invariants"] == ["2"]
    code, text, _ = run(capsys, "hom", "--module", "regular", "-D", "-4", "--action", "trivial")
    assert code == 0 and "r=1 r'=1" in text


def test_hom_module_file(capsys, tmp_path):
    env = run_json(capsys, "hom", "--module", os.path.join(MODDIR, "unit_plus_regular.mod"), "-D", "-4")
    assert env["outputs"]["dimension"] == 3
    bad = tmp_path / "bad.mod"
    bad.write_text("ring: order D=-7\ngenerators: 1\n")
    assert run(capsys, "hom", "--module", str(bad), "-D", "-4")[0] == 2
    bad.write_text("generators: 1\nrelations:\n 1 + q\n")
    assert run(capsys, "hom", "--module", str(bad), "-D", "-4")[0] == 2


def test_class_poly(capsys):
    code, out, _ = run(capsys, "class-poly", "-D", "-15")
    assert code == 0 and out.strip() == "H_-15(x) = x^2 + 191025*x - 121287375"
    code, out, _ = run(capsys, "class-poly", "-D", "-3")
    assert out.strip() == "H_-3(x) = x"
    env = run_json(capsys, "class-poly", "-D", "-23", "--prec", "256")
    jsonschema.validate(env["outputs"], load("class_poly"))
    assert env["outputs"]["degree"] == 3


def test_precision_failure_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise PrecisionExhausted("forced")
    monkeypatch.setattr(cli, "hilbert_class_poly", boom)
    assert run(capsys, "class-poly", "-D", "-15")[0] == 3


def test_selftest(capsys, monkeypatch):
    code, out, _ = run(capsys, "selftest")
    assert code == 0 and "FAIL" not in out
    import serrehom.selftest as st
    monkeypatch.setattr(st, "run_selftest", lambda: [("forced", False)])
    assert run(capsys, "selftest")[0] == 4


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "serrehom", "order-info", "-D", "-16"], capture_output=True, text=True)
    assert r.returncode == 0 and "f=2" in r.stdout
