import json
import subprocess
import sys

import pytest

from nsverma.cli import run, verify_all
from nsverma.exactnum import format_rat, parse_rat


def ok(argv):
    code, out, err = run(argv)
    assert code == 0, err
    return out


def test_gram_symbolic_three_halves():
    data = json.loads(ok(["gram", "--level", "3/2", "--mode", "symbolic"]))
    assert data["basis"] == ["G(-1/2) L(-1)", "G(-3/2)"]
    e = data["entries"]
    as_set = lambda poly: {(t["dc"], t["dh"], t["coef"]) for t in poly}
    assert as_set(e[0][0]) == {(0, 1, "2"), (0, 2, "4")}
    assert as_set(e[0][1]) == as_set(e[1][0]) == {(0, 1, "4")}
    assert as_set(e[1][1]) == {(0, 1, "2"), (1, 0, "2/3")}


def test_gram_point_mode():
    data = json.loads(ok(["gram", "--level", "1", "--mode", "point", "--c", "1/2", "--h", "3"]))
    assert data["entries"] == [["6"]]
    code, _, err = run(["gram", "--level", "1", "--mode", "point"])
    assert code == 2 and "--c" in err


def test_kacdet_three_halves():
    data = json.loads(ok(["kacdet", "--level", "3/2", "--verify"]))
    assert data["A"] == "8" and data["verified"] is True
    assert data["factors"] == [{"exp": 1, "p": 1, "q": 1}, {"exp": 1, "p": 1, "q": 3}]


def test_kacdet_fault_injection():
    code, out, err = run(["--inject-fault", "phi", "kacdet", "--level", "3/2", "--verify"])
    assert code == 1
    assert json.loads(out)["verified"] is False


def test_classify_commands():
    data = json.loads(ok(["classify", "--c", "7/10", "--h", "1/10", "--max-level", "3"]))
    assert data == {"c": "7/10", "h": "1/10", "m": 3, "p": 1, "q": 3, "verdict": "unitary-discrete"}
    ghost = json.loads(ok(["classify", "--c", "1", "--h", "1/2"]))
    assert ghost["verdict"] == "ghost" and parse_rat(ghost["norm"]) < 0


def test_singular_command():
    data = json.loads(ok([
        "singular", "--c", "7/10", "--h", "1/10", "--term", "3:G(-3/2)", "--term", "-5:L(-1) G(-1/2)",
    ]))
    assert data["singular"] is True and data["level"] == "3/2"
    data = json.loads(ok(["singular", "--c", "1", "--h", "1", "--term", "1:L(-1)"]))
    assert data["singular"] is False
    assert run(["singular", "--c", "1", "--h", "1", "--term", "nonsense"])[0] == 2
    assert run(["singular", "--c", "1", "--h", "1", "--term", "1:Omega"])[0] == 2


def test_series_command():
    data = json.loads(ok(["series", "--kind", "mult", "--m", "3", "--p", "1", "--q", "3", "--order", "7/2"]))
    assert data["prefactor"] == "1/10-7/240"
    assert [t["coef"] for t in data["terms"]] == ["1", "1", "1", "1", "1", "2", "2"]
    csv_out = ok(["--format", "csv", "series", "--kind", "chi", "--order", "2"])
    assert csv_out.splitlines() == ["exp,coef", "0,1", "1/2,1", "1,1", "3/2,2"]
    assert run(["series", "--kind", "mult", "--m", "3"])[0] == 2


def test_discrete_command():
    data = json.loads(ok(["discrete", "--m-max", "3", "--dedupe"]))
    m3 = {(d["c"], d["h"]) for d in data if d["m"] == 3}
    assert m3 == {("7/10", "0"), ("7/10", "1/10")}
    rows = ok(["discrete", "--m-max", "3", "--emit-curves"]).splitlines()
    assert rows[0] == "m,c,h" and "3,7/10,1/10" in rows


def test_coset_and_census_commands():
    assert json.loads(ok(["coset", "--j", "1/2", "--ell", "1", "--order", "5"]))["ok"] is True
    assert json.loads(ok(["coset", "--frenkel", "--order", "6"]))["ok"] is True
    data = json.loads(ok(["census", "--m", "3", "--p", "1", "--q", "3", "--max-level", "2"]))
    assert [k["dim"] for k in data["kernel"]] == [0, 0, 1, 2]


@pytest.mark.parametrize("argv", [
    ["classify", "--c", "1/0", "--h", "1"],
    ["classify", "--c", "x", "--h", "1"],
    ["gram", "--level", "1/3"],
    ["gram", "--level", "1", "--bogus"],
    ["census", "--m", "3", "--p", "1", "--q", "2", "--max-level", "1"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(argv):
    code, out, err = run(argv)
    assert code == 2 and out == "" and err


def test_plain_and_csv_formats():
    plain = ok(["--format", "plain", "classify", "--c", "2", "--h", "5"])
    assert "verdict: unitary-continuum" in plain
    csv_out = ok(["--format", "csv", "kacdet", "--level", "2"])
    assert csv_out.splitlines()[0] == "p,q,exp"


def test_output_is_deterministic():
    argv = ["classify", "--c", "1", "--h", "1/32"]
    assert ok(argv) == ok(argv)
    a = ok(["verify-all", "--max-level", "1", "--order", "3", "--m-max", "4"])
    b = ok(["--threads", "3", "verify-all", "--max-level", "1", "--order", "3", "--m-max", "4"])
    assert a == b


def _rationals(obj):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k in ("c", "h", "coef", "exp", "norm", "level", "A", "order", "j"):
                if isinstance(v, str):
                    yield v
            yield from _rationals(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _rationals(v)


def test_json_rationals_roundtrip():
    outputs = [
        ok(["classify", "--c", "1", "--h", "1/32"]),
        ok(["series", "--kind", "chi", "--order", "4"]),
        ok(["gram", "--level", "2"]),
        ok(["kacdet", "--level", "2"]),
    ]
    seen = 0
    for text in outputs:
        for r in _rationals(json.loads(text)):
            assert format_rat(parse_rat(r)) == r
            seen += 1
    assert seen > 20


def test_verify_all_default_passes():
    rep = verify_all()
    assert rep["ok"]
    names = [r["name"] for r in rep["items"]]
    assert names[-1] == "product-erratum"
    assert rep["items"][-1]["status"] == "expected-discrepancy"
    assert all(r["status"] == "pass" for r in rep["items"][:-1])


def test_verify_all_fault_injection():
    code, out, err = run(["--inject-fault", "phi", "verify-all"])
    assert code == 1 and "kacdet" in err
    items = {r["name"]: r["status"] for r in json.loads(out)["items"]}
    assert items["kacdet"] == "fail"
    assert items["jacobi"] == "pass"


def test_verify_all_reduced():
    out = ok(["verify-all", "--max-level", "1/2"])
    assert json.loads(out)["ok"] is True


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "nsverma.cli", "classify", "--c", "7/10", "--h", "1/10"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "unitary-discrete"
