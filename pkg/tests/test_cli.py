import io
import json

import pytest

from algdegen.cli import EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, run
from algdegen.config import ENV_BUDGET, budget_from_env


def _run(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_verify_suites():
    code, out = _run("verify", "--table", "a3")
    lines = out.splitlines()
    assert code == EXIT_OK and len(lines) == 15
    assert all(ln.startswith("PASS\t") for ln in lines)
    code, out = _run("verify", "--table", "all")
    assert code == EXIT_OK


def test_verify_file_failure(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("name = bad\nsource = L3\ntarget = L2\nE1 = e1\nE2 = e2\nE3 = e3\n")
    code, out = _run("verify", "--file", str(f))
    assert code == EXIT_FAIL and out.startswith("FAIL\t")


def test_info():
    code, out = _run("info", "L6", "--param", "alpha=1")
    assert code == EXIT_OK and "Der = 4" in out
    code, out = _run("info", "L2")
    assert "not standard" in out


def test_usage_errors():
    assert _run("info", "nope")[0] == EXIT_USAGE
    assert _run("info", "L6", "--param", "beta=1")[0] == EXIT_USAGE
    assert _run("verify", "--table", "zz")[0] == EXIT_USAGE
    assert _run("frobnicate")[0] == EXIT_USAGE
    assert _run("verify", "--table", "a3", "--bogus")[0] == EXIT_USAGE


def test_nondegen():
    code, out = _run("nondegen", "L5", "g1")
    assert code == EXIT_OK and "RESULT\tL5->g1\tblocked by rset R(L5)" in out
    code, out = _run("nondegen", "L9", "L8")
    assert code == EXIT_OK and out.startswith("DEGEN")
    code, out = _run("nondegen", "A2", "A3")
    assert code == EXIT_INCONCLUSIVE and "unresolved" in out


def test_components_and_graph(tmp_path):
    code, out = _run("components", "--variety", "leib3")
    assert code == EXIT_OK and len(out.splitlines()) == 5
    dot = tmp_path / "g.dot"
    code, out = _run("graph", "--variety", "leib3", "--dot", str(dot))
    assert code == EXIT_OK and dot.read_text().startswith('digraph "leib3"')
    _, again = _run("graph", "--variety", "leib3")
    assert out == again


def test_identify(tmp_path):
    f = tmp_path / "a.txt"
    f.write_text("dim = 3\ne1*e3 = e1\ne2*e3 = e1 + e2\n")
    code, out = _run("identify", str(f))
    assert code == EXIT_OK and out.strip() == f"MATCH\t{f}\tL7"


def test_stability_and_json(tmp_path):
    js = tmp_path / "r.json"
    code, out = _run("--json", str(js), "stability", "--rset", "l4")
    assert code == EXIT_OK and out.startswith("STABLE")
    data = json.loads(js.read_text())
    assert data["exit"] == 0 and data["records"][0]["status"] == "STABLE"


def test_catalog_dump():
    code, out = _run("catalog", "--variety", "acom3")
    assert code == EXIT_OK and "mode = anticommutative" in out


def test_budget_env(monkeypatch):
    monkeypatch.setenv(ENV_BUDGET, "pairs=10,seconds=2.5")
    b = budget_from_env()
    assert b.max_pairs == 10 and b.max_seconds == 2.5
    monkeypatch.setenv(ENV_BUDGET, "foo=1")
    with pytest.raises(ValueError):
        budget_from_env()


def test_graph_reports_unresolved_pairs():
    code, out = _run("graph", "--variety", "acom3")
    assert code == 3
    lines = [l for l in out.splitlines() if l.startswith("UNRESOLVED")]
    assert len(lines) == 5 and any("A2->A3" in l for l in lines)
