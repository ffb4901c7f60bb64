import io
import json
import subprocess
import sys

import pytest

from dglift.fixtures import FIXTURES
from dglift.frontend.cli import VERBS, run_command


@pytest.fixture
def docs(tmp_path):
    out = {}
    for name, text in FIXTURES.items():
        p = tmp_path / f"{name}.dg"
        p.write_text(text)
        out[name] = str(p)
    return out


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv, "--json")
    return code, (json.loads(out) if out else None), (json.loads(err) if err else None)


def test_validate(docs):
    code, rep, _ = run_json("validate", docs["K1"])
    assert code == 0 and rep["valid"] is True
    code, text, _ = run("validate", docs["K1"])
    assert code == 0 and "valid: yes" in text


def test_lift_k1(docs, tmp_path):
    w = tmp_path / "cert.json"
    code, rep, _ = run_json("lift", docs["K1"], "--module", "N", "--witness", str(w))
    assert code == 0
    assert rep["verdict"] == "not-liftable"
    assert rep["certificate"]["row"] == {"e1 @ e0⊗x": "1"}
    assert all(c["ok"] for c in rep["checks"])
    saved = json.loads(w.read_text())
    assert saved["verdict"] == "not-liftable" and saved["witness_f"] is None


def test_lift_k2_text(docs):
    code, text, _ = run("lift", docs["K2"])
    assert code == 0
    assert "verdict: liftable" in text
    assert "[FAIL]" not in text and "[ok]" in text


def test_atiyah_on_free_module(docs):
    code, rep, _ = run_json("atiyah", docs["free"])
    assert code == 0 and rep["zero"] is True
    assert set(rep["alpha"].values()) == {"0"}


@pytest.mark.parametrize("verb", ["atiyah", "ks", "fesox", "h0nu", "omega"])
def test_verbs_succeed(docs, verb):
    code, rep, _ = run_json(verb, docs["K2"])
    assert code == 0 and isinstance(rep, dict)


def test_ks_uses_declared_derivations(tmp_path):
    p = tmp_path / "d.dg"
    p.write_text(FIXTURES["K1"] + "derivation E deg 0\n  image x = x\n")
    code, rep, _ = run_json("ks", str(p))
    assert code == 0 and set(rep["values"]) == {"E"}


def test_fesox_json_keys(docs):
    code, rep, _ = run_json("fesox", docs["K1"])
    assert code == 0
    assert rep["verdict"] == "fails"
    for key in ("hypotheses", "conditions", "witness_f", "witness_psi", "witness_h", "certificate", "checks", "notes"):
        assert key in rep


def test_fesox_experiment():
    code, rep, _ = run_json("fesox", "--experiment", "5", "--profile", "tiny")
    assert code == 0 and sum(rep["table"].values()) == 5


def test_exactseq(docs):
    code, rep, _ = run_json("exactseq", docs["K1"], "--along", "Omega", "--degrees=-2..1")
    assert code == 0 and rep["exact"] and rep["diagonal_sequence"]["exact"]
    assert [d["n"] for d in rep["degrees"]] == [-2, -1, 0, 1]


def test_random_is_deterministic():
    a = run("random", "--seed", "4", "--profile", "acceptance")
    b = run("random", "--seed", "4", "--profile", "acceptance")
    assert a == b and a[0] == 0 and a[1].startswith("field Q")
    code, rep, _ = run_json("random", "--seed", "4")
    assert code == 0 and rep["profile"] == "tiny"


def test_parse_error_exit_code(tmp_path):
    p = tmp_path / "bad.dg"
    p.write_text("field Q\nalgebra A\nalgebra B extends A\n  gen x deg 2 d x x\n")
    code, _, err = run_json("validate", str(p))
    assert code == 2
    assert err["error"] == "parse" and err["line"] == 4


def test_validation_failure_exit_code(tmp_path):
    p = tmp_path / "bad.dg"
    # d(e2) = e1*x gives d^2(e2) = e0*x^2, which is not zero
    text = FIXTURES["K1"].replace("  d e1 = e0*x\n", "  basis e2 deg 6\n  d e1 = e0*x\n  d e2 = e1*x\n")
    p.write_text(text)
    code, rep, _ = run_json("validate", str(p))
    assert code == 1 and rep["valid"] is False
    code, _, _ = run_json("lift", str(p))
    assert code == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["lift", "{K1}", "--module", "P"],
        ["exactseq", "{K1}", "--degrees", "3..1"],
        ["exactseq", "{K1}", "--degrees", "x"],
        ["random", "--profile", "huge"],
        ["lift"],
        ["lift", "/nonexistent/file.dg"],
        ["frobnicate", "{K1}"],
    ],
)
def test_usage_errors(docs, argv):
    argv = [a.format(**docs) for a in argv]
    code, _, _ = run(*argv)
    assert code == 2


def test_help_exits_zero():
    assert run("--help")[0] == 0


def test_every_verb_is_wired(docs):
    for verb in VERBS:
        argv = [verb] if verb == "random" else [verb, docs["x1x2"]]
        assert run(*argv)[0] == 0, verb


def test_module_entry_point(docs):
    proc = subprocess.run([sys.executable, "-m", "dglift", "lift", docs["K1"], "--json"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "not-liftable"


def test_resource_limit_exit_code(docs, monkeypatch):
    import dglift.linalg

    monkeypatch.setattr(dglift.linalg, "MAX_UNKNOWNS", 0)
    code, _, err = run_json("lift", docs["K2"])
    assert code == 3 and err["error"] == "resource-limit"
