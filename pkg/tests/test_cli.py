import json

import pytest

from l2h import cli

from test_acceptance import run_cli


def test_parse_echo_is_canonical():
    code, out, _ = run_cli("parse", "examples/torus.grp")
    doc = json.loads(out)
    assert code == 0
    assert doc["relators"] == ["a b a^-1 b^-1"]
    assert doc["seed"] == 0


def test_missing_file_and_syntax_errors(tmp_path):
    assert run_cli("parse", str(tmp_path / "nothing.grp"))[0] == cli.EXIT_PARSE
    bad = tmp_path / "bad.grp"
    bad.write_text('group "x" { generators a; relators a^; }')
    code, _, err = run_cli("parse", str(bad))
    assert code == cli.EXIT_PARSE and "line 1" in err


def test_certify_circle():
    code, out, _ = run_cli("certify", "examples/circle.grp", "--degrees", "0..1", "--max-radius", "120")
    certs = json.loads(out)["certificates"]
    assert code == 0
    assert [c["status"] for c in certs] == ["ZeroEvidence", "ZeroEvidence"]


def test_require_certified(tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run_cli("certify", "examples/circle.grp", "--degrees", "0", "--max-radius", "50",
                         "--require-certified", "--out", str(out))
    assert code == cli.EXIT_INCONCLUSIVE
    assert json.loads(out.read_text())["certificates"][0]["status"] == "ZeroEvidence"


def test_certified_fields_are_exact():
    _, out, _ = run_cli("certify", "examples/f2.grp", "--degrees", "0")
    cert = json.loads(out)["certificates"][0]
    for key in ("gap_lower", "lambda_min_upper", "c"):
        assert set(cert[key]) == {"num", "den", "approx"}
        assert isinstance(cert[key]["num"], str)
    assert cert["runtime_ms"] is None


def test_betti_table():
    _, out, _ = run_cli("betti", "examples/f2.grp", "--quotients", "2")
    rows = json.loads(out)["table"]
    assert rows[0]["betti"] == [1, 3]
    assert rows[0]["estimates"][1]["num"] == "3"


def test_hopf_projective_plane():
    _, out, _ = run_cli("hopf", "examples/rp2.grp")
    rep = json.loads(out)["report"]
    assert rep["holds"] and rep["dim_H2_Z"] == 1


def test_resource_cap(monkeypatch):
    monkeypatch.setenv("L2H_SUPPORT_CAP", "10")
    code, out, _ = run_cli("certify", "examples/f2xf2.grp", "--degrees", "1")
    assert code in (0, cli.EXIT_RESOURCE)


def test_degree_ranges():
    assert cli.parse_degrees("0..2") == [0, 1, 2]
    assert cli.parse_degrees("1,3") == [1, 3]
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["certify", "x", "--max-power", "0"])
