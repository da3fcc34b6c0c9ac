import io
import json
import subprocess
import sys

import pytest

from ncimage.cli import run


def call(*argv):
    out = io.StringIO()
    report, code = run(list(argv), out)
    return report, code, out.getvalue()


def test_finiteness_commutator():
    rep, code, _ = call("finiteness", "[x1,x2]", "--n", "2", "--seed", "7")
    assert code == 0 and rep["verdict"] == "finite" and rep["j"] == 2


def test_density_examples():
    rep, code, _ = call("density", "[x1,x2]", "--n", "3", "--seed", "7")
    assert code == 0 and rep["verdict"] == "dense_in_Mn0" and rep["jacobian_rank"] == 2
    rep, code, _ = call("density", "[[x1,x2],x3,x4]", "--n", "1", "--seed", "7")
    assert rep["verdict"] == "identity" and code == 0


def test_lie_witness_and_replay():
    target = "0,1,0;0,0,0;0,0,0"
    rep, code, _ = call("lie-witness", "[x2,x1]", "--n", "3", "--target", target, "--seed", "7")
    assert code == 0 and rep["verified"] is True
    w = rep["witnesses"][0]
    rep, code, _ = call("lie-witness", "[x2,x1]", "--n", "3", "--target", target, "--verify", w)
    assert code == 0 and rep["verdict"] == "verified"
    bad = "0,0,0;0,0,0;0,0,0 | 1,0,0;0,2,0;0,0,3"
    rep, code, _ = call("lie-witness", "[x2,x1]", "--n", "3", "--target", target, "--verify", bad)
    assert code == 1 and rep["verdict"] == "rejected"


def test_identity_witness_replay():
    rep, code, _ = call("identity", "[x1,x2]", "--n", "2", "--seed", "3")
    assert rep["verdict"] == "no"
    rep, code, _ = call("identity", "[x1,x2]", "--n", "2", "--verify", rep["witnesses"][0])
    assert rep["nonzero"] is True


def test_output_is_byte_identical():
    argv = ("central", "[x1,x2]^2", "--n", "3", "--seed", "11")
    assert call(*argv)[2] == call(*argv)[2]
    argv = ("construct", "gl", "--n", "2", "--seed", "4", "--trials", "20")
    assert call(*argv)[2] == call(*argv)[2]


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("NCIMAGE_SEED", "13")
    rep, _, _ = call("central", "[x1,x2]^2", "--n", "3")
    assert rep["seed"] == 13
    monkeypatch.setenv("NCIMAGE_SEED", "x")
    rep, code, _ = call("central", "[x1,x2]^2", "--n", "3")
    assert code == 1 and rep["error"]["type"] == "UsageError"


def test_parse_error_report():
    rep, code, _ = call("identity", "[x1, x2", "--n", "2")
    assert code == 1
    assert rep["error"]["type"] == "ParseError"
    assert (rep["error"]["line"], rep["error"]["column"]) == (1, 8)


def test_usage_errors():
    assert call("nonsense")[1] == 1
    rep, code, _ = call("lie-witness", "[x2,x1]", "--n", "2")
    assert code == 1 and "target" in rep["error"]["message"]
    rep, code, _ = call("lie-witness", "[x2,x1]", "--n", "2", "--target", "1,0;0,1")
    assert code == 1 and rep["error"]["type"] == "PreconditionError"


def test_inconclusive_exit_code():
    # commutators vanish on M_1, so nothing is found up to nmax = 1
    rep, code, _ = call("obstruction", "[x1,x2]", "--nmax", "1")
    assert code == 2 and rep["verdict"] == "inconclusive"
    rep, code, _ = call("orbit", "1,0;0,-1", "--target", "0,1;1,1")
    assert code == 0 and rep["verdict"] == "not_in_scaled_orbit"


def test_orbit_and_obstruction():
    rep, code, _ = call("orbit", "1,0;0,-1", "--target", "2,0;0,-2")
    assert rep["verdict"] == "in_scaled_orbit"
    rep, code, _ = call("obstruction", "[x1,x2]", "--k", "2", "--nmax", "2")
    assert code == 0 and rep["verdict"] == "not_sum_of_commutators" and rep["witnesses"]


def test_construct_witness_and_verify():
    target = "1,2;3,4"
    rep, code, _ = call("construct", "gl", "--n", "2", "--target", target, "--trials", "10")
    assert code == 0 and rep["verdict"] == "witness_verified"
    assert set(rep["samples"]) <= {"invertible", "zero"}
    w = rep["witnesses"][0]
    rep, code, _ = call("construct", "gl", "--n", "2", "--target", target, "--verify", w)
    assert code == 0 and rep["verified"] and rep["mu"] == "1"


def test_construct_family_samples():
    rep, code, _ = call("construct", "idem-nilp", "--n", "2", "--trials", "10", "--target", "1,1;0,3")
    assert code == 0 and "in_variety_nonzero" not in rep["samples"]
    assert rep["verified"] is True


def test_synth_carrier_command():
    rep, code, _ = call("synth-carrier", "--n", "2", "--i", "1")
    assert code == 0 and rep["verdict"] == "verified" and rep["certificate"]["polarized_grid"]


def test_text_format():
    _, code, text = call("finiteness", "[x1,x2]", "--n", "2", "--format", "text")
    assert code == 0 and text.startswith("finiteness: finite")


def test_report_has_version_and_flags():
    rep, _, out = call("central-index", "[x1,x2]", "--n", "2")
    assert json.loads(out) == rep
    assert rep["version"] and rep["flags"]["command"] == "central-index" and rep["j"] == 2


@pytest.mark.parametrize("argv", [["--version"]])
def test_console_entry_point(argv):
    res = subprocess.run([sys.executable, "-m", "ncimage.cli", *argv], capture_output=True, text=True)
    assert res.returncode == 0 and "ncimage" in res.stdout
