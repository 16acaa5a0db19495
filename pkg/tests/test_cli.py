from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from fca import cli
from fca.constraints import ConstraintSystem
from fca.errors import NotUnitary
from fca.matrixrep import EvolutionMatrix
from fca.rules import family_rule
from fca.serialization import canonical_dumps

PI_TEXT = "3.141592653589793"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_regular(capsys):
    code, out, _ = run(capsys, "regular", "--base", "Z", "--offsets", "0,1,-1", "--quotient", "5")
    assert code == 0 and json.loads(out) == {"regular": True}
    code, out, _ = run(capsys, "regular", "--offsets", "0,1,-1", "--quotient", "4")
    assert json.loads(out) == {"regular": False}


def test_verify_zero_assignment_fails(capsys, tmp_path):
    sys_path = tmp_path / "sys.json"
    code, _, _ = run(capsys, "derive", "--group", "z2xz2", "--out", str(sys_path))
    assert code == 0
    system = json.loads(sys_path.read_text())
    names = sorted(ConstraintSystem.from_json(system).variables())
    zero = tmp_path / "zero.json"
    zero.write_text(json.dumps({n: [0, 0] for n in names}))
    code, out, _ = run(capsys, "verify", "--system", str(sys_path), "--assign", str(zero))
    assert code == 1
    report = json.loads(out)
    assert not report["pass"]
    assert any(f["equation"]["rhs"] == 1 for f in report["failures"])


def test_verify_family_passes(capsys):
    code, out, _ = run(capsys, "verify", "--group", "z2xz2", "--family", "2",
                       "--params", json.dumps({"alpha_site": "e", "phi": float(PI_TEXT)}))
    assert code == 0 and json.loads(out)["pass"]


def test_unitary_example(capsys):
    params = '{"alpha_site":"e","phi":%s}' % PI_TEXT
    code, out, _ = run(capsys, "unitary", "--group", "z2xz2", "--family", "2", "--params", params)
    assert code == 0
    U = EvolutionMatrix.from_json(json.loads(out))
    assert U.dim == 16
    assert np.allclose(U.matrix[8:12, 8:12], np.eye(4), atol=1e-10)


def test_output_is_deterministic_and_round_trips(capsys, tmp_path):
    argv = ["unitary", "--group", "z5", "--family", "3", "--params", '{"theta":0.3,"phi":2.7}']
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    U = EvolutionMatrix.from_json(json.loads(first))
    assert canonical_dumps(U.to_json()) + "\n" == first
    code, out, _ = run(capsys, "derive", "--group", "z2xz2")
    system = ConstraintSystem.from_json(json.loads(out))
    assert canonical_dumps(system.to_json()) + "\n" == out


def test_blocks_and_discriminate(capsys, tmp_path):
    u = tmp_path / "U.json"
    u0 = tmp_path / "U0.json"
    params = '{"alpha_site":"e","phi":%s}' % PI_TEXT
    run(capsys, "unitary", "--group", "z2xz2", "--family", "2", "--params", params, "--out", str(u))
    rule = family_rule("z2xz2", 2, {"alpha_site": "e", "phi": float(PI_TEXT)})
    from fca.matrixrep import synthesize_unitary

    u0.write_text(canonical_dumps(synthesize_unitary(rule.linear_part()).to_json()))
    code, out, _ = run(capsys, "blocks", "--u", str(u), "--scheme", "z2xz2")
    assert code == 0
    blocks = json.loads(out)
    assert blocks["leakage"] < 1e-10
    code, out, _ = run(capsys, "discriminate", "--u0", str(u0), "--u1", str(u), "--emit-polygon")
    report = json.loads(out)
    assert code == 0 and report["perfectly_discriminable"] and report["paper_p_succ"] == pytest.approx(1)
    assert "polygon" in report
    code, out, _ = run(capsys, "discriminate", "--u0", str(u0), "--u1", str(u), "--parity-restricted")
    assert "polygon" not in json.loads(out)


def test_exit_codes(capsys, tmp_path, monkeypatch):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "blocks", "--u", str(bad), "--scheme", "z5")[0] == 2
    assert run(capsys, "derive", "--group", "z2xz2", "--tol", "0")[0] == 2
    assert run(capsys, "unitary", "--group", "z2xz2", "--family", "1")[0] == 1
    partial = tmp_path / "partial.json"
    partial.write_text('{"alpha_e": [1, 0]}')
    assert run(capsys, "verify", "--group", "z2xz2", "--assign", str(partial))[0] == 2

    rule = family_rule("z2xz2", 2, {"alpha_site": "e", "phi": float(PI_TEXT)}).replace(gamma_abe=3.9)
    rpath = tmp_path / "rule.json"
    rpath.write_text(json.dumps(rule.to_json()))
    assert run(capsys, "unitary", "--rule", str(rpath))[0] == 1

    def broken(*_a, **_k):
        raise NotUnitary("forced")

    monkeypatch.setattr(cli.matrixrep, "synthesize_unitary", broken)
    assert run(capsys, "unitary", "--rule", str(rpath))[0] == 3


def test_seeded_sampling(capsys, monkeypatch):
    monkeypatch.setenv("FCA_SEED", "17")
    argv = ["verify", "--group", "z5", "--family", "3", "--samples", "4"]
    code, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert code == 0 and first == second
    assert len(json.loads(first)) == 4


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fca.cli", "regular", "--offsets", "0,1,-1", "--quotient", "3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"regular": False}
