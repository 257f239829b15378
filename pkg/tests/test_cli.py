import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from nilmap.cli import run_command
from nilmap.fuzz import fuzz_jn

CORPUS = Path(__file__).parent / "corpus"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code, rep = run_command([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue(), rep


def c(name):
    return CORPUS / f"{name}.pmap"


def test_check_nilpotent_ok():
    code, out, _, _ = run("check", "nilpotent", c("nilpotent_y2"))
    assert code == 0 and "nilpotent: yes" in out


def test_check_nilpotent_witness():
    code, out, _, _ = run("check", "nilpotent", c("squares"))
    assert code == 1 and "2*x + 2*y" in out


def test_check_keller_violated():
    code, out, _, rep = run("check", "keller", c("not_keller_square"))
    assert code == 1 and "det JF = 2*x" in out
    assert rep.verdicts["keller"] is False


def test_bridge():
    code, out, _, _ = run("bridge", c("bridge_x0"))
    assert code == 0 and "-t + 1" in out


def test_bridge_reserves_t():
    code, _, err, _ = run("bridge", c("eliminated"))
    assert code == 2 and "reserved" in err


def test_blowup():
    code, out, _, _ = run("blowup", c("three_parts"))
    assert code == 0 and "-x^3*t^2 - x^2*t + x" in out


def test_reduce():
    code, out, _, rep = run("reduce", c("keller_triangular"))
    assert code == 0
    assert "eq -y^2\neq 0" in out
    assert rep.verdicts["links_verified"] is True


def test_reduce_non_keller():
    code, _, err, _ = run("reduce", c("not_keller_square"))
    assert code == 1 and "precondition" in err


def test_invert():
    code, out, _, _ = run("invert", c("keller_triangular"))
    assert code == 0 and "eq -y^2 + x" in out


def test_invert_cap_exhausted(tmp_path):
    f = tmp_path / "chain.pmap"
    f.write_text("vars x y z\neq x + y^2\neq y + z^2\neq z\n")
    code, out, _, _ = run("invert", f, "--cap", 2)
    assert code == 1


def test_fixed_points():
    code, out, _, rep = run("fixed-points", c("nilpotent_y2"), "--seeds", 16)
    assert code == 0
    assert rep.verdicts["exact"] == [["0", "0"]]


def test_euler():
    assert run("euler", c("squares"), "--k", 2)[0] == 0
    assert run("euler", c("cube_first"), "--k", 2)[0] == 1


def test_euler2(tmp_path):
    a = tmp_path / "a.pmap"
    b = tmp_path / "b.pmap"
    a.write_text("vars x y z\neq y\neq z\neq 0\n")
    b.write_text("vars x y z\neq z^2\neq 0\neq 0\n")
    assert run("euler2", a, b, "--k1", 1, "--k2", 2)[0] == 0


def test_rank_signs_realify():
    code, out, _, _ = run("rank", c("nilpotent_y2"))
    assert code == 0 and "1" in out
    code, out, _, _ = run("signs", c("sign_negative"))
    assert code == 0 and "negative" in out
    code, out, _, _ = run("realify", c("complex_linear"))
    assert code == 0 and "eq -x_im" in out


@pytest.mark.parametrize("argv", [
    ("check", "nilpotent", "/nonexistent.pmap"),
    ("frobnicate",),
    ("check", "keller"),
    ("fuzz", "--family", "homogeneous", "--n", "2"),
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_parse_error_reports_position(tmp_path):
    f = tmp_path / "bad.pmap"
    f.write_text("vars x\neq 2x\n")
    code, _, err, _ = run("check", "keller", f)
    assert code == 2 and "line 2, column 5" in err


def test_json_report(tmp_path):
    path = tmp_path / "r.json"
    code, _, _, rep = run("--json", path, "check", "keller", c("keller_triangular"))
    data = json.loads(path.read_text())
    assert code == 0
    assert data["schema"] == 1 and data["command"] == "check keller"
    assert data["digest"] == rep.determinism_digest()
    assert set(data["inputs"]) == {"map"}


def test_fuzz_digest_deterministic(tmp_path):
    argv = ("fuzz", "--family", "conjugated-triangular", "--n", 3, "--deg", 2, "--count", 4,
            "--seed", 11, "--seeds", 16)
    d1 = run(*argv)[3].determinism_digest()
    d2 = run(*argv)[3].determinism_digest()
    assert d1 == d2
    d3 = run(*argv[:-4], "--seed", 12, "--seeds", 16)[3].determinism_digest()
    assert d3 != d1


def test_fuzz_report_shape():
    rep = fuzz_jn("strict-triangular", 2, 2, 3, seed=1, seeds=8)
    assert rep.verdicts["violations"] == 0
    assert rep.verdicts["oracle_mismatches"] == 0
    assert len(rep.witnesses) == 3


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "nilmap.cli", "check", "nilpotent",
                          str(c("two_form"))], capture_output=True, text=True)
    assert out.returncode == 0 and "nilpotent: yes" in out.stdout
