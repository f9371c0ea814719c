import io
import json
import subprocess
import sys

import pytest

from holonomy_lab import catalog
from holonomy_lab.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, run
from holonomy_lab.structfile import loads


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code, rep = run(list(argv), out, err)
    return code, rep, out.getvalue(), err.getvalue()


def test_ricci_f2(tmp_path):
    path = tmp_path / "r.json"
    code, rep, out, _ = call("--json", str(path), "ricci", "--family", "F2", "--set", "r=1")
    assert code == EXIT_OK
    assert rep.tables["diagonal"] == ["-8", "-8", "-8", "-8", "4"]
    assert (rep.tables["tau"], rep.tables["nu"]) == ("-8", "12")
    assert "tau = -8, nu = 12" in out
    data = json.loads(path.read_text())
    assert data["passed"] is True
    assert data["tables"]["diagonal"] == rep.tables["diagonal"]


def test_jacobi_abelian_file(tmp_path):
    p = tmp_path / "ab.struct"
    p.write_text("dim 5\n")
    code, rep, _, _ = call("jacobi", str(p))
    assert code == EXIT_OK and rep.verdicts == {"d^2 = 0": True}


def test_jacobi_failure_exit_one(tmp_path):
    p = tmp_path / "bad.struct"
    p.write_text("dim 4\nd e3 = e12\nd e1 = e34\n")
    code, rep, out, _ = call("jacobi", str(p))
    assert code == EXIT_FAIL
    assert "d(de1)" in out and "FAIL" in out


def test_malformed_file_exit_two(tmp_path):
    p = tmp_path / "err.struct"
    p.write_text("dim 3\nd e3 = (q) e12\n")
    code, rep, _, err = call("jacobi", str(p))
    assert code == EXIT_USAGE and rep is None
    assert f"{p}:2:9: unknown parameter 'q'" in err


@pytest.mark.parametrize("argv", [
    ("bogus",), ("ricci",), ("ricci", "--family", "F9"), ("ricci", "--family", "F2", "--set", "r"),
    ("jacobi", "/nonexistent/file"), ("evolve", "--family", "F3"), ("catalog", "dump"),
    ("holonomy", "--family", "K"), ("g2", "--kind", "Ktilde", "--explicit"),
    ("verify-paper", "--only", "x"),
])
def test_usage_errors(argv, capsys):
    code, _, _, _ = call(*argv)
    assert code == EXIT_USAGE


def test_help_exits_zero(capsys):
    code, _, _, _ = call("--help")
    assert code == EXIT_OK
    text = capsys.readouterr().out
    for name in ("jacobi", "ricci", "evolve", "holonomy", "g2", "catalog"):
        assert name in text


def test_catalog_list_and_dump_round_trip():
    code, _, out, _ = call("catalog", "list")
    assert code == EXIT_OK
    for fid in catalog.FAMILY_PARAMS:
        assert fid in out
    for fid in catalog.FAMILY_PARAMS:
        code, rep, out, _ = call("catalog", "dump", fid)
        entry = catalog.family(fid)
        sf = loads(out)
        assert sf.algebra() == entry.algebra
        assert sf.su2() == entry.structure


def test_hypo_check_on_dumped_file(tmp_path):
    _, _, text, _ = call("catalog", "dump", "F7")
    p = tmp_path / "f7.struct"
    p.write_text(text)
    code, rep, _, _ = call("hypo-check", str(p), "--set", "a=1", "r=2")
    assert code == EXIT_OK
    assert rep.tables["hypo-contact"] is True


def test_evolve_with_table(tmp_path):
    table = tmp_path / "f.dat"
    code, rep, _, _ = call("evolve", "--family", "F2", "--set", "r=1", "--t-end", "0.1",
                           "--table", str(table))
    assert code == EXIT_OK
    assert rep.residuals["first-integral drift"] < 1e-9
    assert table.read_text().startswith("# t f f' f''")


def test_holonomy_pass_and_math_failure():
    code, rep, _, _ = call("holonomy", "--family", "F2", "--set", "r=1")
    assert code == EXIT_OK and rep.tables["rank"] == 8
    code, rep, _, _ = call("holonomy", "--family", "F4", "--set", "rho=2", "--times", "0")
    assert code == EXIT_FAIL and rep.tables["rank"] < 8


def test_g2_example():
    code, rep, _, _ = call("g2", "--kind", "K", "--set", "a=0", "b=0", "a1=2")
    assert code == EXIT_OK
    assert rep.tables["rank"] == 14
    assert rep.residuals["d phi"] < 1e-10 and rep.residuals["d star phi"] < 1e-10


def test_g2_explicit_source():
    code, rep, _, _ = call("g2", "--kind", "K", "--explicit")
    assert code == EXIT_OK and rep.tables["rank"] == 14


def test_verify_subset_agrees_with_json(tmp_path):
    path = tmp_path / "v.json"
    code, rep, out, _ = call("--json", str(path), "verify", "--only", "1,2,5")
    data = json.loads(path.read_text())
    assert code == EXIT_OK
    assert data["verdicts"] == rep.verdicts == {"AC1": True, "AC2": True, "AC5": True}
    assert out.count("[PASS]") == 3


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "holonomy_lab.cli", "catalog", "list"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "F4" in proc.stdout
