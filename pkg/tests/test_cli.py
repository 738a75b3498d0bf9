"""Command-line interface: exit codes, CSV determinism, exports."""

import subprocess
import sys

import pytest

from racsep import load_graph, load_tensor
from racsep.cli import main


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_deep_passes(capsys):
    code, out, _ = run_cli(["verify", "deep", "--M", "2", "--R", "2",
                            "--T", "4", "--trials", "3"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "check,M,R,T,L,field,seed,observed,expected,pass"
    assert "deep,2,2,4,2,exact,-,3,3,true" in lines


def test_verify_shallow_grid(capsys):
    code, out, _ = run_cli(["verify", "shallow", "--M", "2", "--R", "1,2",
                            "--T", "4", "--trials", "20", "--seed", "7"],
                           capsys)
    assert code == 0
    assert len(out.splitlines()) == 1 + 2 * 20


def test_odd_T_usage_error(capsys):
    code, _, err = run_cli(["verify", "shallow", "--T", "3"], capsys)
    assert code == 2
    assert "even" in err


def test_bad_range_usage_error():
    with pytest.raises(SystemExit) as ei:
        main(["verify", "shallow", "--M", ""])
    assert ei.value.code == 2


def test_unknown_suite_usage_error():
    with pytest.raises(SystemExit) as ei:
        main(["verify", "bogus"])
    assert ei.value.code == 2


def test_budget_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("RACSEP_GRID_BUDGET", "4")
    code, _, err = run_cli(["verify", "deep", "--M", "2", "--R", "2",
                            "--T", "4", "--trials", "1"], capsys)
    assert code == 3
    assert "budget" in err


def test_csv_byte_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = run_cli(["verify", "mincut", "--M", "2", "--R", "2,3",
                              "--T", "4", "--trials", "5", "--seed", "11",
                              "--out", str(path)], capsys)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_scan(capsys):
    code, out, _ = run_cli(["scan", "--M", "2", "--R", "2", "--T", "4,6",
                            "--L", "1,2"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("M,R,T,L,")
    assert len(lines) == 5  # header + 2x2 grid
    assert any("theorem=2" in l for l in lines)
    assert any("conjecture=" in l for l in lines)


def test_export_roundtrip(tmp_path, capsys):
    out = tmp_path / "w.txt"
    code, _, _ = run_cli(["export", "weights", "--M", "2", "--R", "2",
                          "--T", "4", "--out", str(out)], capsys)
    assert code == 0
    t = load_tensor(out)
    assert t.dims == (2, 2, 2, 2)
    # byte-identical re-export
    out2 = tmp_path / "w2.txt"
    run_cli(["export", "weights", "--M", "2", "--R", "2", "--T", "4",
             "--out", str(out2)], capsys)
    assert out.read_bytes() == out2.read_bytes()


def test_export_graphs(tmp_path, capsys):
    mps = tmp_path / "mps.txt"
    code, _, _ = run_cli(["export", "mps", "--M", "2", "--R", "2", "--T", "4",
                          "--out", str(mps)], capsys)
    assert code == 0
    g = load_graph(mps)
    assert len(g.open_legs) == 4
    deep = tmp_path / "deep.txt"
    code, _, _ = run_cli(["export", "deep-tn", "--M", "2", "--R", "2",
                          "--T", "4", "--L", "2", "--out", str(deep)], capsys)
    assert code == 0
    assert load_graph(deep).open_legs


def test_export_weights_rejects_deep(capsys):
    code, _, err = run_cli(["export", "weights", "--M", "2", "--R", "2",
                            "--T", "4", "--L", "2", "--out", "/tmp/x.txt"],
                           capsys)
    assert code == 2


def test_console_script_installed():
    proc = subprocess.run([sys.executable, "-m", "racsep.cli", "verify",
                           "noclone", "--P", "2,3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "noclone" in proc.stdout
