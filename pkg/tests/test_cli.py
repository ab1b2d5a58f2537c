import subprocess
import sys

import numpy as np
import pytest

from condcoding.cli import main
from condcoding.empirical import GrayImage, save_pgm


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sweep_p_default(capsys):
    code, out, _ = run(capsys, "sweep-p")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "p,h_residual,h_cond,h_cond_7,h_cond_6"
    assert lines[1] == "0.000000000,0.000000000,0.000000000,1.000000000,2.000000000"
    assert len(lines) == 102


def test_sweep_p_single_bottleneck(capsys):
    code, out, _ = run(capsys, "sweep-p", "--bottleneck", "7", "--step", "0.5")
    assert code == 0
    assert out.splitlines()[0] == "p,h_residual,h_cond,h_cond_7"


def test_sweep_p_zero_step_is_usage_error(capsys):
    code, out, err = run(capsys, "sweep-p", "--step", "0")
    assert code == 2 and out == "" and "usage:" in err


def test_sweep_p_bad_flag_value(capsys):
    assert run(capsys, "sweep-p", "--step", "abc")[0] == 2
    assert run(capsys, "sweep-p", "--bottleneck", "9")[0] == 2
    assert run(capsys)[0] == 2


def test_sweep_p_to_file(tmp_path, capsys):
    dest = tmp_path / "p_sweep.csv"
    code, out, _ = run(capsys, "sweep-p", "--step", "0.25", "--output", str(dest))
    assert code == 0 and out == ""
    assert dest.read_text().startswith("p,h_residual")


def test_output_dir_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CONDCODING_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "sweep-p", "--step", "0.5")
    assert code == 0 and out == ""
    assert (tmp_path / "sweep-p.csv").exists()


def test_unwritable_output_is_io_error(tmp_path, capsys):
    code, _, err = run(capsys, "sweep-p", "--step", "0.5", "--output", str(tmp_path / "no" / "x.csv"))
    assert code == 1 and "x.csv" in err


def test_sweep_sigma_matches_sweep_p_at_zero_noise(capsys):
    _, p_sweep, _ = run(capsys, "sweep-p", "--bottleneck", "7", "--step", "0.1")
    by_p = {line.split(",")[0]: line.split(",")[1:] for line in p_sweep.splitlines()[1:]}
    code, out, _ = run(capsys, "sweep-sigma", "--sigma-max", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "p,sigma_p,h_residual,h_cond,h_cond_7"
    assert len(lines) == 1 + 4 * 5
    for line in lines[1:]:
        p, s, *vals = line.split(",")
        if s == "0.000000000":
            assert vals == by_p[p]


def test_sweep_sigma_boundary_flag(capsys):
    a = run(capsys, "sweep-sigma", "--p", "0", "--sigma-min", "10", "--sigma-max", "10")[1]
    b = run(capsys, "sweep-sigma", "--p", "0", "--sigma-min", "10", "--sigma-max", "10",
            "--boundary", "renormalize")[1]
    assert a != b
    assert run(capsys, "sweep-sigma", "--boundary", "wrap")[0] == 2


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--trials", "25", "--seed", "42", "--max-alphabet", "64")
    assert code == 0
    assert out.splitlines()[-1] == "residual identity max error < 1e-9"
    assert "closed form vs enumeration, N=255 w=0" in out
    assert run(capsys, "verify", "--trials", "25", "--seed", "42", "--max-alphabet", "64")[1] == out
    assert run(capsys, "verify", "--trials", "0")[0] == 2


def test_verify_failure_exit_code(capsys, monkeypatch):
    import condcoding.cli as cli

    monkeypatch.setattr(cli, "TOL", 0.0)
    code, out, _ = run(capsys, "verify", "--trials", "3", "--seed", "5", "--max-alphabet", "16")
    assert code == 3
    assert "FAILED" in out and "seed 5 trial" in out


def test_mc(capsys):
    code, out, _ = run(capsys, "mc", "--p", "0.5", "--samples", "1000000", "--seed", "1")
    assert code == 0
    fields = {l.split()[0]: l.split() for l in out.splitlines()}
    assert abs(float(fields["h_cond"][2]) - 4.0145420100445985) < 0.05
    assert float(fields["h_cond"][6]) < 0.05
    again = run(capsys, "mc", "--p", "0.5", "--samples", "1000000", "--seed", "1")[1]
    assert again == out
    assert run(capsys, "mc", "--samples", "0")[0] == 2


def test_mc_bottleneck(capsys):
    code, out, _ = run(capsys, "mc", "--p", "0", "--bottleneck", "7", "--samples", "20000")
    assert code == 0
    line = [l for l in out.splitlines() if l.startswith("h_cond_tilde")][0]
    assert line.split()[4] == "1.000000000"  # exact column


def _write(path, arr):
    save_pgm(GrayImage.from_array(np.asarray(arr, dtype=np.uint8)), path)
    return str(path)


def test_empirical_mi(tmp_path, capsys):
    orig = np.full((64, 64), 50)
    orig[:, 32:] = 200
    pred = orig.copy()
    pred[:, 1:] = orig[:, :-1]
    a, b = _write(tmp_path / "a.pgm", orig), _write(tmp_path / "b.pgm", pred)
    code, out, _ = run(capsys, "empirical-mi", a, a)
    assert code == 0 and out.splitlines()[0] == "mi 0.000000000"
    code, out, _ = run(capsys, "empirical-mi", a, b)
    assert code == 0 and float(out.split()[1]) > 0


def test_empirical_mi_errors(tmp_path, capsys):
    a = _write(tmp_path / "a.pgm", np.zeros((4, 4)))
    b = _write(tmp_path / "b.pgm", np.zeros((4, 5)))
    assert run(capsys, "empirical-mi", a, b)[0] == 2
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P2\n1 1\n255\n0\n")
    code, _, err = run(capsys, "empirical-mi", a, str(bad))
    assert code == 1 and "bad.pgm" in err and "magic" in err
    code, _, err = run(capsys, "empirical-mi", str(tmp_path / "nope.pgm"), a)
    assert code == 1 and "nope.pgm" in err


def test_module_entry_point_is_byte_identical():
    cmd = [sys.executable, "-m", "condcoding", "sweep-sigma", "--p", "0.1", "--sigma-max", "1"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a.startswith(b"p,sigma_p,")
