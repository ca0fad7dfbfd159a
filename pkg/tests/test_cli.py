import subprocess
import sys

import pytest

from fockline import cli
from fockline.experiments import read_table
from fockline.fock import InvariantViolation


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_ideal_table(capsys):
    code, out, _ = run(["ideal", "--S", "4"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,e_n,qfi"
    assert len(lines) == 6
    assert lines[3] == "2,1.57276594117,12"


def test_rates_output(capsys):
    code, out, _ = run(["rates", "--g", "0.1", "--db", "80", "--frep", "80e6"], capsys)
    assert code == 0
    values = dict(line.split(": ", 1) for line in out.splitlines())
    assert float(values["p_success"]) == pytest.approx(2e-10, rel=0.05)
    assert float(values["success_rate_hz"]) == pytest.approx(1.6e-2, rel=0.05)
    assert "1.6 Hz" in values["note"]
    assert float(values["rate_S4_hz"]) == pytest.approx(0.76, rel=0.02)


def test_sweep_malformed_db(capsys):
    code, _, err = run(["sweep", "--db", "0", "abc"], capsys)
    assert code == 1
    assert "'abc'" in err


def test_sweep_negative_db(capsys):
    code, _, err = run(["sweep", "--db", "-3"], capsys)
    assert code == 1
    assert "'-3'" in err


def test_unknown_flag(capsys):
    code, _, err = run(["ideal", "--bogus"], capsys)
    assert code == 1
    assert "--bogus" in err


def test_missing_subcommand(capsys):
    code, _, _ = run([], capsys)
    assert code == 1


@pytest.mark.parametrize("sub", ["ideal", "sweep", "decompose", "rates", "fluctuate"])
def test_help(sub, capsys):
    code, out, _ = run([sub, "--help"], capsys)
    assert code == 0
    assert "usage" in out


def test_sweep_to_file(tmp_path, capsys):
    target = tmp_path / "sweep.csv"
    code, out, _ = run(["sweep", "--g", "0.1", "--sigma", "2", "--db", "0", "80", "--mode", "closed_form", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    rows = read_table(target)
    assert len(rows) == 6
    assert {r["source"] for r in rows} == {"closed_form_lossless", "closed_form_symmetric"}


def test_sweep_bad_readout_is_usage_error(capsys):
    code, _, err = run(["sweep", "--sigma", "2", "--k", "3"], capsys)
    assert code == 1
    assert "k=3" in err


def test_sweep_empty_k_set(capsys):
    code, out, _ = run(["sweep", "--k"], capsys)
    assert code == 0
    assert out.splitlines() == ["g,sigma,k,r_a2,r_b2,r_s,r_d,probability,e_n,source"]


def test_sweep_deterministic_bytes(tmp_path, capsys):
    argv = ["sweep", "--sigma", "2", "--point", "0.3,0.6,0.1,0.2", "0.5,0.5,0,0"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(argv + ["--out", str(a)], capsys)[0] == 0
    assert run(argv + ["--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_decompose(capsys):
    code, out, _ = run(["decompose", "--g", "0.1", "--r", "0.5", "--sigma", "2", "--k", "1"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "S,chi,chi_fraction,e_n_int"
    first = lines[1].split(",")
    assert first[0] == "2"
    assert float(first[3]) == pytest.approx(1.0, abs=1e-10)


def test_fluctuate(tmp_path, capsys):
    samples = tmp_path / "samples.csv"
    code, out, _ = run(["fluctuate", "--samples", "4", "--k", "0", "--samples-out", str(samples)], capsys)
    assert code == 0
    assert out.splitlines()[0] == "k,mean,min,max,no_fluctuation,gap"
    assert len(read_table(samples)) == 4


def test_invariant_violation_exit_code(monkeypatch, capsys):
    def boom(spec):
        raise InvariantViolation("trace drifted")

    monkeypatch.setattr(cli, "run_sweep", boom)
    code, _, err = run(["sweep"], capsys)
    assert code == 2
    assert "trace drifted" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fockline", "ideal", "--S", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[2] == "1,1,4"
