import json

import numpy as np
import pytest

from sparsefourier.cli import main
from sparsefourier.dense import fft
from sparsefourier.formats import read_rlsf, write_rlsf


def test_generate_and_recover(tmp_path, capsys):
    spec = tmp_path / "s.json"
    assert main(["generate", "--n", "1009", "--b", "3", "--seed", "2", "--out", str(spec)]) == 0
    planted = {tuple(m["freq"]) for m in json.loads(spec.read_text())["modes"]}
    out = tmp_path / "r.json"
    assert main(["recover", "--input", str(spec), "--b", "3", "--out", str(out)]) == 0
    got = json.loads(out.read_text())
    assert {tuple(m["freq"]) for m in got["representation"]["modes"]} == planted
    assert "trace" not in got


def test_recover_csv_to_stdout(capsys):
    assert main(["recover", "--n", "101", "--b", "1", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "freq,re,im" and len(lines) == 2


def test_dense_generate_and_dft(tmp_path):
    x = tmp_path / "x.rlsf"
    y = tmp_path / "y.rlsf"
    assert main(["generate", "--n", "64", "--b", "2", "--dense", "--out", str(x)]) == 0
    assert main(["dft", "--input", str(x), "--out", str(y)]) == 0
    assert np.allclose(read_rlsf(y), fft(read_rlsf(x)))
    assert main(["dft", "--input", str(x), "--out", str(y), "--naive"]) == 0
    assert np.allclose(read_rlsf(y), fft(read_rlsf(x)), atol=1e-9)


def test_recover_from_rlsf(tmp_path, capsys):
    n = 101
    x = np.zeros(n, complex)
    x[:] = 3 * np.exp(2j * np.pi * 17 * np.arange(n) / n) / np.sqrt(n)
    write_rlsf(tmp_path / "x.rlsf", x)
    assert main(["recover", "--input", str(tmp_path / "x.rlsf"), "--b", "1"]) == 0
    got = json.loads(capsys.readouterr().out)
    assert got["representation"]["modes"][0]["freq"] == [17]


def test_bench_assert_exit_codes(tmp_path, capsys):
    args = ["bench", "--family", "recover_bmode", "--n", "101", "--b", "2", "--runs", "2",
            "--assert", "--out", str(tmp_path / "t.csv"), "--format", "csv"]
    assert main(args) == 0
    assert (tmp_path / "t.csv").exists() and (tmp_path / "t.summary.csv").exists()
    # sigma=1 at this N is far below the transition, so the high-sigma bound is breached
    args = ["bench", "--family", "sweep_noise", "--n", "1009", "--sigma", "1", "--runs", "2",
            "--assert"]
    assert main(args) == 2
    assert "FAIL" in capsys.readouterr().out


def test_sweep_json(tmp_path):
    out = tmp_path / "s.json"
    args = ["sweep", "--family", "recover_bmode", "--param", "b", "--values", "1,2",
            "--n", "101", "--runs", "1", "--out", str(out)]
    assert main(args) == 0
    assert [c["b"] for c in json.loads(out.read_text())["summary"]] == [1, 2]


def test_errors_give_exit_code_1(tmp_path, capsys):
    (tmp_path / "bad.rlsf").write_bytes(b"nope")
    assert main(["dft", "--input", str(tmp_path / "bad.rlsf"), "--out", str(tmp_path / "o")]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
