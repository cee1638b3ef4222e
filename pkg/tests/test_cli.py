import csv
import subprocess
import sys

import numpy as np
import pytest

from rocp.cli import main
from rocp.tensor_io import read_tensor, write_tensor


@pytest.fixture
def tensor_file(tmp_path):
    path = tmp_path / "x.rt"
    assert main(["gen", "--dims", "6,7,20", "--rank", "2", "--seed", "1", "--out", str(path)]) == 0
    return path


def test_gen(tensor_file, capsys):
    assert read_tensor(tensor_file).shape == (6, 7, 20)


def test_gen_noiseless(tmp_path):
    a, b = tmp_path / "a.rt", tmp_path / "b.rt"
    main(["gen", "--dims", "4x5x6", "--sir-db", "none", "--out", str(a)])
    main(["gen", "--dims", "4x5x6", "--sir-db", "20", "--out", str(b)])
    assert not np.array_equal(read_tensor(a), read_tensor(b))


@pytest.mark.parametrize("algo", ["als", "cprand"])
def test_decompose(tensor_file, capsys, algo):
    assert main(["decompose", str(tensor_file), "--algo", algo, "--rank", "2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("fitness ")
    assert 0.0 < float(out.split()[1]) <= 1.0


def test_stream(tensor_file, tmp_path, capsys):
    out_csv = tmp_path / "s.csv"
    assert main(["stream", str(tensor_file), "--rank", "2", "--batch", "3",
                 "--csv", str(out_csv)]) == 0
    assert "updates 6" in capsys.readouterr().out
    with open(out_csv) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["update", "slices", "seconds"]
    assert [int(r[1]) for r in rows[1:]] == [3, 3, 3, 3, 3, 1]


def test_bench(tmp_path, capsys):
    out_csv, upd_csv = tmp_path / "b.csv", tmp_path / "u.csv"
    code = main(["bench", "--dims", "6,6,15", "--rank", "2", "--trials", "2",
                 "--algorithms", "rocp,batch_hot", "--csv", str(out_csv),
                 "--updates-csv", str(upd_csv)])
    assert code == 0
    out = capsys.readouterr().out
    assert "rocp" in out and "batch_hot" in out and "±" in out
    assert out_csv.exists() and upd_csv.exists()


def test_bench_on_input(tensor_file, capsys):
    assert main(["bench", "--input", str(tensor_file), "--rank", "2", "--trials", "1",
                 "--algorithms", "rocp"]) == 0


def test_missing_file_is_config_error(tmp_path, capsys):
    assert main(["decompose", str(tmp_path / "nope.rt")]) == 2
    assert "error" in capsys.readouterr().err


def test_bad_config_value(capsys):
    assert main(["bench", "--dims", "6,6,15", "--init-frac", "1.5"]) == 2


def test_bad_dims_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--dims", "6,a", "--out", "x"])
    assert exc.value.code == 2


def test_numerical_failure_exit_code(tmp_path, capsys):
    x = np.ones((4, 5, 6))
    x[0, 0, 0] = np.inf
    path = tmp_path / "inf.rt"
    write_tensor(path, x)
    assert main(["decompose", str(path), "--rank", "2"]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_module_entry_point(tensor_file):
    res = subprocess.run([sys.executable, "-m", "rocp", "decompose", str(tensor_file), "--rank", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("fitness")
