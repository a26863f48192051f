import json
import os

import numpy as np
import pytest

from condmeas import cli
from condmeas.errors import MatrixParseError


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_parse_csv(tmp_path):
    path = write(tmp_path, "a.csv", "1,0\n0,1\n1,1\n")
    arr = cli.parse_matrix(path)
    assert arr.shape == (3, 2)
    assert np.array_equal(arr, [[1, 0], [0, 1], [1, 1]])


def test_parse_json(tmp_path):
    path = write(tmp_path, "a.json", '{"rows": [[1], [-1]]}')
    arr = cli.parse_matrix(path)
    assert arr.shape == (2, 1)


def test_parse_ragged(tmp_path):
    path = write(tmp_path, "bad.csv", "1,0\n0\n")
    with pytest.raises(MatrixParseError, match="line 2"):
        cli.parse_matrix(path)


def test_parse_bad_literal(tmp_path):
    path = write(tmp_path, "bad.csv", "1,0\n0,x\n")
    with pytest.raises(MatrixParseError, match="line 2, column 2"):
        cli.parse_matrix(path)


def test_parse_nan_rejected(tmp_path):
    path = write(tmp_path, "bad.csv", "1,nan\n")
    with pytest.raises(MatrixParseError, match="non-finite"):
        cli.parse_matrix(path)


def test_parse_empty(tmp_path):
    path = write(tmp_path, "bad.csv", "\n")
    with pytest.raises(MatrixParseError, match="empty"):
        cli.parse_matrix(path)


def test_parse_json_errors(tmp_path):
    path = write(tmp_path, "bad.json", '{"rows": [[1], "x"]}')
    with pytest.raises(MatrixParseError):
        cli.parse_matrix(path)
    path = write(tmp_path, "bad2.json", "{")
    with pytest.raises(MatrixParseError, match="line 1"):
        cli.parse_matrix(path)


def test_serialize_deterministic_and_sorted():
    doc = {"b": 1.0 / 3.0, "a": [1, 2.5], "c": {"y": True, "x": None}}
    text = cli.serialize(doc)
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert "0.33333333333333331" in text
    assert text == cli.serialize(doc)


def test_compute_identity(tmp_path, capsys):
    path = write(tmp_path, "i.csv", "1,0\n0,1\n")
    code = cli.run(["compute", "--input", path])
    out = capsys.readouterr().out
    assert code == 0
    for name in cli.MEASURE_FUNCS:
        assert f'"name": "{name}"' in out
    assert '"value": 1' in out


def test_verify_golden_exit_zero(tmp_path):
    path = write(tmp_path, "a.csv", "1,0\n0,1\n1,1\n")
    out1 = str(tmp_path / "r1.txt")
    out2 = str(tmp_path / "r2.txt")
    assert cli.run(["verify", "--input", path, "--samples", "500",
                    "--output", out1]) == 0
    assert cli.run(["verify", "--input", path, "--samples", "500",
                    "--output", out2]) == 0
    assert open(out1, "rb").read() == open(out2, "rb").read()


def test_verify_corrupted_tolerance_exit_two(tmp_path):
    rng = np.random.default_rng(5)
    a = rng.standard_normal((5, 3))
    path = write(tmp_path, "r.csv",
                 "\n".join(",".join(f"{x:.17g}" for x in row) for row in a))
    code = cli.run(["verify", "--input", path, "--samples", "200",
                    "--tol", "1e-15", "--output", str(tmp_path / "r.txt")])
    assert code == 2


def test_ragged_csv_exit_one(tmp_path, capsys):
    path = write(tmp_path, "bad.csv", "1,0\n0\n")
    assert cli.run(["compute", "--input", path]) == 1
    assert "line 2" in capsys.readouterr().err


def test_rank_deficient_exit_one(tmp_path, capsys):
    path = write(tmp_path, "r.csv", "1,1\n2,2\n")
    assert cli.run(["scan-signed", "--input", path]) == 1


def test_signature_cap_exit_three(tmp_path):
    rows = "\n".join("1,0" if i % 2 else "0,1" for i in range(17))
    path = write(tmp_path, "big.csv", rows)
    assert cli.run(["scan-signed", "--input", path]) == 3


def test_scan_signed_golden(tmp_path, capsys):
    path = write(tmp_path, "a.csv", "1,0\n0,1\n1,1\n")
    assert cli.run(["scan-signed", "--input", path]) == 0
    out = capsys.readouterr().out
    assert '"argmax_signature": [1, 1, -1]' in out


def test_project_command(tmp_path, capsys):
    path = write(tmp_path, "a.csv", "1,0\n0,1\n1,1\n")
    assert cli.run(["project", "--input", path, "--point", "2,0",
                    "--rhs", "1,1,3"]) == 0
    out = capsys.readouterr().out
    assert '"projection": [1, 0]' in out


def test_wls_command(tmp_path, capsys):
    path = write(tmp_path, "a.csv", "1,0\n0,1\n1,1\n")
    assert cli.run(["wls", "--input", path, "--weights", "1,1,1",
                    "--rhs", "1,1,2"]) == 0
    out = capsys.readouterr().out
    assert '"solution"' in out


def test_threads_env_validation(tmp_path, monkeypatch, capsys):
    path = write(tmp_path, "a.csv", "1,0\n0,1\n")
    monkeypatch.setenv("CONDMEAS_THREADS", "soup")
    assert cli.run(["compute", "--input", path]) == 1
    assert "CONDMEAS_THREADS" in capsys.readouterr().err
    monkeypatch.setenv("CONDMEAS_THREADS", "2")
    assert cli.run(["compute", "--input", path]) == 0


def test_report_roundtrip_rows(tmp_path, capsys):
    # the echoed matrix must reproduce the parsed doubles exactly
    path = write(tmp_path, "a.csv", "0.1,0.2\n0.30000000000000004,1\n")
    assert cli.run(["compute", "--input", path, "--measures", "chi"]) == 0
    out = capsys.readouterr().out
    start = out.index('"rows": ')
    rows_text = out[start + 8 : out.index("]]", start) + 2]
    parsed = json.loads(rows_text)
    assert parsed == [[0.1, 0.2], [0.30000000000000004, 1.0]]
