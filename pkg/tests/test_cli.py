import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest

CYLINDER = '{"schema": 1, "variant": "cylinder", "radius": 1.0}'
SHIFTED = ('{"schema": 1, "variant": "rotational", "profile": '
           '"shifted_sphere", "rho0": 1.0, "lam": 0.8660254037844386}')


def run_cli(*args, env_extra=None, text=True):
    env = dict(os.environ)
    env.update(env_extra or {})
    return subprocess.run([sys.executable, "-m", "crlab.cli", *args],
                          capture_output=True, text=text, env=env)


def parse_json_objects(text):
    """Decode a stream of concatenated (multi-line) JSON objects."""
    dec = json.JSONDecoder()
    out, i = [], 0
    while True:
        j = text.find("{", i)
        if j < 0:
            return out
        obj, end = dec.raw_decode(text[j:])
        out.append(obj)
        i = j + end


def test_invariants_json():
    r = run_cli("invariants", CYLINDER, "--at", "0.7,0.1")
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    assert out["surface"]["schema"] == 1
    assert out["at"] == [0.7, 0.1]
    assert out["jet"]["alpha"] == pytest.approx(0.0, abs=1e-14)
    assert out["hcr"] == pytest.approx(1.0 / 6.0, abs=1e-12)


def test_invariants_csv_rfc4180():
    r = run_cli("invariants", CYLINDER, "--at", "0.7,0.1", "--output", "csv",
                text=False)
    assert r.returncode == 0, r.stderr
    # CRLF line endings and one header + one data row
    assert b"\r\n" in r.stdout
    rows = list(csv.reader(io.StringIO(r.stdout.decode())))
    assert len(rows) == 2
    assert rows[0][:2] == ["u", "v"]
    assert len(rows[0]) == len(rows[1])


def test_repeat_runs_byte_identical():
    a = run_cli("invariants", CYLINDER, "--at", "0.7,0.1")
    b = run_cli("invariants", CYLINDER, "--at", "0.7,0.1")
    assert a.stdout == b.stdout


def test_energy_thread_count_byte_identical():
    args = ("energy", CYLINDER, "--which", "e2", "--grid", "16x16")
    a = run_cli(*args, env_extra={"CRLAB_THREADS": "1"})
    b = run_cli(*args, env_extra={"CRLAB_THREADS": "7"})
    assert a.returncode == 0 and b.returncode == 0
    assert a.stdout == b.stdout
    assert json.loads(a.stdout)["converged"] is True


def test_input_errors_exit_1():
    for args in (
        ("invariants", "{not json", "--at", "0,0"),
        ("invariants", '{"schema": 2, "variant": "cylinder"}', "--at", "0,0"),
        ("invariants", CYLINDER[:-1] + ', "bogus": 1}', "--at", "0,0"),
        ("invariants", "/no/such/file.json", "--at", "0,0"),
        ("invariants", CYLINDER, "--at", "0.7"),
        ("energy", CYLINDER),  # argparse usage error: missing --which
    ):
        r = run_cli(*args)
        assert r.returncode == 1, args
        assert r.stdout == ""


def test_error_reported_as_json_on_stderr():
    r = run_cli("invariants", '{"schema": 1, "variant": "nope"}',
                "--at", "0,0")
    assert r.returncode == 1
    objs = parse_json_objects(r.stderr)
    assert objs and "error" in objs[-1]


def test_strict_nonconvergence_exit_2():
    # the second energy of this family diverges at the pole
    r = run_cli("energy", SHIFTED, "--which", "e2", "--strict",
                "--grid", "16x16", "--cutoff", "0.05", "--levels", "1")
    assert r.returncode == 2
    out = json.loads(r.stdout)
    assert out["converged"] is False
    warns = parse_json_objects(r.stderr)
    assert any(w.get("category") == "NonconvergenceWarning" for w in warns)


def test_residual_reports_hcr_zero():
    # Hcr vanishes identically on the critical dilation cone
    crit = ('{"schema": 1, "variant": "graph", "profile": "dilation_cone", '
            '"c": 0.8660254037844386}')
    r = run_cli("residual", crit, "--which", "e1", "--at", "0.6,0.3")
    assert r.returncode == 0
    assert json.loads(r.stdout)["value"] is None
    r = run_cli("residual", crit, "--which", "e1", "--at", "0.6,0.3",
                "--strict")
    assert r.returncode == 2


def test_scan_csv():
    r = run_cli("scan", "--family", "dilation_cone", "--target", "Hcr",
                "--grid", "0.9:1.2:4", "--output", "csv")
    assert r.returncode == 0, r.stderr
    rows = list(csv.reader(io.StringIO(r.stdout)))
    assert rows[0] == ["param", "value"]
    assert len(rows) == 5
    # Hcr on the cone is positive for c above the critical value
    assert all(float(row[1]) > 0.0 for row in rows[1:])


def test_yamabe_csv_table():
    r = run_cli("yamabe", CYLINDER, "--output", "csv",
                "--table-grid", "3x3")
    assert r.returncode == 0, r.stderr
    rows = list(csv.reader(io.StringIO(r.stdout)))
    assert rows[0] == ["u", "v", "v_coeff", "w", "z", "l", "v1", "v2", "v3"]
    assert len(rows) == 10
    for row in rows[1:]:
        assert float(row[2]) == pytest.approx(-1.0 / 6.0, abs=1e-12)
        assert float(row[5]) == pytest.approx(4.0 / 135.0, abs=1e-12)


def test_verify_filter():
    r = run_cli("verify", "--filter", "cylinder_v")
    assert r.returncode == 0, r.stdout
    assert "PASS cylinder_v" in r.stdout
    assert "1/1 oracles passed" in r.stdout


def test_verify_unknown_filter_fails():
    r = run_cli("verify", "--filter", "no_such_oracle")
    assert r.returncode == 1
    assert "0/0 oracles passed" in r.stdout
