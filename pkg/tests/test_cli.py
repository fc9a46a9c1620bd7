import json

import numpy as np
import pytest

from typeflow import cli


def run(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    out = capsys.readouterr()
    return exc.value.code, out.out, out.err


JOINT = json.dumps({"kind": "joint", "probs": [[0.4, 0.1], [0.1, 0.4]]})
DIST = json.dumps({"kind": "dist", "probs": [0.5, 0.5]})


def test_bruteforce_json(capsys):
    code, out, _ = run(["bruteforce", "--counts", "2,1;1,2", "--n", "6",
                        "--m1", "2", "--m2", "2"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["A_size"] == 2 and payload["B_size"] == 2
    assert payload["density"] <= 1.0
    assert "config" in payload and "git_describe" in payload


def test_exponent_json(capsys):
    code, out, _ = run(["exponent", "--joint", JOINT, "--r1", "0.1",
                        "--r2", "0.1", "--refine", "0"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["units"] == "nats"
    assert payload["e_star"] >= 0.0
    assert payload["witness"]


def test_coupling_json(capsys):
    code, out, _ = run(["coupling", "--p", JOINT, "--qx", DIST, "--qy", DIST],
                       capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == pytest.approx(0.0, abs=1e-8)


def test_dsbs_csv_format(capsys, tmp_path):
    out_file = tmp_path / "surf.csv"
    code, _, _ = run(["dsbs", "--rho", "0.5", "--grid", "9",
                      "--out", str(out_file)], capsys)
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0] == "# units: bits"
    assert lines[1].startswith("# config: ")
    assert lines[2].startswith("# git: ")
    assert lines[3] == "s,t,value,envelope_value"
    assert len(lines) == 4 + 9 * 9


def test_region_csv_columns(capsys):
    code, out, _ = run(["region", "--joint", JOINT, "--kind", "biclique",
                        "--resolution", "0.34"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[3] == "r1,r2"
    assert len(lines) > 4


def test_bac_dry_run(capsys):
    code, out, _ = run(["bac", "--eps", "0", "--dry-run"], capsys)
    assert code == 0
    assert json.loads(out)["valid"] is True


def test_bac_eps_positive(capsys):
    code, out, _ = run(["bac", "--eps", "1e-4", "--rho", "0.6933",
                        "--r2", "0.45"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["ruled_out"] is (payload["residual"] < 0)


def test_exchange_with_matrix_file(capsys, tmp_path):
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    mat = tmp_path / "mat.csv"
    np.savetxt(mat, q, delimiter=",")
    code, out, _ = run(["exchange", "--matrix", str(mat), "--n1", "2"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert len(payload["J"]) == 2
    assert payload["residuals"]["top"] < 1e-8


def test_hyper_member(capsys):
    code, out, _ = run(["hyper", "--rho", "0.5", "--pq", "2.5,2.5",
                        "--grid", "33"], capsys)
    assert code == 0
    assert json.loads(out)["member"] is True


def test_exit_2_on_malformed_input(capsys):
    code, _, err = run(["exponent", "--joint", "{not json", "--r1", "0",
                        "--r2", "0"], capsys)
    assert code == 2
    assert "error" in err
    code, _, _ = run(["bruteforce", "--counts", "2,1;1,2", "--n", "5",
                      "--m1", "1", "--m2", "1"], capsys)
    assert code == 2  # counts do not sum to n
    code, _, _ = run(["dsbs", "--rho", "1.5"], capsys)
    assert code == 2


def test_exit_3_on_budget(capsys):
    code, _, err = run(["bruteforce", "--counts", "30,30;30,30", "--n", "120",
                        "--m1", "5", "--m2", "5"], capsys)
    assert code == 3
    assert "budget" in err


def test_deterministic_output_files(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["exponent", "--joint", JOINT, "--r1", "0.2", "--r2", "0.1",
            "--refine", "0", "--seed", "7"]
    assert run(argv + ["--out", str(a)], capsys)[0] == 0
    assert run(argv + ["--out", str(b)], capsys)[0] == 0
    ja = json.loads(a.read_text())
    jb = json.loads(b.read_text())
    # identical configs give identical payloads byte for byte apart from
    # nothing — the whole files should match
    assert a.read_bytes() == b.read_bytes()
    assert ja["config"]["out"] if "out" in ja["config"] else True
    assert ja == jb


def test_atomic_write_leaves_no_temp_files(capsys, tmp_path):
    out_file = tmp_path / "o.json"
    run(["bac", "--dry-run", "--out", str(out_file)], capsys)
    names = [p.name for p in tmp_path.iterdir()]
    assert names == ["o.json"]


def test_dry_run_everywhere(capsys):
    for argv in (
        ["exponent", "--joint", JOINT, "--r1", "0", "--r2", "0", "--dry-run"],
        ["region", "--joint", JOINT, "--dry-run"],
        ["coupling", "--p", JOINT, "--qx", DIST, "--qy", DIST, "--dry-run"],
        ["surface", "--rho", "0.5", "--dry-run"],
        ["bruteforce", "--counts", "1,1;1,1", "--n", "4", "--m1", "1",
         "--m2", "1", "--dry-run"],
        ["dsbs", "--rho", "0.5", "--dry-run"],
        ["hyper", "--rho", "0.5", "--pq", "2,2", "--dry-run"],
        ["verify", "--dry-run"],
    ):
        code, out, _ = run(argv, capsys)
        assert code == 0, argv
        assert json.loads(out)["valid"] is True


def test_surface_csv_theta_lower(capsys):
    code, out, _ = run(["surface", "--rho", "0.6", "--which", "phi",
                        "--grid", "7"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[3] == "s,t,value,envelope_value"
    row = lines[4].split(",")
    assert len(row) == 4
    assert float(row[2]) == pytest.approx(0.0, abs=1e-9)
