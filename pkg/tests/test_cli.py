"""CLI subcommands, state files, exit codes."""

import json

import numpy as np
import pytest

from mgd.cli import main, read_state_file, write_state_file
from mgd.states import StateSpec, make


def run(args):
    return main(args)


def test_state_file_roundtrip_is_bitwise_stable(tmp_path):
    rho = make(StateSpec(kind="random-density", n=2, seed=3))
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    write_state_file(p1, rho, 2)
    back, n = read_state_file(p1)
    assert n == 2
    assert np.array_equal(back, rho)
    write_state_file(p2, back, n)
    assert p1.read_bytes() == p2.read_bytes()


def test_gen_ghz_corners(tmp_path):
    out = tmp_path / "ghz.json"
    assert run(["gen", "ghz", "--n", "3", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["n_qubits"] == 3
    m = data["matrix"]
    assert m[0][0] == [0.5, 0.0] and m[7][7] == [0.5, 0.0]
    assert m[0][7] == [0.5, 0.0] and m[7][0] == [0.5, 0.0]


def test_discord_closed_and_both(tmp_path, capsys):
    state = tmp_path / "ghz.json"
    run(["gen", "ghz", "--n", "3", "--out", str(state)])
    assert run(["discord", "--state", str(state), "--method", "both",
                "--restarts", "4"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["closed"]["value"] == pytest.approx(0.5, abs=1e-9)
    assert report["numeric"]["value"] == pytest.approx(0.5, abs=1e-6)
    assert report["gap"] <= 1e-6
    assert set(report["closed"]["etas"]) == {"", "0", "1"}


def test_discord_trivial_states(tmp_path, capsys):
    mixed = tmp_path / "mixed.json"
    write_state_file(mixed, np.eye(8, dtype=complex) / 8, 3)
    run(["discord", "--state", str(mixed), "--method", "closed"])
    assert json.loads(capsys.readouterr().out)["closed"]["value"] == pytest.approx(
        0.0, abs=1e-12)

    prod = tmp_path / "p.json"
    run(["gen", "basis-product", "--n", "3", "--bits", "000", "--out", str(prod)])
    run(["discord", "--state", str(prod), "--method", "both", "--restarts", "4"])
    report = json.loads(capsys.readouterr().out)
    assert report["closed"]["value"] == pytest.approx(0.0, abs=1e-10)
    assert report["numeric"]["value"] == pytest.approx(0.0, abs=1e-10)


def test_order_flag_on_symmetric_state(tmp_path, capsys):
    state = tmp_path / "ghz.json"
    run(["gen", "ghz", "--n", "3", "--out", str(state)])
    values = []
    for order in ("1,2,3", "2,3,1", "3,1,2"):
        assert run(["discord", "--state", str(state), "--order", order]) == 0
        values.append(json.loads(capsys.readouterr().out)["closed"]["value"])
    assert values[0] == pytest.approx(values[1], abs=1e-12)
    assert values[0] == pytest.approx(values[2], abs=1e-12)


def test_sweep_werner_ghz_rows(tmp_path):
    out = tmp_path / "wg.csv"
    assert run(["sweep", "--family", "werner-ghz", "--n", "3",
                "--from", "0", "--to", "1", "--steps", "3",
                "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "p,discord_closed"
    rows = [tuple(float(x) for x in line.split(",")) for line in lines[1:]]
    assert rows[0][1] == pytest.approx(0.0, abs=1e-12)
    assert rows[1][1] == pytest.approx(0.125, abs=1e-9)
    assert rows[2][1] == pytest.approx(0.5, abs=1e-9)


def test_sweep_scaled_family_is_zero(tmp_path):
    out = tmp_path / "fam.csv"
    assert run(["sweep", "--family", "family", "--n", "3", "--c", "1,0,0",
                "--steps", "5", "--out", str(out)]) == 0
    for line in out.read_text().splitlines()[1:]:
        assert float(line.split(",")[1]) == pytest.approx(0.0, abs=1e-12)


def test_validate_random_and_file(tmp_path, capsys):
    assert run(["validate", "--random", "3", "0", "3"]) == 0
    assert "all checks passed" in capsys.readouterr().out
    state = tmp_path / "ghz.json"
    run(["gen", "ghz", "--n", "3", "--out", str(state)])
    capsys.readouterr()
    assert run(["validate", "--state", str(state)]) == 0
    assert "purity-identity" in capsys.readouterr().out


def test_exit_codes(tmp_path, capsys):
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{nope")
    assert run(["discord", "--state", str(garbage)]) == 2

    # valid JSON, invalid density (trace off): state-validation error
    bad = tmp_path / "bad.json"
    rho = np.eye(4, dtype=complex) / 4
    write_state_file(bad, rho, 2)
    data = json.loads(bad.read_text())
    data["matrix"][0][0] = [0.9, 0.0]
    bad.write_text(json.dumps(data))
    assert run(["discord", "--state", str(bad)]) == 3

    # non-PSD but unit-trace: still a state-validation error
    nonpsd = tmp_path / "nonpsd.json"
    write_state_file(nonpsd, np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex), 2)
    assert run(["validate", "--state", str(nonpsd)]) == 3

    # family spec failures at gen time are spec errors
    assert run(["gen", "family", "--n", "3", "--c", "0.9,0.9,0.9",
                "--out", str(tmp_path / "x.json")]) == 2
    assert run(["gen", "family", "--n", "4", "--c=-0.5,0.5,0.5",
                "--out", str(tmp_path / "y.json")]) == 2

    # unsupported size for the numeric method
    big = tmp_path / "big.json"
    assert run(["gen", "ghz", "--n", "7", "--out", str(big)]) == 0
    assert run(["discord", "--state", str(big), "--method", "numeric"]) == 4

    # shape mismatch between n_qubits and matrix: parse error
    mism = tmp_path / "mism.json"
    write_state_file(mism, np.eye(4, dtype=complex) / 4, 2)
    data = json.loads(mism.read_text())
    data["n_qubits"] = 3
    mism.write_text(json.dumps(data))
    assert run(["discord", "--state", str(mism)]) == 2
    capsys.readouterr()


def test_validate_requires_a_source():
    assert run(["validate"]) == 2
