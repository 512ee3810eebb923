import csv
import json

import numpy as np
import pytest

from qrem.cli import (
    ConfigError,
    RunConfig,
    build_parser,
    config_from_args,
    main,
    parse_float_list,
    parse_int_range,
    resolve_seeds,
)


def run_cli(argv, tmp_path, monkeypatch, expect=0):
    monkeypatch.setenv("QREM_OUTPUT_DIR", str(tmp_path))
    rc = main(argv)
    assert rc == expect
    return rc


def read_payload(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def test_parse_int_range():
    assert parse_int_range("8..13") == [8, 9, 10, 11, 12, 13]
    assert parse_int_range("7") == [7]
    with pytest.raises(ConfigError):
        parse_int_range("9..5")


def test_parse_float_list_and_seeds():
    assert parse_float_list("0.5,1.0,2") == [0.5, 1.0, 2.0]
    assert resolve_seeds(3, 10, None) == [10, 11, 12]
    assert resolve_seeds(None, 0, "4,5") == [4, 5]
    with pytest.raises(ConfigError):
        resolve_seeds(20000, 0, None)


def test_config_round_trip():
    parser = build_parser()
    args = parser.parse_args(
        ["spectrum", "--n", "8", "--gamma", "2.0", "--seed", "3", "--k", "4"]
    )
    config = config_from_args(args)
    clone = RunConfig.from_dict(json.loads(json.dumps(config.to_dict())))
    assert clone == config


def test_spectrum_command(tmp_path, monkeypatch):
    out = tmp_path / "spec.json"
    run_cli(
        ["spectrum", "--n", "8", "--gamma", "2.5", "--seed", "1", "--k", "3",
         "--out", str(out)],
        tmp_path,
        monkeypatch,
    )
    payload = read_payload(out)
    assert payload["schema_version"] == 1
    assert len(payload["eigenvalues"]) == 3
    assert all(payload["converged"])
    assert payload["predicted_centers"][0]["multiplicity"] == 1
    assert len(payload["side_by_side"]) == 3
    manifest = read_payload(str(out) + ".manifest.json")
    assert manifest["config"]["command"] == "spectrum"
    assert manifest["tool"] == "qrem"


def test_spectrum_spin_glass_branch(tmp_path, monkeypatch):
    out = tmp_path / "sg.json"
    run_cli(
        ["spectrum", "--n", "8", "--gamma", "0.4", "--seed", "1", "--k", "2",
         "--out", str(out)],
        tmp_path,
        monkeypatch,
    )
    payload = read_payload(out)
    assert "site" in payload["predicted_centers"][0]


def test_green_command_with_oracle_column(tmp_path, monkeypatch):
    out = tmp_path / "green.csv"
    run_cli(
        ["green", "--n", "10", "--radius", "4", "--energy", "-25", "--out", str(out)],
        tmp_path,
        monkeypatch,
    )
    with open(out, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    names, definitions, data = rows[0], rows[1], rows[2:]
    assert names[0] == "d" and "oracle_delta" in names
    assert len(definitions) == len(names)
    assert len(data) == 5
    for row in data:
        assert float(row[names.index("oracle_delta")]) <= 1e-10


def test_thermo_command(tmp_path, monkeypatch):
    out = tmp_path / "thermo.csv"
    run_cli(
        ["thermo", "--n", "6..7", "--beta", "1.0", "--gamma", "2.0",
         "--seeds", "3", "--dtype", "float64", "--out", str(out)],
        tmp_path,
        monkeypatch,
    )
    with open(out, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["n", "mean", "stderr", "prediction", "gap_to_prediction"]
    assert len(rows) == 2 + 2


def test_ensemble_command(tmp_path, monkeypatch):
    out = tmp_path / "ens.json"
    run_cli(
        ["ensemble", "--n", "8", "--gamma", "0.0", "--seeds", "25", "--out", str(out)],
        tmp_path,
        monkeypatch,
    )
    payload = read_payload(out)
    assert payload["seed_count"] == 25
    assert 0.0 <= payload["ks_to_gumbel"] <= 1.0


def test_phase_command(tmp_path, monkeypatch):
    out = tmp_path / "phase.csv"
    run_cli(
        ["phase", "--betas", "0.5,2.0", "--gammas", "0.3,2.0", "--out", str(out)],
        tmp_path,
        monkeypatch,
    )
    with open(out, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 2 + 4
    regimes = {row[2] for row in rows[2:]}
    assert "quantum-paramagnet" in regimes


def test_gap_command(tmp_path, monkeypatch):
    out = tmp_path / "gap.json"
    run_cli(
        ["gap", "--n", "8", "--seed", "1", "--gamma-min", "0.7", "--gamma-max", "1.3",
         "--points", "5", "--refine-tol", "0.01", "--dtype", "float64",
         "--out", str(out)],
        tmp_path,
        monkeypatch,
    )
    payload = read_payload(out)
    assert payload["min_gap"] > 0
    assert len(payload["gaps"]) == 5


def test_rw_commands(tmp_path, monkeypatch):
    out = tmp_path / "rw.json"
    run_cli(
        ["rw", "--n", "10", "--steps", "4", "--d", "2", "--out", str(out)],
        tmp_path,
        monkeypatch,
    )
    payload = read_payload(out)
    assert 0.0 < payload["probability"] < 1.0
    out2 = tmp_path / "rws.json"
    run_cli(
        ["rw", "--n", "10", "--mode", "sojourn", "--w-size", "3", "--alpha", "0.3",
         "--t", "0.1", "--trials", "500", "--out", str(out2)],
        tmp_path,
        monkeypatch,
    )
    payload2 = read_payload(out2)
    assert payload2["probability"] <= payload2["bound"]


def test_deephole_command(tmp_path, monkeypatch):
    out = tmp_path / "dh.json"
    run_cli(
        ["deephole", "--n", "10", "--seed", "2", "--out", str(out)],
        tmp_path,
        monkeypatch,
    )
    payload = read_payload(out)
    assert "holds" in payload["report"]


def test_invalid_config_gives_machine_readable_error(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("QREM_OUTPUT_DIR", str(tmp_path))
    rc = main(["spectrum", "--n", "99", "--gamma", "1.0"])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert "matrix-free" in err["error"]["message"]
    rc = main(["rw", "--n", "8"])  # transition mode without steps/d
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["type"] == "ConfigError"


def test_replay_is_byte_identical_modulo_manifest_timestamp(tmp_path, monkeypatch):
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    argv = ["spectrum", "--n", "7", "--gamma", "1.5", "--seed", "9", "--k", "2"]
    run_cli(argv + ["--out", str(out_a)], tmp_path, monkeypatch)
    run_cli(argv + ["--out", str(out_b)], tmp_path, monkeypatch)
    assert out_a.read_bytes() == out_b.read_bytes()
    man_a = read_payload(str(out_a) + ".manifest.json")
    man_b = read_payload(str(out_b) + ".manifest.json")
    for volatile in ("timestamp_unix", "wall_time_s", "outputs", "config"):
        man_a.pop(volatile), man_b.pop(volatile)
    assert man_a == man_b


def test_csv_uses_lf_line_endings(tmp_path, monkeypatch):
    out = tmp_path / "g.csv"
    run_cli(
        ["green", "--n", "8", "--radius", "2", "--energy", "-15", "--out", str(out)],
        tmp_path,
        monkeypatch,
    )
    raw = out.read_bytes()
    assert b"\r\n" not in raw
    assert raw.decode("utf-8").endswith("\n")
