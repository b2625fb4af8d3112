import csv
import json

import pytest

from varqite_maxwell.cli import main, read_trajectory
from varqite_maxwell.config import ConfigError, load

SMALL = ["--set", "maxwell.n_grid=4", "--set", "ansatz.n_qubits=4", "--set", "ansatz.family=\"Ry-Linear\"",
         "--set", "ansatz.layers=2", "--set", "state_prep.iterations=100", "--set", "state_prep.restarts=1",
         "--set", "evolution.t_final=0.1"]


def _rows(path):
    with open(path, encoding="utf-8") as fh:
        return list(csv.reader(line for line in fh if not line.startswith("#")))


def test_defaults_validate():
    cfg = load()
    assert cfg.maxwell.n_grid == 16 and cfg.ansatz.n_qubits == 6
    assert cfg.evolution.dt == pytest.approx(cfg.maxwell.dt)


def test_echo_roundtrip(tmp_path):
    cfg = load(None, ["ansatz.layers=4", "evolution.mode=\"shots:100\"", "seed=5"])
    path = tmp_path / "echo.toml"
    path.write_text(cfg.echo(), encoding="utf-8")
    again = load(path)
    assert again.echo() == cfg.echo()
    assert again.evolution.mode.shots == 100 and again.evolution.mode.seed == 5


def test_qubit_count_error_names_the_line(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[maxwell]\nn_grid = 16\n\n[ansatz]\nfamily = \"Ry-Linear\"\nn_qubits = 5\n", encoding="utf-8")
    with pytest.raises(ConfigError) as err:
        load(path)
    assert err.value.line == 6
    assert str(err.value).startswith(f"{path}:6:")


def test_unknown_key_and_syntax_errors(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[evolution]\nrho = 1e-4\nbogus = 1\n", encoding="utf-8")
    with pytest.raises(ConfigError) as err:
        load(path)
    assert err.value.line == 3
    path.write_text("[evolution]\nrho = = 1\n", encoding="utf-8")
    with pytest.raises(ConfigError) as err:
        load(path)
    assert err.value.line == 2
    with pytest.raises(ConfigError):
        load(None, ["ansatz.colour=3"])
    with pytest.raises(ConfigError):
        load(None, ["ansatz.layers"])


def test_invalid_config_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text("[ansatz]\nfamily = \"Rz-Ring\"\n", encoding="utf-8")
    assert main(["ansatz", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert f"{path}:2:" in capsys.readouterr().err


def test_reference_zero_time(tmp_path):
    assert main(["reference", "--set", "evolution.t_final=0", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "reference.csv")
    assert rows[0] == ["time", "field", "node_index", "value", "source"]
    assert len(rows) == 1 + 4 * 16
    assert {r[0] for r in rows[1:]} == {"0.0"}
    header = (tmp_path / "reference.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("# ")


def test_compare_identical_files(tmp_path):
    main(["reference", "--out", str(tmp_path)])
    f = str(tmp_path / "reference.csv")
    assert main(["compare", f, f, "--out", str(tmp_path / "cmp")]) == 0
    report = json.loads((tmp_path / "cmp" / "compare.json").read_text())
    assert report["epsilon_tr"] == 0.0


def test_decompose_lines(tmp_path):
    main(["decompose", "--out", str(tmp_path)])
    lines = [l for l in (tmp_path / "decompose.txt").read_text().splitlines() if not l.startswith("#")]
    assert len(lines) == 11
    re_, im, word = lines[0].split()
    float(re_), float(im)
    assert len(word) == 6


def test_cost_and_ansatz_reports(tmp_path):
    main(["cost", "--set", "ansatz.family=\"Ry-Linear\"", "--out", str(tmp_path)])
    rep = json.loads((tmp_path / "cost.json").read_text())
    assert rep["params"] == 18 and rep["lambda_circuits_per_step"] == 324
    main(["ansatz", "--out", str(tmp_path)])
    rep = json.loads((tmp_path / "ansatz.json").read_text())
    assert rep["params"] == 48 and rep["gate_counts"] == {"ry": 18, "cry": 30}


def test_fit_then_solve(tmp_path):
    assert main(["init-fit", *SMALL, "--out", str(tmp_path)]) == 0
    params = json.loads((tmp_path / "params.json").read_text())
    assert set(params) >= {"family", "n_qubits", "layers", "theta", "final_cost"}
    assert main(["solve", *SMALL, "--params", str(tmp_path / "params.json"), "--reference",
                 "--out", str(tmp_path)]) == 0
    times, vecs = read_trajectory(tmp_path / "trajectory.csv", "quantum")
    ctimes, _ = read_trajectory(tmp_path / "trajectory.csv", "classical")
    assert len(times) == 5 and list(times) == list(ctimes)
    summary = json.loads((tmp_path / "solve.json").read_text())
    assert 0.0 <= summary["error_report"]["epsilon_tr"] <= 1.0


def test_shot_mode_accounting_in_output(tmp_path):
    assert main(["solve", *SMALL, "--mode", "shots:50", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "solve.json").read_text())["accounting_identity"] is True


def test_sweep_rows(tmp_path):
    assert main(["sweep", *SMALL, "--set", "sweep.max_layers=2", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "sweep.csv")
    assert rows[0] == ["family", "n_qubits", "layers", "params", "epsilon_tr", "mode", "shots"]
    assert [r[2] for r in rows[1:]] == ["1", "2"]


@pytest.mark.parametrize("command", ["solve", "init-fit", "reference"])
def test_outputs_are_byte_identical(tmp_path, command):
    args = [command, *SMALL, "--seed", "7", "--mode", "shots:20" if command == "solve" else "exact",
            "--out", str(tmp_path)]
    main(args)
    first = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    main(args)
    second = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    assert first == second
