import json
import pathlib
from types import SimpleNamespace

import numpy as np
import pytest

from iontrans.errors import ConfigError, GeometryError, IonTransError
from iontrans.harness import (
    RunConfig,
    SweepRow,
    aggregate_rows,
    config_from_dict,
    load_config,
    oracle_entry_dict,
    point_entry_dict,
    run_sweep,
)
from iontrans.harness.io import format_number
from iontrans.harness.io.tables import RawCSVSerialiser
from iontrans.main import EXIT_CONFIG, EXIT_FAILURES, EXIT_OK, define_argument_parser, main
from iontrans.protocol import ProtocolParams

CONFIG_DIR = pathlib.Path(__file__).parents[1] / "configs"
SLOW_ORACLES = ("landau-zener-adiabatic", "landau-zener-diabatic")


def seeded_point(params, inputs):
    """Stand-in for a protocol run: values drawn from the point's own generator."""
    value = inputs.rng().uniform()
    return value, 1 - value, float(inputs.n_ions)


def failing_point(params, inputs):
    if inputs.realization == 1:
        raise GeometryError("degenerate chain")
    return 0.5, 0.0, 1.0


def write_config(path, content):
    path.write_text(json.dumps(content))
    return str(path)


###############################################################################
# Configuration
###############################################################################
def test_defaults():
    cfg = config_from_dict({})
    assert cfg == RunConfig()
    assert cfg.mode == "joint"
    assert cfg.n_ions == (18,)
    assert cfg.params.eta == 0.1
    assert cfg.params.eta_spurious == 0.4


def test_entries_are_resolved():
    cfg = config_from_dict({"N": 4, "seed": 7, "eta": 0.05, "amplitudes": [1, [0, 1], 0], "rwa": True})
    assert cfg.n_ions == (4,)
    assert cfg.seed == 7
    assert cfg.params.eta == 0.05
    assert cfg.params.rwa
    assert cfg.amplitudes == (1 + 0j, 1j, 0j)


@pytest.mark.parametrize(
    "content, field",
    [
        ({"eta": -0.1}, "eta"),
        ({"n_ions": [4]}, "n_ions"),
        ({"N": [0]}, "N"),
        ({"seed": True}, "seed"),
        ({"gamma": "ten"}, "gamma"),
        ({"unknown": 1}, "unknown"),
        ({"mode": "everything"}, "mode"),
        ({"amplitudes": [1, 0]}, "amplitudes"),
    ],
)
def test_invalid_entries_name_their_key(content, field):
    with pytest.raises(ConfigError) as info:
        config_from_dict(content)
    assert info.value.field == field
    assert f"'{field}'" in str(info.value)


def test_syntax_errors_name_their_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "seed": 1,\n}')
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.line == 3


def test_shipped_configurations_load():
    for name in ("joint", "step1", "step2"):
        cfg = load_config(CONFIG_DIR / f"{name}.json")
        assert cfg.realizations == 20


def test_shipped_chirp_durations():
    assert load_config(CONFIG_DIR / "step2.json").params.chirp_duration == ProtocolParams().chirp_duration == 4e4
    assert load_config(CONFIG_DIR / "joint.json").params.chirp_duration == 2e4


def test_overrides():
    cfg = RunConfig().with_overrides(mode="step3", seed=None, workers=3)
    assert (cfg.mode, cfg.seed, cfg.workers) == ("step3", 0, 3)
    with pytest.raises(ConfigError):
        RunConfig().with_overrides(workers=0)


###############################################################################
# Sweeps
###############################################################################
def test_aggregate_standard_error():
    rows = [SweepRow(2, r, 0, fidelity=f) for r, f in enumerate([0.9, 0.8, 1.0])]
    rows += [SweepRow(3, 0, 0, fidelity=0.7)]
    rows += [SweepRow(4, 0, 0, error="GeometryError: degenerate chain")]
    two, three, four = aggregate_rows(rows)
    assert two.mean == pytest.approx(0.9)
    assert two.stderr == pytest.approx(0.1 / np.sqrt(3))
    assert two.R == 3
    assert (three.mean, three.stderr, three.R) == (0.7, 0.0, 1)
    assert np.isnan(four.mean) and np.isnan(four.stderr)
    assert four.R == 0


def test_failed_points_do_not_stop_the_sweep(monkeypatch):
    monkeypatch.setitem(point_entry_dict, "step3", failing_point)
    result = run_sweep(RunConfig(mode="step3", n_ions=(2, 3), realizations=3))
    assert [(row.N, row.realization) for row in result.rows] == [(n, r) for n in (2, 3) for r in range(3)]
    assert len(result.failures) == 2
    assert all(np.isnan(row.fidelity) for row in result.failures)
    assert [entry.R for entry in result.aggregate] == [2, 2]


def test_sweep_rejects_non_sweep_modes():
    with pytest.raises(IonTransError):
        run_sweep(RunConfig(mode="gate"))


def test_raw_table_round_trip(tmp_path):
    rows = [SweepRow(2, 0, 5, 0.25, 0.5, 1e-3), SweepRow(2, 1, 5, error="failed")]
    path = tmp_path / "raw.csv"
    RawCSVSerialiser().save(path, rows)
    assert path.read_text().splitlines()[0] == "N,realization,seed,fidelity,leakage,duration_phys"
    first, second = RawCSVSerialiser().load(path)
    assert first == rows[0]
    assert np.isnan(second.fidelity)

    path.write_text("N,mean\n2,0.5\n")
    with pytest.raises(IonTransError):
        RawCSVSerialiser().load(path)


def test_number_format():
    assert format_number(True) == "true"
    assert format_number(np.bool_(False)) == "false"
    assert format_number(np.int64(5)) == "5"
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(1e-3) == "0.001"


###############################################################################
# Command line
###############################################################################
def test_description_is_plain_ascii():
    assert define_argument_parser().description.isascii()


def test_runs_are_deterministic(monkeypatch, tmp_path):
    monkeypatch.setitem(point_entry_dict, "step2-sweep", seeded_point)
    config = write_config(tmp_path / "run.json", {"N": [2, 4], "realizations": 3, "seed": 11})
    for name in ("a", "b"):
        assert main(["step2-sweep", "-c", config, "-o", str(tmp_path / name)]) == EXIT_OK
    for output in ("raw.csv", "aggregate.csv", "plot.dat"):
        assert (tmp_path / "a" / output).read_bytes() == (tmp_path / "b" / output).read_bytes()

    main(["step2-sweep", "-c", config, "-s", "12", "-o", str(tmp_path / "c")])
    assert (tmp_path / "a" / "raw.csv").read_bytes() != (tmp_path / "c" / "raw.csv").read_bytes()


def test_outputs_of_a_sweep(monkeypatch, tmp_path):
    monkeypatch.setitem(point_entry_dict, "step2-sweep", seeded_point)
    config = write_config(tmp_path / "run.json", {"N": [2], "realizations": 2, "rwa": True})
    assert main(["step2-sweep", "-c", config, "-o", str(tmp_path)]) == EXIT_OK

    echoed = json.loads((tmp_path / "config.json").read_text())
    assert echoed["mode"] == "step2-sweep"
    assert echoed["params"]["rwa"] is True
    plot = np.loadtxt(tmp_path / "plot.dat", ndmin=2)
    assert plot.shape == (1, 3)
    assert (tmp_path / "aggregate.csv").read_text().startswith("N,mean,stderr,R\n")


def test_exit_code_for_failed_points(monkeypatch, tmp_path, capsys):
    monkeypatch.setitem(point_entry_dict, "step3", failing_point)
    config = write_config(tmp_path / "run.json", {"N": [2], "realizations": 2})
    assert main(["step3", "-c", config, "-o", str(tmp_path)]) == EXIT_FAILURES
    assert "N=2 realization=1: GeometryError: degenerate chain" in capsys.readouterr().err


def test_exit_code_for_invalid_configurations(tmp_path, capsys):
    config = write_config(tmp_path / "run.json", {"n_ions": [2]})
    assert main(["joint", "-c", config, "-o", str(tmp_path)]) == EXIT_CONFIG
    assert "n_ions" in capsys.readouterr().err
    assert main(["joint", "-c", str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_ideal_gate_from_the_command_line(tmp_path):
    config = write_config(tmp_path / "run.json", {"gate_ideal": True, "amplitudes": [0.6, 0.0, 0.8]})
    assert main(["gate", "-c", config, "-o", str(tmp_path)]) == EXIT_OK
    report = json.loads((tmp_path / "gate.json").read_text())
    assert report["fidelity"] == pytest.approx(1.0)
    assert report["outputs"][2] == pytest.approx([-0.8, 0.0])


def test_ramp_scan_from_the_command_line(monkeypatch, tmp_path, capsys):
    def fake_step1(p, inputs, chain):
        return SimpleNamespace(fidelity=1 - 0.01 / p.ramp_duration)

    monkeypatch.setattr("iontrans.protocol.calibration.run_step1_retrieval", fake_step1)
    config = write_config(tmp_path / "run.json", {"N": [2]})
    assert main(["ramp-scan", "-c", config, "-o", str(tmp_path)]) == EXIT_OK
    assert "ramp_duration = 8 (converged)" in capsys.readouterr().out
    lines = (tmp_path / "scan.csv").read_text().splitlines()
    assert lines[0] == "ramp_duration,fidelity"
    assert len(lines) == 8
    assert json.loads((tmp_path / "scan.json").read_text())["converged_value"] == 8.0


###############################################################################
# Oracles
###############################################################################
def test_every_oracle_is_registered():
    assert len(oracle_entry_dict) == 10
    assert set(SLOW_ORACLES) <= set(oracle_entry_dict)


@pytest.mark.parametrize("name", [name for name in oracle_entry_dict if name not in SLOW_ORACLES])
def test_oracle(name):
    result = oracle_entry_dict[name]()
    assert result.name == name
    assert result.passed, f"{result.value} vs {result.expected}"


@pytest.mark.slow
@pytest.mark.parametrize("name", SLOW_ORACLES)
def test_landau_zener_oracle(name):
    assert oracle_entry_dict[name]().passed
