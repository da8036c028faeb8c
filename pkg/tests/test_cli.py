import csv
import io
import json

import pytest

from twistred.cli import EXIT_NON_GENERIC, EXIT_OK, EXIT_VALIDATION, run
from twistred.config import SCHEMA_VERSION, ConfigError, RunConfig

tol = 1e-10


def call(argv):
    buf = io.StringIO()
    code = run(argv, stdout=buf)
    return code, json.loads(buf.getvalue())


@pytest.fixture
def config_file(tmp_path):
    def make(**fields):
        data = {"algebra": {"family": "A", "rank": 1}, "lambdas": [2.0, 2.0]}
        data.update(fields)
        path = tmp_path / "config.json"
        path.write_text(json.dumps(data))
        return str(path)

    return make


def test_report_schema(config_file):
    code, report = call(["algebra", "--config", config_file()])
    assert code == EXIT_OK
    assert report["schema_version"] == SCHEMA_VERSION
    assert report["command"] == "algebra" and report["exit_code"] == 0
    assert report["config"]["algebra"] == {"family": "A", "rank": 1}
    assert report["results"]["dimension"] == 3
    assert report["results"]["weyl_constant"] == pytest.approx(-0.25)


def test_hamiltonian_forms_agree(config_file):
    code, report = call(["hamiltonian", "--config", config_file(algebra={"family": "A", "rank": 2}, lambdas=[3.0, 3.0, 3.0])])
    assert code == EXIT_OK
    values = report["results"]["values"]
    assert abs(values["operator_form"] - values["closed_form"]) < tol * max(1, abs(values["closed_form"]))


def test_hamiltonian_twisted_has_no_closed_form(config_file):
    code, report = call(["hamiltonian", "--config", config_file(algebra={"family": "A", "rank": 2}, gamma=2)])
    assert code == EXIT_OK
    assert report["results"]["values"]["closed_form"] is None


def test_simulate_writes_tables_and_script(config_file, tmp_path):
    out = tmp_path / "run"
    code, report = call(["simulate", "--config", config_file(time_grid={"start": 0, "stop": 0.5, "steps": 6}), "--out", str(out)])
    assert code == EXIT_OK
    assert report["results"]["max_observable_deviation"] < 1e-6
    for name in ("simulate.json", "projection.csv", "integrated.csv", "simulate.gp"):
        assert (out / name).exists()
    rows = list(csv.reader((out / "projection.csv").open()))
    assert rows[0][:3] == ["t", "q0", "p0"] and len(rows) == 7


def test_simulate_is_deterministic(config_file, tmp_path):
    cfg = config_file(time_grid={"start": 0, "stop": 0.3, "steps": 4})
    call(["simulate", "--config", cfg, "--seed", "3", "--out", str(tmp_path / "a")])
    call(["simulate", "--config", cfg, "--seed", "3", "--out", str(tmp_path / "b")])
    for name in ("projection.csv", "integrated.csv", "simulate.json"):
        assert (tmp_path / "a" / name).read_bytes().replace(b"/a", b"") == (tmp_path / "b" / name).read_bytes().replace(b"/b", b"")


def test_simulate_spinless_limit_has_zero_spin(config_file):
    code, report = call(["simulate", "--config", config_file(zero_spin=True, time_grid={"start": 0, "stop": 0.2, "steps": 3})])
    assert code == EXIT_OK
    assert report["results"]["max_observable_deviation"] < 1e-6


def test_simulate_collision_is_non_generic(config_file):
    cfg = config_file(lambdas=[1.0], zero_spin=True, initial_q=[0.05], initial_p=[-5.0])
    code, report = call(["simulate", "--config", cfg])
    assert code == EXIT_NON_GENERIC
    assert report["results"]["truncated"] is True


def test_verify_bijectivity_su2_three_sites(config_file):
    code, report = call(["verify", "bijectivity", "--config", config_file(lambdas=[3.0, 3.0, 3.0])])
    assert code == EXIT_OK
    (suite,) = report["results"]["suites"]
    assert all(v < tol for v in suite["residuals"].values())


def test_verify_all_with_workers(config_file):
    code, report = call(["verify", "all", "--config", config_file(samples=2), "--workers", "4"])
    assert code == EXIT_OK
    names = [s["name"] for s in report["results"]["suites"]]
    assert len(names) == 9 and report["results"]["passed"]


def test_verify_unknown_suite():
    code, report = call(["verify", "nonsense"])
    assert code == EXIT_VALIDATION
    assert report["results"]["kind"] == "validation"


def test_ym_from_couplings(config_file):
    code, report = call(["ym", "--config", config_file(algebra={"family": "A", "rank": 2}, lambdas=[2.0, 4.0, 4.0])])
    assert code == EXIT_OK
    assert report["results"]["field"]["marks"] == pytest.approx([0.25, 0.5, 0.75])
    assert all(v < tol for v in report["results"]["residuals"].values())


def test_spectrum_default_and_table(tmp_path):
    code, report = call(["spectrum", "--set", "energy_cutoff=6", "--out", str(tmp_path)])
    assert code == EXIT_OK
    energies = [lv["energy"] for lv in report["results"]["levels"]]
    assert energies == pytest.approx([0.0, 0.75, 2.0, 3.75, 6.0])
    rows = list(csv.reader((tmp_path / "levels.csv").open()))
    assert rows[0] == ["energy", "multiplicity", "weights"] and len(rows) == 6


def test_bad_couplings_exit_validation(config_file):
    code, report = call(["hamiltonian", "--config", config_file(lambdas=[1.0, 1.0])])
    assert code == EXIT_VALIDATION
    assert "lambda" in report["results"]["error"]


def test_unknown_config_field_rejected(config_file):
    code, _ = call(["algebra", "--config", config_file(colour="blue")])
    assert code == EXIT_VALIDATION


def test_missing_config_file(tmp_path):
    code, _ = call(["algebra", "--config", str(tmp_path / "absent.json")])
    assert code == EXIT_VALIDATION


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(lambdas=[1.0], marks=[0.5])
    with pytest.raises(ConfigError):
        RunConfig(lambdas=[2.0, 2.0], N=3)
    with pytest.raises(ConfigError):
        RunConfig(lambdas=[1.0], tolerances={"verify": -1})
    with pytest.raises(ConfigError):
        RunConfig(family="A", rank=9, lambdas=[1.0])
    cfg = RunConfig(marks=[0.25, 0.75])
    assert cfg.coupling().lambdas == pytest.approx((2.0, 2.0))
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
