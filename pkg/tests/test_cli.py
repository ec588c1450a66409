"""Config validation, experiment dispatch, output artifacts, exit codes."""

import hashlib
import json
import os

import pytest

from frechet_sets.cli import (
    EXPERIMENT_IDS,
    THREADS_ENV_VAR,
    run,
    validate_config,
)


def write_config(tmp_path, name="cfg.json", **overrides):
    config = {
        "experiment": "median",
        "seeds": [0, 1],
        "n_max": 64,
        "schedule": {"kind": "constant", "c": 0.0, "exponent": 0.0},
        "params": {"dimension": 1},
        "out_dir": str(tmp_path / "out"),
    }
    config.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return path, config


def test_validate_accepts_good_config(tmp_path):
    _, config = write_config(tmp_path)
    echo, report = validate_config(config)
    assert report.ok
    assert report.warnings == []
    assert "thresholds" in report.defaulted
    assert echo["thresholds"] == {}


def test_validate_missing_seeds_is_issue():
    echo, report = validate_config({"experiment": "median"})
    assert not report.ok
    assert any("seeds" in issue for issue in report.issues)


def test_validate_unknown_key_is_warning_not_error(tmp_path):
    _, config = write_config(tmp_path)
    config["mystery"] = 1
    echo, report = validate_config(config)
    assert report.ok
    assert any("mystery" in w for w in report.warnings)


def test_validate_defaults_are_listed():
    echo, report = validate_config({"experiment": "fixtures"})
    assert report.ok
    assert "seeds" in report.defaulted
    assert echo["seeds"] == [0]
    assert echo["params"]["horizon"] == 100


@pytest.mark.parametrize("bad_seeds", [5, "abc", [[1]], [1, 1], [-2], []])
def test_validate_rejects_malformed_seeds(bad_seeds):
    echo, report = validate_config({"experiment": "median", "seeds": bad_seeds})
    assert not report.ok


def test_validate_rejects_negative_exponent():
    echo, report = validate_config(
        {
            "experiment": "median",
            "seeds": [0],
            "schedule": {"kind": "power-decay", "c": 1.0, "exponent": -1},
        }
    )
    assert not report.ok
    assert any("schedule exponent must be >= 0" in issue for issue in report.issues)


def test_validate_unknown_experiment_names_valid_ids():
    echo, report = validate_config({"experiment": "mystery", "seeds": [0]})
    assert not report.ok
    assert any(all(e in issue for e in EXPERIMENT_IDS) for issue in report.issues)


def test_run_writes_outputs_and_manifest(tmp_path, capsys):
    path, config = write_config(tmp_path)
    assert run(str(path)) == 0
    out = tmp_path / "out"
    json_path, csv_path = out / "median.json", out / "median.csv"
    manifest_path = out / "manifest.json"
    assert json_path.exists() and csv_path.exists() and manifest_path.exists()
    manifest = json.loads(manifest_path.read_text())
    for name, digest in manifest["files"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
    doc = json.loads(json_path.read_text())
    assert [r["seed"] for r in doc["results"]] == [0, 1]


def test_run_exit_codes(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert run(str(missing)) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(str(bad)) == 2
    path, _ = write_config(tmp_path, experiment="mystery")
    assert run(str(path)) == 2
    err = capsys.readouterr().err
    for experiment_id in EXPERIMENT_IDS:
        assert experiment_id in err


def test_run_runtime_error_exits_3(tmp_path, capsys):
    blocker = tmp_path / "blocked"
    blocker.write_text("not a directory")
    path, _ = write_config(tmp_path, out_dir=str(blocker / "sub"))
    assert run(str(path)) == 3
    assert "error" in capsys.readouterr().err


def test_run_validate_only_executes_nothing(tmp_path, capsys):
    path, _ = write_config(tmp_path)
    assert run(str(path), validate_only=True) == 0
    assert not (tmp_path / "out").exists()
    assert "config ok" in capsys.readouterr().out


def test_run_seed_override_and_out_dir(tmp_path):
    path, _ = write_config(tmp_path)
    other = tmp_path / "elsewhere"
    assert run(str(path), out_dir=str(other), seed_override=42) == 0
    doc = json.loads((other / "median.json").read_text())
    assert [r["seed"] for r in doc["results"]] == [42]


def test_run_is_deterministic_across_invocations(tmp_path):
    path_a, _ = write_config(tmp_path, name="a.json", out_dir=str(tmp_path / "oa"))
    path_b, _ = write_config(tmp_path, name="b.json", out_dir=str(tmp_path / "ob"))
    assert run(str(path_a)) == 0
    assert run(str(path_b)) == 0
    for name in ("median.json", "median.csv"):
        assert (tmp_path / "oa" / name).read_bytes() == (
            tmp_path / "ob" / name
        ).read_bytes()


def test_run_parallel_jobs_matches_serial(tmp_path):
    path_a, _ = write_config(tmp_path, name="a.json", out_dir=str(tmp_path / "oa"))
    path_b, _ = write_config(tmp_path, name="b.json", out_dir=str(tmp_path / "ob"))
    assert run(str(path_a), jobs=1) == 0
    assert run(str(path_b), jobs=4) == 0
    assert (tmp_path / "oa" / "median.csv").read_bytes() == (
        tmp_path / "ob" / "median.csv"
    ).read_bytes()


def test_threads_env_var_fallback(tmp_path, monkeypatch):
    path, _ = write_config(tmp_path)
    monkeypatch.setenv(THREADS_ENV_VAR, "2")
    assert run(str(path)) == 0
    assert (tmp_path / "out" / "median.json").exists()


def test_all_example_configs_validate():
    here = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    config_dir = os.path.join(here, "configs")
    for name in os.listdir(config_dir):
        with open(os.path.join(config_dir, name)) as fh:
            _, report = validate_config(json.load(fh))
        assert report.ok, (name, report.issues)


@pytest.mark.parametrize(
    "experiment,params",
    [
        ("circle", {"grid_size": 60, "alpha": 2.0}),
        ("regression", {"dimension": 1}),
        ("ulln", {"grid_points": 5, "alpha": 2.0, "n_list": [10, 50]}),
        ("fixtures", {"horizon": 20, "grid_max": 30, "diameter_cap": 10.0}),
    ],
)
def test_every_experiment_runs_from_config(tmp_path, experiment, params):
    path, _ = write_config(
        tmp_path,
        experiment=experiment,
        params=params,
        n_max=64,
        seeds=[0],
    )
    assert run(str(path)) == 0
    assert (tmp_path / "out" / f"{experiment}.json").exists()
