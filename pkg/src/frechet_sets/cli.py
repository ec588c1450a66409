"""Command-line front end: run named experiments from a JSON config.

The config names one experiment (median, circle, regression, ulln,
fixtures), the replication seeds, the horizon, the slack schedule, and
per-experiment parameters. Results are written as one JSON document and
one long-format CSV per experiment, plus a manifest with content hashes;
identical configs produce byte-identical outputs.

Exit codes: 0 success, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import copy
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .frechet_solver import EpsilonSchedule, FiniteDistribution
from .cost_model import power_cost
from .metric_core import Point, euclidean_space, line_grid
from . import lln_lab

EXPERIMENT_IDS = ("median", "circle", "regression", "ulln", "fixtures")

THREADS_ENV_VAR = "FRECHET_SETS_THREADS"

_TOP_LEVEL_KEYS = {
    "experiment",
    "seeds",
    "n_max",
    "schedule",
    "params",
    "out_dir",
    "thresholds",
}
_SCHEDULE_KEYS = {"kind", "c", "exponent"}
_PARAM_KEYS = {
    "median": {"dimension"},
    "circle": {"grid_size", "alpha"},
    "regression": {"dimension", "noise", "design_law", "beta_extent", "beta_points"},
    "ulln": {"grid_points", "alpha", "n_list"},
    "fixtures": {"horizon", "grid_max", "diameter_cap"},
}
_PARAM_DEFAULTS = {
    "median": {"dimension": 1},
    "circle": {"grid_size": 360, "alpha": 2.0},
    "regression": {
        "dimension": 1,
        "noise": 0.5,
        "design_law": "rademacher",
        "beta_extent": 2.0,
        "beta_points": 9,
    },
    "ulln": {"grid_points": 21, "alpha": 2.0, "n_list": [100, 10000]},
    "fixtures": {"horizon": 100, "grid_max": 100, "diameter_cap": 50.0},
}
_N_MAX_DEFAULTS = {
    "median": 4096,
    "circle": 4096,
    "regression": 10000,
    "ulln": 10000,
    "fixtures": 100,
}


class ConfigError(ValueError):
    """The run configuration is unreadable or invalid."""


@dataclass
class ValidationReport:
    issues: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    defaulted: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues


def validate_config(raw: dict) -> tuple[dict, ValidationReport]:
    """Check a raw config dict; return the defaults-filled echo and a report.

    Unknown keys are warnings, never errors. Every field the validator
    fills in is listed under ``defaulted`` and written back into the echo,
    so an emitted config is self-describing.
    """
    report = ValidationReport()
    if not isinstance(raw, dict):
        report.issues.append("config must be a JSON object")
        return {}, report
    echo = copy.deepcopy(raw)

    for key in raw:
        if key not in _TOP_LEVEL_KEYS:
            report.warnings.append(f"unknown key {key!r} ignored")

    experiment = raw.get("experiment")
    if experiment is None:
        report.issues.append("missing required field 'experiment'")
        return echo, report
    if experiment not in EXPERIMENT_IDS:
        report.issues.append(
            f"unknown experiment {experiment!r}; valid ids: {', '.join(EXPERIMENT_IDS)}"
        )
        return echo, report

    seeds = raw.get("seeds")
    if seeds is None:
        if experiment == "fixtures":
            echo["seeds"] = [0]
            report.defaulted.append("seeds")
        else:
            report.issues.append("missing required field 'seeds'")
    elif (
        not isinstance(seeds, list)
        or not seeds
        or not all(isinstance(s, int) and s >= 0 for s in seeds)
    ):
        report.issues.append("'seeds' must be a nonempty list of nonnegative integers")
    final_seeds = echo.get("seeds")
    if (
        isinstance(final_seeds, list)
        and all(isinstance(s, int) for s in final_seeds)
        and len(set(final_seeds)) != len(final_seeds)
    ):
        report.issues.append("'seeds' must not repeat")

    n_max = raw.get("n_max")
    if n_max is None:
        echo["n_max"] = _N_MAX_DEFAULTS[experiment]
        report.defaulted.append("n_max")
    elif not isinstance(n_max, int) or n_max < 2:
        report.issues.append("'n_max' must be an integer >= 2")

    schedule = raw.get("schedule")
    if schedule is None:
        echo["schedule"] = {"kind": "constant", "c": 0.0, "exponent": 0.0}
        report.defaulted.append("schedule")
    elif not isinstance(schedule, dict):
        report.issues.append("'schedule' must be an object")
    else:
        for key in schedule:
            if key not in _SCHEDULE_KEYS:
                report.warnings.append(f"unknown schedule key {key!r} ignored")
        kind = schedule.get("kind", "constant")
        if kind not in ("constant", "power-decay"):
            report.issues.append("schedule kind must be 'constant' or 'power-decay'")
        c = schedule.get("c", 0.0)
        exponent = schedule.get("exponent", 0.0)
        if not isinstance(c, (int, float)) or c < 0:
            report.issues.append("schedule constant must be >= 0")
        if not isinstance(exponent, (int, float)) or exponent < 0:
            report.issues.append("schedule exponent must be >= 0")
        filled = {"kind": kind, "c": float(c), "exponent": float(exponent)}
        if filled.keys() - schedule.keys():
            report.defaulted.extend(
                f"schedule.{k}" for k in sorted(filled.keys() - schedule.keys())
            )
        echo["schedule"] = filled

    params = raw.get("params", {})
    if not isinstance(params, dict):
        report.issues.append("'params' must be an object")
        params = {}
    else:
        for key in params:
            if key not in _PARAM_KEYS[experiment]:
                report.warnings.append(
                    f"unknown param {key!r} for experiment {experiment!r} ignored"
                )
    filled_params = dict(_PARAM_DEFAULTS[experiment])
    filled_params.update(
        {k: v for k, v in params.items() if k in _PARAM_KEYS[experiment]}
    )
    for key in sorted(set(filled_params) - set(params)):
        report.defaulted.append(f"params.{key}")
    echo["params"] = filled_params

    if "out_dir" not in raw:
        echo["out_dir"] = "results"
        report.defaulted.append("out_dir")
    if "thresholds" not in raw:
        echo["thresholds"] = {}
        report.defaulted.append("thresholds")

    return echo, report


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


# -- experiment dispatch -------------------------------------------------------


def _schedule_from(echo: dict) -> EpsilonSchedule:
    sched = echo["schedule"]
    return EpsilonSchedule(sched["kind"], c=sched["c"], exponent=sched["exponent"])


def _run_one_seed(echo: dict, seed: int) -> lln_lab.ExperimentResult:
    experiment = echo["experiment"]
    params = echo["params"]
    n_max = echo["n_max"]
    if experiment == "median":
        return lln_lab.run_median_experiment(
            params["dimension"], _schedule_from(echo), n_max, seed
        )
    if experiment == "circle":
        return lln_lab.run_circle_experiment(
            params["grid_size"], n_max, seed, alpha=params["alpha"]
        )
    if experiment == "regression":
        return lln_lab.run_regression_certificate(
            params["dimension"],
            n_max,
            seed,
            design_law=params["design_law"],
            noise=params["noise"],
            beta_extent=params["beta_extent"],
            beta_points=params["beta_points"],
        )
    if experiment == "ulln":
        space = euclidean_space(1)
        grid = line_grid(space, np.linspace(0.0, 1.0, params["grid_points"]))
        dist = FiniteDistribution.uniform((Point.vector(0.0), Point.vector(1.0)))
        cost = power_cost(params["alpha"], Point.vector(0.0))
        return lln_lab.run_ulln_single(dist, cost, grid, params["n_list"], seed)
    result = lln_lab.run_fixture_diagnostics(
        horizon=params["horizon"],
        grid_max=params["grid_max"],
        diameter_cap=params["diameter_cap"],
    )
    result.seed = seed
    return result


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    digest.update(path.read_bytes())
    return digest.hexdigest()


def run(
    config_path: str,
    out_dir: "str | None" = None,
    seed_override: "int | None" = None,
    jobs: "int | None" = None,
    validate_only: bool = False,
) -> int:
    """Execute the configured experiment; returns the process exit code."""
    try:
        raw = load_config(config_path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    echo, report = validate_config(raw)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if not report.ok:
        for issue in report.issues:
            print(f"error: {issue}", file=sys.stderr)
        return 2
    if validate_only:
        print(f"config ok; defaulted fields: {', '.join(report.defaulted) or 'none'}")
        return 0
    if seed_override is not None:
        echo["seeds"] = [int(seed_override)]
    if out_dir is not None:
        echo["out_dir"] = out_dir
    if jobs is None:
        jobs = int(os.environ.get(THREADS_ENV_VAR, "1") or "1")
    jobs = max(1, jobs)

    try:
        seeds = echo["seeds"]
        if jobs == 1 or len(seeds) == 1:
            results = [_run_one_seed(echo, seed) for seed in seeds]
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(lambda s: _run_one_seed(echo, s), seeds))
        results.sort(key=lambda r: r.seed)

        out = Path(echo["out_dir"])
        out.mkdir(parents=True, exist_ok=True)
        experiment = echo["experiment"]
        json_path = out / f"{experiment}.json"
        csv_path = out / f"{experiment}.csv"
        lln_lab.write_results_json(results, str(json_path))
        lln_lab.write_results_csv(results, str(csv_path))
        manifest = {
            "config": echo,
            "files": {
                json_path.name: _sha256(json_path),
                csv_path.name: _sha256(csv_path),
            },
        }
        with open(out / "manifest.json", "w") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
            fh.write("\n")
    except Exception as exc:  # runtime failure after a valid config
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


def main(argv: "list[str] | None" = None) -> None:
    parser = argparse.ArgumentParser(
        prog="frechet-sets",
        description="Run mean-set convergence experiments from a JSON config.",
    )
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--out", default=None, help="output directory override")
    parser.add_argument(
        "--seed-override",
        type=int,
        default=None,
        help="replace the config seed list with this single seed",
    )
    parser.add_argument(
        "--jobs",
        type=int,
        default=None,
        help=f"seed-level parallelism (default: ${THREADS_ENV_VAR} or 1)",
    )
    parser.add_argument(
        "--validate-only",
        action="store_true",
        help="check the config and exit without running",
    )
    args = parser.parse_args(argv)
    sys.exit(
        run(
            args.config,
            out_dir=args.out,
            seed_override=args.seed_override,
            jobs=args.jobs,
            validate_only=args.validate_only,
        )
    )


if __name__ == "__main__":
    main()
