"""Pinned generator, sampling laws, experiment runners, and result writers."""

import json
import math

import numpy as np
import pytest

from frechet_sets.cost_model import power_cost
from frechet_sets.frechet_solver import EpsilonSchedule, FiniteDistribution
from frechet_sets.lln_lab import (
    SamplingDistribution,
    SplitMix64,
    make_n_grid,
    markov_bound,
    run_circle_experiment,
    run_fixture_diagnostics,
    run_median_experiment,
    run_regression_certificate,
    run_ulln_diagnostic,
    run_ulln_single,
    symmetric_lambda_min,
    ulln_table,
    write_results_csv,
    write_results_json,
)
from frechet_sets.metric_core import Point, euclidean_space, line_grid

# reference stream of the pinned generator; the seed-0 values agree with
# the widely published test vector for this mixer
GOLDEN_SEED0 = (
    0xE220A8397B1DCDAF,
    0x6E789E6AA1B965F4,
    0x06C45D188009454F,
    0xF88BB8A8724C81EC,
    0x1B39896A51A8749B,
    0x53CB9F0C747EA2EA,
    0x2C829ABE1F4532E1,
    0xC584133AC916AB3C,
    0x3EE5789041C98AC3,
    0xF3B8488C368CB0A6,
)
GOLDEN_SEED42 = (
    0xBDD732262FEB6E95,
    0x28EFE333B266F103,
    0x47526757130F9F52,
    0x581CE1FF0E4AE394,
    0x09BC585A244823F2,
    0xDE4431FA3C80DB06,
    0x37E9671C45376D5D,
    0xCCF635EE9E9E2FA4,
    0x5705B8770B3D7DD5,
    0x9E54D738297F77AE,
)


def test_rng_golden_streams():
    for seed, golden in ((0, GOLDEN_SEED0), (42, GOLDEN_SEED42)):
        rng = SplitMix64(seed)
        assert tuple(rng.next_u64() for _ in range(10)) == golden


def test_rng_block_matches_scalar_stream():
    a, b = SplitMix64(987654321), SplitMix64(987654321)
    block = b.next_block(257)
    scalars = [a.next_u64() for _ in range(257)]
    assert [int(v) for v in block] == scalars
    # continuation after a block stays aligned
    assert a.next_u64() == b.next_u64()


def test_rng_derived_draws():
    rng = SplitMix64(7)
    floats = [rng.next_float() for _ in range(100)]
    assert all(0.0 <= f < 1.0 for f in floats)
    rng2 = SplitMix64(7)
    assert np.array_equal(rng2.floats_block(100), np.array(floats))
    rng3 = SplitMix64(7)
    scalar_bits = [rng3.next_u64() >> 63 for _ in range(100)]
    assert SplitMix64(7).bits_block(100).tolist() == scalar_bits


def test_sampling_draw_budgets():
    # each law consumes its documented number of outputs per sample
    base = SplitMix64(11)
    SamplingDistribution.bernoulli_product(3).draw(base, 10)
    stepped = SplitMix64(11)
    stepped.next_block(30)
    assert base.state == stepped.state

    base = SplitMix64(13)
    SamplingDistribution.regression(2).draw(base, 7)
    stepped = SplitMix64(13)
    stepped.next_block(21)
    assert base.state == stepped.state

    base = SplitMix64(17)
    SamplingDistribution.circle_antipodal().draw(base, 9)
    stepped = SplitMix64(17)
    stepped.next_block(9)
    assert base.state == stepped.state


def test_sampling_values():
    rng = SplitMix64(3)
    angles = SamplingDistribution.circle_antipodal().draw(rng, 200)
    assert set(a.value for a in angles) == {0.0, math.pi}

    mass = SamplingDistribution.finite_support((Point.vector(2.0),), [1.0])
    assert mass.draw(SplitMix64(5), 5) == [Point.vector(2.0)] * 5

    bits = SamplingDistribution.bernoulli_product(1).draw(SplitMix64(9), 1000)
    p = bits.mean()
    assert 0.0 <= p <= 1.0 and 0.3 < p < 0.7

    x, y = SamplingDistribution.regression(1, noise=0.0).draw(SplitMix64(1), 50)
    assert set(np.unique(x[:, 0])) == {1.0}
    assert set(np.unique(x[:, 1])) == {-1.0, 1.0}
    assert np.allclose(y, x.sum(axis=1))


def test_make_n_grid():
    grid = make_n_grid(100)
    assert grid[0] == 1 and grid[-1] == 100
    assert all(n in grid for n in (2, 4, 8, 16, 32, 64))
    assert all(n in grid for n in range(1, 64, 2))
    assert make_n_grid(4095)[-1] == 4095


def test_markov_bound_values():
    # fourth central moment of a fair bit via direct enumeration
    m4 = 0.5 * (0.0 - 0.5) ** 4 + 0.5 * (1.0 - 0.5) ** 4
    assert m4 == 1.0 / 16.0
    n = 4096
    assert markov_bound(n, n**-0.25, m4) == pytest.approx(n**-2.0, rel=1e-12)
    assert markov_bound(2, 100.0, m4) <= 1.0
    assert markov_bound(10, 0.5, m4) >= markov_bound(10, 1.0, m4)
    assert markov_bound(1, 0.1, m4) == 1.0  # clamped
    with pytest.raises(ValueError):
        markov_bound(10, 0.0, m4)


# -- median experiment -----------------------------------------------------------


def test_median_experiment_zero_slack_exactness():
    result = run_median_experiment(1, EpsilonSchedule.constant(0.0), 1023, seed=5)
    for record in result.records:
        assert record["d_sub"] == 0.0
        assert record["d_sub_box"] == 0.0
        assert record["lo0"] in (0.0, 1.0) or record["lo0"] == 0.0
        assert (record["lo0"], record["hi0"]) in ((0.0, 0.0), (1.0, 1.0), (0.0, 1.0))
        if record["n"] % 2 == 1:
            assert record["d_haus"] == 1.0
            assert record["d_haus_box"] == 1.0
        # interval is the unit box exactly when the walk sits at zero
        assert (record["walk0"] == 0) == (
            (record["lo0"], record["hi0"]) == (0.0, 1.0)
        )


def test_median_experiment_flags_match_intervals():
    schedule = EpsilonSchedule.power_decay(1.0, 0.25)
    result = run_median_experiment(1, schedule, 2048, seed=11)
    for record in result.records:
        contains_unit = record["lo0"] <= 0.0 and record["hi0"] >= 1.0
        assert record["unit_box_subset"] == int(contains_unit)
        # analytic criterion: |walk| <= n * eps
        assert record["unit_box_subset"] == int(
            abs(record["walk0"]) <= record["n"] * record["eps"]
        )
        assert record["d_haus"] == 0.0 or not contains_unit


def test_median_experiment_interior_tracks_simultaneous_zeros():
    result = run_median_experiment(3, EpsilonSchedule.constant(0.0), 20000, seed=2)
    assert (
        result.summary["interior_occurrence_indices"]
        == result.summary["zero_return_indices"]
    )
    assert result.summary["zero_return_count"] == len(
        result.summary["zero_return_indices"]
    )
    # some corner is always available
    for record in result.records:
        assert record["any_corner_member"] == 1


def test_median_experiment_deterministic():
    a = run_median_experiment(2, EpsilonSchedule.constant(0.0), 512, seed=77)
    b = run_median_experiment(2, EpsilonSchedule.constant(0.0), 512, seed=77)
    assert a.records == b.records and a.summary == b.summary


# -- circle experiment -------------------------------------------------------------


def test_circle_experiment_population_set():
    result = run_circle_experiment(360, 256, seed=1)
    assert result.summary["population_cardinality"] == 2
    assert result.summary["population_angles"] == [math.pi / 2, 3 * math.pi / 2]
    for record in result.records:
        assert record["cardinality"] in (1, 2)
    final = result.records[-1]
    assert final["d_sub"] <= math.pi / 4


def test_circle_point_mass_is_singleton():
    # degenerate check through the population pipeline
    from frechet_sets.frechet_solver import eps_argmin, population_objective
    from frechet_sets.metric_core import circle_grid, circle_space

    space = circle_space()
    grid = circle_grid(space, 90)
    dist = FiniteDistribution((Point.angle(0.0),), np.array([1.0]))
    obj = population_objective(dist, power_cost(2.0, Point.angle(1.0)), grid)
    assert eps_argmin(obj, 0.0).points() == (Point.angle(0.0),)


# -- regression experiment -----------------------------------------------------------


def test_symmetric_lambda_min_examples():
    assert symmetric_lambda_min(np.eye(3)) == 1.0
    assert symmetric_lambda_min(np.diag([1.0, 3.0])) == 1.0
    assert symmetric_lambda_min(np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx(
        1.0, abs=1e-12
    )
    with pytest.raises(ValueError, match="symmetric"):
        symmetric_lambda_min(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError, match="at most 8"):
        symmetric_lambda_min(np.eye(9))


def test_symmetric_lambda_min_random_against_numpy():
    rng = np.random.default_rng(6)
    for _ in range(300):
        dim = int(rng.integers(1, 9))
        m = rng.normal(size=(dim, dim))
        sym = (m + m.T) / 2.0
        assert symmetric_lambda_min(sym) == pytest.approx(
            float(np.linalg.eigvalsh(sym)[0]), rel=1e-10, abs=1e-10
        )


def test_regression_certificate_convergence_and_bound():
    result = run_regression_certificate(1, 10_000, seed=3)
    cert = result.certificate
    assert cert is not None
    assert cert.a_plus == 1.0
    assert cert.a_minus == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-12)
    assert result.summary["final_a_plus_rel_err"] < 0.05
    assert result.summary["final_a_minus_rel_err"] < 0.05
    assert result.summary["min_slack_overall"] >= -1e-9
    # shape functions evaluate to the quadratic and linear forms exactly
    assert cert.psi_plus(3.0) == 9.0
    assert cert.psi_minus(3.0) == 3.0


def test_regression_early_singular_gram_reports_zero():
    result = run_regression_certificate(1, 64, seed=9)
    first = result.records[0]
    assert first["n"] == 1
    assert first["a_plus_n"] == 0.0  # rank-1 Gram from one sample


def test_regression_gram_form_equals_mean_cost():
    # the quadratic-form objective is the algebraic rewriting of the mean of
    # (y - b.x)**2 - y**2; the two agree to rounding
    x, y = SamplingDistribution.regression(1, noise=0.5).draw(SplitMix64(3), 500)
    gram = x.T @ x / 500
    v = x.T @ y / 500
    rng = np.random.default_rng(0)
    for _ in range(50):
        beta = rng.uniform(-2, 2, 2)
        gram_form = beta @ gram @ beta - 2 * beta @ v
        raw = np.mean((y - x @ beta) ** 2 - y**2)
        assert gram_form == pytest.approx(raw, abs=1e-12)


# -- uniform law diagnostic -----------------------------------------------------------


def test_ulln_point_mass_has_zero_deviation():
    space = euclidean_space(1)
    grid = line_grid(space, np.linspace(0, 1, 5))
    dist = FiniteDistribution((Point.vector(0.5),), np.array([1.0]))
    cost = power_cost(2.0, Point.vector(0.0))
    result = run_ulln_single(dist, cost, grid, [10, 100], seed=4)
    assert all(record["sup_dev"] == 0.0 for record in result.records)


def test_ulln_deviation_bounded_and_tightening():
    space = euclidean_space(1)
    grid = line_grid(space, np.linspace(0, 1, 21))
    dist = FiniteDistribution.uniform((Point.vector(0.0), Point.vector(1.0)))
    cost = power_cost(2.0, Point.vector(0.0))
    results = run_ulln_diagnostic(dist, cost, grid, [100, 10_000], seeds=range(10))
    table = ulln_table(results)
    assert len(table[100]) == 10
    # cost spread on this grid bounds every deviation
    rows = [cost.row(grid.space, y, grid) for y in dist.support]
    spread = float(np.abs(np.vstack(rows)).max())
    assert all(dev <= spread for devs in table.values() for dev in devs)
    assert np.median(table[10_000]) < np.median(table[100])


# -- fixture experiment ----------------------------------------------------------------


def test_fixture_experiment_summary():
    result = run_fixture_diagnostics(horizon=80, grid_max=90, diameter_cap=40.0)
    assert set(result.summary) == {
        "unit-indicator",
        "line-indicator",
        "reciprocal-tail",
    }
    for name, entry in result.summary.items():
        flags = {
            "uniform-on-bounded": entry["uniform_on_bounded"],
            "eventually-bounded": entry["eventually_bounded"],
            "approachable-minimizers": entry["approachable_minimizers"],
        }
        assert not flags[entry["violates"]]
        assert sum(1 for ok in flags.values() if not ok) == 1
        assert entry["min_escape"] >= 1.0


# -- heavy-tail demo -----------------------------------------------------------------


def test_heavy_tail_median_stays_put_demo(capsys):
    # demo, reported rather than asserted: on a heavy-tailed sample the
    # absolute-loss mean set stays in a fixed window while the squared-loss
    # minimizer drifts with the largest observations
    rng = SplitMix64(2024)
    u = np.array([rng.next_float() for _ in range(4000)])
    sample = (1.0 / (1.0 - u)) ** (1.0 / 1.2)  # infinite variance regime
    space = euclidean_space(1)
    grid = line_grid(space, np.linspace(0.0, 50.0, 201))
    anchor = Point.vector(0.0)
    rows = []
    from frechet_sets.cost_model import construct_h
    from frechet_sets.frechet_solver import empirical_objective, eps_argmin

    adapted = construct_h(sample)
    for n in (250, 1000, 4000):
        pts = [Point.vector(float(v)) for v in sample[:n]]
        med = eps_argmin(empirical_objective(pts, power_cost(1.0, anchor), grid), 0.0)
        mean = eps_argmin(empirical_objective(pts, power_cost(2.0, anchor), grid), 0.0)
        med_at = grid[med.indices[0]].value[0]
        mean_at = grid[mean.indices[0]].value[0]
        rows.append((n, med_at, mean_at))
        assert math.isfinite(med_at) and math.isfinite(mean_at)
    mean_h = float(np.mean(adapted.result(sample)))
    print("\n[demo] heavy-tail location estimates (n, absolute-loss, squared-loss):")
    for row in rows:
        print(f"[demo]   n={row[0]:5d}  median~{row[1]:6.2f}  mean~{row[2]:6.2f}")
    print(f"[demo] adapted-h sample mean: {mean_h:.3f} (finite by construction)")


# -- result writers ----------------------------------------------------------------------


def test_result_writers_are_deterministic(tmp_path):
    results = [
        run_median_experiment(1, EpsilonSchedule.constant(0.0), 128, seed=s)
        for s in (3, 1)
    ]
    j1, c1 = tmp_path / "a.json", tmp_path / "a.csv"
    j2, c2 = tmp_path / "b.json", tmp_path / "b.csv"
    write_results_json(results, str(j1))
    write_results_csv(results, str(c1))
    write_results_json(list(reversed(results)), str(j2))
    write_results_csv(list(reversed(results)), str(c2))
    assert j1.read_bytes() == j2.read_bytes()  # seed-sorted aggregation
    assert c1.read_bytes() == c2.read_bytes()

    doc = json.loads(j1.read_text())
    assert doc["schema_version"] == 1
    assert [r["seed"] for r in doc["results"]] == [1, 3]
    header = c1.read_text().splitlines()[0]
    assert header == "experiment,seed,n,metric,value"
