"""Seeded Monte-Carlo experiments for empirical mean-set convergence.

A pinned SplitMix64 generator (identical streams on every platform, one
documented draw per primitive), sampling distributions, and the
experiment runners:

* the product-median experiment (escaping Hausdorff distance at slack 0,
  the simultaneous-zero-return mechanism behind strict outer limits in
  dimension >= 3, and the n**-1/4 slack schedule that restores Hausdorff
  convergence),
* the circle experiment with antipodal masses and its two-point mean set,
* the regression coercivity certificate with data-driven constants,
* the uniform law-of-large-numbers diagnostic,
* the counterexample fixture diagnostics.

Every runner is a pure function of (seed, config): results serialize to
byte-identical JSON and long-format CSV.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cost_model import CostFunction, IntegratedH, NondecreasingFn, power_cost
from .frechet_solver import (
    EpsilonSchedule,
    FiniteDistribution,
    empirical_objective,
    eps_argmin,
    grid_restrict_interval,
    median_interval_1d,
    population_objective,
    product_mean_set,
)
from .metric_core import (
    CandidateGrid,
    Point,
    PointSet,
    circle_grid,
    circle_space,
    euclidean_space,
    line_grid,
    product_grid,
)
from .set_limits import FIXTURE_NAMES, counterexample_fixture, d_hausdorff, d_subset, diagnose_fixture

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_FLOAT_SCALE = 2.0**-53

#: Occurrence-index lists longer than this are dropped from summaries
#: (the count is always kept), keeping result files small and
#: deterministic.
MAX_STORED_INDICES = 10_000

RESULT_SCHEMA_VERSION = 1


class SplitMix64:
    """The pinned pseudo-random generator.

    64-bit state advanced by a fixed odd constant, finalized by the
    standard two-round multiply-xorshift mix. ``next_block`` produces
    exactly the same stream as repeated ``next_u64`` calls. Derived draws:
    a uniform float uses the top 53 bits, a fair bit uses the top bit.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def next_block(self, count: int) -> np.ndarray:
        steps = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(self.state) + steps * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        self.state = (self.state + count * _GAMMA) & MASK64
        return z

    def next_float(self) -> float:
        return (self.next_u64() >> 11) * _FLOAT_SCALE

    def next_bit(self) -> int:
        return self.next_u64() >> 63

    def floats_block(self, count: int) -> np.ndarray:
        return (self.next_block(count) >> np.uint64(11)).astype(np.float64) * _FLOAT_SCALE

    def bits_block(self, count: int) -> np.ndarray:
        return (self.next_block(count) >> np.uint64(63)).astype(np.int64)


@dataclass(frozen=True, eq=False)
class SamplingDistribution:
    """A named sampling law with a documented per-draw budget of generator
    outputs: finite-support and circle-antipodal use one output per draw,
    bernoulli-product uses one per coordinate, regression uses one per
    design coordinate plus one for the noise term."""

    kind: str
    support: "tuple | None" = None
    weights: "np.ndarray | None" = None
    dimension: int = 1
    noise: float = 0.5
    design_law: str = "rademacher"

    @staticmethod
    def finite_support(points: Sequence, weights: Sequence[float]) -> "SamplingDistribution":
        w = np.asarray(weights, dtype=float)
        if abs(float(w.sum()) - 1.0) > 1e-12 or np.any(w < 0):
            raise ValueError("weights must be nonnegative and sum to 1")
        return SamplingDistribution("finite-support", support=tuple(points), weights=w)

    @staticmethod
    def bernoulli_product(dimension: int) -> "SamplingDistribution":
        if dimension < 1:
            raise ValueError("dimension must be positive")
        return SamplingDistribution("bernoulli-product", dimension=dimension)

    @staticmethod
    def circle_antipodal() -> "SamplingDistribution":
        return SamplingDistribution("circle-antipodal")

    @staticmethod
    def regression(
        dimension: int, noise: float = 0.5, design_law: str = "rademacher"
    ) -> "SamplingDistribution":
        if design_law != "rademacher":
            raise ValueError(f"unsupported design law {design_law!r}")
        if noise < 0:
            raise ValueError("noise level must be nonnegative")
        return SamplingDistribution(
            "regression", dimension=dimension, noise=noise, design_law=design_law
        )

    def draw(self, rng: SplitMix64, n: int):
        """Draw n i.i.d. samples, consuming the documented output budget."""
        if n < 1:
            raise ValueError("n must be positive")
        if self.kind == "finite-support":
            u = rng.floats_block(n)
            cum = np.cumsum(self.weights)
            idx = np.minimum(
                np.searchsorted(cum, u, side="right"), len(self.support) - 1
            )
            return [self.support[i] for i in idx]
        if self.kind == "bernoulli-product":
            bits = rng.bits_block(n * self.dimension)
            return bits.reshape(n, self.dimension)
        if self.kind == "circle-antipodal":
            bits = rng.bits_block(n)
            zero, pi = Point.angle(0.0), Point.angle(math.pi)
            return [pi if b else zero for b in bits]
        # regression: per sample, dimension design outputs then one noise output
        p = self.dimension + 1
        block = rng.next_block(n * p).reshape(n, p)
        signs = 2.0 * (block[:, : self.dimension] >> np.uint64(63)).astype(float) - 1.0
        u = (block[:, self.dimension] >> np.uint64(11)).astype(np.float64) * _FLOAT_SCALE
        x = np.column_stack([np.ones(n), signs])
        beta_true = np.ones(p)
        y = x @ beta_true + self.noise * (2.0 * u - 1.0)
        return x, y


@dataclass(frozen=True, eq=False)
class LowerBoundCertificate:
    """Data-driven coercivity constants with their shape functions.

    The lower bound asserts a_plus * psi_plus(|beta|) - a_minus *
    psi_minus(|beta|) <= objective(beta) pointwise, with the empirical
    constants converging to the population ones.
    """

    psi_plus: IntegratedH
    psi_minus: IntegratedH
    a_plus: float
    a_minus: float
    a_plus_n: tuple[float, ...]
    a_minus_n: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.a_plus > 0:
            raise ValueError("a_plus must be positive")
        if not all(math.isfinite(v) for v in self.a_plus_n + self.a_minus_n):
            raise ValueError("certificate trajectories must be finite")


@dataclass
class ExperimentResult:
    """Deterministic record of one experiment replication."""

    experiment: str
    seed: int
    config: dict
    n_grid: list[int]
    records: list[dict]
    summary: dict
    schema_version: int = RESULT_SCHEMA_VERSION
    certificate: "LowerBoundCertificate | None" = field(
        default=None, repr=False, compare=False
    )


def make_n_grid(n_max: int) -> list[int]:
    """Powers of two up to n_max, all odd n below 64, plus n_max itself."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    ns = {n_max}
    k = 1
    while k <= n_max:
        ns.add(k)
        k *= 2
    ns.update(range(1, min(64, n_max + 1), 2))
    return sorted(ns)


def _plain(value):
    """Coerce numpy scalars and containers to JSON-clean Python values."""
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def result_to_jsonable(result: ExperimentResult) -> dict:
    return {
        "schema_version": result.schema_version,
        "experiment": result.experiment,
        "seed": result.seed,
        "config": _plain(result.config),
        "n_grid": [int(n) for n in result.n_grid],
        "records": _plain(result.records),
        "summary": _plain(result.summary),
    }


def write_results_json(results: Sequence[ExperimentResult], path: str) -> None:
    """One JSON document per experiment, replications sorted by seed."""
    ordered = sorted(results, key=lambda r: r.seed)
    doc = {
        "schema_version": RESULT_SCHEMA_VERSION,
        "experiment": ordered[0].experiment if ordered else None,
        "results": [result_to_jsonable(r) for r in ordered],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_results_csv(results: Sequence[ExperimentResult], path: str) -> None:
    """Long-format rows (experiment, seed, n, metric, value) for all records."""
    ordered = sorted(results, key=lambda r: r.seed)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["experiment", "seed", "n", "metric", "value"])
        for result in ordered:
            for record in result.records:
                n = record.get("n", "")
                for key in sorted(record):
                    if key == "n":
                        continue
                    value = _plain(record[key])
                    text = repr(value) if isinstance(value, float) else str(value)
                    writer.writerow([result.experiment, result.seed, n, key, text])


# -- product-median experiment -------------------------------------------------

#: Per-axis candidate grid for the median experiments: the two mass points
#: and the interior midpoint, enough to distinguish corners from interior.
MEDIAN_AXIS_COORDS = (0.0, 0.5, 1.0)


def _interval_d_subset(a: tuple[float, float], b: tuple[float, float]) -> float:
    return max(0.0, b[0] - a[0], a[1] - b[1])


def _box_d_subset(a: Sequence[tuple[float, float]], b: Sequence[tuple[float, float]]) -> float:
    # one-sided Hausdorff distance between boxes factors along L1 axes
    return float(sum(_interval_d_subset(ai, bi) for ai, bi in zip(a, b)))


def run_median_experiment(
    s: int, schedule: EpsilonSchedule, n_max: int, seed: int
) -> ExperimentResult:
    """Sample the fair product-Bernoulli law and track the median-set walk.

    Coordinates are fair bits, so the per-axis empirical absolute-loss
    mean set is an exact order-statistic interval, the product set is
    their box, and every membership event reduces to integer walk
    arithmetic: with S_n the centered coordinate walk, the axis interval
    is [0, 1] exactly when S_n = 0 (at slack 0), the box [0,1]^s lies in
    the mean set exactly when |S_n| <= n * eps_n, and corner or interior
    probe membership are one-sided versions of the same comparison.

    Per-n trajectories (every n up to n_max) drive the summary counters;
    full interval solves and set distances are recorded on the n-grid.
    """
    if s < 1:
        raise ValueError("s must be positive")
    rng = SplitMix64(seed)
    bits = rng.bits_block(n_max * s).reshape(n_max, s)
    ones = np.cumsum(bits, axis=0)
    n_col = np.arange(1, n_max + 1, dtype=np.int64)[:, None]
    walks = 2 * ones - n_col
    eps = schedule.values(np.arange(1, n_max + 1))
    slack = n_col.astype(float) * eps[:, None]

    zero_ok = np.maximum(walks, 0) <= slack  # probe coordinate 0 in axis set
    one_ok = np.maximum(-walks, 0) <= slack  # probe coordinate 1 in axis set
    abs_walks = np.abs(walks)
    unit_ok = abs_walks <= slack  # axis interval contains [0, 1]
    interior_ok = abs_walks <= 2.0 * slack  # probe coordinate 1/2 in axis set

    sim_zero = (walks == 0).all(axis=1)
    corner_zero = zero_ok.all(axis=1)
    corner_one = one_ok.all(axis=1)
    any_corner = (zero_ok | one_ok).all(axis=1)
    interior = interior_ok.all(axis=1)
    unit_box = unit_ok.all(axis=1)

    zero_indices = (np.flatnonzero(sim_zero) + 1).tolist()
    interior_indices = (np.flatnonzero(interior) + 1).tolist()

    # checkpoints strictly below n_max, so every beyond-window is nonempty
    checkpoints = []
    k = 1
    while k < n_max:
        checkpoints.append(k)
        k *= 2

    def beyond(flags: np.ndarray) -> list[bool]:
        return [bool(flags[c:].any()) for c in checkpoints]

    axis_space = euclidean_space(1)
    axes = [line_grid(axis_space, MEDIAN_AXIS_COORDS) for _ in range(s)]
    box_grid = product_grid(axes)
    target_grid_set = PointSet.full(box_grid)
    target_box = [(0.0, 1.0)] * s

    float_bits = bits.astype(float)
    records = []
    grid_ns = make_n_grid(n_max)
    for n in grid_ns:
        eps_n = schedule.value(n)
        intervals = [
            median_interval_1d(float_bits[:n, k], eps_n) for k in range(s)
        ]
        axis_sets = [
            grid_restrict_interval(axes[k], *intervals[k]) for k in range(s)
        ]
        mean_set = product_mean_set(axis_sets, box_grid, alpha=1.0)
        record = {
            "n": n,
            "eps": float(eps_n),
            "d_sub": d_subset(mean_set, target_grid_set),
            "d_haus": d_hausdorff(mean_set, target_grid_set),
            "d_sub_box": _box_d_subset(intervals, target_box),
            "d_haus_box": max(
                _box_d_subset(intervals, target_box),
                _box_d_subset(target_box, intervals),
            ),
            "unit_box_subset": int(unit_box[n - 1]),
            "interior_member": int(interior[n - 1]),
            "corner_zero_member": int(corner_zero[n - 1]),
            "corner_one_member": int(corner_one[n - 1]),
            "any_corner_member": int(any_corner[n - 1]),
            "sim_zero_count": int(sim_zero[:n].sum()),
        }
        for k in range(s):
            record[f"lo{k}"] = float(intervals[k][0])
            record[f"hi{k}"] = float(intervals[k][1])
            record[f"walk{k}"] = int(walks[n - 1, k])
        records.append(record)

    summary = {
        "zero_return_count": int(sim_zero.sum()),
        "zero_return_indices": zero_indices
        if len(zero_indices) <= MAX_STORED_INDICES
        else [],
        "zero_return_indices_truncated": len(zero_indices) > MAX_STORED_INDICES,
        "interior_occurrence_count": int(interior.sum()),
        "interior_occurrence_indices": interior_indices
        if len(interior_indices) <= MAX_STORED_INDICES
        else [],
        "interior_occurrence_indices_truncated": len(interior_indices)
        > MAX_STORED_INDICES,
        "checkpoints": checkpoints,
        "corner_any_beyond_checkpoint": beyond(any_corner),
        "corner_zero_beyond_checkpoint": beyond(corner_zero),
        "corner_one_beyond_checkpoint": beyond(corner_one),
        "interior_beyond_checkpoint": beyond(interior),
        "final_unit_box_subset": int(unit_box[-1]),
        "final_d_haus": records[-1]["d_haus"],
    }
    config = {
        "s": s,
        "schedule": {
            "kind": schedule.kind,
            "c": schedule.c,
            "exponent": schedule.exponent,
        },
        "n_max": n_max,
        "axis_coords": list(MEDIAN_AXIS_COORDS),
    }
    return ExperimentResult(
        experiment="median",
        seed=seed,
        config=config,
        n_grid=grid_ns,
        records=records,
        summary=summary,
    )


def markov_bound(n: int, eps: float, fourth_central_moment: float) -> float:
    """Fourth-moment tail bound for the centered mean exceeding eps/2.

    The raw bound is n**-3 * m4 / (eps/2)**4, clamped into [0, 1].
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n < 1:
        raise ValueError("n must be positive")
    if fourth_central_moment < 0:
        raise ValueError("the fourth central moment must be nonnegative")
    raw = float(n) ** -3 * fourth_central_moment / (2.0**-4 * eps**4)
    return min(1.0, raw)


# -- circle experiment ---------------------------------------------------------


def run_circle_experiment(
    grid_size: int, n_max: int, seed: int, alpha: float = 2.0
) -> ExperimentResult:
    """Empirical power mean sets of the antipodal two-point law on a circle grid.

    The population mean set is computed exactly from the two-point law;
    per n on the n-grid the empirical set at slack 0 is recorded together
    with its one-sided distance to the population set and its cardinality.
    """
    space = circle_space()
    grid = circle_grid(space, grid_size)
    anchor = Point.angle(0.0)
    cost = power_cost(alpha, anchor)
    dist = FiniteDistribution.uniform((Point.angle(0.0), Point.angle(math.pi)))
    population = population_objective(dist, cost, grid)
    population_set = eps_argmin(population, 0.0)

    rng = SplitMix64(seed)
    sample = SamplingDistribution.circle_antipodal().draw(rng, n_max)
    records = []
    grid_ns = make_n_grid(n_max)
    for n in grid_ns:
        emp = empirical_objective(sample[:n], cost, grid)
        emp_set = eps_argmin(emp, 0.0)
        records.append(
            {
                "n": n,
                "d_sub": d_subset(emp_set, population_set),
                "cardinality": len(emp_set),
            }
        )
    summary = {
        "population_indices": list(population_set.indices),
        "population_angles": [grid[i].value for i in population_set.indices],
        "population_cardinality": len(population_set),
    }
    config = {"grid_size": grid_size, "n_max": n_max, "alpha": alpha}
    return ExperimentResult(
        experiment="circle",
        seed=seed,
        config=config,
        n_grid=grid_ns,
        records=records,
        summary=summary,
    )


# -- regression certificate ----------------------------------------------------


def symmetric_lambda_min(matrix: np.ndarray, off_target: float = 1e-12) -> float:
    """Smallest eigenvalue of a small symmetric matrix by cyclic Jacobi sweeps.

    Rotations run until the off-diagonal Frobenius norm falls below
    ``off_target`` (or the rounding floor of the matrix scale, whichever
    is larger). Inputs must be symmetric within 1e-10 and of dimension
    at most 8.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    dim = a.shape[0]
    if dim > 8:
        raise ValueError("dimension must be at most 8")
    if np.max(np.abs(a - a.T)) > 1e-10:
        raise ValueError("matrix must be symmetric within 1e-10")
    a = (a + a.T) / 2.0
    if dim == 1:
        return float(a[0, 0])
    floor = max(off_target, 1e-15 * np.linalg.norm(a))
    off_mask = ~np.eye(dim, dtype=bool)
    for _ in range(60):
        off = math.sqrt(float((a[off_mask] ** 2).sum()))
        if off < floor:
            break
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:  # tan would overflow; use its limit
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0)
                    )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for i in range(dim):
                    if i == p or i == q:
                        continue
                    aip, aiq = a[i, p], a[i, q]
                    a[i, p] = a[p, i] = c * aip - s * aiq
                    a[i, q] = a[q, i] = s * aip + c * aiq
                a[p, p] -= t * apq
                a[q, q] += t * apq
                a[p, q] = a[q, p] = 0.0
    return float(np.diag(a).min())


def run_regression_certificate(
    s: int,
    n_max: int,
    seed: int,
    design_law: str = "rademacher",
    noise: float = 0.5,
    beta_extent: float = 2.0,
    beta_points: int = 9,
) -> ExperimentResult:
    """Track the coercivity certificate of the squared-loss regression objective.

    The design is (1, U_1..U_s) with independent sign coordinates, the
    response is the all-ones linear form plus bounded uniform noise. The
    empirical constants are the smallest Gram eigenvalue and twice the
    cross-moment norm; the population constants follow from the design's
    known moments (identity Gram, all-ones cross moment). The pointwise
    lower bound with shapes psi_plus(d) = d**2 and psi_minus(d) = d is
    verified on a grid of coefficient vectors at every n-grid point.
    """
    dist = SamplingDistribution.regression(s, noise=noise, design_law=design_law)
    rng = SplitMix64(seed)
    x, y = dist.draw(rng, n_max)
    p = s + 1
    outer = np.einsum("ni,nj->nij", x, x)
    gram_cum = np.cumsum(outer, axis=0)
    xy_cum = np.cumsum(x * y[:, None], axis=0)

    betas = np.array(
        np.meshgrid(*([np.linspace(-beta_extent, beta_extent, beta_points)] * p))
    ).reshape(p, -1).T
    beta_norms = np.sqrt((betas**2).sum(axis=1))

    grid_ns = make_n_grid(n_max)
    records = []
    a_plus_traj = []
    a_minus_traj = []
    for n in grid_ns:
        gram = gram_cum[n - 1] / n
        v = xy_cum[n - 1] / n
        a_plus_n = max(0.0, symmetric_lambda_min(gram))
        a_minus_n = 2.0 * float(np.linalg.norm(v))
        quad = np.einsum("bi,ij,bj->b", betas, gram, betas)
        objective = quad - 2.0 * betas @ v
        bound = a_plus_n * beta_norms**2 - a_minus_n * beta_norms
        min_slack = float((objective - bound).min())
        a_plus_traj.append(a_plus_n)
        a_minus_traj.append(a_minus_n)
        records.append(
            {
                "n": n,
                "a_plus_n": a_plus_n,
                "a_minus_n": a_minus_n,
                "min_slack": min_slack,
            }
        )

    a_plus_pop = symmetric_lambda_min(np.eye(p))
    a_minus_pop = 2.0 * math.sqrt(p)
    certificate = LowerBoundCertificate(
        psi_plus=IntegratedH(NondecreasingFn((0.0,), (0.0,), 2.0)),
        psi_minus=IntegratedH(NondecreasingFn.constant(1.0)),
        a_plus=a_plus_pop,
        a_minus=a_minus_pop,
        a_plus_n=tuple(a_plus_traj),
        a_minus_n=tuple(a_minus_traj),
    )
    summary = {
        "a_plus_population": a_plus_pop,
        "a_minus_population": a_minus_pop,
        "final_a_plus": a_plus_traj[-1],
        "final_a_minus": a_minus_traj[-1],
        "final_a_plus_rel_err": abs(a_plus_traj[-1] - a_plus_pop) / a_plus_pop,
        "final_a_minus_rel_err": abs(a_minus_traj[-1] - a_minus_pop) / a_minus_pop,
        "min_slack_overall": min(r["min_slack"] for r in records),
        "psi_plus": "quadratic",
        "psi_minus": "linear",
    }
    config = {
        "s": s,
        "n_max": n_max,
        "design_law": design_law,
        "noise": noise,
        "beta_extent": beta_extent,
        "beta_points": beta_points,
    }
    return ExperimentResult(
        experiment="regression",
        seed=seed,
        config=config,
        n_grid=grid_ns,
        records=records,
        summary=summary,
        certificate=certificate,
    )


# -- uniform law-of-large-numbers diagnostic ------------------------------------


def run_ulln_single(
    dist: FiniteDistribution,
    cost: CostFunction,
    grid: CandidateGrid,
    n_list: Sequence[int],
    seed: int,
) -> ExperimentResult:
    """Sup-deviation of the empirical objective from the exact population one."""
    n_list = sorted(int(n) for n in n_list)
    if not n_list or n_list[0] < 1:
        raise ValueError("n_list must hold positive sample sizes")
    population = population_objective(dist, cost, grid)
    sampler = SamplingDistribution.finite_support(dist.support, dist.weights)
    rng = SplitMix64(seed)
    sample = sampler.draw(rng, n_list[-1])
    records = []
    for n in n_list:
        emp = empirical_objective(sample[:n], cost, grid)
        sup_dev = float(np.abs(emp.values - population.values).max())
        records.append({"n": n, "sup_dev": sup_dev})
    config = {"n_list": n_list, "grid_size": len(grid)}
    return ExperimentResult(
        experiment="ulln",
        seed=seed,
        config=config,
        n_grid=n_list,
        records=records,
        summary={"final_sup_dev": records[-1]["sup_dev"]},
    )


def run_ulln_diagnostic(
    dist: FiniteDistribution,
    cost: CostFunction,
    grid: CandidateGrid,
    n_list: Sequence[int],
    seeds: Sequence[int],
) -> list[ExperimentResult]:
    """One sup-deviation table per seed; aggregate with :func:`ulln_table`."""
    return [run_ulln_single(dist, cost, grid, n_list, seed) for seed in seeds]


def ulln_table(results: Sequence[ExperimentResult]) -> dict[int, list[float]]:
    """Sup-deviations grouped by sample size across replications."""
    table: dict[int, list[float]] = {}
    for result in results:
        for record in result.records:
            table.setdefault(record["n"], []).append(record["sup_dev"])
    return table


# -- fixture diagnostics ---------------------------------------------------------


def run_fixture_diagnostics(
    horizon: int = 100, grid_max: int = 100, diameter_cap: float = 50.0
) -> ExperimentResult:
    """Deterministic diagnostics of the three counterexample fixtures.

    For each fixture the three hypothesis flags and the per-n escape
    distance d_subset(argmin f_n, argmin f) are recorded; each fixture
    must violate exactly its designated hypothesis while the escape
    distance stays at least 1 over the whole horizon.
    """
    diagnostics = [
        diagnose_fixture(
            counterexample_fixture(name, horizon=horizon, grid_max=grid_max),
            diameter_cap=diameter_cap,
        )
        for name in FIXTURE_NAMES
    ]
    records = []
    for n in range(1, horizon + 1):
        record: dict = {"n": n}
        for diag in diagnostics:
            record[f"escape_{diag.name}"] = diag.escape_distances[n - 1]
            record[f"supdev_{diag.name}"] = diag.sup_deviation_trajectory[n - 1]
        records.append(record)
    summary = {
        diag.name: {
            "violates": diag.violates,
            "uniform_on_bounded": diag.uniform_on_bounded,
            "eventually_bounded": diag.eventually_bounded,
            "approachable_minimizers": diag.approachable_minimizers,
            "min_escape": min(diag.escape_distances),
        }
        for diag in diagnostics
    }
    config = {"horizon": horizon, "grid_max": grid_max, "diameter_cap": diameter_cap}
    return ExperimentResult(
        experiment="fixtures",
        seed=0,
        config=config,
        n_grid=list(range(1, horizon + 1)),
        records=records,
        summary=summary,
    )
