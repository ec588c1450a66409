"""Set-convergence machinery for sequences of finite point sets.

One-sided and full Hausdorff distances, finite-horizon estimates of outer
and inner limits, eventual-boundedness and approachable-minimizer
diagnostics, a grid-level surrogate for epi-convergence, and the three
counterexample fixtures in which exactly one hypothesis of the
uniform-convergence consistency criterion fails.

All limit notions here are finite-horizon surrogates: every estimate takes
an explicit tail start and tolerance, and reports carry the parameters
used. On a finite grid the surrogates agree with the exact notions for
sequences that stabilize within the horizon.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .frechet_solver import Objective, eps_argmin
from .metric_core import (
    CandidateGrid,
    GridMismatchError,
    MetricSpace,
    PointSet,
    integer_grid,
    n0_line_space,
    n0_unit_space,
)


@dataclass(frozen=True, eq=False)
class SetSequence:
    """An ordered sequence of point sets over one grid."""

    grid: CandidateGrid
    sets: tuple[PointSet, ...]

    def __post_init__(self) -> None:
        if not self.sets:
            raise ValueError("a set sequence must be nonempty")
        for s in self.sets:
            if s.grid is not self.grid:
                raise GridMismatchError("all sets must live on the sequence grid")

    def __len__(self) -> int:
        return len(self.sets)


def d_subset(a: PointSet, b: PointSet) -> float:
    """One-sided Hausdorff distance sup_{x in a} dist(x, b).

    Conventions: 0 when ``a`` is empty; +inf when ``b`` is empty and ``a``
    is not (the infimum over an empty set).
    """
    if a.grid is not b.grid:
        raise GridMismatchError("point sets belong to different grids")
    if not a.indices:
        return 0.0
    if not b.indices:
        return math.inf
    dmat = a.grid.distance_matrix()
    sub = dmat[np.ix_(np.fromiter(a.indices, np.intp), np.fromiter(b.indices, np.intp))]
    return float(sub.min(axis=1).max())


def d_hausdorff(a: PointSet, b: PointSet) -> float:
    """Symmetric Hausdorff distance max(d_subset(a, b), d_subset(b, a))."""
    return max(d_subset(a, b), d_subset(b, a))


def _distance_to_set_per_point(seq_set: PointSet) -> np.ndarray:
    """dist(q, B) for every grid point q; +inf columns for empty B."""
    grid = seq_set.grid
    if not seq_set.indices:
        return np.full(len(grid), math.inf)
    dmat = grid.distance_matrix()
    return dmat[:, np.fromiter(seq_set.indices, np.intp)].min(axis=1)


def outer_limit_estimate(seq: SetSequence, tail_start: int, tol: float = 0.0) -> PointSet:
    """Points whose distance to some tail set is at most tol.

    Finite-horizon surrogate for the outer limit (points of accumulation
    of selections): min over n >= tail_start of dist(B_n, q) <= tol. On a
    finite horizon this over-approximates the true outer limit, since a
    point hit once in the tail cannot be ruled out as recurrent.
    """
    if not 0 <= tail_start < len(seq):
        raise ValueError("tail_start must index into the sequence")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    best = np.full(len(seq.grid), math.inf)
    for s in seq.sets[tail_start:]:
        best = np.minimum(best, _distance_to_set_per_point(s))
    return PointSet(seq.grid, np.flatnonzero(best <= tol))


def inner_limit_estimate(seq: SetSequence, tail_start: int, tol: float = 0.0) -> PointSet:
    """Points whose distance to every tail set is at most tol."""
    if not 0 <= tail_start < len(seq):
        raise ValueError("tail_start must index into the sequence")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    worst = np.zeros(len(seq.grid))
    for s in seq.sets[tail_start:]:
        worst = np.maximum(worst, _distance_to_set_per_point(s))
    return PointSet(seq.grid, np.flatnonzero(worst <= tol))


@dataclass(frozen=True)
class BoundednessReport:
    bounded: bool
    witness: "int | None"
    tail_diameters: tuple[float, ...]


def eventually_bounded(seq: SetSequence, cap: float = math.inf) -> BoundednessReport:
    """Whether some tail union has diameter at most ``cap``.

    The witness is the smallest tail start index whose union stays within
    the cap. On a finite grid with cap = inf this is always true; a finite
    cap makes the check meaningful on integer-line truncations.
    """
    grid = seq.grid
    dmat = grid.distance_matrix()
    union: set[int] = set()
    diam_from: list[float] = []
    # walk tails from the back so each union is built incrementally
    for s in reversed(seq.sets):
        union.update(s.indices)
        idx = np.fromiter(sorted(union), np.intp)
        diam_from.append(
            float(dmat[np.ix_(idx, idx)].max()) if len(idx) > 1 else 0.0
        )
    diam_from.reverse()
    for start, diam in enumerate(diam_from):
        if diam <= cap:
            return BoundednessReport(True, start, tuple(diam_from))
    return BoundednessReport(False, None, tuple(diam_from))


def approachable_minimizers_check(
    obj: Objective, eps_list: Sequence[float]
) -> list[tuple[float, float]]:
    """Trajectory of d_subset(eps-argmin, argmin) along a decreasing eps list.

    The caller judges the decay: a trajectory pinned at a positive value
    while eps shrinks is the signature of non-approachable minimizers.
    """
    eps_list = list(eps_list)
    if any(e <= 0 for e in eps_list):
        raise ValueError("eps values must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps values must be strictly decreasing")
    argmin = eps_argmin(obj, 0.0)
    return [(e, d_subset(eps_argmin(obj, e), argmin)) for e in eps_list]


@dataclass(frozen=True)
class EpiSurrogateReport:
    """Per-grid-point outcome of the epi-convergence surrogate."""

    lower_ok: np.ndarray
    upper_ok: np.ndarray
    delta: float
    tol: float
    tail_start: int

    @property
    def passes(self) -> np.ndarray:
        return self.lower_ok & self.upper_ok

    @property
    def all_pass(self) -> bool:
        return bool(self.passes.all())


def epi_convergence_surrogate(
    objectives: Sequence[Objective],
    limit: Objective,
    delta: float,
    tol: float,
    tail_start: int = 0,
) -> EpiSurrogateReport:
    """Finite-horizon, fixed-radius check of the two epi-convergence conditions.

    At each grid point x, with m_n the minimum of f_n over the open ball of
    radius delta around x: the lower condition requires min over the tail
    of m_n >= f(x) - tol, the upper condition requires max over the tail of
    m_n <= f(x) + tol (the recovery point is the ball argmin, which is
    optimal on a grid). On a discrete-metric grid with delta below the
    minimum point separation this is exactly pointwise convergence over
    the tail.
    """
    grid = limit.grid
    for obj in objectives:
        if obj.grid is not grid:
            raise GridMismatchError("all objectives must share one grid")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if not 0 <= tail_start < len(objectives):
        raise ValueError("tail_start must index into the sequence")
    dmat = grid.distance_matrix()
    balls = dmat < delta  # row x: open ball membership mask
    values = np.vstack([obj.values for obj in objectives[tail_start:]])
    n_pts = len(grid)
    lower_ok = np.zeros(n_pts, dtype=bool)
    upper_ok = np.zeros(n_pts, dtype=bool)
    for x in range(n_pts):
        ball_vals = values[:, balls[x]]
        m = ball_vals.min(axis=1)
        lower_ok[x] = bool(m.min() >= limit.values[x] - tol)
        upper_ok[x] = bool(m.max() <= limit.values[x] + tol)
    return EpiSurrogateReport(lower_ok, upper_ok, delta, tol, tail_start)


def uniform_on_bounded_check(
    objectives: Sequence[Objective], limit: Objective, subset: PointSet
) -> np.ndarray:
    """Per-n sup over ``subset`` of |f_n - f|."""
    if subset.grid is not limit.grid:
        raise GridMismatchError("subset must live on the objectives' grid")
    idx = np.fromiter(subset.indices, np.intp)
    out = np.empty(len(objectives))
    for i, obj in enumerate(objectives):
        if obj.grid is not limit.grid:
            raise GridMismatchError("all objectives must share one grid")
        out[i] = (
            np.abs(obj.values[idx] - limit.values[idx]).max() if idx.size else 0.0
        )
    return out


@dataclass(frozen=True, eq=False)
class LimitReport:
    """Summary of a set sequence against a reference set."""

    outer_limit: PointSet
    inner_limit: PointSet
    d_subset_trajectory: tuple[float, ...]
    d_hausdorff_trajectory: tuple[float, ...]
    eventually_bounded: bool
    witness: "int | None"
    params: dict

    def to_json_dict(self) -> dict:
        return {
            "outer": list(self.outer_limit.indices),
            "inner": list(self.inner_limit.indices),
            "d_sub": list(self.d_subset_trajectory),
            "d_haus": list(self.d_hausdorff_trajectory),
            "bounded": self.eventually_bounded,
            "witness": self.witness,
            "params": self.params,
        }

    def save_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")


def analyze_sequence(
    seq: SetSequence,
    reference: "PointSet | None" = None,
    tail_start: int = 0,
    tol: float = 0.0,
    diameter_cap: float = math.inf,
) -> LimitReport:
    """Compute limit estimates and distance trajectories for a set sequence.

    Trajectories are taken against ``reference`` when given, otherwise
    against the outer-limit estimate itself.
    """
    outer = outer_limit_estimate(seq, tail_start, tol)
    inner = inner_limit_estimate(seq, tail_start, tol)
    target = reference if reference is not None else outer
    d_sub = tuple(d_subset(s, target) for s in seq.sets)
    d_haus = tuple(d_hausdorff(s, target) for s in seq.sets)
    bounded = eventually_bounded(seq, diameter_cap)
    return LimitReport(
        outer_limit=outer,
        inner_limit=inner,
        d_subset_trajectory=d_sub,
        d_hausdorff_trajectory=d_haus,
        eventually_bounded=bounded.bounded,
        witness=bounded.witness,
        params={
            "tail_start": tail_start,
            "tol": tol,
            "diameter_cap": diameter_cap,
            "reference": None if reference is None else list(reference.indices),
        },
    )


# -- counterexample fixtures ---------------------------------------------------

FIXTURE_NAMES = ("unit-indicator", "line-indicator", "reciprocal-tail")

_FIXTURE_VIOLATIONS = {
    "unit-indicator": "uniform-on-bounded",
    "line-indicator": "eventually-bounded",
    "reciprocal-tail": "approachable-minimizers",
}


@dataclass(frozen=True, eq=False)
class CounterexampleFixture:
    """A minimizer-escape fixture violating exactly one convergence hypothesis.

    Each fixture provides a limit objective whose argmin is {0}, a sequence
    of objectives whose argmin contains an escaping point x_n = n, and the
    subset over which uniform convergence should be judged. ``violates``
    names the single hypothesis the fixture breaks: uniform convergence on
    bounded sets, eventual boundedness of the minimizer sets, or
    approachable minimizers of the limit.
    """

    name: str
    violates: str
    grid: CandidateGrid
    limit_objective: Objective
    objective_sequence: tuple[Objective, ...]
    argmin_sequence: SetSequence
    bounded_subset: PointSet
    approachability_eps: tuple[float, ...]


def counterexample_fixture(
    name: str, horizon: int = 100, grid_max: int = 100
) -> CounterexampleFixture:
    """Build one of the three named fixtures on a {0..grid_max} integer grid.

    ``unit-indicator``: unit metric, f_n = 1 - indicator({0, n}). Bounded
    sets include the whole grid (diameter 1), and the deviation from the
    limit stays 1 there, so uniform convergence on bounded sets fails
    while the other two hypotheses hold.

    ``line-indicator``: same functions under the line metric |i - j|.
    Bounded sets are windows, on which convergence is uniform, but the
    minimizer sets {0, n} have unbounded tail unions.

    ``reciprocal-tail``: unit metric, f(0) = 0 and f(i) = 1/i, truncated
    at level n. The limit's eps-argmin keeps a far tail at every eps the
    truncated grid can resolve (eps >= 1/grid_max), so minimizers are not
    approachable; the judgement window is exactly those resolvable eps.
    """
    if name not in _FIXTURE_VIOLATIONS:
        raise ValueError(f"unknown fixture {name!r}; choose from {FIXTURE_NAMES}")
    if not 1 <= horizon <= grid_max:
        raise ValueError("horizon must lie in [1, grid_max]")
    space: MetricSpace = (
        n0_line_space() if name == "line-indicator" else n0_unit_space()
    )
    grid = integer_grid(space, grid_max + 1)
    size = len(grid)
    ns = np.arange(size)

    if name in ("unit-indicator", "line-indicator"):
        limit_values = 1.0 - (ns == 0)
        seq_values = [1.0 - ((ns == 0) | (ns == n)) for n in range(1, horizon + 1)]
        # deviation judged on the whole grid for the unit metric (bounded
        # there), on a fixed window for the line metric (truncation makes
        # the full grid spuriously bounded)
        if name == "unit-indicator":
            subset = PointSet.full(grid)
        else:
            subset = PointSet(grid, range(min(horizon // 2, size)))
        eps_probe = tuple(0.5**k for k in range(1, 7))
    else:
        base = np.where(ns > 0, 1.0 / np.maximum(ns, 1), 0.0)
        limit_values = base
        seq_values = [np.where(ns < n, base, 0.0) for n in range(1, horizon + 1)]
        subset = PointSet.full(grid)
        eps_probe = tuple(1.0 / k for k in range(1, grid_max + 1))

    limit_obj = Objective(grid, limit_values, provenance="synthetic")
    seq_objs = tuple(
        Objective(grid, v, provenance="synthetic") for v in seq_values
    )
    argmins = SetSequence(grid, tuple(eps_argmin(o, 0.0) for o in seq_objs))
    return CounterexampleFixture(
        name=name,
        violates=_FIXTURE_VIOLATIONS[name],
        grid=grid,
        limit_objective=limit_obj,
        objective_sequence=seq_objs,
        argmin_sequence=argmins,
        bounded_subset=subset,
        approachability_eps=eps_probe,
    )


@dataclass(frozen=True)
class FixtureDiagnostics:
    """Hypothesis checks and escape behaviour for one fixture."""

    name: str
    violates: str
    uniform_on_bounded: bool
    eventually_bounded: bool
    approachable_minimizers: bool
    escape_distances: tuple[float, ...]
    sup_deviation_trajectory: tuple[float, ...]

    @property
    def hypothesis_flags(self) -> dict[str, bool]:
        return {
            "uniform-on-bounded": self.uniform_on_bounded,
            "eventually-bounded": self.eventually_bounded,
            "approachable-minimizers": self.approachable_minimizers,
        }


def diagnose_fixture(
    fixture: CounterexampleFixture,
    diameter_cap: float = 50.0,
    uniform_tol: "float | None" = None,
) -> FixtureDiagnostics:
    """Evaluate the three hypotheses and the escape trajectory of a fixture.

    Uniform convergence is judged by the final sup-deviation over the
    fixture's designated bounded subset falling below ``uniform_tol``
    (default 2/horizon, the resolution of a horizon-length run, so a 1/n
    decay passes while a deviation pinned at 1 fails); eventual boundedness
    by the tail unions of the argmin sequence under the cap; approachability
    by the last entry of the eps trajectory on the limit objective. The
    escape distances are d_subset(argmin f_n, argmin f) per n.
    """
    sup_dev = uniform_on_bounded_check(
        fixture.objective_sequence, fixture.limit_objective, fixture.bounded_subset
    )
    if uniform_tol is None:
        uniform_tol = 2.0 / len(fixture.objective_sequence)
    uniform_ok = bool(sup_dev[-1] <= uniform_tol)
    bounded = eventually_bounded(fixture.argmin_sequence, diameter_cap)
    approach = approachable_minimizers_check(
        fixture.limit_objective, fixture.approachability_eps
    )
    approach_ok = approach[-1][1] == 0.0
    limit_argmin = eps_argmin(fixture.limit_objective, 0.0)
    escape = tuple(
        d_subset(s, limit_argmin) for s in fixture.argmin_sequence.sets
    )
    return FixtureDiagnostics(
        name=fixture.name,
        violates=fixture.violates,
        uniform_on_bounded=uniform_ok,
        eventually_bounded=bounded.bounded,
        approachable_minimizers=approach_ok,
        escape_distances=escape,
        sup_deviation_trajectory=tuple(float(v) for v in sup_dev),
    )
