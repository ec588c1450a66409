"""Population and empirical Frechet objectives and their epsilon-argmin sets.

Objectives are vectors of cost values over a candidate grid. Empirical
objectives use compensated summation in a fixed index order so that the
same sample produces bit-identical values on every platform. The module
also provides the exact epsilon-argmin interval of the 1-D absolute-loss
objective over the whole real line, and the Cartesian composition of
per-axis mean sets into a product grid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .cost_model import CostFunction
from .metric_core import (
    CandidateGrid,
    GridMismatchError,
    Point,
    PointSet,
)

#: Absolute tolerance added to the epsilon-argmin threshold so that grid
#: points mathematically tied at the minimum are never excluded by
#: floating-point noise. Documented so golden outputs are stable.
ARGMIN_ABS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """A finitely supported distribution over data points."""

    support: tuple
    weights: np.ndarray

    def __post_init__(self) -> None:
        support = tuple(self.support)
        weights = np.asarray(self.weights, dtype=float)
        if not support:
            raise ValueError("support must be nonempty")
        if weights.shape != (len(support),):
            raise ValueError("weights must match the support length")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        if abs(float(weights.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")
        weights.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @staticmethod
    def uniform(support: Iterable) -> "FiniteDistribution":
        pts = tuple(support)
        return FiniteDistribution(pts, np.full(len(pts), 1.0 / len(pts)))


@dataclass(frozen=True, eq=False)
class Objective:
    """Cost values over a grid, tagged with their provenance."""

    grid: CandidateGrid
    values: np.ndarray
    provenance: str = "population"  # "population" | "empirical" | "synthetic"
    sample_size: "int | None" = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.grid),):
            raise ValueError("values must have one entry per grid point")
        if not np.all(np.isfinite(values)):
            raise ValueError("objective values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def min_value(self) -> float:
        return float(self.values.min())


@dataclass(frozen=True)
class EpsilonSchedule:
    """The slack sequence eps_n: constant, or c * n**(-exponent)."""

    kind: str
    c: float = 0.0
    exponent: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "power-decay"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.c < 0:
            raise ValueError("schedule constant must be >= 0")
        if self.exponent < 0:
            raise ValueError("schedule exponent must be >= 0")

    @staticmethod
    def constant(c: float) -> "EpsilonSchedule":
        return EpsilonSchedule("constant", c=c)

    @staticmethod
    def power_decay(c: float, exponent: float) -> "EpsilonSchedule":
        return EpsilonSchedule("power-decay", c=c, exponent=exponent)

    def value(self, n: int) -> float:
        if self.kind == "constant":
            return self.c
        return self.c * float(n) ** (-self.exponent)

    def values(self, ns: np.ndarray) -> np.ndarray:
        if self.kind == "constant":
            return np.full(len(ns), self.c)
        return self.c * np.asarray(ns, dtype=float) ** (-self.exponent)


def population_objective(
    dist: FiniteDistribution, cost: CostFunction, grid: CandidateGrid
) -> Objective:
    """Exact weighted cost sum of a finite-support distribution on a grid."""
    space = grid.space
    total = np.zeros(len(grid))
    for y, w in zip(dist.support, dist.weights):
        total += w * cost.row(space, y, grid)
    return Objective(grid, total, provenance="population")


def empirical_objective(
    sample: Sequence, cost: CostFunction, grid: CandidateGrid
) -> Objective:
    """Mean cost of a sample on a grid, via compensated summation.

    Rows are accumulated in sample index order with Kahan compensation, so
    the result is bit-reproducible. Rows for repeated data points are
    memoized when the data points are hashable.
    """
    sample = list(sample)
    if not sample:
        raise ValueError("sample must be nonempty")
    space = grid.space
    total = np.zeros(len(grid))
    comp = np.zeros(len(grid))
    cache: dict = {}
    for y in sample:
        try:
            row = cache.get(y)
            cacheable = True
        except TypeError:
            row, cacheable = None, False
        if row is None:
            row = cost.row(space, y, grid)
            if cacheable:
                cache[y] = row
        delta = row - comp
        bumped = total + delta
        comp = (bumped - total) - delta
        total = bumped
    return Objective(
        grid, total / len(sample), provenance="empirical", sample_size=len(sample)
    )


def eps_argmin(obj: Objective, eps: float) -> PointSet:
    """Grid points with value within eps of the minimum.

    Membership uses the documented absolute tolerance ARGMIN_ABS_TOL on top
    of the threshold, so exact ties survive floating-point noise.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    threshold = obj.min_value() + eps + ARGMIN_ABS_TOL
    return PointSet(obj.grid, np.flatnonzero(obj.values <= threshold))


def median_interval_1d(sample: Sequence[float], eps: float = 0.0) -> tuple[float, float]:
    """Exact eps-argmin of q -> mean |y_i - q| over the whole real line.

    With eps = 0 this is the classical median interval read off the order
    statistics. With eps > 0 the piecewise-linear objective is solved in
    closed form: the interval boundary lies where the unscaled objective
    G(q) = sum |y_i - q| crosses min G + n * eps, found by walking the
    sorted knots and inverting the linear segment that crosses.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    xs = np.sort(np.asarray(list(sample), dtype=float))
    n = xs.size
    if n == 0:
        raise ValueError("sample must be nonempty")
    if eps == 0.0:
        if n % 2 == 1:
            mid = xs[(n - 1) // 2]
            return float(mid), float(mid)
        return float(xs[n // 2 - 1]), float(xs[n // 2])

    prefix = np.concatenate([[0.0], np.cumsum(xs)])
    total = prefix[-1]
    j = np.arange(n)
    # G at each knot: sum of |y_i - xs[j]| with exact prefix arithmetic
    g_knots = ((j + 1) * xs - prefix[1:]) + ((total - prefix[1:]) - (n - 1 - j) * xs)
    g_min = float(g_knots.min())
    threshold = g_min + n * eps

    inside = g_knots <= threshold
    lo_idx = int(np.argmax(inside))
    hi_idx = int(n - 1 - np.argmax(inside[::-1]))

    if lo_idx == 0:
        lo = xs[0] - (threshold - g_knots[0]) / n
    else:
        slope = n - 2 * lo_idx  # descent rate of G just left of knot lo_idx
        lo = xs[lo_idx] - (threshold - g_knots[lo_idx]) / slope
    if hi_idx == n - 1:
        hi = xs[-1] + (threshold - g_knots[-1]) / n
    else:
        slope = 2 * (hi_idx + 1) - n  # ascent rate of G just right of knot hi_idx
        hi = xs[hi_idx] + (threshold - g_knots[hi_idx]) / slope
    return float(lo), float(hi)


def grid_restrict_interval(axis: CandidateGrid, lo: float, hi: float) -> PointSet:
    """Grid points of a 1-D vector grid lying in the closed interval [lo, hi]."""
    coords = np.array([p.value[0] for p in axis.points])
    return PointSet(axis, np.flatnonzero((coords >= lo) & (coords <= hi)))


def product_mean_set(
    per_axis_sets: Sequence[PointSet], product: CandidateGrid, alpha: float = 1.0
) -> PointSet:
    """Cartesian product of per-axis mean sets, re-indexed into a product grid.

    Valid for power exponents alpha >= 1, where the product-space mean set
    factors into the per-axis mean sets; the composition itself is pure
    index arithmetic over the row-major product layout.
    """
    if alpha < 1.0:
        raise ValueError("product composition requires alpha >= 1")
    if product.axes is None:
        raise GridMismatchError("target grid was not built as a product grid")
    if len(per_axis_sets) != len(product.axes):
        raise GridMismatchError("one axis set per product axis is required")
    for axis_set, axis in zip(per_axis_sets, product.axes):
        if axis_set.grid is not axis:
            raise GridMismatchError("axis set does not match the product axis grid")
    sizes = [len(axis) for axis in product.axes]
    strides = np.ones(len(sizes), dtype=np.int64)
    for k in range(len(sizes) - 2, -1, -1):
        strides[k] = strides[k + 1] * sizes[k + 1]
    indices = [0]
    for axis_set, stride in zip(per_axis_sets, strides):
        indices = [
            base + int(stride) * i for base in indices for i in axis_set.indices
        ]
    return PointSet(product, indices)


# -- CSV interfaces ----------------------------------------------------------


def _point_columns(p: Point) -> list[str]:
    if p.is_vector:
        return [repr(c) for c in p.value]
    return [repr(p.value)]


def objective_to_csv(obj: Objective, path: str) -> None:
    """Write rows of (grid index, coordinates..., value)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for i, (p, v) in enumerate(zip(obj.grid.points, obj.values)):
            writer.writerow([i, *_point_columns(p), repr(float(v))])


def point_set_to_csv(ps: PointSet, path: str) -> None:
    """Write rows of (grid index, coordinates..., membership flag)."""
    members = set(ps.indices)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for i, p in enumerate(ps.grid.points):
            writer.writerow([i, *_point_columns(p), int(i in members)])
