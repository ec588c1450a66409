"""Finite and gridded metric spaces.

Every downstream computation sees points and distances only through this
module: tagged points, a handful of concrete space kinds (Euclidean,
L1 products, the circle with arc-length, tabulated discrete metrics, and
the two nonnegative-integer spaces with unit and line metrics), optional
metric transforms (power d^alpha and concave-inverse), candidate grids,
balls, and diameters.

All types are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import csv
import enum
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

#: Number of points up to which distance tables get the full O(n^3)
#: triangle-inequality check at construction; larger tables are sampled.
FULL_TRIANGLE_CHECK_LIMIT = 512

_TRIANGLE_SAMPLES = 100_000
_METRIC_ATOL = 1e-12


class InvalidPointError(ValueError):
    """A point does not belong to the space it is used with."""


class GridMismatchError(ValueError):
    """Two grid-indexed objects refer to different grids."""


class SpaceKind(enum.Enum):
    EUCLIDEAN_L2 = "euclidean-L2"
    PRODUCT_L1 = "product-L1"
    CIRCLE_ARCLENGTH = "circle-arclength"
    DISCRETE_TABLE = "discrete-table"
    N0_UNIT = "N0-unit"
    N0_LINE = "N0-line"


_VECTOR_KINDS = frozenset({SpaceKind.EUCLIDEAN_L2, SpaceKind.PRODUCT_L1})
_INDEX_KINDS = frozenset(
    {SpaceKind.DISCRETE_TABLE, SpaceKind.N0_UNIT, SpaceKind.N0_LINE}
)


class TransformKind(enum.Enum):
    POWER = "power"
    CONCAVE_INVERSE = "concave-inverse"


@dataclass(frozen=True)
class Point:
    """A tagged point: vector coordinates, a circle angle, or a discrete index.

    The explicit tag keeps points of different kinds distinct even when the
    raw values would compare equal (an angle 0.0 is not the index 0). Use
    the named constructors instead of calling ``Point`` directly.
    """

    value: "tuple[float, ...] | float | int"
    kind: str  # "vector" | "angle" | "index"

    @staticmethod
    def vector(*coords: float) -> "Point":
        return Point(tuple(float(c) for c in coords), "vector")

    @staticmethod
    def angle(theta: float) -> "Point":
        # normalized representative in [0, 2*pi)
        return Point(float(theta) % TWO_PI, "angle")

    @staticmethod
    def index(i: int) -> "Point":
        if i < 0:
            raise InvalidPointError(f"discrete index must be nonnegative, got {i}")
        return Point(int(i), "index")

    @property
    def is_vector(self) -> bool:
        return self.kind == "vector"

    @property
    def is_angle(self) -> bool:
        return self.kind == "angle"

    @property
    def is_index(self) -> bool:
        return self.kind == "index"


@dataclass(frozen=True, eq=False)
class MetricTransform:
    """A distance-rescaling map applied after the base metric.

    ``power`` maps d to d**alpha with alpha in (0, 1]; ``concave-inverse``
    maps d through a user-supplied nondecreasing concave function fixing 0
    (typically the inverse of an integrated nondecreasing function). Both
    preserve the metric axioms.
    """

    kind: TransformKind
    alpha: float = 1.0
    inverse_fn: Callable[[np.ndarray | float], np.ndarray | float] | None = None

    def __post_init__(self) -> None:
        if self.kind is TransformKind.POWER:
            if not 0.0 < self.alpha <= 1.0:
                raise ValueError(f"power transform needs alpha in (0, 1], got {self.alpha}")
        elif self.inverse_fn is None:
            raise ValueError("concave-inverse transform needs an inverse_fn")

    @staticmethod
    def power(alpha: float) -> "MetricTransform":
        return MetricTransform(TransformKind.POWER, alpha=alpha)

    @staticmethod
    def concave_inverse(
        inverse_fn: "Callable[[np.ndarray | float], np.ndarray | float]",
    ) -> "MetricTransform":
        return MetricTransform(TransformKind.CONCAVE_INVERSE, inverse_fn=inverse_fn)

    def apply(self, d: "np.ndarray | float") -> "np.ndarray | float":
        if self.kind is TransformKind.POWER:
            return _stable_pow(d, self.alpha)
        return self.inverse_fn(d)


def _stable_pow(d: "np.ndarray | float", alpha: float) -> "np.ndarray | float":
    # Integral and half powers via exact primitives so that equal distances
    # give bit-equal transformed values on every platform.
    if alpha == 1.0:
        return d
    if alpha == 2.0:
        return d * d
    if alpha == 0.5:
        return np.sqrt(d) if isinstance(d, np.ndarray) else math.sqrt(d)
    return d**alpha


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """A metric space of one of the supported kinds.

    ``dimension`` applies to the vector kinds. ``distance_table`` (square,
    symmetric, zero diagonal, triangle-checked) applies to the discrete
    kind. ``transform``, when present, is applied after the base distance.
    """

    kind: SpaceKind
    dimension: int = 1
    distance_table: "np.ndarray | None" = None
    transform: "MetricTransform | None" = None

    def __post_init__(self) -> None:
        if self.kind in _VECTOR_KINDS and self.dimension < 1:
            raise ValueError("vector spaces need dimension >= 1")
        if self.kind is SpaceKind.DISCRETE_TABLE:
            if self.distance_table is None:
                raise ValueError("discrete-table space needs a distance table")
            table = np.array(self.distance_table, dtype=float)
            _validate_distance_table(table)
            table.setflags(write=False)
            object.__setattr__(self, "distance_table", table)
        elif self.distance_table is not None:
            raise ValueError("distance_table is only valid for discrete-table spaces")

    # -- point validation ---------------------------------------------------

    def validate_point(self, p: Point) -> None:
        if self.kind in _VECTOR_KINDS:
            if not p.is_vector or len(p.value) != self.dimension:
                raise InvalidPointError(
                    f"expected a {self.dimension}-dimensional vector point, got {p!r}"
                )
        elif self.kind is SpaceKind.CIRCLE_ARCLENGTH:
            if not p.is_angle:
                raise InvalidPointError(f"expected a circle angle point, got {p!r}")
        else:
            if not p.is_index:
                raise InvalidPointError(f"expected a discrete index point, got {p!r}")
            if self.kind is SpaceKind.DISCRETE_TABLE and p.value >= len(
                self.distance_table
            ):
                raise InvalidPointError(
                    f"index {p.value} outside table of size {len(self.distance_table)}"
                )

    # -- distances ----------------------------------------------------------

    def base_distance(self, q: Point, p: Point) -> float:
        self.validate_point(q)
        self.validate_point(p)
        kind = self.kind
        if kind is SpaceKind.EUCLIDEAN_L2:
            return math.sqrt(sum((a - b) ** 2 for a, b in zip(q.value, p.value)))
        if kind is SpaceKind.PRODUCT_L1:
            return sum(abs(a - b) for a, b in zip(q.value, p.value))
        if kind is SpaceKind.CIRCLE_ARCLENGTH:
            gap = abs(q.value - p.value)
            return min(gap, TWO_PI - gap)
        if kind is SpaceKind.DISCRETE_TABLE:
            return float(self.distance_table[q.value, p.value])
        if kind is SpaceKind.N0_UNIT:
            return 0.0 if q.value == p.value else 1.0
        return float(abs(q.value - p.value))  # N0_LINE

    def distance(self, q: Point, p: Point) -> float:
        """Distance between two points, transform applied last."""
        d = self.base_distance(q, p)
        if self.transform is not None:
            return float(self.transform.apply(d))
        return d

    def _base_distances_row(self, q: Point, packed: np.ndarray) -> np.ndarray:
        kind = self.kind
        if kind is SpaceKind.EUCLIDEAN_L2:
            diff = packed - np.asarray(q.value, dtype=float)
            return np.sqrt((diff * diff).sum(axis=1))
        if kind is SpaceKind.PRODUCT_L1:
            diff = packed - np.asarray(q.value, dtype=float)
            return np.abs(diff).sum(axis=1)
        if kind is SpaceKind.CIRCLE_ARCLENGTH:
            gap = np.abs(packed - q.value)
            return np.minimum(gap, TWO_PI - gap)
        if kind is SpaceKind.DISCRETE_TABLE:
            return self.distance_table[q.value, packed].astype(float)
        if kind is SpaceKind.N0_UNIT:
            return (packed != q.value).astype(float)
        return np.abs(packed - q.value).astype(float)  # N0_LINE

    def distances_row(self, q: Point, packed: np.ndarray) -> np.ndarray:
        row = self._base_distances_row(q, packed)
        if self.transform is not None:
            row = np.asarray(self.transform.apply(row), dtype=float)
        return row


def _validate_distance_table(table: np.ndarray) -> None:
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise ValueError(f"distance table must be square, got shape {table.shape}")
    n = table.shape[0]
    if n == 0:
        raise ValueError("distance table must be nonempty")
    if not np.all(np.isfinite(table)):
        raise ValueError("distance table entries must be finite")
    if np.any(table < 0):
        raise ValueError("distance table entries must be nonnegative")
    if np.any(np.diag(table) != 0.0):
        raise ValueError("distance table diagonal must be zero")
    if not np.array_equal(table, table.T):
        raise ValueError("distance table must be symmetric")
    if np.any((table == 0) & ~np.eye(n, dtype=bool)):
        raise ValueError("distance table has zero distance between distinct points")
    if n <= FULL_TRIANGLE_CHECK_LIMIT:
        for k in range(n):
            if np.any(table > table[:, k, None] + table[None, k, :] + _METRIC_ATOL):
                raise ValueError("distance table violates the triangle inequality")
    else:
        rng = np.random.default_rng(0)
        i, j, k = (rng.integers(0, n, _TRIANGLE_SAMPLES) for _ in range(3))
        if np.any(table[i, j] > table[i, k] + table[k, j] + _METRIC_ATOL):
            raise ValueError("distance table violates the triangle inequality")


class CandidateGrid:
    """An ordered, pairwise-distinct finite set of points of one space.

    ``mesh`` records the maximum distance from any intended domain point to
    its nearest grid point (0 for exactly finite spaces). ``axes`` is set by
    :func:`product_grid` so product structure can be recovered.
    """

    __slots__ = ("space", "points", "mesh", "axes", "_index_of", "_packed", "_dmat")

    def __init__(
        self,
        space: MetricSpace,
        points: Iterable[Point],
        mesh: float = 0.0,
        axes: "tuple[CandidateGrid, ...] | None" = None,
    ) -> None:
        pts = tuple(points)
        if not pts:
            raise ValueError("a candidate grid needs at least one point")
        if mesh < 0:
            raise ValueError("mesh must be nonnegative")
        for p in pts:
            space.validate_point(p)
        if len(set(pts)) != len(pts):
            raise ValueError("grid points must be pairwise distinct")
        self.space = space
        self.points = pts
        self.mesh = float(mesh)
        self.axes = axes
        self._index_of = {p: i for i, p in enumerate(pts)}
        self._packed = _pack_points(space, pts)
        self._dmat: "np.ndarray | None" = None

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i: int) -> Point:
        return self.points[i]

    def __repr__(self) -> str:
        return f"CandidateGrid({self.space.kind.value}, {len(self.points)} points)"

    def index_of(self, p: Point) -> int:
        try:
            return self._index_of[p]
        except KeyError:
            raise InvalidPointError(f"{p!r} is not a grid point") from None

    def contains_point(self, p: Point) -> bool:
        return p in self._index_of

    def distances_from(self, q: Point) -> np.ndarray:
        """Distances from ``q`` (any point of the space) to every grid point."""
        self.space.validate_point(q)
        return self.space.distances_row(q, self._packed)

    def distance_matrix(self) -> np.ndarray:
        if self._dmat is None:
            rows = [self.distances_from(p) for p in self.points]
            dmat = np.vstack(rows)
            dmat.setflags(write=False)
            self._dmat = dmat
        return self._dmat


def _pack_points(space: MetricSpace, pts: Sequence[Point]) -> np.ndarray:
    if space.kind in _VECTOR_KINDS:
        return np.array([p.value for p in pts], dtype=float)
    if space.kind is SpaceKind.CIRCLE_ARCLENGTH:
        return np.array([p.value for p in pts], dtype=float)
    return np.array([p.value for p in pts], dtype=np.int64)


class PointSet:
    """A finite subset of a grid, stored as sorted deduplicated indices.

    Equality requires the *same* grid object; sets over different grids
    never compare equal and may not be mixed in set operations.
    """

    __slots__ = ("grid", "indices")

    def __init__(self, grid: CandidateGrid, indices: Iterable[int]) -> None:
        idx = tuple(sorted(set(int(i) for i in indices)))
        if idx and (idx[0] < 0 or idx[-1] >= len(grid)):
            raise ValueError(f"indices out of range for grid of size {len(grid)}")
        self.grid = grid
        self.indices = idx

    @staticmethod
    def full(grid: CandidateGrid) -> "PointSet":
        return PointSet(grid, range(len(grid)))

    @staticmethod
    def empty(grid: CandidateGrid) -> "PointSet":
        return PointSet(grid, ())

    @staticmethod
    def from_points(grid: CandidateGrid, points: Iterable[Point]) -> "PointSet":
        return PointSet(grid, (grid.index_of(p) for p in points))

    def points(self) -> tuple[Point, ...]:
        return tuple(self.grid.points[i] for i in self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, index: int) -> bool:
        return index in set(self.indices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.grid is other.grid and self.indices == other.indices

    def __hash__(self) -> int:
        return hash((id(self.grid), self.indices))

    def __repr__(self) -> str:
        return f"PointSet({len(self.indices)} of {len(self.grid)})"

    def is_subset_of(self, other: "PointSet") -> bool:
        _require_same_grid(self, other)
        return set(self.indices) <= set(other.indices)

    def union(self, other: "PointSet") -> "PointSet":
        _require_same_grid(self, other)
        return PointSet(self.grid, self.indices + other.indices)


def _require_same_grid(a: PointSet, b: PointSet) -> None:
    if a.grid is not b.grid:
        raise GridMismatchError("point sets belong to different grids")


# -- operations --------------------------------------------------------------


def distance(space: MetricSpace, q: Point, p: Point) -> float:
    """Metric distance in ``space``, with the transform applied last."""
    return space.distance(q, p)


def ball_members(grid: CandidateGrid, center: Point, radius: float) -> PointSet:
    """Grid points at distance strictly less than ``radius`` from ``center``."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    row = grid.distances_from(center)
    return PointSet(grid, np.flatnonzero(row < radius))


def diameter(grid: CandidateGrid, subset: PointSet) -> float:
    """Largest pairwise distance within ``subset``; 0 for empty or singleton sets."""
    if subset.grid is not grid:
        raise GridMismatchError("subset belongs to a different grid")
    if len(subset) <= 1:
        return 0.0
    idx = np.fromiter(subset.indices, dtype=np.intp)
    sub = grid.distance_matrix()[np.ix_(idx, idx)]
    return float(sub.max())


# -- space and grid builders -------------------------------------------------


def euclidean_space(dimension: int, transform: "MetricTransform | None" = None) -> MetricSpace:
    return MetricSpace(SpaceKind.EUCLIDEAN_L2, dimension=dimension, transform=transform)


def product_l1_space(dimension: int, transform: "MetricTransform | None" = None) -> MetricSpace:
    return MetricSpace(SpaceKind.PRODUCT_L1, dimension=dimension, transform=transform)


def circle_space(transform: "MetricTransform | None" = None) -> MetricSpace:
    return MetricSpace(SpaceKind.CIRCLE_ARCLENGTH, transform=transform)


def table_space(table: np.ndarray, transform: "MetricTransform | None" = None) -> MetricSpace:
    return MetricSpace(SpaceKind.DISCRETE_TABLE, distance_table=table, transform=transform)


def n0_unit_space() -> MetricSpace:
    return MetricSpace(SpaceKind.N0_UNIT)


def n0_line_space() -> MetricSpace:
    return MetricSpace(SpaceKind.N0_LINE)


def line_grid(space: MetricSpace, values: Iterable[float], mesh: float = 0.0) -> CandidateGrid:
    """Grid of 1-D vector points from a list of coordinates."""
    if space.kind not in _VECTOR_KINDS or space.dimension != 1:
        raise ValueError("line_grid needs a 1-dimensional vector space")
    return CandidateGrid(space, (Point.vector(v) for v in values), mesh=mesh)


def circle_grid(space: MetricSpace, count: int) -> CandidateGrid:
    """Grid of ``count`` equally spaced angles; mesh is half the spacing."""
    if space.kind is not SpaceKind.CIRCLE_ARCLENGTH:
        raise ValueError("circle_grid needs a circle space")
    if count < 1:
        raise ValueError("count must be positive")
    angles = (Point.angle(TWO_PI * (k / count)) for k in range(count))
    return CandidateGrid(space, angles, mesh=math.pi / count)


def integer_grid(space: MetricSpace, count: int) -> CandidateGrid:
    """Grid of the indices 0..count-1 for the discrete space kinds."""
    if space.kind not in _INDEX_KINDS:
        raise ValueError("integer_grid needs a discrete space kind")
    if space.kind is SpaceKind.DISCRETE_TABLE and count > len(space.distance_table):
        raise ValueError("count exceeds the distance table size")
    return CandidateGrid(space, (Point.index(i) for i in range(count)))


def product_grid(axes: Sequence[CandidateGrid], mesh: float = 0.0) -> CandidateGrid:
    """Row-major Cartesian product of 1-D vector grids, under the L1 metric."""
    if not axes:
        raise ValueError("product_grid needs at least one axis")
    for axis in axes:
        if axis.space.kind not in _VECTOR_KINDS or axis.space.dimension != 1:
            raise ValueError("product axes must be 1-dimensional vector grids")
    space = product_l1_space(len(axes))
    points = [
        Point.vector(*(p.value[0] for p in combo))
        for combo in itertools.product(*(axis.points for axis in axes))
    ]
    return CandidateGrid(space, points, mesh=mesh, axes=tuple(axes))


# -- CSV interfaces ----------------------------------------------------------


def load_distance_table_csv(path: str) -> "tuple[MetricSpace, tuple[str, ...]]":
    """Load a discrete space from a square CSV distance matrix.

    The first row holds point labels; each following row holds one matrix
    row. Returns the space and the labels in order.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty distance table file")
    labels = tuple(cell.strip() for cell in rows[0])
    matrix = [[float(cell) for cell in row] for row in rows[1:]]
    if len(matrix) != len(labels):
        raise ValueError(f"{path}: expected {len(labels)} rows, got {len(matrix)}")
    return table_space(np.array(matrix, dtype=float)), labels


def load_points_csv(path: str, space: MetricSpace) -> CandidateGrid:
    """Load a grid from a CSV point list (one point per row, no header).

    Vector kinds expect ``dimension`` columns, the circle expects a single
    angle column, discrete kinds a single index column.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    points: list[Point] = []
    for row in rows:
        if space.kind in _VECTOR_KINDS:
            points.append(Point.vector(*(float(c) for c in row)))
        elif space.kind is SpaceKind.CIRCLE_ARCLENGTH:
            points.append(Point.angle(float(row[0])))
        else:
            points.append(Point.index(int(row[0])))
    return CandidateGrid(space, points)
