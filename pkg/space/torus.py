#  Copyright (c) 2021.  Atlas of Living Australia
#   All Rights Reserved.
#
#   The contents of this file are subject to the Mozilla Public
#   License Version 1.1 (the "License"); you may not use this file
#   except in compliance with the License. You may obtain a copy of
#   the License at http://www.mozilla.org/MPL/
#
#   Software distributed under the License is distributed on an "AS  IS" basis,
#   WITHOUT WARRANTY OF ANY KIND, either express or
#   implied. See the License for the specific language governing
#   rights and limitations under the License.

"""
The ground space: a flat torus with a uniform quadrature grid.

Grid nodes are numbered in row-major order of their multi-index, so node ``i`` of a
``dim``-torus with ``grid_n`` nodes per axis has coordinates ``step * np.unravel_index(i, shape)``.
"""

import itertools
import logging
from typing import Callable, Iterator, Tuple

import attr
import numpy as np

logger = logging.getLogger(__name__)

# Rows per block when a node x node distance table would be too large to hold at once
CHUNK = 1024


def _basepoint(value):
    if value is None:
        return None
    return tuple(float(c) for c in np.atleast_1d(np.asarray(value, dtype=float)))


class TorusSpace:
    pass


class GridFunction:
    pass


@attr.s(frozen=True)
class TorusSpace:
    """
    A flat ``dim``-torus of side ``side`` sampled by ``grid_n`` nodes per axis.

    The quadrature weight of every node is ``(side / grid_n) ** dim``, so the weights sum to the volume.
    Distances are the wrap-around Euclidean metric.
    """
    dim: int = attr.ib(validator=attr.validators.instance_of(int))
    side: float = attr.ib(default=1.0, converter=float)
    grid_n: int = attr.ib(default=64, validator=attr.validators.instance_of(int))
    basepoint: Tuple[float, ...] = attr.ib(default=None, converter=_basepoint)
    _nodes: np.ndarray = attr.ib(init=False, eq=False, repr=False, default=None)

    def __attrs_post_init__(self):
        if self.dim < 1:
            raise ValueError(f"Torus dimension must be positive, got {self.dim}")
        if not self.side > 0.0:
            raise ValueError(f"Torus side must be positive, got {self.side}")
        if self.grid_n < 2:
            raise ValueError(f"Need at least two grid nodes per axis, got {self.grid_n}")
        if self.basepoint is None:
            object.__setattr__(self, 'basepoint', (0.0,) * self.dim)
        if len(self.basepoint) != self.dim:
            raise ValueError(f"Basepoint {self.basepoint} does not have dimension {self.dim}")
        object.__setattr__(self, 'basepoint', tuple(self.reduce(self.basepoint)[0]))
        index = np.indices(self.shape).reshape(self.dim, -1).T
        nodes = index * self.step
        nodes.setflags(write=False)
        object.__setattr__(self, '_nodes', nodes)
        if self.dim > 2:
            logger.warning("Torus of dimension %d is outside the tested range", self.dim)

    @classmethod
    def create(cls, dim: int = 1, side: float = 1.0, grid_n: int = 64, basepoint=None):
        return TorusSpace(dim, side, grid_n, basepoint)

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.grid_n,) * self.dim

    @property
    def step(self) -> float:
        return self.side / self.grid_n

    @property
    def weight(self) -> float:
        return self.step ** self.dim

    @property
    def node_count(self) -> int:
        return self.grid_n ** self.dim

    @property
    def nodes(self) -> np.ndarray:
        """The node coordinates, one row per node"""
        return self._nodes

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.node_count, self.weight)

    @property
    def measure(self) -> float:
        return self.weight * self.node_count

    @property
    def diameter(self) -> float:
        return self.side * np.sqrt(self.dim) / 2.0

    def points(self, x) -> np.ndarray:
        """
        Interpret ``x`` as an array of points, one per row.

        A scalar or a flat list is a list of points on a circle and a single point otherwise.
        """
        pts = np.asarray(x, dtype=float)
        if pts.ndim == 0:
            pts = pts.reshape(1, 1)
        elif pts.ndim == 1:
            pts = pts.reshape(-1, 1) if self.dim == 1 else pts.reshape(1, -1)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"Points of shape {np.shape(x)} do not lie in a {self.dim}-torus")
        return pts

    def reduce(self, x) -> np.ndarray:
        """Reduce coordinates into [0, side)"""
        pts = np.mod(self.points(x), self.side)
        pts[pts >= self.side] = 0.0
        return pts

    def _axis_gap(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        gap = np.abs(a - b) % self.side
        return np.minimum(gap, self.side - gap)

    def distances(self, xs, ys) -> np.ndarray:
        """
        The table of torus distances between two point lists.

        :param xs: The row points
        :param ys: The column points

        :return: A ``len(xs) x len(ys)`` array
        """
        xs = self.points(xs)
        ys = self.points(ys)
        if self.dim == 1:
            return self._axis_gap(xs[:, 0][:, None], ys[:, 0][None, :])
        total = np.zeros((xs.shape[0], ys.shape[0]))
        for axis in range(self.dim):
            gap = self._axis_gap(xs[:, axis][:, None], ys[:, axis][None, :])
            total += gap * gap
        return np.sqrt(total)

    def paired_distances(self, xs, ys) -> np.ndarray:
        """Distances between corresponding rows of two point lists"""
        xs = self.points(xs)
        ys = self.points(ys)
        if self.dim == 1:
            return self._axis_gap(xs[:, 0], ys[:, 0])
        gap = self._axis_gap(xs, ys)
        return np.sqrt((gap * gap).sum(axis=1))

    def dist(self, x, y) -> float:
        return float(self.distances(x, y)[0, 0])

    def node_distances(self, xs) -> np.ndarray:
        """Distances from each point of ``xs`` (rows) to every grid node (columns)"""
        return self.distances(xs, self._nodes)

    def ball_counts(self, centres, R: float) -> np.ndarray:
        """The number of grid nodes strictly within ``R`` of each centre"""
        centres = self.points(centres)
        counts = np.empty(centres.shape[0], dtype=int)
        for start in range(0, centres.shape[0], CHUNK):
            block = self.node_distances(centres[start:start + CHUNK])
            counts[start:start + CHUNK] = np.count_nonzero(block < R, axis=1)
        return counts

    def ball_measure(self, x, R: float) -> float:
        """The quadrature measure of the open ball ``B_R(x)``"""
        if R < 0:
            raise ValueError(f"Negative radius {R}")
        return self.weight * int(self.ball_counts(x, R)[0])

    def check_bounded_geometry(self, R: float, sample=None) -> Tuple[float, float]:
        """
        The smallest and largest ball measures of radius ``R`` over a sample of centres.

        :param R: The ball radius
        :param sample: The centres, all grid nodes if None

        :return: The pair ``(c, C)``
        """
        if not R > 0:
            raise ValueError(f"Bounded geometry needs a positive radius, got {R}")
        sample = self._nodes if sample is None else self.points(sample)
        if sample.shape[0] == 0:
            raise ValueError("Empty sample")
        measures = self.weight * self.ball_counts(sample, R)
        return float(measures.min()), float(measures.max())

    def offsets_within(self, delta: float) -> Iterator[Tuple[int, ...]]:
        """Non-zero grid index shifts whose torus length is less than ``delta``"""
        n = self.grid_n
        for shift in itertools.product(range(n), repeat=self.dim):
            if not any(shift):
                continue
            length = np.sqrt(sum((min(k, n - k) * self.step) ** 2 for k in shift))
            if length < delta:
                yield shift

    def function(self, values) -> GridFunction:
        return GridFunction(self, values)

    def constant(self, value: complex = 1.0) -> GridFunction:
        return GridFunction(self, np.full(self.node_count, value))

    def sample(self, fn: Callable[[np.ndarray], np.ndarray]) -> GridFunction:
        """Evaluate a vectorised function of the node coordinate array"""
        return GridFunction(self, fn(self._nodes))


def _values(value):
    values = np.array(value)
    values.setflags(write=False)
    return values


@attr.s(frozen=True, eq=False)
class GridFunction:
    """A sampled element of L² of the torus"""
    space: TorusSpace = attr.ib()
    values: np.ndarray = attr.ib(converter=_values)

    def __attrs_post_init__(self):
        if self.values.shape != (self.space.node_count,):
            raise ValueError(f"Expected {self.space.node_count} values, got shape {self.values.shape}")

    def _check(self, other: GridFunction):
        if other.space != self.space:
            raise ValueError(f"Functions on different spaces {self.space} and {other.space}")

    def inner(self, other: GridFunction) -> complex:
        self._check(other)
        result = self.space.weight * np.sum(np.conj(self.values) * other.values)
        return float(result) if np.isrealobj(result) else complex(result)

    def norm(self) -> float:
        return float(np.sqrt(self.space.weight * np.sum(np.abs(self.values) ** 2)))

    def grid(self) -> np.ndarray:
        """The values arranged on the node multi-index"""
        return self.values.reshape(self.space.shape)

    def restrict(self, nodes) -> GridFunction:
        """This function on a node subset, zero elsewhere"""
        values = np.zeros_like(self.values)
        values[nodes] = self.values[nodes]
        return GridFunction(self.space, values)

    def __add__(self, other: GridFunction) -> GridFunction:
        self._check(other)
        return GridFunction(self.space, self.values + other.values)

    def __sub__(self, other: GridFunction) -> GridFunction:
        self._check(other)
        return GridFunction(self.space, self.values - other.values)

    def __mul__(self, scale) -> GridFunction:
        return GridFunction(self.space, self.values * scale)

    __rmul__ = __mul__


def inner(f: GridFunction, g: GridFunction):
    """The quadrature inner product, conjugate-linear in ``f``"""
    return f.inner(g)
