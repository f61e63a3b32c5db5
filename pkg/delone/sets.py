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

import logging
from typing import Tuple

import attr
import numpy as np

from processing.node import ProcessingException
from space.torus import CHUNK, TorusSpace

logger = logging.getLogger(__name__)

# Slack on covering radius comparisons, which are exact on dyadic grids
_SLACK = 1e-12


class UnreachableCoverException(ProcessingException):
    pass


class ControlDomainException(ProcessingException):
    pass


class DeloneSet:
    pass


def _frozen_points(value):
    points = np.array(value, dtype=float)
    points.setflags(write=False)
    return points


@attr.s(frozen=True, eq=False)
class DeloneSet:
    """
    A finite point set of the torus with its packing and (grid-sampled) covering radius.

    Build with :meth:`create`, which reduces the points and caches both radii.
    """
    space: TorusSpace = attr.ib()
    points: np.ndarray = attr.ib(converter=_frozen_points)
    r_pack: float = attr.ib(kw_only=True)
    R_cover: float = attr.ib(kw_only=True)

    @classmethod
    def create(cls, space: TorusSpace, points) -> DeloneSet:
        points = space.reduce(points)
        if points.shape[0] == 0:
            raise ValueError("A Delone set needs at least one point")
        if points.shape[0] > 1:
            separation = space.distances(points, points)
            np.fill_diagonal(separation, np.inf)
            r_pack = float(separation.min())
            if r_pack == 0.0:
                duplicate = np.argwhere(separation == 0.0)[0]
                raise ValueError(f"Points {duplicate[0]} and {duplicate[1]} coincide")
        else:
            r_pack = space.diameter
            logger.debug("Singleton set, packing radius taken as the diameter %f", r_pack)
        R_cover = _covering_radius(space, points)
        return DeloneSet(space, points, r_pack=r_pack, R_cover=R_cover)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def singleton(self) -> bool:
        return self.size == 1

    def __len__(self):
        return self.size

    def node_indices(self) -> np.ndarray:
        """The grid node at (or nearest to) each point"""
        return np.argmin(self.space.node_distances(self.points), axis=1)

    def same_points(self, other: DeloneSet) -> bool:
        return self.space == other.space and self.points.shape == other.points.shape and \
            bool(np.all(self.points == other.points))


def _covering_radius(space: TorusSpace, points: np.ndarray) -> float:
    nearest = np.full(space.node_count, np.inf)
    for start in range(0, points.shape[0], CHUNK):
        nearest = np.minimum(nearest, space.node_distances(points[start:start + CHUNK]).min(axis=0))
    return float(nearest.max())


def packing_radius(D: DeloneSet) -> float:
    """Minimum pairwise distance; the diameter for a singleton"""
    if D.singleton:
        logger.warning("Packing radius of a singleton set is the diameter by convention")
    return D.r_pack


def covering_radius(D: DeloneSet, space: TorusSpace = None) -> float:
    """Largest distance from a grid node to the set"""
    space = D.space if space is None else space
    if space == D.space:
        return D.R_cover
    return _covering_radius(space, D.points)


def greedy_delone(space: TorusSpace, target_R: float, seed=None) -> DeloneSet:
    """
    Farthest-point sampling over the grid nodes.

    Starting from ``seed`` (the basepoint by default), repeatedly add the node farthest from the
    current set, lowest node index on ties, until the covering radius is at most ``target_R``.
    Every added node is at the current covering radius from all earlier points, so the result
    has ``r(D) >= R(D)``.

    :param space: The torus
    :param target_R: The covering radius to reach
    :param seed: The first point

    :return: The sampled set
    """
    if target_R < space.step:
        raise UnreachableCoverException(f"unreachable covering radius {target_R} below grid step {space.step}")
    seed = space.basepoint if seed is None else seed
    points = [space.reduce(seed)[0]]
    nearest = space.node_distances(points[0])[0]
    while nearest.max() > target_R + _SLACK:
        index = int(np.argmax(nearest))
        node = space.nodes[index]
        points.append(node)
        nearest = np.minimum(nearest, space.node_distances(node)[0])
    logger.debug("Greedy set of %d points for target %f", len(points), target_R)
    return DeloneSet.create(space, np.array(points))


@attr.s(frozen=True)
class ControlFunction:
    """
    A control function on [0, 1].

    Families are ``linear`` (``kappa * t``), ``power`` (``kappa * t ** p``) and ``zero``.
    """
    LINEAR = 'linear'
    POWER = 'power'
    ZERO = 'zero'

    kind: str = attr.ib(default=LINEAR)
    params: Tuple[float, ...] = attr.ib(default=(0.5,), converter=lambda p: tuple(float(v) for v in p))

    def __attrs_post_init__(self):
        if self.kind == self.LINEAR:
            if len(self.params) != 1 or not 0.0 < self.params[0] <= 1.0:
                raise ValueError(f"Linear control needs one slope in (0, 1], got {self.params}")
        elif self.kind == self.POWER:
            if len(self.params) != 2 or not 0.0 < self.params[0] <= 1.0 or not self.params[1] > 0.0:
                raise ValueError(f"Power control needs a coefficient in (0, 1] and a positive exponent, got {self.params}")
        elif self.kind == self.ZERO:
            if self.params:
                raise ValueError("The zero control takes no parameters")
        else:
            raise ValueError(f"Unknown control family {self.kind}")

    @classmethod
    def linear(cls, kappa: float = 0.5):
        return ControlFunction(cls.LINEAR, (kappa,))

    @classmethod
    def power(cls, kappa: float, exponent: float):
        return ControlFunction(cls.POWER, (kappa, exponent))

    @classmethod
    def zero(cls):
        return ControlFunction(cls.ZERO, ())

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == self.LINEAR:
            value = self.params[0] * t
        elif self.kind == self.POWER:
            value = self.params[0] * t ** self.params[1]
        else:
            value = np.zeros_like(t)
        return float(value) if value.ndim == 0 else value

    def dominates(self, other: 'ControlFunction', samples: int = 1001) -> bool:
        """
        Is ``other <= self`` on [0, 1]?

        If so, a set controlled by ``self`` is controlled by ``other``.
        """
        t = np.linspace(0.0, 1.0, samples)
        return bool(np.all(other(t) <= self(t) + _SLACK))


def is_controlled(D: DeloneSet, F: ControlFunction) -> bool:
    """Is ``r(D) >= F(R(D))``?"""
    if D.R_cover > 1.0:
        raise ControlDomainException(f"outside D_F, rescale the space: covering radius {D.R_cover} exceeds 1")
    return bool(D.r_pack >= F(D.R_cover))


def max_ball_count(D: DeloneSet, R: float) -> int:
    """The largest number of points of ``D`` in an open ball of radius ``R`` about a point of ``D``"""
    if not R > 0:
        raise ValueError(f"Ball count needs a positive radius, got {R}")
    separation = D.space.distances(D.points, D.points)
    return int(np.count_nonzero(separation < R, axis=1).max())


def bounded_geometry(D: DeloneSet, R: float) -> Tuple[int, float, float, bool]:
    """
    The packing inequality ``count * c_{r/2} <= C_{R + r/2}``.

    The measures are grid measures of balls centred on the points of ``D``.

    :return: The ball count, ``c_{r/2}``, ``C_{R + r/2}`` and whether the inequality holds
    """
    count = max_ball_count(D, R)
    c, _ = D.space.check_bounded_geometry(D.r_pack / 2.0, D.points)
    _, C = D.space.check_bounded_geometry(R + D.r_pack / 2.0, D.points)
    return count, c, C, bool(count * c <= C + _SLACK)


def random_delone(space: TorusSpace, rng: np.random.Generator, low: float = None, high: float = None) -> DeloneSet:
    """A greedy set from a random node with a covering target drawn uniformly from [low, high]"""
    low = 4.0 * space.step if low is None else max(low, space.step)
    high = min(0.5, space.diameter) if high is None else high
    seed = space.nodes[int(rng.integers(space.node_count))]
    return greedy_delone(space, float(rng.uniform(low, max(low, high))), seed)
