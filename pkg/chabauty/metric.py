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
The metric on Delone sets (and the whole space) comparing truncations inside large balls
about the basepoint up to closed neighbourhoods, capped at 1.

For closed neighbourhoods the infimum is attained and has the closed form
``min(1, max(h(A -> B), h(B -> A)))`` with
``h(A -> B) = max over x in A of min(d(x, B), 1 / d(x, x0))``.
"""

import logging
from typing import List, Sequence, Tuple, Union

import attr
import numpy as np

from delone.sets import DeloneSet, UnreachableCoverException
from space.torus import CHUNK, TorusSpace

logger = logging.getLogger(__name__)

FORWARD = 'forward'
BACKWARD = 'backward'

PointSet = Union[DeloneSet, np.ndarray, Sequence]


def _points(space: TorusSpace, points: PointSet) -> np.ndarray:
    if isinstance(points, DeloneSet):
        points = points.points
    points = space.reduce(points) if np.size(points) > 0 else np.zeros((0, space.dim))
    if points.shape[0] == 0:
        raise ValueError("Distance to an empty set")
    return points


def _set_distance(space: TorusSpace, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Distance from each point of A to the set B"""
    result = np.empty(A.shape[0])
    for start in range(0, A.shape[0], CHUNK):
        result[start:start + CHUNK] = space.distances(A[start:start + CHUNK], B).min(axis=1)
    return result


def _inverse_base_distance(space: TorusSpace, A: np.ndarray) -> np.ndarray:
    to_base = space.distances(A, space.basepoint)[:, 0]
    with np.errstate(divide='ignore'):
        return np.where(to_base > 0.0, 1.0 / np.where(to_base > 0.0, to_base, 1.0), np.inf)


@attr.s(frozen=True)
class RhoResult:
    """A distance with the point whose constraint attains it"""
    value: float = attr.ib()
    witness: Tuple[float, ...] = attr.ib(converter=tuple)
    direction: str = attr.ib()
    capped: bool = attr.ib(default=False)


def _directed(space: TorusSpace, A: np.ndarray, B: np.ndarray) -> Tuple[float, int]:
    constraint = np.minimum(_set_distance(space, A, B), _inverse_base_distance(space, A))
    index = int(np.argmax(constraint))
    return float(constraint[index]), index


def rho(space: TorusSpace, D1: PointSet, D2: PointSet) -> RhoResult:
    """
    The capped distance between two point sets.

    Pass ``space.nodes`` for the whole space.
    """
    A = _points(space, D1)
    B = _points(space, D2)
    forward, fi = _directed(space, A, B)
    backward, bi = _directed(space, B, A)
    if forward >= backward:
        value, witness, direction = forward, A[fi], FORWARD
    else:
        value, witness, direction = backward, B[bi], BACKWARD
    capped = value > 1.0
    return RhoResult(min(1.0, value), witness, direction, capped)


def rho_scan(space: TorusSpace, D1: PointSet, D2: PointSet, step: float = None) -> float:
    """
    The smallest ``eps`` on a grid of spacing ``step`` for which both truncated inclusions hold.

    Returns 1 if no grid value below 1 passes.
    """
    step = space.step if step is None else step
    A = _points(space, D1)
    B = _points(space, D2)
    sides = []
    for X, Y in ((A, B), (B, A)):
        sides.append((_set_distance(space, X, Y), space.distances(X, space.basepoint)[:, 0]))
    for k in range(1, int(np.ceil(1.0 / step))):
        eps = k * step
        passing = True
        for gap, to_base in sides:
            inside = to_base < 1.0 / eps
            if np.any(gap[inside] > eps):
                passing = False
                break
        if passing:
            return eps
    return 1.0


@attr.s(frozen=True)
class ConvergenceRow:
    n: int = attr.ib()
    rho: float = attr.ib()
    R_cover: float = attr.ib()
    r_pack: float = attr.ib()


def rho_sequence(space: TorusSpace, sets: List[DeloneSet], target: PointSet = None) -> List[ConvergenceRow]:
    """
    Distances from each set of a sequence to a target, the whole space by default.

    Each row also carries the covering and packing radii of the set.
    """
    if not sets:
        raise ValueError("Empty sequence")
    target = space.nodes if target is None else target
    rows = []
    for n, D in enumerate(sets, start=1):
        result = rho(space, D, target)
        rows.append(ConvergenceRow(n, result.value, D.R_cover, D.r_pack))
        logger.debug("Step %d: rho %f, R %f, r %f", n, result.value, D.R_cover, D.r_pack)
    return rows


@attr.s(frozen=True)
class Coverage:
    candidate: int = attr.ib()
    net_index: int = attr.ib()
    distance: float = attr.ib()


@attr.s
class EpsilonNet:
    """
    The finite net ``A_i = A ∩ D^(+eps)`` of the candidates.

    ``members`` holds, for each distinct net element, the indices into ``base``.
    """
    eps: float = attr.ib()
    base: np.ndarray = attr.ib()
    members: List[Tuple[int, ...]] = attr.ib()
    coverage: List[Coverage] = attr.ib()

    def element(self, index: int) -> np.ndarray:
        return self.base[list(self.members[index])]

    @property
    def covered(self) -> bool:
        return all(c.distance <= self.eps for c in self.coverage)


def dense_base(space: TorusSpace, eps: float) -> np.ndarray:
    """A farthest-point sample of the nodes in the closed ``1/eps`` ball, every node strictly within ``eps``"""
    ball = space.nodes[space.node_distances(space.basepoint)[0] <= 1.0 / eps]
    points = [np.array(space.basepoint)]
    nearest = space.distances(ball, points[0])[:, 0]
    while nearest.max() >= eps:
        index = int(np.argmax(nearest))
        points.append(ball[index])
        nearest = np.minimum(nearest, space.distances(ball, ball[index])[:, 0])
    return np.array(points)


def epsilon_net(space: TorusSpace, eps: float, candidates: List[PointSet], base: PointSet = None) -> EpsilonNet:
    """
    Cover a list of candidate sets by subsets of a finite ``eps``-dense set.

    :param space: The torus
    :param eps: The net radius in (0, 1]
    :param candidates: The sets to cover
    :param base: The dense set, built by :func:`dense_base` if None

    :return: The distinct net elements and the distance from each candidate to its element
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"Net radius {eps} outside (0, 1]")
    if eps < space.step:
        raise UnreachableCoverException(f"Net radius {eps} below grid step {space.step}")
    A = dense_base(space, eps) if base is None else _points(space, base)
    members = []
    lookup = {}
    coverage = []
    for index, candidate in enumerate(candidates):
        D = _points(space, candidate)
        key = tuple(int(i) for i in np.flatnonzero(_set_distance(space, A, D) <= eps))
        if key not in lookup:
            lookup[key] = len(members)
            members.append(key)
        distance = rho(space, D, A[list(key)]).value if key else 1.0
        coverage.append(Coverage(index, lookup[key], distance))
    logger.debug("Net of %d elements from a base of %d points at eps %f", len(members), A.shape[0], eps)
    return EpsilonNet(eps, A, members, coverage)
