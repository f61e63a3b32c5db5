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
Lipschitz partitions of unity subordinate to a Delone set.

Each site ``u`` owns the open set ``W_u``: the ball of radius ``2R`` about ``u`` with the closed
``r/6`` balls about every other site removed. The generator ``h_u`` is the distance to the complement
of ``W_u`` and ``phi_u = h_u / sum_v h_v``.
"""

import logging
from typing import List, Optional, Tuple

import attr
import numpy as np

from delone.sets import DeloneSet
from processing.node import ProcessingException
from space.torus import GridFunction, TorusSpace

logger = logging.getLogger(__name__)

ROW_SUM_TOLERANCE = 1e-12


class CoverFailureException(ProcessingException):
    pass


def effective_radii(D: DeloneSet) -> Tuple[float, float]:
    """
    The packing and covering radii used to build the partition.

    A grid-sampled covering radius below half a grid-cell diagonal, the covering radius of the
    full grid itself, is raised to that value.
    """
    space = D.space
    return D.r_pack, max(D.R_cover, space.step * np.sqrt(space.dim) / 2.0)


def generators(space: TorusSpace, sites: np.ndarray, r: float, R: float) -> np.ndarray:
    """
    The generators ``h_u`` at every node, one column per site.

    ``h_u(x) = max(0, min(2R - d(x, u), min over v != u of d(x, v) - r/6))``.
    This is the distance to the complement of ``W_u`` while ``2R`` is at most half the side; beyond that it
    is a Lipschitz function with the same positive set. The ball term is infinite when the ball is everything.
    """
    dist = space.node_distances(sites).T
    nodes, k = dist.shape
    if 2.0 * R > space.diameter:
        ball = np.full_like(dist, np.inf)
    else:
        ball = 2.0 * R - dist
    if k == 1:
        others = np.full_like(dist, np.inf)
    else:
        protected = dist - r / 6.0
        nearest = protected.argmin(axis=1)
        first = protected[np.arange(nodes), nearest]
        masked = protected.copy()
        masked[np.arange(nodes), nearest] = np.inf
        second = masked.min(axis=1)
        others = np.where(np.arange(k)[None, :] == nearest[:, None], second[:, None], first[:, None])
    return np.maximum(0.0, np.minimum(ball, others))


def normalise(h: np.ndarray) -> np.ndarray:
    """
    Divide the generators by their row sums.

    Rows with infinite generators share the unit equally between them.
    """
    infinite = np.isinf(h)
    unbounded = infinite.any(axis=1)
    phi = np.zeros_like(h)
    bounded = ~unbounded
    denominator = h[bounded].sum(axis=1)
    if np.any(denominator <= 0.0):
        node = int(np.flatnonzero(bounded)[np.argmax(denominator <= 0.0)])
        raise CoverFailureException(f"cover failure at node {node}: no generator is positive")
    phi[bounded] = h[bounded] / denominator[:, None]
    if np.any(unbounded):
        share = infinite[unbounded].astype(float)
        phi[unbounded] = share / share.sum(axis=1, keepdims=True)
    return phi


def lipschitz_estimates(space: TorusSpace, phi: np.ndarray) -> np.ndarray:
    """Per-column maximum of ``|delta phi| / step`` over grid-adjacent nodes"""
    grid = phi.reshape(space.shape + (phi.shape[1],))
    axes = tuple(range(space.dim))
    estimate = np.zeros(phi.shape[1])
    for axis in axes:
        jump = np.abs(grid - np.roll(grid, 1, axis=axis)).max(axis=axes)
        estimate = np.maximum(estimate, jump)
    return estimate / space.step


class PartitionOfUnity:
    pass


@attr.s(frozen=True, eq=False)
class PartitionOfUnity:
    """
    The sampled partition functions, one column per site.

    ``h`` keeps the generators; it is None for partitions that were not built from a cover.
    """
    delone: DeloneSet = attr.ib()
    phi: np.ndarray = attr.ib()
    r: float = attr.ib()
    R: float = attr.ib()
    lipschitz_est: np.ndarray = attr.ib()
    h: Optional[np.ndarray] = attr.ib(default=None, kw_only=True)

    @property
    def space(self) -> TorusSpace:
        return self.delone.space

    @property
    def sites(self) -> int:
        return self.phi.shape[1]

    def function(self, u: int) -> GridFunction:
        return GridFunction(self.space, self.phi[:, u])

    def support(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.phi[:, u] > 0.0)


def build_pou(space: TorusSpace, D: DeloneSet) -> PartitionOfUnity:
    """
    Build the partition of unity of a Delone set.

    :param space: The torus, which must be the space of ``D``
    :param D: The sites

    :return: The partition
    """
    if space != D.space:
        raise ValueError(f"Delone set lives on {D.space}, not {space}")
    r, R = effective_radii(D)
    if space.step >= r / 12.0:
        logger.warning("Grid step %g does not resolve the plateau radius r/6 = %g", space.step, r / 6.0)
    h = generators(space, D.points, r, R)
    phi = normalise(h)
    for array in (h, phi):
        array.setflags(write=False)
    logger.debug("Partition of %d sites, r = %g, R = %g", D.size, r, R)
    return PartitionOfUnity(D, phi, r, R, lipschitz_estimates(space, phi), h=h)


def interpolate(P0: PartitionOfUnity, P1: PartitionOfUnity, s: float) -> PartitionOfUnity:
    """The partition ``(1 - s) phi0 + s phi1`` over the same sites"""
    if not P0.delone.same_points(P1.delone):
        raise ValueError("Partitions are over different sites")
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"Interpolation parameter {s} outside [0, 1]")
    phi = (1.0 - s) * P0.phi + s * P1.phi
    return PartitionOfUnity(P0.delone, phi, min(P0.r, P1.r), max(P0.R, P1.R), lipschitz_estimates(P0.space, phi))


@attr.s
class PouReport:
    row_sum_error: float = attr.ib()
    range_violations: int = attr.ib()
    support_violations: int = attr.ib()
    plateau_nodes: int = attr.ib()
    plateau_min: float = attr.ib()
    lipschitz: float = attr.ib()
    lipschitz_per_site: np.ndarray = attr.ib(repr=False)
    lebesgue: Optional[float] = attr.ib()
    lebesgue_bound: float = attr.ib()
    resolution: float = attr.ib()

    def violations(self) -> List[str]:
        found = []
        if self.row_sum_error >= ROW_SUM_TOLERANCE:
            found.append(f"row sums differ from 1 by {self.row_sum_error}")
        if self.range_violations:
            found.append(f"{self.range_violations} values outside [0, 1]")
        if self.support_violations:
            found.append(f"{self.support_violations} values outside the 2R support")
        if self.plateau_min < 1.0 - ROW_SUM_TOLERANCE:
            found.append(f"plateau value {self.plateau_min} below 1")
        if self.lebesgue is not None and self.lebesgue < self.lebesgue_bound - self.resolution:
            found.append(f"Lebesgue number {self.lebesgue} below {self.lebesgue_bound}")
        return found

    @property
    def passed(self) -> bool:
        return not self.violations()


def verify_pou(P: PartitionOfUnity) -> PouReport:
    """
    Measure the partition against its defining properties.

    Plateau nodes lie half a grid step inside the ``r/6`` balls. The Lebesgue number of the cover is the
    smallest, over nodes, of the largest distance to the complement of some ``W_u``.
    """
    space = P.space
    dist = space.node_distances(P.delone.points).T
    row_sum_error = float(np.abs(P.phi.sum(axis=1) - 1.0).max())
    range_violations = int(np.count_nonzero((P.phi < 0.0) | (P.phi > 1.0 + ROW_SUM_TOLERANCE)))
    support_violations = int(np.count_nonzero((P.phi > 0.0) & (dist >= 2.0 * P.R)))
    plateau = dist < P.r / 6.0 - space.step / 2.0
    plateau_min = float(P.phi[plateau].min()) if np.any(plateau) else 1.0
    lebesgue = None
    if P.h is not None:
        lebesgue = float(min(P.h.max(axis=1).min(), space.diameter))
    return PouReport(
        row_sum_error=row_sum_error,
        range_violations=range_violations,
        support_violations=support_violations,
        plateau_nodes=int(np.count_nonzero(plateau)),
        plateau_min=plateau_min,
        lipschitz=float(P.lipschitz_est.max()),
        lipschitz_per_site=P.lipschitz_est,
        lebesgue=lebesgue,
        lebesgue_bound=min(5.0 * P.r / 12.0, min(P.r / 4.0, P.R)),
        resolution=space.step
    )
