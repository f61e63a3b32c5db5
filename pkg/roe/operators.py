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
Finite-propagation operators on the sites of a Delone set, dense operators on the grid model of L² and
per-cell rank truncation.

Grid operator norms and adjoints are taken in the quadrature inner product.
"""

import logging
from typing import Optional, Tuple

import attr
import numpy as np
import scipy.linalg

from cells.voronoi import CellPartition, precedents
from delone.sets import DeloneSet
from pou.partition import PartitionOfUnity
from space.torus import GridFunction, TorusSpace

logger = logging.getLogger(__name__)

# Largest number of candidate radii tried by eps_propagation
PROPAGATION_SAMPLES = 64


def _hermitian(matrix: np.ndarray) -> bool:
    scale = max(float(np.abs(matrix).max()), 1.0) if matrix.size else 1.0
    return bool(np.allclose(matrix, matrix.conj().T, rtol=0.0, atol=1e-13 * scale))


def spectral_norm(matrix: np.ndarray) -> float:
    """Largest singular value, from the spectrum when the matrix is Hermitian"""
    if matrix.size == 0:
        return 0.0
    if _hermitian(matrix):
        return float(np.abs(scipy.linalg.eigvalsh(matrix)).max())
    return float(scipy.linalg.svdvals(matrix)[0])


def weighted_norm(matrix: np.ndarray, weights: np.ndarray) -> float:
    """The norm on a weighted l² space, computed after conjugating by the square root of the weights"""
    root = np.sqrt(weights)
    return spectral_norm(root[:, None] * matrix / root[None, :])


def power_norm(matrix: np.ndarray, weights: np.ndarray = None, iterations: int = 5000, tol: float = 1e-13,
               seed: int = 0) -> float:
    """
    Estimate the norm by power iteration on ``A^H A``.

    :param matrix: The operator
    :param weights: The quadrature weights of the underlying space, counting measure if None
    :param iterations: The iteration limit
    :param tol: Relative change at which to stop
    :param seed: Seed for the starting vector

    :return: The estimated norm
    """
    A = matrix if weights is None else np.sqrt(weights)[:, None] * matrix / np.sqrt(weights)[None, :]
    if A.size == 0 or not np.any(A):
        return 0.0
    x = np.random.default_rng(seed).standard_normal(A.shape[1])
    x /= np.linalg.norm(x)
    sigma = 0.0
    for iteration in range(iterations):
        y = A @ x
        previous, sigma = sigma, float(np.linalg.norm(y))
        z = A.conj().T @ y
        x = z / np.linalg.norm(z)
        if abs(sigma - previous) <= tol * sigma:
            logger.debug("Power iteration converged after %d steps", iteration + 1)
            break
    return sigma


def propagation_of(points: np.ndarray, space: TorusSpace, matrix: np.ndarray) -> float:
    rows, cols = np.nonzero(matrix)
    if len(rows) == 0:
        return 0.0
    distance = space.distances(points, points)
    return float(distance[rows, cols].max())


class FinitePropOperator:
    pass


@attr.s(frozen=True, eq=False)
class FinitePropOperator:
    """A matrix indexed by the sites of a Delone set"""
    sites: DeloneSet = attr.ib()
    M: np.ndarray = attr.ib(repr=False)
    prop: float = attr.ib()

    @classmethod
    def create(cls, sites: DeloneSet, M) -> FinitePropOperator:
        M = np.array(M)
        if M.shape != (sites.size, sites.size):
            raise ValueError(f"Matrix of shape {M.shape} does not match {sites.size} sites")
        M.setflags(write=False)
        return FinitePropOperator(sites, M, propagation_of(sites.points, sites.space, M))

    @classmethod
    def identity(cls, sites: DeloneSet) -> FinitePropOperator:
        return cls.create(sites, np.eye(sites.size))

    @classmethod
    def zero(cls, sites: DeloneSet) -> FinitePropOperator:
        return cls.create(sites, np.zeros((sites.size, sites.size)))

    @classmethod
    def random_banded(cls, sites: DeloneSet, band: float, rng: np.random.Generator) -> FinitePropOperator:
        """A self-adjoint unit-norm matrix, entries uniform in [-1, 1] between sites at most ``band`` apart"""
        return cls.create(sites, _random_banded(sites.space.distances(sites.points, sites.points), band, rng))

    def _check(self, other: FinitePropOperator):
        if not self.sites.same_points(other.sites):
            raise ValueError("Operators over different sites")

    def __add__(self, other: FinitePropOperator) -> FinitePropOperator:
        self._check(other)
        return self.create(self.sites, self.M + other.M)

    def __sub__(self, other: FinitePropOperator) -> FinitePropOperator:
        self._check(other)
        return self.create(self.sites, self.M - other.M)

    def __matmul__(self, other: FinitePropOperator) -> FinitePropOperator:
        self._check(other)
        return self.create(self.sites, self.M @ other.M)

    def scaled(self, factor) -> FinitePropOperator:
        return self.create(self.sites, self.M * factor)

    def adjoint(self) -> FinitePropOperator:
        return self.create(self.sites, self.M.conj().T)

    def norm(self) -> float:
        return spectral_norm(self.M)


def propagation(T: FinitePropOperator) -> float:
    """The largest distance between sites joined by a non-zero entry"""
    return T.prop


def _random_banded(distance: np.ndarray, band: float, rng: np.random.Generator) -> np.ndarray:
    entries = rng.uniform(-1.0, 1.0, distance.shape)
    entries = np.where(distance <= band, (entries + entries.T) / 2.0, 0.0)
    size = spectral_norm(entries)
    return entries / size if size > 0.0 else entries


class GridOperator:
    pass


@attr.s(frozen=True, eq=False)
class GridOperator:
    """A dense operator on the grid functions of a torus"""
    space: TorusSpace = attr.ib()
    M: np.ndarray = attr.ib(repr=False)

    @classmethod
    def create(cls, space: TorusSpace, M) -> GridOperator:
        M = np.array(M)
        if M.shape != (space.node_count, space.node_count):
            raise ValueError(f"Matrix of shape {M.shape} does not act on {space.node_count} nodes")
        M.setflags(write=False)
        return GridOperator(space, M)

    @classmethod
    def identity(cls, space: TorusSpace) -> GridOperator:
        return cls.create(space, np.eye(space.node_count))

    @classmethod
    def zero(cls, space: TorusSpace) -> GridOperator:
        return cls.create(space, np.zeros((space.node_count, space.node_count)))

    @classmethod
    def multiplication(cls, f: GridFunction) -> GridOperator:
        return cls.create(f.space, np.diag(f.values))

    @classmethod
    def random_banded(cls, space: TorusSpace, band: float, rng: np.random.Generator) -> GridOperator:
        return cls.create(space, _random_banded(space.distances(space.nodes, space.nodes), band, rng))

    def _check(self, other: GridOperator):
        if other.space != self.space:
            raise ValueError(f"Operators on {self.space} and {other.space}")

    def __add__(self, other: GridOperator) -> GridOperator:
        self._check(other)
        return self.create(self.space, self.M + other.M)

    def __sub__(self, other: GridOperator) -> GridOperator:
        self._check(other)
        return self.create(self.space, self.M - other.M)

    def __matmul__(self, other: GridOperator) -> GridOperator:
        self._check(other)
        return self.create(self.space, self.M @ other.M)

    def scaled(self, factor) -> GridOperator:
        return self.create(self.space, self.M * factor)

    def apply(self, f: GridFunction) -> GridFunction:
        return GridFunction(self.space, self.M @ f.values)

    def adjoint(self) -> GridOperator:
        """``W^-1 M^H W``"""
        weights = self.space.weights
        return self.create(self.space, self.M.conj().T * weights[None, :] / weights[:, None])

    def is_self_adjoint(self, tol: float = 1e-12) -> bool:
        return bool(np.abs(self.adjoint().M - self.M).max() <= tol)

    def norm(self) -> float:
        return weighted_norm(self.M, self.space.weights)


def eps_propagation(S: GridOperator, eps: float) -> float:
    """
    A radius, on a grid of node distances, beyond which dropping entries moves the norm by less than ``eps``.

    The candidate radii are the distinct node distances, thinned to at most
    ``PROPAGATION_SAMPLES`` values. The search bisects on them and so assumes the tail norm is
    non-increasing in the radius, which need not hold. With thinning, or where it fails, the result
    passes the test but is not always the smallest radius that does.
    """
    if not eps > 0:
        raise ValueError(f"Tolerance {eps} must be positive")
    space = S.space
    distance = space.distances(space.nodes, space.nodes)
    radii = np.unique(distance[S.M != 0])
    if len(radii) == 0 or radii[-1] == 0.0:
        return 0.0
    radii = np.concatenate(([0.0], radii[radii > 0.0]))
    if len(radii) > PROPAGATION_SAMPLES:
        radii = radii[np.unique(np.linspace(0, len(radii) - 1, PROPAGATION_SAMPLES).round().astype(int))]

    def tail(s: float) -> float:
        return weighted_norm(np.where(distance > s, S.M, 0.0), space.weights)

    low, high = 0, len(radii) - 1
    if tail(radii[low]) < eps:
        return float(radii[low])
    while high - low > 1:
        middle = (low + high) // 2
        if tail(radii[middle]) < eps:
            high = middle
        else:
            low = middle
    return float(radii[high])


def _node_vectors(space: TorusSpace, nodes: np.ndarray) -> np.ndarray:
    vectors = np.zeros((space.node_count, len(nodes)))
    vectors[nodes, np.arange(len(nodes))] = 1.0 / np.sqrt(space.weight)
    return vectors


def _orthonormal_prefix(space: TorusSpace, candidates: np.ndarray, count: int) -> np.ndarray:
    """
    The first ``count`` vectors of the weighted orthonormalisation of the candidate columns, in order.

    Columns dependent on earlier ones are dropped and the next candidate takes their place.
    """
    root = np.sqrt(space.weights)[:, None]
    scaled = root * candidates
    keep = list(range(min(count, scaled.shape[1])))
    following = len(keep)
    while keep:
        Q, R = scipy.linalg.qr(scaled[:, keep], mode='economic')
        diagonal = np.diag(R)
        sizes = np.linalg.norm(scaled[:, keep], axis=0)
        dependent = np.flatnonzero(np.abs(diagonal) <= 1e-10 * np.maximum(1.0, sizes))
        if len(dependent) == 0:
            return Q * np.sign(diagonal)[None, :] / root
        del keep[dependent[0]]
        if following < scaled.shape[1]:
            keep.append(following)
            following += 1
    return np.zeros((space.node_count, 0))


class BlockRank:
    pass


@attr.s(frozen=True, eq=False)
class BlockRank:
    """
    An ordered orthonormal basis of each cell, cut after ``cutoff`` vectors.

    With the ``distance`` ordering the basis vectors are the normalised node indicators of the cell,
    nearest to the site first and by node index on ties. The ``adapted`` ordering puts first the
    orthonormalised partition functions of a refined level that fit inside the cell, nearest first,
    then the node indicators, and records the index of that level when known. A cutoff of None keeps
    every cell whole.
    """
    DISTANCE = 'distance'
    ADAPTED = 'adapted'

    cells: CellPartition = attr.ib(repr=False)
    cutoff: Optional[int] = attr.ib()
    ordering: str = attr.ib()
    bases: Tuple[np.ndarray, ...] = attr.ib(repr=False)
    level: Optional[int] = attr.ib(default=None)

    @classmethod
    def _check_cutoff(cls, cells: CellPartition, cutoff: Optional[int]):
        if cutoff is not None and (cutoff < 0 or cutoff > int(cells.sizes.min())):
            raise ValueError(f"Rank cutoff {cutoff} too large for the smallest cell of {int(cells.sizes.min())} nodes")

    @classmethod
    def _ordered_nodes(cls, cells: CellPartition, u: int) -> np.ndarray:
        nodes = cells.cell(u)
        distance = cells.space.distances(cells.space.nodes[nodes], cells.delone.points[u])[:, 0]
        return nodes[np.lexsort((nodes, distance))]

    @classmethod
    def by_distance(cls, cells: CellPartition, cutoff: Optional[int]) -> BlockRank:
        cls._check_cutoff(cells, cutoff)
        bases = []
        for u in range(cells.delone.size):
            nodes = cls._ordered_nodes(cells, u)
            bases.append(_node_vectors(cells.space, nodes if cutoff is None else nodes[:cutoff]))
        return BlockRank(cells, cutoff, cls.DISTANCE, tuple(bases))

    @classmethod
    def adapted(cls, cells: CellPartition, cutoff: Optional[int], level: PartitionOfUnity,
                n: Optional[int] = None) -> BlockRank:
        cls._check_cutoff(cells, cutoff)
        space = cells.space
        bases = []
        for u in range(cells.delone.size):
            nodes = cls._ordered_nodes(cells, u)
            count = len(nodes) if cutoff is None else cutoff
            leading = level.phi[:, precedents(u, level, cells)]
            bases.append(_orthonormal_prefix(space, np.hstack((leading, _node_vectors(space, nodes))), count))
        return BlockRank(cells, cutoff, cls.ADAPTED, tuple(bases), n)

    def at_level(self, level: PartitionOfUnity) -> BlockRank:
        """The same rank policy realised against a refined level"""
        if self.ordering == self.ADAPTED:
            return self.adapted(self.cells, self.cutoff, level)
        return self

    def projector(self) -> np.ndarray:
        """``P_m``, the direct sum of the per-cell projections onto the leading basis vectors"""
        space = self.cells.space
        basis = np.hstack(self.bases) if self.bases else np.zeros((space.node_count, 0))
        return (basis @ basis.conj().T) * space.weights[None, :]


def truncate_k(S: GridOperator, C: CellPartition, B: BlockRank) -> GridOperator:
    """Compress ``S`` to the leading corner of every block, ``P_m S P_m``"""
    if B.cells is not C and not np.array_equal(B.cells.assign, C.assign):
        raise ValueError("Block rank built on a different cell partition")
    if S.space != C.space:
        raise ValueError(f"Operator on {S.space}, cells on {C.space}")
    P = B.projector()
    return GridOperator.create(S.space, P @ S.M @ P)
