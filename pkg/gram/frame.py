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
Gram matrices of partitions of unity and the symmetric orthogonalisation of the partition frame.

All adjoints are taken in the quadrature inner product: ``U* = U^H W`` with ``W`` the diagonal of node weights.
"""

import logging
from typing import List, Sequence, Union

import attr
import numpy as np
import scipy.linalg

from delone.sets import DeloneSet
from pou.partition import PartitionOfUnity, build_pou
from processing.node import ProcessingException
from space.torus import GridFunction, TorusSpace

logger = logging.getLogger(__name__)

EIGENVALUE_FLOOR = 1e-10


class SingularGramException(ProcessingException):
    pass


def _symmetrise(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.conj().T) / 2.0


def weighted_gram(space: TorusSpace, frame: np.ndarray) -> np.ndarray:
    """The matrix of quadrature inner products of the columns of ``frame``"""
    return _symmetrise(frame.conj().T @ (space.weights[:, None] * frame))


@attr.s(frozen=True, eq=False)
class GramData:
    """The Gram matrix of a partition with its spectral square roots"""
    G: np.ndarray = attr.ib()
    eigvals: np.ndarray = attr.ib()
    eigvecs: np.ndarray = attr.ib(repr=False)
    G_half: np.ndarray = attr.ib(repr=False)
    G_invhalf: np.ndarray = attr.ib(repr=False)
    lambda_min: float = attr.ib()
    lower_bound: float = attr.ib()
    adjacency: int = attr.ib()
    g_max: float = attr.ib()

    @property
    def norm(self) -> float:
        return float(self.eigvals[-1])

    @property
    def condition(self) -> float:
        return float(self.eigvals[-1] / self.eigvals[0])

    @property
    def upper_bound(self) -> float:
        return self.adjacency ** 2 * self.g_max

    @property
    def schur_bound(self) -> float:
        return self.adjacency * self.g_max


def gram(space: TorusSpace, P: PartitionOfUnity, floor: float = EIGENVALUE_FLOOR) -> GramData:
    """
    Assemble and factor the Gram matrix of a partition.

    :param space: The torus
    :param P: The partition
    :param floor: The smallest eigenvalue accepted

    :return: The Gram data
    """
    G = weighted_gram(space, P.phi)
    eigvals, eigvecs = scipy.linalg.eigh(G)
    if eigvals[0] < floor:
        raise SingularGramException(f"Gram eigenvalue {eigvals[0]:.6e} below the floor {floor:.1e}")
    root = np.sqrt(eigvals)
    G_half = _symmetrise((eigvecs * root) @ eigvecs.conj().T)
    G_invhalf = _symmetrise((eigvecs / root) @ eigvecs.conj().T)
    lower_bound = space.weight * int(space.ball_counts(P.delone.points, P.r / 6.0).min())
    adjacency = int(np.count_nonzero(G != 0.0, axis=1).max())
    logger.debug("Gram matrix of %d sites, spectrum [%g, %g]", G.shape[0], eigvals[0], eigvals[-1])
    return GramData(G, eigvals, eigvecs, G_half, G_invhalf, float(eigvals[0]), lower_bound, adjacency,
                    float(np.abs(G).max()))


@attr.s(frozen=True, eq=False)
class Isometry:
    """
    The orthonormalised frame ``U = Phi G^(-1/2)``.

    The columns of ``U`` are quadrature-orthonormal and span the same space as the partition.
    """
    pou: PartitionOfUnity = attr.ib()
    gram: GramData = attr.ib()
    U: np.ndarray = attr.ib(repr=False)

    @property
    def delone(self) -> DeloneSet:
        return self.pou.delone

    @property
    def space(self) -> TorusSpace:
        return self.pou.space

    @property
    def sites(self) -> int:
        return self.U.shape[1]

    def adjoint(self, values: np.ndarray) -> np.ndarray:
        """Apply ``U* = U^H W`` to a node vector or to the rows of a node matrix"""
        weights = self.space.weights
        weighted = weights * values if values.ndim == 1 else weights[:, None] * values
        return self.U.conj().T @ weighted

    def projection_matrix(self) -> np.ndarray:
        """``P = U U^H W``"""
        return (self.U @ self.U.conj().T) * self.space.weights[None, :]

    def orthonormality_defect(self) -> float:
        return float(np.abs(self.adjoint(self.U) - np.eye(self.sites)).max())

    def idempotence_defect(self) -> float:
        P = self.projection_matrix()
        return float(np.abs(P @ P - P).max())


def isometry(P: PartitionOfUnity, G: GramData) -> Isometry:
    U = P.phi @ G.G_invhalf
    U.setflags(write=False)
    return Isometry(P, G, U)


def frame(space: TorusSpace, D: DeloneSet) -> Isometry:
    """Partition, Gram matrix and isometry of a Delone set in one step"""
    P = build_pou(space, D)
    return isometry(P, gram(space, P))


def project(I: Isometry, f: GridFunction) -> GridFunction:
    """Orthogonal projection onto the span of the partition"""
    if f.space != I.space:
        raise ValueError(f"Function on {f.space}, isometry on {I.space}")
    return GridFunction(I.space, I.U @ I.adjoint(f.values))


def quasi_interpolant(P: PartitionOfUnity, f: GridFunction) -> GridFunction:
    """``sum_u f(u) phi_u`` with ``f(u)`` read at the node of each site"""
    return GridFunction(P.space, P.phi @ f.values[P.delone.node_indices()])


def modulus_of_continuity(f: GridFunction, delta: float) -> float:
    """The largest change of ``f`` between nodes closer than ``delta``"""
    grid = f.grid()
    axes = tuple(range(f.space.dim))
    omega = 0.0
    for shift in f.space.offsets_within(delta):
        omega = max(omega, float(np.abs(grid - np.roll(grid, shift, axis=axes)).max()))
    return omega


@attr.s(frozen=True)
class StrongRow:
    n: int = attr.ib()
    R_cover: float = attr.ib()
    error: float = attr.ib()
    quasi_error: float = attr.ib()
    bound: float = attr.ib()


def strong_convergence(space: TorusSpace, f: GridFunction, seq: Sequence[Union[DeloneSet, Isometry]]) -> List[StrongRow]:
    """
    Projection errors of ``f`` along a refining sequence with their a-priori bounds.

    The bound is ``omega_f(2R) * sqrt(mu(X))``, which also bounds the quasi-interpolant error.

    :param space: The torus
    :param f: The function to approximate
    :param seq: Delone sets, or isometries already built from them, with strictly decreasing covering radius

    :return: One row per set
    """
    frames = [item if isinstance(item, Isometry) else frame(space, item) for item in seq]
    radii = [I.delone.R_cover for I in frames]
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ValueError(f"Covering radii {radii} are not strictly decreasing")
    rows = []
    for n, I in enumerate(frames, start=1):
        error = (f - project(I, f)).norm()
        quasi = (f - quasi_interpolant(I.pou, f)).norm()
        bound = modulus_of_continuity(f, 2.0 * I.pou.R) * np.sqrt(space.measure)
        rows.append(StrongRow(n, I.delone.R_cover, error, quasi, bound))
        logger.debug("Step %d: error %g, bound %g", n, error, bound)
    return rows
