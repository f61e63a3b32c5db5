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
from typing import List, Sequence

import attr
import numpy as np

from cells.voronoi import CellPartition, cell_dims
from gram.frame import Isometry
from roe.operators import BlockRank, FinitePropOperator, GridOperator, truncate_k

logger = logging.getLogger(__name__)


def alpha(I: Isometry, T: FinitePropOperator) -> GridOperator:
    """Dilate a site matrix to the grid, ``U T U* W``"""
    if not T.sites.same_points(I.delone):
        raise ValueError(f"Operator on {T.sites.size} sites does not match the isometry's {I.sites} sites")
    U = I.U
    return GridOperator.create(I.space, (U @ T.M @ U.conj().T) * I.space.weights[None, :])


def beta(I: Isometry, S: GridOperator) -> FinitePropOperator:
    """Compress a grid operator to the sites, ``U* W S U``"""
    if S.space != I.space:
        raise ValueError(f"Operator on {S.space}, isometry on {I.space}")
    return FinitePropOperator.create(I.delone, I.adjoint(S.M @ I.U))


def compression_identity(I: Isometry, S: GridOperator) -> float:
    """The largest entry of ``alpha(beta(S)) - P S P``"""
    P = I.projection_matrix()
    return float(np.abs(alpha(I, beta(I, S)).M - P @ S.M @ P).max())


@attr.s
class DefectRow:
    n: int = attr.ib()
    R_cover: float = attr.ib()
    m_min: int = attr.ib()
    value: float = attr.ib()
    source_defect: float = attr.ib()
    truncation_gap: float = attr.ib()
    exact_expected: bool = attr.ib()


def alpha_beta_defect(seq: Sequence[Isometry], T: GridOperator, C: CellPartition, B: BlockRank) -> List[DefectRow]:
    """
    Reconstruction defects ``||alpha(beta(T_n)) - T_n||`` along a refining sequence.

    ``T_n`` is ``T`` truncated with the rank policy ``B`` realised at level ``n``; with the adapted
    ordering and ``m^n >= m`` its range lies in the span of the level's partition, so the
    reconstruction is exact. The defect of the untruncated ``T`` and the truncation gap are reported
    beside it.

    :param seq: The isometries of the sequence
    :param T: The operator, already block truncated on ``C``
    :param C: The coarse cell partition
    :param B: The rank policy

    :return: One row per level
    """
    rows = []
    for n, I in enumerate(seq, start=1):
        dims = cell_dims(C.delone, I.delone, I.pou, C)
        level = B.at_level(I.pou)
        T_n = truncate_k(T, C, level)
        value = (alpha(I, beta(I, T_n)) - T_n).norm()
        source = (alpha(I, beta(I, T)) - T).norm()
        gap = (T - T_n).norm()
        expected = B.cutoff is not None and B.ordering == BlockRank.ADAPTED and dims.m_min > B.cutoff
        logger.debug("Level %d: m^n = %d, defect %g, source defect %g", n, dims.m_min, value, source)
        rows.append(DefectRow(n, I.delone.R_cover, dims.m_min, value, source, gap, expected))
    return rows


@attr.s
class ProductRow:
    n: int = attr.ib()
    R_cover: float = attr.ib()
    value: float = attr.ib()
    scale: float = attr.ib()


def multiplicativity_defect(seq: Sequence[Isometry], R: GridOperator, S: GridOperator) -> List[ProductRow]:
    """``||beta(RS) - beta(R) beta(S)||`` per level, with the scale ``||R|| ||S||``"""
    scale = R.norm() * S.norm()
    RS = R @ S
    rows = []
    for n, I in enumerate(seq, start=1):
        value = (beta(I, RS) - beta(I, R) @ beta(I, S)).norm()
        rows.append(ProductRow(n, I.delone.R_cover, value, scale))
    return rows


@attr.s
class NormRow:
    n: int = attr.ib()
    R_cover: float = attr.ib()
    value: float = attr.ib()
    compressed: float = attr.ib()
    target: float = attr.ib()

    @property
    def identity_gap(self) -> float:
        return abs(self.value - self.compressed)

    @property
    def gap(self) -> float:
        return abs(self.value - self.target)


def norm_convergence(seq: Sequence[Isometry], S: GridOperator) -> List[NormRow]:
    """
    The norms ``||beta(S)||`` along a sequence, each with ``||P S P||`` as a cross-check.

    No monotonicity is claimed for the profile.
    """
    target = S.norm()
    rows = []
    for n, I in enumerate(seq, start=1):
        P = I.projection_matrix()
        compressed = GridOperator.create(S.space, P @ S.M @ P).norm()
        rows.append(NormRow(n, I.delone.R_cover, beta(I, S).norm(), compressed, target))
    return rows
