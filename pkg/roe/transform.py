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
Stages for the operator experiments: the algebra of the compression maps, reconstruction of block-truncated
operators, asymptotic multiplicativity and norm convergence.
"""

from typing import Dict, List

import attr
import numpy as np
import scipy.linalg

from cells.voronoi import CellPartition
from processing.dataset import Port
from processing.node import ProcessingContext
from processing.transform import Stage, decreasing
from roe.maps import alpha, alpha_beta_defect, beta, compression_identity, multiplicativity_defect, norm_convergence
from roe.operators import BlockRank, FinitePropOperator, GridOperator, eps_propagation, truncate_k
from roe.schema import DefectSchema, IsometrySchema, NormSchema, ProductSchema
from space.torus import TorusSpace


def truncated_multiplication(space: TorusSpace, C: CellPartition, B: BlockRank) -> GridOperator:
    """Multiplication by ``cos(2 pi x / L)`` compressed by the rank policy"""
    f = space.sample(lambda x: np.cos(2.0 * np.pi * x[:, 0] / space.side))
    return truncate_k(GridOperator.multiplication(f), C, B)


def unit_truncated_banded(space: TorusSpace, band: float, C: CellPartition, B: BlockRank,
                          rng: np.random.Generator) -> GridOperator:
    """A random banded operator compressed by the rank policy and rescaled to unit norm"""
    T = truncate_k(GridOperator.random_banded(space, band, rng), C, B)
    size = T.norm()
    return T.scaled(1.0 / size) if size > 0.0 else T


@attr.s
class OperatorStage(Stage):
    """Common ports of the operator experiments"""
    space: Port = attr.ib()
    frames: Port = attr.ib()
    cells: Port = attr.ib()
    rank: Port = attr.ib()
    table: Port = attr.ib()

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        inputs['space'] = self.space
        inputs['frames'] = self.frames
        inputs['cells'] = self.cells
        inputs['rank'] = self.rank
        return inputs

    def outputs(self) -> Dict[str, Port]:
        outputs = super().outputs()
        outputs['table'] = self.table
        return outputs

    def load(self):
        return self.items(self.space)[0], self.items(self.frames), self.items(self.cells)[0], self.items(self.rank)[0]

    def beyond_policy(self, name: str, B: BlockRank, n: int) -> bool:
        """Is level ``n`` finer than the one the rank policy is realised at? Skips the check if not."""
        if B.level is None or n > B.level:
            return True
        self.skip(name, f"rank policy realised at level {B.level}, no finer level to compare", n=n)
        return False


@attr.s
class IsometryStage(Stage):
    """The compression maps of every level against random banded site matrices"""
    space: Port = attr.ib()
    frames: Port = attr.ib()
    table: Port = attr.ib()

    @classmethod
    def create(cls, id: str, space: Port, frames: Port, **kwargs):
        return IsometryStage(id, space, frames, Port.port(IsometrySchema()), **kwargs)

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        inputs['space'] = self.space
        inputs['frames'] = self.frames
        return inputs

    def outputs(self) -> Dict[str, Port]:
        outputs = super().outputs()
        outputs['table'] = self.table
        return outputs

    def homomorphism(self, I, operators: List[FinitePropOperator]) -> float:
        """Largest entry of the failure of linearity, star and products of alpha over consecutive pairs"""
        worst = 0.0
        for T, S in zip(operators, operators[1:] + operators[:1]):
            aT, aS = alpha(I, T), alpha(I, S)
            for defect in (alpha(I, T + S.scaled(2.0)) - aT - aS.scaled(2.0), alpha(I, T.adjoint()) - aT.adjoint(),
                           alpha(I, T @ S) - aT @ aS):
                worst = max(worst, float(np.abs(defect.M).max()))
        return worst

    def isometric(self, I, operators: List[FinitePropOperator]) -> float:
        return max(abs(alpha(I, T).norm() - T.norm()) for T in operators)

    def compute(self, context: ProcessingContext):
        space = self.items(self.space)[0]
        config = context.config
        tol = self.tolerances
        rng = np.random.default_rng(config.seed + 3)
        rows = []
        for n, I in enumerate(self.items(self.frames), start=1):
            band = max(config.band, 2.0 * I.delone.R_cover)
            operators = [FinitePropOperator.random_banded(I.delone, band, rng) for _ in range(config.operators)]
            defect = max((beta(I, alpha(I, T)) - T).norm() for T in operators)
            self.check('beta_inverts_alpha', defect <= tol.beta_alpha, defect, tol.beta_alpha, n=n)
            homomorphism = self.homomorphism(I, operators)
            self.check('alpha_homomorphism', homomorphism <= tol.orthonormality, homomorphism, tol.orthonormality,
                       n=n)
            isometric = self.isometric(I, operators)
            self.check('alpha_isometric', isometric <= tol.orthonormality, isometric, tol.orthonormality, n=n)
            P = GridOperator.create(space, I.projection_matrix())
            unit = float(np.abs(alpha(I, FinitePropOperator.identity(I.delone)).M - P.M).max())
            self.check('alpha_unit_is_frame_projection', unit <= tol.idempotence, unit, tol.idempotence, n=n)
            unital = float(np.abs(beta(I, P).M - np.eye(I.sites)).max())
            self.check('beta_unital', unital <= tol.orthonormality, unital, tol.orthonormality, n=n)
            A = GridOperator.random_banded(space, config.band, rng)
            positive = A.adjoint() @ A
            compressed = beta(I, positive).M
            lowest = float(scipy.linalg.eigvalsh((compressed + compressed.T) / 2.0)[0]) if I.sites else 0.0
            self.check('beta_positive', lowest >= -tol.contraction, lowest, -tol.contraction, n=n)
            shrink = beta(I, A).norm() - A.norm()
            self.check('beta_contraction', shrink <= tol.contraction, shrink, tol.contraction, n=n)
            star = (beta(I, A.adjoint()) - beta(I, A).adjoint()).norm()
            self.check('beta_star', star <= tol.orthonormality, star, tol.orthonormality, n=n)
            compression = compression_identity(I, A)
            self.check('compression_identity', compression <= tol.orthonormality, compression, tol.orthonormality,
                       n=n)
            propagation = eps_propagation(P, config.propagation_eps)
            rows.append({'n': n, 'R_cover': I.delone.R_cover, 'beta_alpha': defect, 'homomorphism': homomorphism,
                         'compression': compression, 'eps_propagation': propagation,
                         'propagation_bound': 4.0 * I.delone.R_cover})
        context.save(self.table, self.tabulate(self.table, rows))


@attr.s
class ReconstructionStage(OperatorStage):
    """Reconstruction of a block-truncated random banded operator along the schedule"""

    @classmethod
    def create(cls, id: str, space: Port, frames: Port, cells: Port, rank: Port, **kwargs):
        return ReconstructionStage(id, space, frames, cells, rank, Port.port(DefectSchema()), **kwargs)

    def compute(self, context: ProcessingContext):
        space, frames, C, B = self.load()
        config = context.config
        tol = self.tolerances
        rng = np.random.default_rng(config.seed + 4)
        T = truncate_k(GridOperator.random_banded(space, config.band, rng), C, B)
        rows = alpha_beta_defect(frames, T, C, B)
        for row in rows:
            if row.exact_expected:
                self.check('exact_reconstruction', row.value < tol.reconstruction, row.value, tol.reconstruction,
                           n=row.n, detail=f"m^n = {row.m_min}")
        first = next((row.n for row in rows if row.exact_expected), None)
        early = [row.value for row in rows if first is None or row.n < first]
        if first is None:
            self.skip('exact_reconstruction', f"no level with more than {B.cutoff} refined sites in every cell")
        if len(early) > 1:
            self.check('defect_decreasing', decreasing(early, slack=tol.reconstruction), early[-1], early[0])
        else:
            self.skip('defect_decreasing', "fewer than two levels before exact reconstruction")
        table = [{'n': row.n, 'R_cover': row.R_cover, 'm_min': row.m_min, 'value': row.value,
                  'source_defect': row.source_defect, 'truncation_gap': row.truncation_gap} for row in rows]
        context.save(self.table, self.tabulate(self.table, table))


@attr.s
class ProductStage(OperatorStage):
    """Multiplicativity defects of the compression for random pairs of truncated banded operators"""

    @classmethod
    def create(cls, id: str, space: Port, frames: Port, cells: Port, rank: Port, **kwargs):
        return ProductStage(id, space, frames, cells, rank, Port.port(ProductSchema()), **kwargs)

    def compute(self, context: ProcessingContext):
        space, frames, C, B = self.load()
        config = context.config
        tol = self.tolerances
        rng = np.random.default_rng(config.seed + 5)
        table = []
        for pair in range(config.pairs):
            R = unit_truncated_banded(space, config.band, C, B, rng)
            S = unit_truncated_banded(space, config.band, C, B, rng)
            rows = multiplicativity_defect(frames, R, S)
            final = rows[-1]
            bound = tol.product * final.scale
            if self.beyond_policy('product_defect', B, final.n):
                self.check('product_defect', final.value < bound, final.value, bound, n=final.n,
                           detail=f"pair {pair}")
            table.extend({'pair': pair, 'n': row.n, 'R_cover': row.R_cover, 'value': row.value, 'scale': row.scale}
                         for row in rows)
        context.save(self.table, self.tabulate(self.table, table))


@attr.s
class NormStage(OperatorStage):
    """Norms of the compressions of truncated multiplication by a cosine"""

    @classmethod
    def create(cls, id: str, space: Port, frames: Port, cells: Port, rank: Port, **kwargs):
        return NormStage(id, space, frames, cells, rank, Port.port(NormSchema()), **kwargs)

    def compute(self, context: ProcessingContext):
        space, frames, C, B = self.load()
        tol = self.tolerances
        f = space.sample(lambda x: np.cos(2.0 * np.pi * x[:, 0] / space.side))
        S = truncated_multiplication(space, C, B)
        limit = GridOperator.multiplication(f).norm()
        self.check('truncation_contraction', S.norm() <= limit + tol.contraction, S.norm(), limit)
        rows = norm_convergence(frames, S)
        for row in rows:
            self.check('compressed_norm_identity', row.identity_gap <= tol.norm_identity, row.identity_gap,
                       tol.norm_identity, n=row.n)
            self.check('norm_contraction', row.value <= row.target + tol.contraction, row.value, row.target, n=row.n)
        final = rows[-1]
        bound = tol.norm_gap * final.target
        if self.beyond_policy('norm_converges', B, final.n):
            self.check('norm_converges', final.gap < bound, final.gap, bound, n=final.n)
        identity = max(abs(row.value - 1.0) for row in norm_convergence(frames, GridOperator.identity(space)))
        self.check('identity_norms', identity <= tol.norm_identity, identity, tol.norm_identity)
        context.save(self.table, self.tabulate(self.table, [attr.asdict(row) for row in rows]))
