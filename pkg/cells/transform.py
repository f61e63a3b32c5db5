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

from typing import Dict

import attr
import numpy as np

from cells.schema import BoundarySchema, CellLevelSchema, DimsSchema, ProjectionSchema
from cells.voronoi import cell_dims, cell_projection, verify_cells, voronoi_cells
from processing.dataset import Dataset, Port
from processing.node import ProcessingContext
from processing.transform import Stage
from roe.operators import BlockRank


@attr.s
class CellStage(Stage):
    """
    Cells of the coarse set, the refined sites each cell holds along the schedule and the cell projections.

    Also publishes the rank policy used for the operator experiments, realised at the coarsest level where
    every cell holds more refined sites than the rank cutoff, or at the finest level when none does.
    """
    space: Port = attr.ib()
    coarse: Port = attr.ib()
    frames: Port = attr.ib()
    cells: Port = attr.ib()
    rank: Port = attr.ib()
    levels: Port = attr.ib()
    dims: Port = attr.ib()
    boundary: Port = attr.ib()
    projections: Port = attr.ib()

    @classmethod
    def create(cls, id: str, space: Port, coarse: Port, frames: Port, **kwargs):
        return CellStage(id, space, coarse, frames, Port.artifact(), Port.artifact(), Port.port(CellLevelSchema()),
                         Port.port(DimsSchema()), Port.port(BoundarySchema()), Port.port(ProjectionSchema()),
                         **kwargs)

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        inputs['space'] = self.space
        inputs['coarse'] = self.coarse
        inputs['frames'] = self.frames
        return inputs

    def outputs(self) -> Dict[str, Port]:
        outputs = super().outputs()
        outputs['cells'] = self.cells
        outputs['rank'] = self.rank
        outputs['levels'] = self.levels
        outputs['dims'] = self.dims
        outputs['boundary'] = self.boundary
        outputs['projections'] = self.projections
        return outputs

    def verify(self, C):
        report = verify_cells(C)
        self.check('cells_partition_nodes', report.exact)
        self.check('inner_ball_in_cell', report.inner_violations == 0, report.inner_violations, 0)
        self.check('cell_in_outer_ball', report.outer_violations == 0, report.outer_violations, 0)
        self.check('cells_nonempty', report.empty_cells == 0, report.empty_cells, 0)
        self.check('boundary_mass_monotone', report.boundary_monotone)
        self.check('boundary_mass_vanishes', report.boundary_vanishes)

    def project(self, n, I, C, f, tol):
        """Project the cell-restricted test function of the first cell, checking the projection itself"""
        Q = cell_projection(0, I.pou, C, I.gram, tol.gram_floor)
        if Q.empty:
            self.skip('cell_projection', "no refined site inside cell 0", n=n)
            return None
        g = f.restrict(C.cell(0))
        error = (g - Q.apply(g)).norm()
        size = g.norm()
        matrix = Q.matrix()
        weights = I.space.weights
        idempotence = float(np.abs(matrix @ matrix - matrix).max())
        self.check('cell_projection_idempotent', idempotence < tol.idempotence, idempotence, tol.idempotence, n=n)
        symmetry = float(np.abs(weights[:, None] * matrix - (weights[:, None] * matrix).T).max()) / I.space.weight
        self.check('cell_projection_self_adjoint', symmetry < tol.idempotence, symmetry, tol.idempotence, n=n)
        outside = Q.range_defect()
        self.check('cell_projection_range_in_cell', outside < tol.idempotence, outside, tol.idempotence, n=n)
        P = I.projection_matrix()
        below = float(np.abs(P @ matrix - matrix).max())
        self.check('cell_projection_below_frame', below < tol.idempotence, below, tol.idempotence, n=n)
        return {'n': n, 'u': 0, 'precedents': len(Q.sites), 'error': error,
                'relative': error / size if size > 0.0 else 0.0}

    def compute(self, context: ProcessingContext):
        space = self.items(self.space)[0]
        D = self.items(self.coarse)[0]
        frames = self.items(self.frames)
        config = context.config
        tol = self.tolerances
        C = voronoi_cells(space, D)
        self.verify(C)
        f = space.sample(lambda x: np.cos(2.0 * np.pi * x[:, 0] / space.side))
        level_rows, dim_rows, projection_rows = [], [], []
        for n, I in enumerate(frames, start=1):
            dims = cell_dims(D, I.delone, I.pou, C)
            if dims.m_min == 0:
                self.skip('measure_inequality', "a cell holds no refined site", n=n)
            else:
                self.check('measure_inequality', bool(np.all(dims.measures_hold)),
                           int(np.count_nonzero(~dims.measures_hold)), 0, n=n)
            level_rows.append({'n': n, 'm_min': dims.m_min, 'm_max': dims.m_max,
                               'measures_hold': bool(np.all(dims.measures_hold))})
            dim_rows.extend({'n': n, 'u': u, 'm_u': int(m)} for u, m in enumerate(dims.m_u))
            row = self.project(n, I, C, f, tol)
            if row is not None:
                projection_rows.append(row)
        tail = [row['m_min'] for row in level_rows if row['n'] >= 3]
        if len(tail) > 1:
            self.check('cell_dimension_grows', all(b > a for a, b in zip(tail, tail[1:])), tail[-1], tail[0])
        else:
            self.skip('cell_dimension_grows', "fewer than two levels from level 3")
        if projection_rows and projection_rows[-1]['n'] == len(frames):
            final = projection_rows[-1]
            self.check('cell_projection_converges', final['relative'] < tol.cell_projection, final['relative'],
                       tol.cell_projection, n=final['n'])
        else:
            self.skip('cell_projection_converges', "cell 0 holds no refined site at the finest level")
        widths = sorted(C.boundary_mass.keys())
        boundary_rows = [{'delta': delta, 'mass': float(C.boundary_mass[delta].sum())} for delta in widths]
        cells = Dataset.for_port(self.cells)
        cells.add_item(0, C)
        rank = Dataset.for_port(self.rank)
        policy = next((row['n'] for row in level_rows if row['m_min'] > config.rank), len(frames))
        self.logger.info("Rank policy of cutoff %d realised at level %d", config.rank, policy)
        rank.add_item(0, BlockRank.adapted(C, config.rank, frames[policy - 1].pou, policy))
        context.save(self.cells, cells)
        context.save(self.rank, rank)
        context.save(self.levels, self.tabulate(self.levels, level_rows))
        context.save(self.dims, self.tabulate(self.dims, dim_rows))
        context.save(self.boundary, self.tabulate(self.boundary, boundary_rows))
        context.save(self.projections, self.tabulate(self.projections, projection_rows))
