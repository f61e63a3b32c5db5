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

from gram.frame import gram, isometry, strong_convergence
from gram.schema import GramSchema, StrongSchema
from processing.dataset import Dataset, Port
from processing.node import ProcessingContext
from processing.transform import Stage, decreasing


@attr.s
class GramStage(Stage):
    """Gram matrices and isometries of every level, checked against the two-sided bounds"""
    space: Port = attr.ib()
    partitions: Port = attr.ib()
    frames: Port = attr.ib()
    table: Port = attr.ib()

    @classmethod
    def create(cls, id: str, space: Port, partitions: Port, **kwargs):
        return GramStage(id, space, partitions, Port.artifact(), Port.port(GramSchema()), **kwargs)

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        inputs['space'] = self.space
        inputs['partitions'] = self.partitions
        return inputs

    def outputs(self) -> Dict[str, Port]:
        outputs = super().outputs()
        outputs['frames'] = self.frames
        outputs['table'] = self.table
        return outputs

    def compute(self, context: ProcessingContext):
        space = self.items(self.space)[0]
        tol = self.tolerances
        frames = Dataset.for_port(self.frames)
        rows = []
        for n, P in enumerate(self.items(self.partitions), start=1):
            G = gram(space, P, tol.gram_floor)
            I = isometry(P, G)
            frames.add_item(n, I)
            self.check('gram_lower_bound', G.lambda_min >= G.lower_bound - tol.gram_bound, G.lambda_min,
                       G.lower_bound, n=n)
            self.check('gram_upper_bound', G.norm <= G.upper_bound + tol.gram_bound, G.norm, G.upper_bound, n=n)
            self.check('gram_schur_bound', G.norm <= G.schur_bound + tol.gram_bound, G.norm, G.schur_bound, n=n)
            root = float(np.abs(G.G_half @ G.G_half - G.G).max())
            self.check('square_root', root <= tol.gram_bound, root, tol.gram_bound, n=n)
            inverse = float(np.abs(G.G_invhalf @ G.G_half - np.eye(P.sites)).max())
            self.check('inverse_square_root', inverse <= tol.gram_bound, inverse, tol.gram_bound, n=n)
            orthonormality = I.orthonormality_defect()
            self.check('orthonormality', orthonormality < tol.orthonormality, orthonormality, tol.orthonormality, n=n)
            idempotence = I.idempotence_defect()
            self.check('idempotence', idempotence < tol.idempotence, idempotence, tol.idempotence, n=n)
            Pm = I.projection_matrix()
            fixed = float(np.abs(Pm @ P.phi - P.phi).max())
            self.check('fixes_partition', fixed < tol.idempotence, fixed, tol.idempotence, n=n)
            rows.append({'n': n, 'sites': P.sites, 'lambda_min': G.lambda_min, 'lower_bound': G.lower_bound,
                         'norm': G.norm, 'upper_bound': G.upper_bound, 'schur_bound': G.schur_bound,
                         'condition': G.condition, 'orthonormality': orthonormality, 'idempotence': idempotence})
        context.save(self.frames, frames)
        context.save(self.table, self.tabulate(self.table, rows))


@attr.s
class StrongStage(Stage):
    """Projection errors of ``cos(2 pi x / L)`` along the schedule"""
    space: Port = attr.ib()
    frames: Port = attr.ib()
    table: Port = attr.ib()

    @classmethod
    def create(cls, id: str, space: Port, frames: Port, **kwargs):
        return StrongStage(id, space, frames, Port.port(StrongSchema()), **kwargs)

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        inputs['space'] = self.space
        inputs['frames'] = self.frames
        return inputs

    def outputs(self) -> Dict[str, Port]:
        outputs = super().outputs()
        outputs['table'] = self.table
        return outputs

    def compute(self, context: ProcessingContext):
        space = self.items(self.space)[0]
        tol = self.tolerances
        f = space.sample(lambda x: np.cos(2.0 * np.pi * x[:, 0] / space.side))
        size = f.norm()
        rows = [attr.evolve(strong_convergence(space, f, [I])[0], n=n)
                for n, I in enumerate(self.items(self.frames), start=1)]
        for row in rows:
            self.check('error_below_bound', row.error <= row.bound + tol.strong_bound, row.error, row.bound, n=row.n)
            self.check('projection_beats_quasi_interpolant', row.error <= row.quasi_error + tol.idempotence,
                       row.error, row.quasi_error, n=row.n)
        if len(rows) > 1:
            bounds = [row.bound for row in rows]
            self.check('bound_non_increasing', decreasing(bounds, slack=tol.strong_bound), bounds[-1], bounds[0])
            rises = [row.n for previous, row in zip(rows, rows[1:]) if row.error >= previous.error]
            if rises:
                self.logger.info("Projection error rises at levels %s", rises)
        else:
            self.skip('bound_non_increasing', "schedule of one level")
        final = rows[-1].error
        self.check('final_error', final < tol.strong * size, final, tol.strong * size, n=rows[-1].n)
        context.save(self.table, self.tabulate(self.table, [attr.asdict(row) for row in rows]))
