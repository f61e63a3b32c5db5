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

from pou.partition import build_pou, verify_pou
from pou.schema import PouSchema
from processing.dataset import Dataset, Port
from processing.node import ProcessingContext
from processing.transform import Stage


@attr.s
class PartitionStage(Stage):
    """Build and verify the partition of unity of every level"""
    space: Port = attr.ib()
    levels: Port = attr.ib()
    partitions: Port = attr.ib()
    table: Port = attr.ib()

    @classmethod
    def create(cls, id: str, space: Port, levels: Port, **kwargs):
        return PartitionStage(id, space, levels, Port.artifact(), Port.port(PouSchema()), **kwargs)

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        inputs['space'] = self.space
        inputs['levels'] = self.levels
        return inputs

    def outputs(self) -> Dict[str, Port]:
        outputs = super().outputs()
        outputs['partitions'] = self.partitions
        outputs['table'] = self.table
        return outputs

    def compute(self, context: ProcessingContext):
        space = self.items(self.space)[0]
        tol = self.tolerances
        partitions = Dataset.for_port(self.partitions)
        rows = []
        for n, D in enumerate(self.items(self.levels), start=1):
            P = build_pou(space, D)
            report = verify_pou(P)
            partitions.add_item(n, P)
            self.check('row_sums', report.row_sum_error < tol.row_sum, report.row_sum_error, tol.row_sum, n=n)
            self.check('range', report.range_violations == 0, report.range_violations, 0, n=n)
            self.check('support', report.support_violations == 0, report.support_violations, 0, n=n)
            if report.plateau_nodes:
                self.check('plateau', report.plateau_min >= 1.0 - tol.row_sum, report.plateau_min, 1.0, n=n)
            else:
                self.skip('plateau', "no node resolves the plateau", n=n)
            if report.lebesgue is not None:
                bound = report.lebesgue_bound - report.resolution
                self.check('lebesgue_number', report.lebesgue >= bound, report.lebesgue, bound, n=n)
            rows.append({'n': n, 'sites': P.sites, 'r': P.r, 'R': P.R, 'row_sum_error': report.row_sum_error,
                         'range_violations': report.range_violations,
                         'support_violations': report.support_violations, 'plateau_min': report.plateau_min,
                         'lipschitz': report.lipschitz, 'lebesgue': report.lebesgue,
                         'lebesgue_bound': report.lebesgue_bound})
        context.save(self.partitions, partitions)
        context.save(self.table, self.tabulate(self.table, rows))
