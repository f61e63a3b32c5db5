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

from delone.schema import BallCountSchema, LevelSchema
from delone.sets import ControlDomainException, ControlFunction, bounded_geometry, greedy_delone, is_controlled
from processing.dataset import Dataset, Port
from processing.node import ProcessingContext
from processing.transform import Stage, decreasing


@attr.s
class ScheduleStage(Stage):
    """
    Generate the refining sequence of greedy Delone sets and the coarse set of the cells.

    Level ``n`` has covering target ``schedule[n - 1]``.
    """
    space: Port = attr.ib()
    levels: Port = attr.ib()
    coarse: Port = attr.ib()
    table: Port = attr.ib()
    geometry: Port = attr.ib()

    @classmethod
    def create(cls, id: str, space: Port, **kwargs):
        return ScheduleStage(id, space, Port.artifact(), Port.artifact(), Port.port(LevelSchema()),
                             Port.port(BallCountSchema()), **kwargs)

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        inputs['space'] = self.space
        return inputs

    def outputs(self) -> Dict[str, Port]:
        outputs = super().outputs()
        outputs['levels'] = self.levels
        outputs['coarse'] = self.coarse
        outputs['table'] = self.table
        outputs['geometry'] = self.geometry
        return outputs

    def _controlled(self, name: str, D, F: ControlFunction, n: int) -> bool:
        try:
            return self.check(name, is_controlled(D, F), D.r_pack, F(D.R_cover), n=n)
        except ControlDomainException as err:
            self.check(name, False, D.R_cover, 1.0, n=n, detail=str(err))
            return False

    def compute(self, context: ProcessingContext):
        config = context.config
        space = self.items(self.space)[0]
        F = config.control
        weaker = ControlFunction.zero()
        sets = Dataset.for_port(self.levels)
        rows = []
        geometry = []
        previous = None
        for n, target in enumerate(config.schedule, start=1):
            D = greedy_delone(space, target)
            sets.add_item(n, D)
            self.check('packing_exceeds_covering', D.r_pack >= D.R_cover, D.r_pack, D.R_cover, n=n)
            controlled = self._controlled('controlled', D, F, n)
            if F.dominates(weaker) and controlled:
                self.check('weaker_control', is_controlled(D, weaker), n=n)
            self.check('covering_target', D.R_cover <= target + 1e-12, D.R_cover, target, n=n)
            for R in config.ball_radii:
                count, c, C, holds = bounded_geometry(D, R)
                self.check('bounded_geometry', holds, count * c, C, n=n, detail=f"R = {R}")
                geometry.append({'n': n, 'R': R, 'count': count, 'c': c, 'C': C, 'holds': holds})
            rows.append({'n': n, 'target': target, 'size': D.size, 'r_pack': D.r_pack, 'R_cover': D.R_cover,
                         'controlled': controlled})
            previous = D
        if len(rows) > 1:
            self.check('covering_decreasing', decreasing([row['R_cover'] for row in rows]))
            self.check('packing_decreasing', decreasing([row['r_pack'] for row in rows]))
        else:
            self.skip('covering_decreasing', "schedule of one level")
            self.skip('packing_decreasing', "schedule of one level")
        coarse = greedy_delone(space, config.coarse_target)
        self._controlled('coarse_controlled', coarse, F, 0)
        datum = Dataset.for_port(self.coarse)
        datum.add_item(0, coarse)
        self.logger.info("Schedule of %d levels ending with %d points, coarse set of %d points",
                         len(rows), previous.size, coarse.size)
        context.save(self.levels, sets)
        context.save(self.coarse, datum)
        context.save(self.table, self.tabulate(self.table, rows))
        context.save(self.geometry, self.tabulate(self.geometry, geometry))
