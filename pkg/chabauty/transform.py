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

from chabauty.metric import epsilon_net, rho, rho_scan, rho_sequence
from chabauty.schema import ConvergenceSchema, CoverageSchema
from delone.sets import is_controlled, random_delone
from processing.dataset import Port
from processing.node import ProcessingContext
from processing.transform import Stage, decreasing

# Covering targets of the random sets drawn for the metric checks
RANDOM_TARGETS = (0.05, 0.5)


@attr.s
class ConvergenceStage(Stage):
    """The distance of each level to the whole space, against the covering radius"""
    space: Port = attr.ib()
    levels: Port = attr.ib()
    table: Port = attr.ib()

    @classmethod
    def create(cls, id: str, space: Port, levels: Port, **kwargs):
        return ConvergenceStage(id, space, levels, Port.port(ConvergenceSchema()), **kwargs)

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        inputs['space'] = self.space
        inputs['levels'] = self.levels
        return inputs

    def outputs(self) -> Dict[str, Port]:
        outputs = super().outputs()
        outputs['table'] = self.table
        return outputs

    def compute(self, context: ProcessingContext):
        space = self.items(self.space)[0]
        sets = self.items(self.levels)
        tol = self.tolerances
        rows = rho_sequence(space, sets)
        for row, D in zip(rows, sets):
            self.check('covering_below_rho', row.R_cover <= row.rho + space.step / 2.0 + tol.oracle,
                       row.R_cover, row.rho + space.step / 2.0, n=row.n)
            scan = rho_scan(space, D, space.nodes)
            self.check('rho_scan_oracle', abs(scan - row.rho) <= space.step + tol.oracle, abs(scan - row.rho),
                       space.step, n=row.n)
        if len(rows) > 1:
            self.check('rho_non_increasing', decreasing([row.rho for row in rows]))
            self.check('packing_to_zero', rows[-1].r_pack < rows[0].r_pack, rows[-1].r_pack, rows[0].r_pack)
        else:
            self.skip('rho_non_increasing', "schedule of one level")
            self.skip('packing_to_zero', "schedule of one level")
        context.save(self.table, self.tabulate(self.table, [attr.asdict(row) for row in rows]))


@attr.s
class MetricStage(Stage):
    """Metric axioms and the scan oracle on random greedy sets"""
    space: Port = attr.ib()

    @classmethod
    def create(cls, id: str, space: Port, **kwargs):
        return MetricStage(id, space, **kwargs)

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        inputs['space'] = self.space
        return inputs

    def compute(self, context: ProcessingContext):
        config = context.config
        space = self.items(self.space)[0]
        tol = self.tolerances
        rng = np.random.default_rng(config.seed + 1)
        sets = [random_delone(space, rng, *RANDOM_TARGETS) for _ in range(3 * config.samples)]
        oracle_gap = symmetry_gap = excess = 0.0
        identity = True
        for k in range(config.samples):
            A, B, C = sets[3 * k:3 * k + 3]
            ab = rho(space, A, B).value
            oracle_gap = max(oracle_gap, abs(ab - rho_scan(space, A, B)))
            symmetry_gap = max(symmetry_gap, abs(ab - rho(space, B, A).value))
            excess = max(excess, rho(space, A, C).value - ab - rho(space, B, C).value)
            identity = identity and rho(space, A, A).value == 0.0 and 0.0 <= ab <= 1.0
        self.check('rho_scan_oracle', oracle_gap <= space.step + tol.oracle, oracle_gap, space.step + tol.oracle,
                   detail=f"{config.samples} pairs")
        self.check('rho_symmetric', symmetry_gap == 0.0, symmetry_gap, 0.0)
        self.check('rho_triangle', excess <= tol.triangle, excess, tol.triangle, detail=f"{config.samples} triples")
        self.check('rho_identity_and_cap', identity)


@attr.s
class NetStage(Stage):
    """Cover random controlled sets with a finite net"""
    space: Port = attr.ib()
    coverage: Port = attr.ib()

    @classmethod
    def create(cls, id: str, space: Port, **kwargs):
        return NetStage(id, space, Port.port(CoverageSchema()), **kwargs)

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        inputs['space'] = self.space
        return inputs

    def outputs(self) -> Dict[str, Port]:
        outputs = super().outputs()
        outputs['coverage'] = self.coverage
        return outputs

    def compute(self, context: ProcessingContext):
        config = context.config
        space = self.items(self.space)[0]
        rng = np.random.default_rng(config.seed + 2)
        rows = []
        for eps in config.net_eps:
            candidates = []
            attempts = 0
            while len(candidates) < config.net_candidates and attempts < 20 * config.net_candidates:
                attempts += 1
                D = random_delone(space, rng, *RANDOM_TARGETS)
                if is_controlled(D, config.control):
                    candidates.append(D)
            if not candidates:
                self.skip('net_covers', f"no controlled candidate in {attempts} draws")
                continue
            net = epsilon_net(space, eps, candidates)
            worst = max(c.distance for c in net.coverage)
            self.check('net_covers', net.covered, worst, eps, detail=f"{len(net.members)} net elements")
            rows.extend({'eps': eps, 'candidate': c.candidate, 'net_index': c.net_index, 'distance': c.distance}
                        for c in net.coverage)
        context.save(self.coverage, self.tabulate(self.coverage, rows))
