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

from field.schema import ProfileSchema
from field.sections import FieldSection, field_axioms_check, ideal_section, norm_profile, section
from processing.dataset import Port
from processing.node import ProcessingContext
from roe.operators import GridOperator
from roe.transform import OperatorStage, truncated_multiplication, unit_truncated_banded


def _perturbation(sec: FieldSection, n: int, rng: np.random.Generator) -> np.ndarray:
    size = sec.seq[n - 1].sites
    matrix = rng.uniform(-1.0, 1.0, (size, size))
    return (matrix + matrix.T) / 2.0


@attr.s
class FieldStage(OperatorStage):
    """Norm profiles of sections over the schedule and its point at infinity, with the field axioms"""

    @classmethod
    def create(cls, id: str, space: Port, frames: Port, cells: Port, rank: Port, **kwargs):
        return FieldStage(id, space, frames, cells, rank, Port.port(ProfileSchema()), **kwargs)

    def sections(self, space, frames, C, B, rng) -> Dict[str, FieldSection]:
        S = truncated_multiplication(space, C, B)
        R = unit_truncated_banded(space, self._context.config.band, C, B, rng)
        b_S = section(S, frames)
        support = [n for n in (1, 2) if n <= len(frames)]
        return {
            'b_S': b_S,
            'b_R': section(R, frames),
            'b_S_copy': section(S, frames),
            'b_S_perturbed': b_S.perturbed({1: _perturbation(b_S, 1, rng)}),
            'b_I': section(GridOperator.identity(space), frames),
            'ideal': ideal_section(frames, {n: _perturbation(b_S, n, rng) for n in support})
        }

    def compute(self, context: ProcessingContext):
        space, frames, C, B = self.load()
        tol = self.tolerances
        rng = np.random.default_rng(context.config.seed + 6)
        sections = self.sections(space, frames, C, B, rng)
        profiles = {name: norm_profile(sec, tol.contraction) for name, sec in sections.items()}
        rows = []
        for name, profile in profiles.items():
            rows.extend({'section': name, 't': str(row.t), 'fiber_norm': row.fiber_norm,
                         'continuity_gap': row.continuity_gap} for row in profile.rows)
        for name in ('b_S', 'b_R'):
            profile = profiles[name]
            self.check('fiber_contraction', profile.contraction, max(row.fiber_norm for row in profile.rows),
                       profile.source_norm, detail=name)
        b_S = profiles['b_S']
        bound = tol.norm_gap * b_S.limit
        if self.beyond_policy('continuity_at_infinity', B, len(frames)):
            self.check('continuity_at_infinity', b_S.final_gap < bound, b_S.final_gap, bound, n=len(frames))
        perturbed = profiles['b_S_perturbed']
        tail = max((abs(a.fiber_norm - b.fiber_norm) for a, b in zip(perturbed.rows[1:], b_S.rows[1:])), default=0.0)
        self.check('perturbation_tail', tail <= tol.contraction, tail, tol.contraction)
        ideal = profiles['ideal']
        self.check('ideal_tail_zero', ideal.tail_zero(), ideal.final_gap, 0.0)
        identity = max(abs(row.fiber_norm - 1.0) for row in profiles['b_I'].rows)
        self.check('identity_profile_constant', identity <= tol.norm_identity, identity, tol.norm_identity)
        report = field_axioms_check(list(sections.values()), tol.oracle)
        names = list(sections.keys())
        expected = [(names.index('b_S'), names.index('b_S_copy'))]
        self.check('faithful', report.equal_pairs == expected, len(report.equal_pairs), len(expected),
                   detail=", ".join(f"{names[i]} = {names[j]}" for i, j in report.equal_pairs))
        separating = report.separating_fiber.get((names.index('b_S'), names.index('b_S_perturbed')))
        self.check('perturbation_separates', separating == 1, detail=f"first separating fiber {separating}")
        if report.product:
            final = report.product[-1]
            bound = tol.product * final.scale
            if self.beyond_policy('section_product', B, final.n):
                self.check('section_product', final.value < bound, final.value, bound, n=final.n)
        self.check('section_star', report.star_defect <= tol.orthonormality, report.star_defect, tol.orthonormality)
        context.save(self.table, self.tabulate(self.table, rows))
