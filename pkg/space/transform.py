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

import itertools
from typing import Dict

import attr
import numpy as np

from processing.dataset import Dataset, Port
from processing.node import ProcessingContext
from processing.transform import Stage
from space.schema import GeometrySchema

# Largest node count checked exhaustively for the triangle inequality
EXHAUSTIVE_NODES = 64
TRIANGLE_SAMPLES = 20000


@attr.s
class GeometryStage(Stage):
    """Publish the configured torus and check its metric and measure"""
    space: Port = attr.ib()
    geometry: Port = attr.ib()

    @classmethod
    def create(cls, id: str, **kwargs):
        return GeometryStage(id, Port.artifact(), Port.port(GeometrySchema()), **kwargs)

    def outputs(self) -> Dict[str, Port]:
        outputs = super().outputs()
        outputs['space'] = self.space
        outputs['geometry'] = self.geometry
        return outputs

    def compute(self, context: ProcessingContext):
        config = context.config
        space = config.space
        tol = self.tolerances
        self.check('total_measure', abs(space.weights.sum() - space.measure) <= 1e-12 * space.measure,
                   float(space.weights.sum()), space.measure)
        nodes = space.nodes
        self.check('nodes_in_fundamental_domain', bool(np.all((nodes >= 0.0) & (nodes < space.side))))
        self.check('diameter', abs(space.diameter - space.side * np.sqrt(space.dim) / 2.0) <= 1e-15,
                   space.diameter, space.side * np.sqrt(space.dim) / 2.0)
        if space.node_count <= EXHAUSTIVE_NODES:
            triples = np.array(list(itertools.product(range(space.node_count), repeat=3)))
        else:
            rng = np.random.default_rng(config.seed)
            triples = rng.integers(space.node_count, size=(TRIANGLE_SAMPLES, 3))
        a, b, c = nodes[triples[:, 0]], nodes[triples[:, 1]], nodes[triples[:, 2]]
        excess = space.paired_distances(a, c) - space.paired_distances(a, b) - space.paired_distances(b, c)
        self.check('triangle_inequality', float(excess.max()) <= tol.triangle, float(excess.max()), tol.triangle,
                   detail=f"{len(triples)} triples")
        rows = []
        previous = 0.0
        monotone = True
        for R in sorted(config.ball_radii):
            c_R, C_R = space.check_bounded_geometry(R)
            measure = space.ball_measure(space.basepoint, R)
            monotone = monotone and measure >= previous
            previous = measure
            self.check('translation_invariance', c_R == C_R, C_R - c_R, 0.0, detail=f"R = {R}")
            rows.append({'R': R, 'c': c_R, 'C': C_R})
        self.check('ball_measure_monotone', monotone)
        artifact = Dataset.for_port(self.space)
        artifact.add_item(0, space)
        context.save(self.space, artifact)
        context.save(self.geometry, self.tabulate(self.geometry, rows))
