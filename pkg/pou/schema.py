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

from marshmallow import Schema, ValidationError, post_load, pre_dump

from delone.schema import DeloneSetSchema
from pou.partition import PartitionOfUnity, lipschitz_estimates
from processing import fields


class PartitionSchema(Schema):
    """
    A partition of unity document: a header ``{grid_n, sites, r, R}``, the sites and the matrix.

    The matrix is stored as read; loading does not rebuild the partition.
    """
    grid_n = fields.Integer(required=True)
    sites = fields.Integer(required=True)
    r = fields.Real(required=True)
    R = fields.Real(required=True)
    delone = fields.Nested(DeloneSetSchema, required=True)
    phi = fields.Matrix(required=True)

    class Meta:
        ordered = True

    @pre_dump
    def header(self, P: PartitionOfUnity, **kwargs):
        return {'grid_n': P.space.grid_n, 'sites': P.sites, 'r': P.r, 'R': P.R, 'delone': P.delone, 'phi': P.phi}

    @post_load
    def make_partition(self, data, **kwargs):
        D = data['delone']
        phi = data['phi']
        if data['grid_n'] != D.space.grid_n:
            raise ValidationError(f"Header grid_n {data['grid_n']} differs from the space's {D.space.grid_n}", 'grid_n')
        if data['sites'] != D.size:
            raise ValidationError(f"Header sites {data['sites']} differs from {D.size} points", 'sites')
        if phi.shape != (D.space.node_count, D.size):
            raise ValidationError(f"Matrix of shape {phi.shape} for {D.space.node_count} nodes and {D.size} sites", 'phi')
        phi.setflags(write=False)
        return PartitionOfUnity(D, phi, data['r'], data['R'], lipschitz_estimates(D.space, phi))


class PouSchema(Schema):
    n = fields.Integer()
    sites = fields.Integer()
    r = fields.Real()
    R = fields.Real()
    row_sum_error = fields.Real()
    range_violations = fields.Integer()
    support_violations = fields.Integer()
    plateau_min = fields.Real()
    lipschitz = fields.Real()
    lebesgue = fields.Real()
    lebesgue_bound = fields.Real()

    class Meta:
        ordered = True
