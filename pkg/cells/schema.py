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

from cells.voronoi import CellPartition, cell_partition
from delone.schema import DeloneSetSchema
from processing import fields


class CellPartitionSchema(Schema):
    """A cell document, ``{"delone": {...}, "assign": [int, ...]}``"""
    delone = fields.Nested(DeloneSetSchema, required=True)
    assign = fields.List(fields.Integer(), required=True)

    class Meta:
        ordered = True

    @pre_dump
    def flatten(self, C: CellPartition, **kwargs):
        return {'delone': C.delone, 'assign': [int(u) for u in C.assign]}

    @post_load
    def make_cells(self, data, **kwargs):
        try:
            return cell_partition(data['delone'], data['assign'])
        except ValueError as err:
            raise ValidationError(str(err), 'assign')


class CellLevelSchema(Schema):
    n = fields.Integer()
    m_min = fields.Integer()
    m_max = fields.Integer()
    measures_hold = fields.Boolean()

    class Meta:
        ordered = True


class DimsSchema(Schema):
    n = fields.Integer()
    u = fields.Integer()
    m_u = fields.Integer()

    class Meta:
        ordered = True


class BoundarySchema(Schema):
    delta = fields.Real()
    mass = fields.Real()

    class Meta:
        ordered = True


class ProjectionSchema(Schema):
    n = fields.Integer()
    u = fields.Integer()
    precedents = fields.Integer()
    error = fields.Real()
    relative = fields.Real()

    class Meta:
        ordered = True
