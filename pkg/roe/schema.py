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

from marshmallow import Schema, ValidationError, post_load, pre_dump, validate

from delone.schema import DeloneSetSchema
from processing import fields
from roe.operators import FinitePropOperator, GridOperator
from space.schema import SpaceSchema

SITES = 'sites'
GRID = 'grid'


class OperatorSchema(Schema):
    """
    An operator document: a dense real matrix over the sites of a Delone set or over the grid of a space.
    """
    kind = fields.String(required=True, validate=validate.OneOf([SITES, GRID]))
    delone = fields.Nested(DeloneSetSchema, allow_none=True, missing=None)
    space = fields.Nested(SpaceSchema, allow_none=True, missing=None)
    matrix = fields.Matrix(required=True)

    class Meta:
        ordered = True

    @pre_dump
    def describe(self, operator, **kwargs):
        if isinstance(operator, FinitePropOperator):
            return {'kind': SITES, 'delone': operator.sites, 'space': None, 'matrix': operator.M}
        return {'kind': GRID, 'delone': None, 'space': operator.space, 'matrix': operator.M}

    @post_load
    def make_operator(self, data, **kwargs):
        try:
            if data['kind'] == SITES:
                if data['delone'] is None:
                    raise ValidationError("A site operator needs its Delone set", 'delone')
                return FinitePropOperator.create(data['delone'], data['matrix'])
            if data['space'] is None:
                raise ValidationError("A grid operator needs its space", 'space')
            return GridOperator.create(data['space'], data['matrix'])
        except ValueError as err:
            raise ValidationError(str(err), 'matrix')


class IsometrySchema(Schema):
    n = fields.Integer()
    R_cover = fields.Real()
    beta_alpha = fields.Real()
    homomorphism = fields.Real()
    compression = fields.Real()
    eps_propagation = fields.Real()
    propagation_bound = fields.Real()

    class Meta:
        ordered = True


class DefectSchema(Schema):
    n = fields.Integer()
    R_cover = fields.Real()
    m_min = fields.Integer()
    value = fields.Real()
    source_defect = fields.Real()
    truncation_gap = fields.Real()

    class Meta:
        ordered = True


class ProductSchema(Schema):
    pair = fields.Integer()
    n = fields.Integer()
    R_cover = fields.Real()
    value = fields.Real()
    scale = fields.Real()

    class Meta:
        ordered = True


class NormSchema(Schema):
    n = fields.Integer()
    R_cover = fields.Real()
    value = fields.Real()
    compressed = fields.Real()
    target = fields.Real()

    class Meta:
        ordered = True
