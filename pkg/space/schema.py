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

from marshmallow import Schema, ValidationError, post_load

from processing import fields
from space.torus import TorusSpace


class SpaceSchema(Schema):
    """The torus: ``{"dim": int, "side": float, "grid_n": int, "basepoint": [float, ...]}``"""
    dim = fields.Integer(missing=1)
    side = fields.Real(missing=1.0)
    grid_n = fields.Integer(missing=64)
    basepoint = fields.Point(missing=None, allow_none=True)

    class Meta:
        ordered = True

    @post_load
    def make_space(self, data, **kwargs):
        try:
            return TorusSpace.create(**data)
        except (TypeError, ValueError) as err:
            raise ValidationError(str(err))


class GeometrySchema(Schema):
    """Bounded-geometry constants of the grid balls"""
    R = fields.Real()
    c = fields.Real()
    C = fields.Real()

    class Meta:
        ordered = True
