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

from marshmallow import Schema, ValidationError, post_load, pre_dump, pre_load

from delone.sets import ControlFunction, DeloneSet
from processing import fields
from space.schema import SpaceSchema
from space.torus import TorusSpace


class DeloneSetSchema(Schema):
    """
    A Delone set document, ``{"space": {...}, "points": [[x, ...], ...]}``.

    The radii are written for information and recomputed on load.
    """
    space = fields.Nested(SpaceSchema, missing=TorusSpace.create)
    points = fields.List(fields.Point(), required=True)
    r_pack = fields.Real(dump_only=True)
    R_cover = fields.Real(dump_only=True)

    class Meta:
        ordered = True

    @pre_load
    def drop_radii(self, data, **kwargs):
        if isinstance(data, dict):
            data = {key: value for key, value in data.items() if key not in ('r_pack', 'R_cover')}
        return data

    @post_load
    def make_delone(self, data, **kwargs):
        try:
            return DeloneSet.create(data['space'], data['points'])
        except ValueError as err:
            raise ValidationError(str(err), 'points')


class ScheduleSchema(Schema):
    """A refining sequence of Delone sets on one space, ``{"levels": [{...}, ...]}``"""
    levels = fields.List(fields.Nested(DeloneSetSchema), required=True)

    class Meta:
        ordered = True

    @pre_dump
    def wrap(self, levels, **kwargs):
        return {'levels': list(levels)}

    @post_load
    def make_schedule(self, data, **kwargs):
        levels = data['levels']
        if not levels:
            raise ValidationError("A schedule needs at least one Delone set", 'levels')
        if any(D.space != levels[0].space for D in levels):
            raise ValidationError("Delone sets of a schedule live on different spaces", 'levels')
        return levels


class ControlSchema(Schema):
    kind = fields.String(missing=ControlFunction.LINEAR)
    params = fields.List(fields.Real(), missing=[0.5])

    class Meta:
        ordered = True

    @post_load
    def make_control(self, data, **kwargs):
        try:
            return ControlFunction(data['kind'], data['params'])
        except ValueError as err:
            raise ValidationError(str(err))


class LevelSchema(Schema):
    n = fields.Integer()
    target = fields.Real()
    size = fields.Integer()
    r_pack = fields.Real()
    R_cover = fields.Real()
    controlled = fields.Boolean()

    class Meta:
        ordered = True


class BallCountSchema(Schema):
    n = fields.Integer()
    R = fields.Real()
    count = fields.Integer()
    c = fields.Real()
    C = fields.Real()
    holds = fields.Boolean()

    class Meta:
        ordered = True
