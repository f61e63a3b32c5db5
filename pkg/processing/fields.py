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

import math

import numpy as np
from marshmallow import fields, ValidationError
"""
Marshmallow fields for numerical tables and documents.

Floats are written with the shortest representation that reads back to the same value.
"""

class _NoneMixin(object):
    def _deserialize(self, value, attr, data, **kwargs):
        if value == '':
            return None
        return super(_NoneMixin, self)._deserialize(value, attr, data, **kwargs)

    def _validate(self, value):
        if value is None:
            return
        return super(_NoneMixin, self)._validate(value)

class Boolean(_NoneMixin, fields.Boolean):
    pass

class String(_NoneMixin, fields.String):
    pass

class Integer(_NoneMixin, fields.Integer):
    def _serialize(self, value, attr, obj, **kwargs):
        return None if value is None else int(value)

class Raw(fields.Raw):
    pass

class Real(_NoneMixin, fields.Float):
    """A float that accepts numpy scalars and the non-finite values"""
    def __init__(self, **kwargs):
        kwargs.setdefault('allow_nan', True)
        super().__init__(**kwargs)

    def _serialize(self, value, attr, obj, **kwargs):
        if value is None:
            return None
        return float(value)

class Point(fields.List):
    """Coordinates of a point of the torus"""
    def __init__(self, **kwargs):
        super().__init__(Real(), **kwargs)

    def _serialize(self, value, attr, obj, **kwargs):
        if value is None:
            return None
        return [float(v) for v in np.asarray(value).ravel()]

class Matrix(fields.Field):
    """A real matrix as a list of rows"""
    def _serialize(self, value, attr, obj, **kwargs):
        if value is None:
            return None
        return [[float(v) for v in row] for row in np.atleast_2d(np.asarray(value, dtype=float))]

    def _deserialize(self, value, attr, data, **kwargs):
        if not isinstance(value, list) or any(not isinstance(row, list) for row in value):
            raise ValidationError("A matrix is a list of rows")
        if value and any(len(row) != len(value[0]) for row in value):
            raise ValidationError("Matrix rows differ in length")
        try:
            matrix = np.array(value, dtype=float)
        except (TypeError, ValueError) as err:
            raise ValidationError(f"Non-numeric matrix entry: {err}")
        if matrix.size and not all(math.isfinite(v) for v in matrix.ravel()):
            raise ValidationError("Matrix entries must be finite")
        return matrix.reshape(len(value), len(value[0]) if value else 0)

class List(_NoneMixin, fields.List):
    pass

class Nested(_NoneMixin, fields.Nested):
    pass

class Dict(_NoneMixin, fields.Dict):
    pass
