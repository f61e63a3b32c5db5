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

from marshmallow import Schema

from processing import fields


class GramSchema(Schema):
    n = fields.Integer()
    sites = fields.Integer()
    lambda_min = fields.Real()
    lower_bound = fields.Real()
    norm = fields.Real()
    upper_bound = fields.Real()
    schur_bound = fields.Real()
    condition = fields.Real()
    orthonormality = fields.Real()
    idempotence = fields.Real()

    class Meta:
        ordered = True


class StrongSchema(Schema):
    n = fields.Integer()
    R_cover = fields.Real()
    error = fields.Real()
    quasi_error = fields.Real()
    bound = fields.Real()

    class Meta:
        ordered = True
