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

"""
Experiment configuration, loaded from one JSON document.

Every key has a default, so ``{}`` is the standard rig.
"""

import hashlib
import json
from typing import Tuple

import attr
from marshmallow import Schema, ValidationError, post_load, validates, validates_schema

from delone.schema import ControlSchema
from delone.sets import ControlFunction
from processing import fields
from processing.store import loads
from space.schema import SpaceSchema
from space.torus import TorusSpace

DEFAULT_SCHEDULE = (0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625)


@attr.s(frozen=True)
class Tolerances:
    row_sum: float = attr.ib(default=1e-12)
    orthonormality: float = attr.ib(default=1e-8)
    idempotence: float = attr.ib(default=1e-8)
    beta_alpha: float = attr.ib(default=1e-10)
    gram_floor: float = attr.ib(default=1e-10)
    gram_bound: float = attr.ib(default=1e-9)
    reconstruction: float = attr.ib(default=1e-6)
    product: float = attr.ib(default=0.1)
    norm_gap: float = attr.ib(default=0.05)
    norm_identity: float = attr.ib(default=1e-8)
    strong: float = attr.ib(default=0.05)
    strong_bound: float = attr.ib(default=1e-8)
    cell_projection: float = attr.ib(default=0.05)
    triangle: float = attr.ib(default=1e-12)
    oracle: float = attr.ib(default=1e-9)
    contraction: float = attr.ib(default=1e-9)


@attr.s(frozen=True)
class ExperimentConfig:
    """The parameters of an experiment run"""
    experiment: str = attr.ib(default='roelab')
    space: TorusSpace = attr.ib(factory=lambda: TorusSpace.create(1, 1.0, 1024))
    control: ControlFunction = attr.ib(factory=ControlFunction.linear)
    schedule: Tuple[float, ...] = attr.ib(default=DEFAULT_SCHEDULE, converter=tuple)
    coarse_target: float = attr.ib(default=0.25)
    seed: int = attr.ib(default=20211)
    rank: int = attr.ib(default=2)
    band: float = attr.ib(default=0.1)
    operators: int = attr.ib(default=20)
    pairs: int = attr.ib(default=10)
    samples: int = attr.ib(default=100)
    ball_radii: Tuple[float, ...] = attr.ib(default=(0.1, 0.25, 0.5), converter=tuple)
    net_eps: Tuple[float, ...] = attr.ib(default=(0.5, 0.25), converter=tuple)
    net_candidates: int = attr.ib(default=50)
    propagation_eps: float = attr.ib(default=1e-3)
    tolerances: Tolerances = attr.ib(factory=Tolerances)

    @property
    def levels(self) -> int:
        return len(self.schedule)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form of the configuration"""
        canonical = json.dumps(ExperimentConfigSchema().dump(self), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


class TolerancesSchema(Schema):
    row_sum = fields.Real()
    orthonormality = fields.Real()
    idempotence = fields.Real()
    beta_alpha = fields.Real()
    gram_floor = fields.Real()
    gram_bound = fields.Real()
    reconstruction = fields.Real()
    product = fields.Real()
    norm_gap = fields.Real()
    norm_identity = fields.Real()
    strong = fields.Real()
    strong_bound = fields.Real()
    cell_projection = fields.Real()
    triangle = fields.Real()
    oracle = fields.Real()
    contraction = fields.Real()

    class Meta:
        ordered = True

    @validates_schema
    def positive(self, data, **kwargs):
        for key, value in data.items():
            if not value > 0:
                raise ValidationError(f"Tolerance must be positive, got {value}", key)

    @post_load
    def make_tolerances(self, data, **kwargs):
        return Tolerances(**data)


class ExperimentConfigSchema(Schema):
    experiment = fields.String()
    space = fields.Nested(SpaceSchema)
    control = fields.Nested(ControlSchema)
    schedule = fields.List(fields.Real())
    coarse_target = fields.Real()
    seed = fields.Integer()
    rank = fields.Integer()
    band = fields.Real()
    operators = fields.Integer()
    pairs = fields.Integer()
    samples = fields.Integer()
    ball_radii = fields.List(fields.Real())
    net_eps = fields.List(fields.Real())
    net_candidates = fields.Integer()
    propagation_eps = fields.Real()
    tolerances = fields.Nested(TolerancesSchema)

    class Meta:
        ordered = True

    @validates('schedule')
    def strictly_decreasing(self, value, **kwargs):
        if not value:
            raise ValidationError("The schedule needs at least one covering radius")
        if any(not v > 0 for v in value):
            raise ValidationError("Schedule radii must be positive")
        if any(b >= a for a, b in zip(value, value[1:])):
            raise ValidationError(f"Schedule {value} is not strictly decreasing")

    @validates('rank')
    def non_negative(self, value, **kwargs):
        if value < 0:
            raise ValidationError(f"Rank cutoff {value} is negative")

    @post_load
    def make_config(self, data, **kwargs):
        return ExperimentConfig(**data)


def load_config(file: str = None) -> ExperimentConfig:
    """Read a configuration document, the defaults if no file is given"""
    if file is None:
        return ExperimentConfigSchema().load({})
    with open(file, "r", encoding="utf-8") as ifile:
        return loads(ExperimentConfigSchema(), ifile.read(), file)
