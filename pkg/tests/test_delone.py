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

import numpy as np
import pytest

from delone.sets import ControlDomainException, ControlFunction, DeloneSet, UnreachableCoverException, \
    bounded_geometry, covering_radius, greedy_delone, is_controlled, max_ball_count, packing_radius, random_delone
from experiment.config import DEFAULT_SCHEDULE
from space.torus import TorusSpace


def test_packing_radius(tiny):
    assert packing_radius(DeloneSet.create(tiny, [0.0, 0.5])) == 0.5
    assert packing_radius(DeloneSet.create(tiny, [0.0, 0.25, 0.5])) == 0.25
    assert packing_radius(DeloneSet.create(tiny, tiny.nodes)) == 0.125


def test_singleton_packing_radius_is_diameter(tiny):
    D = DeloneSet.create(tiny, [0.0])
    assert D.singleton
    assert packing_radius(D) == tiny.diameter


def test_covering_radius(tiny):
    assert covering_radius(DeloneSet.create(tiny, [0.0, 0.5])) == 0.25
    assert covering_radius(DeloneSet.create(tiny, tiny.nodes)) == 0.0
    assert covering_radius(DeloneSet.create(tiny, [0.0])) == 0.5


def test_covering_radius_on_finer_grid(tiny):
    D = DeloneSet.create(tiny, [0.0, 0.5])
    assert covering_radius(D, TorusSpace.create(1, 1.0, 64)) == 0.25


def test_invalid_sets(tiny):
    with pytest.raises(ValueError):
        DeloneSet.create(tiny, np.zeros((0, 1)))
    with pytest.raises(ValueError):
        DeloneSet.create(tiny, [0.25, 1.25])


def test_greedy_trace(tiny):
    D = greedy_delone(tiny, 0.25)
    np.testing.assert_array_equal(D.points[:, 0], [0.0, 0.5])
    assert D.R_cover == 0.25


def test_greedy_large_target_is_seed(tiny):
    D = greedy_delone(tiny, 0.5, seed=0.375)
    assert D.size == 1
    assert D.points[0, 0] == 0.375


def test_greedy_unreachable(tiny):
    with pytest.raises(UnreachableCoverException):
        greedy_delone(tiny, 0.1)


def test_greedy_schedule(schedule):
    assert [D.size for D in schedule] == [1, 2, 4, 8, 16, 32]
    assert [D.R_cover for D in schedule] == list(DEFAULT_SCHEDULE)
    for D in schedule:
        assert D.r_pack >= D.R_cover


def test_greedy_two_dimensions(torus2):
    D = greedy_delone(torus2, 0.2)
    assert D.R_cover <= 0.2 + 1e-12
    assert D.r_pack >= D.R_cover


def test_random_sets_pack_at_least_their_cover(circle):
    rng = np.random.default_rng(7)
    for _ in range(10):
        D = random_delone(circle, rng, 0.05, 0.5)
        assert D.r_pack >= D.R_cover
        assert is_controlled(D, ControlFunction.linear(0.5))


def test_control_examples(circle):
    F = ControlFunction.linear(0.5)
    assert F(0.4) == pytest.approx(0.2)
    assert is_controlled(DeloneSet.create(circle, [0.0, 0.5]), F)
    assert is_controlled(DeloneSet.create(circle, [0.0, 0.5]), ControlFunction.zero())
    crowded = DeloneSet.create(TorusSpace.create(1, 1.0, 1000), [0.0, 0.01, 0.5])
    assert not is_controlled(crowded, F)


def test_control_domain():
    D = DeloneSet.create(TorusSpace.create(1, 4.0, 16), [0.0])
    with pytest.raises(ControlDomainException, match="outside D_F"):
        is_controlled(D, ControlFunction.linear())


def test_dominates():
    strong = ControlFunction.linear(0.5)
    weak = ControlFunction.linear(0.25)
    assert strong.dominates(weak)
    assert not weak.dominates(strong)
    assert weak.dominates(ControlFunction.zero())
    assert strong.dominates(ControlFunction.power(0.5, 2.0))


@pytest.mark.parametrize("kind,params", [
    ('linear', (0.0,)),
    ('linear', (0.5, 1.0)),
    ('power', (0.5,)),
    ('power', (0.5, 0.0)),
    ('zero', (1.0,)),
    ('quadratic', ())
])
def test_invalid_control(kind, params):
    with pytest.raises(ValueError):
        ControlFunction(kind, params)


def test_max_ball_count(tiny):
    assert max_ball_count(DeloneSet.create(tiny, [0.0, 0.5]), 0.6) == 2
    assert max_ball_count(DeloneSet.create(tiny, [0.0, 0.5]), 0.4) == 1
    assert max_ball_count(DeloneSet.create(tiny, tiny.nodes), 0.2) == 3
    with pytest.raises(ValueError):
        max_ball_count(DeloneSet.create(tiny, [0.0]), 0.0)


def test_bounded_geometry(schedule):
    for D in schedule[1:]:
        count, c, C, holds = bounded_geometry(D, 0.25)
        assert holds
        assert count * c <= C
