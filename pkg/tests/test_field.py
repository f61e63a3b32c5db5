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

from delone.sets import DeloneSet
from field.sections import INFINITY, field_axioms_check, ideal_section, norm_profile, section
from gram.frame import frame
from roe.operators import GridOperator


@pytest.fixture
def seq(circle):
    return tuple(frame(circle, DeloneSet.create(circle, points))
                 for points in ([0.0], [0.0, 0.5], [0.0, 0.25, 0.5, 0.75]))


@pytest.fixture
def banded(circle):
    return GridOperator.random_banded(circle, 0.2, np.random.default_rng(20))


def test_zero_section(circle, seq):
    profile = norm_profile(section(GridOperator.zero(circle), seq))
    assert all(row.fiber_norm == 0.0 for row in profile.rows)
    assert profile.limit == 0.0
    assert profile.contraction
    assert profile.support == []


def test_identity_section(circle, seq):
    profile = norm_profile(section(GridOperator.identity(circle), seq))
    assert [row.t for row in profile.rows] == [1, 2, 3, INFINITY]
    for row in profile.rows:
        assert row.fiber_norm == pytest.approx(1.0, abs=1e-10)
        assert row.continuity_gap < 1e-10
    assert profile.final_gap < 1e-10


def test_fiber_contraction(seq, banded):
    sec = section(banded, seq)
    profile = norm_profile(sec)
    assert profile.contraction
    assert profile.source_norm == pytest.approx(1.0)
    assert sec.fiber(INFINITY) is banded
    with pytest.raises(ValueError):
        sec.fiber(0)
    with pytest.raises(ValueError):
        sec.fiber(4)


def test_ideal_tail(seq):
    sec = ideal_section(seq, {1: np.array([[2.0]])})
    profile = norm_profile(sec)
    assert sec.support == [1]
    assert profile.rows[0].fiber_norm == pytest.approx(2.0)
    assert profile.tail_zero()
    assert profile.limit == 0.0


def test_section_algebra(seq, banded):
    sec = section(banded, seq)
    square = sec @ sec
    total = sec + sec
    for n in (1, 2, 3):
        np.testing.assert_allclose(square.fiber(n).M, sec.fiber(n).M @ sec.fiber(n).M)
        np.testing.assert_allclose(total.fiber(n).M, 2.0 * sec.fiber(n).M)
    np.testing.assert_allclose(square.fiber(INFINITY).M, banded.M @ banded.M)
    assert square.source is None
    np.testing.assert_allclose(sec.adjoint().fiber(2).M, sec.fiber(2).M.T)


def test_perturbation_is_finitely_supported(seq, banded):
    sec = section(banded, seq)
    perturbed = sec.perturbed({2: np.ones((2, 2))})
    np.testing.assert_allclose(perturbed.fiber(2).M, sec.fiber(2).M + 1.0)
    np.testing.assert_array_equal(perturbed.fiber(3).M, sec.fiber(3).M)
    assert perturbed.fiber(INFINITY) is sec.fiber(INFINITY)
    assert perturbed.support == [2]


def test_sections_over_other_sequences(circle, seq, banded):
    other = tuple(frame(circle, I.delone) for I in seq)
    with pytest.raises(ValueError):
        section(banded, seq) + section(banded, other)


def test_axioms(circle, seq, banded):
    f = circle.sample(lambda x: np.cos(2.0 * np.pi * x[:, 0]))
    b_S = section(banded, seq)
    b_R = section(GridOperator.multiplication(f), seq)
    sections = [b_S, b_R, section(banded, seq), b_S.perturbed({1: np.array([[0.5]])})]
    report = field_axioms_check(sections)
    assert report.equal_pairs == [(0, 2)]
    assert not report.faithful
    assert report.separating_fiber[(0, 3)] == 1
    assert report.separating_fiber[(2, 3)] == 1
    assert [row.n for row in report.product] == [1, 2, 3]
    assert report.star_defect < 1e-10


def test_star_of_non_self_adjoint(circle, seq):
    S = GridOperator.create(circle, np.triu(np.ones((64, 64))) / 64.0)
    report = field_axioms_check([section(S, seq), section(S.adjoint(), seq)])
    assert report.star_defect < 1e-10
    assert report.faithful


def test_axioms_need_two_sections(seq, banded):
    with pytest.raises(ValueError):
        field_axioms_check([section(banded, seq)])
