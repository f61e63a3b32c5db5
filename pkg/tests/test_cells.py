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

from cells.voronoi import cell_dims, cell_partition, cell_projection, owners, precedents, precedes, verify_cells, \
    voronoi_cells
from delone.sets import DeloneSet
from space.torus import TorusSpace


def nearest_site(D, x):
    return int(np.argmin(D.space.distances(D.points, [x])[:, 0]))


def test_ties_go_to_lowest_index(tiny):
    C = voronoi_cells(tiny, DeloneSet.create(tiny, [0.0, 0.5]))
    assert C.sizes.tolist() == [5, 3]
    np.testing.assert_array_equal(C.cell(0), [0, 1, 2, 6, 7])
    np.testing.assert_array_equal(C.cell(1), [3, 4, 5])
    assert verify_cells(C).passed


def test_boundary_mass(tiny):
    C = voronoi_cells(tiny, DeloneSet.create(tiny, [0.0, 0.5]))
    assert C.boundary_mass[0.5 * tiny.step].sum() == 0.0
    assert C.boundary_mass[tiny.step].sum() == pytest.approx(4 * tiny.weight)
    assert C.boundary_mass[8.0 * tiny.step].sum() == pytest.approx(1.0)


def test_schedule_cells(rig, schedule):
    for D in schedule:
        report = verify_cells(voronoi_cells(rig, D))
        assert report.passed, report


def test_invalid_assignment(tiny):
    D = DeloneSet.create(tiny, [0.0, 0.5])
    with pytest.raises(ValueError):
        cell_partition(D, np.zeros(7))
    with pytest.raises(ValueError):
        cell_partition(D, np.full(8, 2))
    with pytest.raises(ValueError):
        voronoi_cells(TorusSpace.create(1, 1.0, 16), D)


def test_precedes(coarse, coarse_cells, frames):
    P = frames[-1].pou
    centre = nearest_site(P.delone, 0.0)
    edge = nearest_site(P.delone, 0.25)
    u = nearest_site(coarse, 0.0)
    assert precedes(centre, u, P, coarse_cells)
    assert not precedes(centre, 1 - u, P, coarse_cells)
    assert owners(P, coarse_cells)[edge] == -1
    assert not precedes(edge, 0, P, coarse_cells)
    assert not precedes(edge, 1, P, coarse_cells)
    assert precedents(u, P, coarse_cells)[0] == centre


def test_single_cell_holds_everything(rig, frames):
    D = DeloneSet.create(rig, [0.0])
    C = voronoi_cells(rig, D)
    for I in frames:
        dims = cell_dims(D, I.delone, I.pou, C)
        assert dims.m_u.tolist() == [I.sites]
        assert dims.measures_hold.all()


def test_cell_dimension_grows(coarse, coarse_cells, frames):
    m_min = [cell_dims(coarse, I.delone, I.pou, coarse_cells).m_min for I in frames[2:]]
    assert m_min[0] >= 1
    assert all(b > a for a, b in zip(m_min, m_min[1:]))


def test_cell_dims_mismatch(coarse, coarse_cells, frames):
    with pytest.raises(ValueError):
        cell_dims(coarse, frames[1].delone, frames[2].pou, coarse_cells)


def test_empty_cell_projection(rig, coarse_cells, frames):
    proj = cell_projection(0, frames[0].pou, coarse_cells, frames[0].gram)
    assert proj.empty
    assert not proj.matrix().any()
    assert proj.range_defect() == 0.0
    assert proj.apply(rig.constant()).norm() == 0.0


def test_cell_projection(rig, coarse, coarse_cells, frames):
    I = frames[-1]
    u = nearest_site(coarse, 0.0)
    proj = cell_projection(u, I.pou, coarse_cells, I.gram)
    assert not proj.empty
    M = proj.matrix()
    np.testing.assert_allclose(M @ M, M, atol=1e-8)
    WM = rig.weights[:, None] * M
    np.testing.assert_allclose(WM, WM.T, atol=1e-12)
    assert proj.range_defect() == 0.0
    cosine = rig.sample(lambda x: np.cos(2.0 * np.pi * x[:, 0]))
    inside = np.zeros(rig.node_count)
    inside[proj.cell] = cosine.values[proj.cell]
    f = rig.function(inside)
    error = (f - proj.apply(f)).norm() / f.norm()
    assert error < 0.05
