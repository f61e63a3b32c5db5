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

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cells.voronoi import voronoi_cells
from delone.sets import greedy_delone
from experiment.config import DEFAULT_SCHEDULE
from gram.frame import frame
from roe.operators import BlockRank
from space.torus import TorusSpace


@pytest.fixture
def tiny():
    """``T^1``, eight nodes"""
    return TorusSpace.create(1, 1.0, 8)


@pytest.fixture
def circle():
    return TorusSpace.create(1, 1.0, 64)


@pytest.fixture
def torus2():
    return TorusSpace.create(2, 1.0, 16)


@pytest.fixture(scope='session')
def rig():
    """The standard convergence rig, ``T^1`` with 1024 nodes"""
    return TorusSpace.create(1, 1.0, 1024)


@pytest.fixture(scope='session')
def schedule(rig):
    return [greedy_delone(rig, target) for target in DEFAULT_SCHEDULE]


@pytest.fixture(scope='session')
def frames(rig, schedule):
    return [frame(rig, D) for D in schedule]


@pytest.fixture(scope='session')
def coarse(rig):
    return greedy_delone(rig, 0.25)


@pytest.fixture(scope='session')
def coarse_cells(rig, coarse):
    return voronoi_cells(rig, coarse)


@pytest.fixture(scope='session')
def rank(coarse_cells, frames):
    return BlockRank.adapted(coarse_cells, 2, frames[-1].pou)


@pytest.fixture(scope='session')
def policy(coarse_cells, frames):
    """The rank policy realised at the coarsest level whose cells all hold more than two refined sites"""
    return BlockRank.adapted(coarse_cells, 2, frames[3].pou, 4)


def scan_generators(space, points, r: float, R: float) -> np.ndarray:
    """Distances from every node to the nearest node outside each ``W_u``, found by scanning all nodes"""
    nodes = space.distances(space.nodes, space.nodes)
    sites = space.node_distances(points)
    h = np.zeros(sites.T.shape)
    for u in range(len(sites)):
        others = np.delete(sites, u, axis=0)
        outside = (sites[u] >= 2.0 * R) | (others <= r / 6.0).any(axis=0)
        h[:, u] = np.where(outside, 0.0, nodes[:, outside].min(axis=1))
    return h


@pytest.fixture
def complement_scan():
    return scan_generators
