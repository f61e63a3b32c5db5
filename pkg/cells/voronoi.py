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
Voronoi cell partitions of the grid, the containment relation between a refined partition of unity and the
cells, and the cell projections onto the partition functions that fit inside a cell.
"""

import logging
from typing import Dict, List, Sequence

import attr
import numpy as np
import scipy.linalg

from delone.sets import DeloneSet
from gram.frame import EIGENVALUE_FLOOR, GramData, SingularGramException
from pou.partition import PartitionOfUnity
from space.torus import CHUNK, GridFunction, TorusSpace

logger = logging.getLogger(__name__)

# Boundary layer widths, in grid steps
BOUNDARY_SWEEP = (8.0, 4.0, 2.0, 1.0, 0.5)


@attr.s(frozen=True, eq=False)
class CellPartition:
    """
    Grid nodes grouped by nearest site, lowest site index on ties.

    ``boundary_mass`` maps a layer width ``delta`` to the quadrature mass, per site, of the cell nodes
    within ``delta`` of another cell.
    """
    delone: DeloneSet = attr.ib()
    assign: np.ndarray = attr.ib(repr=False)
    cells: List[np.ndarray] = attr.ib(repr=False)
    boundary_mass: Dict[float, np.ndarray] = attr.ib(repr=False)

    @property
    def space(self) -> TorusSpace:
        return self.delone.space

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(cell) for cell in self.cells])

    def cell(self, u: int) -> np.ndarray:
        return self.cells[u]


def _distance_to_other_cells(space: TorusSpace, assign: np.ndarray) -> np.ndarray:
    nodes = space.nodes
    gap = np.empty(space.node_count)
    for start in range(0, space.node_count, CHUNK):
        block = space.distances(nodes[start:start + CHUNK], nodes)
        block[assign[start:start + CHUNK][:, None] == assign[None, :]] = np.inf
        gap[start:start + CHUNK] = block.min(axis=1)
    return gap


def voronoi_cells(space: TorusSpace, D: DeloneSet, sweep: Sequence[float] = BOUNDARY_SWEEP) -> CellPartition:
    """
    Assign every node to its nearest site.

    :param space: The torus
    :param D: The coarse sites
    :param sweep: Boundary layer widths in grid steps

    :return: The cell partition
    """
    if space != D.space:
        raise ValueError(f"Delone set lives on {D.space}, not {space}")
    return cell_partition(D, np.argmin(space.node_distances(D.points), axis=0), sweep)


def cell_partition(D: DeloneSet, assign, sweep: Sequence[float] = BOUNDARY_SWEEP) -> CellPartition:
    """Build the partition from a node assignment, measuring the boundary layers"""
    space = D.space
    assign = np.array(assign, dtype=int)
    if assign.shape != (space.node_count,):
        raise ValueError(f"Assignment of {assign.shape} for {space.node_count} nodes")
    if np.any((assign < 0) | (assign >= D.size)):
        raise ValueError(f"Assignment outside the {D.size} sites")
    assign.setflags(write=False)
    cells = [np.flatnonzero(assign == u) for u in range(D.size)]
    gap = _distance_to_other_cells(space, assign)
    boundary_mass = {}
    for width in sweep:
        delta = width * space.step
        boundary_mass[delta] = np.bincount(assign, weights=np.where(gap <= delta, space.weight, 0.0), minlength=D.size)
    logger.debug("Cells of %d sites, sizes %d to %d", D.size, min(map(len, cells)), max(map(len, cells)))
    return CellPartition(D, assign, cells, boundary_mass)


@attr.s
class CellReport:
    exact: bool = attr.ib()
    inner_violations: int = attr.ib()
    outer_violations: int = attr.ib()
    empty_cells: int = attr.ib()
    boundary_monotone: bool = attr.ib()
    boundary_vanishes: bool = attr.ib()

    @property
    def passed(self) -> bool:
        return self.exact and not self.inner_violations and not self.outer_violations and not self.empty_cells \
            and self.boundary_monotone and self.boundary_vanishes


def verify_cells(C: CellPartition) -> CellReport:
    """
    Check the cells against the inner ``r/2`` and outer ``R + step`` balls and the boundary sweep.
    """
    space = C.space
    D = C.delone
    dist = space.node_distances(D.points)
    own = dist[C.assign, np.arange(space.node_count)]
    inner = dist < D.r_pack / 2.0
    inner_violations = int(np.count_nonzero(inner & (C.assign[None, :] != np.arange(D.size)[:, None])))
    outer_violations = int(np.count_nonzero(own > D.R_cover + space.step))
    exact = int(C.sizes.sum()) == space.node_count and bool(np.all((C.assign >= 0) & (C.assign < D.size)))
    widths = sorted(C.boundary_mass.keys(), reverse=True)
    totals = [float(C.boundary_mass[delta].sum()) for delta in widths]
    monotone = all(b <= a for a, b in zip(totals, totals[1:]))
    vanishes = all(total == 0.0 for delta, total in zip(widths, totals) if delta < space.step)
    return CellReport(exact, inner_violations, outer_violations, int(np.count_nonzero(C.sizes == 0)), monotone, vanishes)


def owners(P_n: PartitionOfUnity, C: CellPartition) -> np.ndarray:
    """For each refined site, the cell holding its whole support, or -1"""
    result = np.full(P_n.sites, -1)
    for v in range(P_n.sites):
        hit = np.unique(C.assign[P_n.phi[:, v] > 0.0])
        if len(hit) == 1:
            result[v] = hit[0]
    return result


def precedes(v: int, u: int, P_n: PartitionOfUnity, C: CellPartition) -> bool:
    """Is the support of ``phi_v`` inside the cell of ``u``?"""
    return bool(np.all(C.assign[P_n.phi[:, v] > 0.0] == u))


def precedents(u: int, P_n: PartitionOfUnity, C: CellPartition) -> np.ndarray:
    """The refined sites inside cell ``u``, nearest to ``u`` first, then by index"""
    sites = np.flatnonzero(owners(P_n, C) == u)
    if len(sites) == 0:
        return sites
    distance = C.space.distances(P_n.delone.points[sites], C.delone.points[u])[:, 0]
    return sites[np.lexsort((sites, distance))]


@attr.s(frozen=True, eq=False)
class CellDims:
    """
    Counts of refined sites per cell with the measure inequality per cell.

    ``inner_measure`` is the measure of ``B_{r/2}(u)`` and ``support_measure`` the sum of the support ball
    measures of the refined sites inside the cell.
    """
    m_u: np.ndarray = attr.ib()
    inner_measure: np.ndarray = attr.ib(repr=False)
    support_measure: np.ndarray = attr.ib(repr=False)

    @property
    def m_min(self) -> int:
        return int(self.m_u.min())

    @property
    def m_max(self) -> int:
        return int(self.m_u.max())

    @property
    def measures_hold(self) -> np.ndarray:
        return self.inner_measure <= self.support_measure


def cell_dims(D: DeloneSet, D_n: DeloneSet, P_n: PartitionOfUnity, C: CellPartition) -> CellDims:
    """Count the refined sites whose support sits inside each cell"""
    if not C.delone.same_points(D) or not P_n.delone.same_points(D_n):
        raise ValueError("Cells or partition do not belong to the given sets")
    space = C.space
    owner = owners(P_n, C)
    inside = owner >= 0
    m_u = np.bincount(owner[inside], minlength=D.size)
    ball = space.weight * space.ball_counts(D_n.points, 2.0 * P_n.R)
    support_measure = np.bincount(owner[inside], weights=ball[inside], minlength=D.size)
    inner_measure = space.weight * space.ball_counts(D.points, D.r_pack / 2.0)
    return CellDims(m_u, inner_measure, support_measure)


@attr.s(frozen=True, eq=False)
class CellProjection:
    """The orthogonal projection onto the partition functions inside one cell"""
    u: int = attr.ib()
    cell: np.ndarray = attr.ib(repr=False)
    sites: np.ndarray = attr.ib()
    basis: np.ndarray = attr.ib(repr=False)
    space: TorusSpace = attr.ib(repr=False)

    @property
    def empty(self) -> bool:
        return len(self.sites) == 0

    def matrix(self) -> np.ndarray:
        return (self.basis @ self.basis.conj().T) * self.space.weights[None, :]

    def apply(self, f: GridFunction) -> GridFunction:
        coefficients = self.basis.conj().T @ (self.space.weights * f.values)
        return GridFunction(self.space, self.basis @ coefficients)

    def range_defect(self) -> float:
        """Largest entry of the projection outside the cell"""
        outside = np.ones(self.space.node_count, dtype=bool)
        outside[self.cell] = False
        return float(np.abs(self.basis[outside]).max()) if np.any(outside) and not self.empty else 0.0


def cell_projection(u: int, P_n: PartitionOfUnity, C: CellPartition, G_n: GramData,
                    floor: float = EIGENVALUE_FLOOR) -> CellProjection:
    """
    Orthonormalise the partition functions inside cell ``u`` with their own Gram block.

    An empty cell gives the zero projection.
    """
    sites = precedents(u, P_n, C)
    space = C.space
    if len(sites) == 0:
        logger.info("No refined site inside cell %d", u)
        return CellProjection(u, C.cell(u), sites, np.zeros((space.node_count, 0)), space)
    block = G_n.G[np.ix_(sites, sites)]
    eigvals, eigvecs = scipy.linalg.eigh(block)
    if eigvals[0] < floor:
        raise SingularGramException(f"Cell {u} Gram eigenvalue {eigvals[0]:.6e} below the floor {floor:.1e}")
    invhalf = (eigvecs / np.sqrt(eigvals)) @ eigvecs.conj().T
    basis = P_n.phi[:, sites] @ ((invhalf + invhalf.conj().T) / 2.0)
    return CellProjection(u, C.cell(u), sites, basis, space)
