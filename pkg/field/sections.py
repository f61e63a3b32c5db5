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
Sections of the field of compressed algebras over a convergent sequence of Delone sets and its limit.

The base is a finite schedule ``1 .. n_max`` together with a point at infinity. A section pairs a
site matrix for every level with a grid operator at infinity.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import attr
import numpy as np

from gram.frame import Isometry
from roe.maps import ProductRow, beta, multiplicativity_defect
from roe.operators import FinitePropOperator, GridOperator

logger = logging.getLogger(__name__)

INFINITY = 'inf'


class FieldSection:
    pass


@attr.s(frozen=True, eq=False)
class FieldSection:
    """
    A section ``a = b_S + j``.

    ``fibers`` hold the compressions of ``source`` and ``ideal`` the finitely supported part ``j``,
    which vanishes at infinity. Sums and products of sections are computed fiberwise and carry no source.
    """
    seq: Tuple[Isometry, ...] = attr.ib(converter=tuple, repr=False)
    at_infinity: GridOperator = attr.ib(repr=False)
    fibers: Tuple[FinitePropOperator, ...] = attr.ib(converter=tuple, repr=False)
    ideal: Tuple[Optional[FinitePropOperator], ...] = attr.ib(converter=tuple, repr=False)
    source: Optional[GridOperator] = attr.ib(default=None, repr=False)

    @property
    def levels(self) -> int:
        return len(self.seq)

    @property
    def support(self) -> List[int]:
        """Levels where the ideal part is non-zero"""
        return [n for n, part in enumerate(self.ideal, start=1) if part is not None and np.any(part.M)]

    def fiber(self, t) -> object:
        """``pi_t(a)``, a site matrix for a level and the grid operator at infinity"""
        if t == INFINITY:
            return self.at_infinity
        if not 1 <= t <= self.levels:
            raise ValueError(f"Level {t} outside the schedule 1 .. {self.levels}")
        part = self.ideal[t - 1]
        return self.fibers[t - 1] if part is None else self.fibers[t - 1] + part

    def _check(self, other: FieldSection):
        if len(self.seq) != len(other.seq) or any(a is not b for a, b in zip(self.seq, other.seq)):
            raise ValueError("Sections over different sequences")

    def _combine(self, fibers, at_infinity) -> FieldSection:
        return FieldSection(self.seq, at_infinity, fibers, (None,) * self.levels)

    def __add__(self, other: FieldSection) -> FieldSection:
        self._check(other)
        return self._combine([self.fiber(n) + other.fiber(n) for n in range(1, self.levels + 1)],
                             self.at_infinity + other.at_infinity)

    def __matmul__(self, other: FieldSection) -> FieldSection:
        self._check(other)
        return self._combine([self.fiber(n) @ other.fiber(n) for n in range(1, self.levels + 1)],
                             self.at_infinity @ other.at_infinity)

    def adjoint(self) -> FieldSection:
        return self._combine([self.fiber(n).adjoint() for n in range(1, self.levels + 1)], self.at_infinity.adjoint())

    def perturbed(self, parts: Dict[int, np.ndarray]) -> FieldSection:
        """Add a finitely supported ideal element, given as site matrices per level"""
        ideal = list(self.ideal)
        for n, matrix in parts.items():
            sites = self.seq[n - 1].delone
            part = FinitePropOperator.create(sites, matrix)
            ideal[n - 1] = part if ideal[n - 1] is None else ideal[n - 1] + part
        return FieldSection(self.seq, self.at_infinity, self.fibers, ideal, self.source)


def section(S: GridOperator, seq: Sequence[Isometry]) -> FieldSection:
    """The section ``b_S``: ``beta(S)`` at every level, ``S`` at infinity"""
    fibers = [beta(I, S) for I in seq]
    logger.debug("Section over %d levels, fiber norms %s", len(fibers), [round(b.norm(), 6) for b in fibers])
    return FieldSection(seq, S, fibers, (None,) * len(fibers), S)


def ideal_section(seq: Sequence[Isometry], parts: Dict[int, np.ndarray]) -> FieldSection:
    """A section of the ideal: zero at infinity and beyond the levels of ``parts``"""
    space = seq[0].space
    zero = section(GridOperator.zero(space), seq)
    return FieldSection(seq, zero.at_infinity, zero.fibers, zero.ideal).perturbed(parts)


@attr.s
class ProfileRow:
    t: object = attr.ib()
    fiber_norm: float = attr.ib()
    continuity_gap: float = attr.ib()


@attr.s
class NormProfile:
    rows: List[ProfileRow] = attr.ib()
    limit: float = attr.ib()
    source_norm: Optional[float] = attr.ib()
    contraction: bool = attr.ib()
    support: List[int] = attr.ib()

    @property
    def final_gap(self) -> float:
        finite = [row for row in self.rows if row.t != INFINITY]
        return finite[-1].continuity_gap if finite else 0.0

    def tail_zero(self, tol: float = 0.0) -> bool:
        """Is the profile of the ideal part zero beyond its support?"""
        last = max(self.support, default=0)
        return all(row.fiber_norm <= tol for row in self.rows if row.t != INFINITY and row.t > last)


def norm_profile(sec: FieldSection, slack: float = 1e-9) -> NormProfile:
    """
    The norms ``||pi_t(a)||`` along the schedule with their gap to the norm at infinity.

    :param sec: The section
    :param slack: Allowance on the contraction check of the compressed part

    :return: The profile, ending with the row at infinity
    """
    limit = sec.at_infinity.norm()
    rows = []
    for n in range(1, sec.levels + 1):
        value = sec.fiber(n).norm()
        rows.append(ProfileRow(n, value, abs(value - limit)))
    rows.append(ProfileRow(INFINITY, limit, 0.0))
    source_norm = None if sec.source is None else sec.source.norm()
    contraction = source_norm is None or all(b.norm() <= source_norm + slack for b in sec.fibers)
    return NormProfile(rows, limit, source_norm, contraction, sec.support)


@attr.s
class FieldReport:
    equal_pairs: List[Tuple[int, int]] = attr.ib()
    separating_fiber: Dict[Tuple[int, int], object] = attr.ib()
    product: List[ProductRow] = attr.ib()
    star_defect: float = attr.ib()

    @property
    def faithful(self) -> bool:
        return not self.equal_pairs


def _fiber_distance(a, b) -> float:
    return (a - b).norm()


def field_axioms_check(sections: Sequence[FieldSection], tol: float = 1e-9) -> FieldReport:
    """
    Desk forms of the field axioms over a list of sections.

    Pairs of sections that agree at every fiber within ``tol`` are flagged as equal; otherwise the first
    separating fiber is recorded. The product defect table is computed from the first two sections with
    a source, and the star defect compares ``b_{S*}`` with ``(b_S)*``.
    """
    if len(sections) < 2:
        raise ValueError("The field check needs at least two sections")
    equal, separating = [], {}
    for i in range(len(sections)):
        for j in range(i + 1, len(sections)):
            a, b = sections[i], sections[j]
            a._check(b)
            found = None
            for t in list(range(1, a.levels + 1)) + [INFINITY]:
                if _fiber_distance(a.fiber(t), b.fiber(t)) > tol:
                    found = t
                    break
            if found is None:
                equal.append((i, j))
            else:
                separating[(i, j)] = found
    sourced = [sec for sec in sections if sec.source is not None]
    product = multiplicativity_defect(sourced[0].seq, sourced[0].source, sourced[1].source) \
        if len(sourced) >= 2 else []
    star = 0.0
    for sec in sourced:
        starred = section(sec.source.adjoint(), sec.seq)
        for n in range(1, sec.levels + 1):
            star = max(star, _fiber_distance(starred.fibers[n - 1], sec.fibers[n - 1].adjoint()))
    if equal:
        logger.info("Sections %s agree at every fiber", equal)
    return FieldReport(equal, separating, product, star)
