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

from delone.sets import DeloneSet, greedy_delone
from gram.frame import SingularGramException, frame, gram, isometry, modulus_of_continuity, project, \
    quasi_interpolant, strong_convergence, weighted_gram
from pou.partition import build_pou, normalise


def cosine(space):
    return space.sample(lambda x: np.cos(2.0 * np.pi * x[:, 0] / space.side))


def test_single_site(circle):
    I = frame(circle, DeloneSet.create(circle, [0.0]))
    np.testing.assert_allclose(I.gram.G, [[1.0]], atol=1e-14)
    np.testing.assert_allclose(I.U[:, 0], np.ones(64), atol=1e-14)
    assert np.abs(project(I, cosine(circle)).values).max() < 1e-14


def test_two_site_gram(rig):
    P = build_pou(rig, DeloneSet.create(rig, [0.0, 0.5]))
    G = gram(rig, P)
    a, b = G.G[0, 0], G.G[0, 1]
    assert G.G[1, 1] == pytest.approx(a, rel=1e-14)
    assert a > b > 0.0
    assert a - b >= G.lower_bound - 1e-9
    assert G.lambda_min >= G.lower_bound - 1e-9
    assert G.norm <= G.schur_bound + 1e-9 <= G.upper_bound + 1e-9


def test_square_roots(rig, frames):
    for I in frames:
        G = I.gram
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(G.G_half)) ** 2, G.eigvals, rtol=1e-10, atol=1e-14)
        np.testing.assert_allclose(G.G_invhalf @ G.G_half, np.eye(G.G.shape[0]), atol=1e-9)


def test_isometry_defects(frames):
    for I in frames:
        assert I.orthonormality_defect() < 1e-8
        assert I.idempotence_defect() < 1e-8
        P = I.projection_matrix()
        np.testing.assert_allclose(P @ I.pou.phi, I.pou.phi, atol=1e-8)


def test_one_site_per_node(tiny):
    I = frame(tiny, DeloneSet.create(tiny, tiny.nodes))
    np.testing.assert_allclose(I.projection_matrix(), np.eye(8), atol=1e-12)


def test_projection_contracts(rig, frames):
    rng = np.random.default_rng(11)
    f = rig.function(rng.standard_normal(rig.node_count))
    for I in frames:
        g = project(I, f)
        assert g.norm() <= f.norm() + 1e-12
        np.testing.assert_allclose(project(I, g).values, g.values, atol=1e-8)


def test_projection_space_mismatch(circle, frames):
    with pytest.raises(ValueError):
        project(frames[0], circle.constant())


def test_singular_gram(circle):
    P = build_pou(circle, DeloneSet.create(circle, [0.0, 0.5]))
    with pytest.raises(SingularGramException, match="below the floor"):
        gram(circle, P, floor=10.0)


def test_isometry_of_given_gram(circle):
    P = build_pou(circle, DeloneSet.create(circle, [0.0, 0.25, 0.5, 0.75]))
    I = isometry(P, gram(circle, P))
    assert I.sites == 4
    assert I.orthonormality_defect() < 1e-10


def test_strong_convergence_of_constants(rig, frames):
    rows = strong_convergence(rig, rig.constant(1.0), frames)
    assert max(row.error for row in rows) < 1e-10


def test_strong_convergence_of_cosine(rig, frames):
    f = cosine(rig)
    rows = strong_convergence(rig, f, frames)
    errors = [row.error for row in rows]
    bounds = [row.bound for row in rows]
    assert errors[-1] < 0.05 * f.norm()
    assert errors[-1] < errors[0]
    assert all(b <= a for a, b in zip(bounds, bounds[1:]))
    for row in rows:
        assert row.error <= row.bound + 1e-8
        assert row.error <= row.quasi_error + 1e-12


def test_cosine_nearly_in_two_site_span(rig, frames):
    # cos(2 pi x) is close to phi_0 - phi_1 for the sites {0, 1/2}, so the error rises at the next level
    errors = [row.error for row in strong_convergence(rig, cosine(rig), frames[:3])]
    assert errors[1] < 0.1 * errors[0]
    assert errors[2] > errors[1]


def test_strong_convergence_needs_decreasing_radii(rig, schedule):
    with pytest.raises(ValueError):
        strong_convergence(rig, rig.constant(), [schedule[1], schedule[0]])


def test_quasi_interpolant_of_constant(rig, frames):
    g = quasi_interpolant(frames[2].pou, rig.constant(2.0))
    np.testing.assert_allclose(g.values, 2.0, atol=1e-12)


def test_modulus_of_continuity(circle):
    f = cosine(circle)
    omega = modulus_of_continuity(f, 2.5 * circle.step)
    assert 0.0 < omega <= 2.0 * np.pi * 2.0 * circle.step


def test_gram_matches_complement_scan(circle, complement_scan):
    D = greedy_delone(circle, 0.125)
    P = build_pou(circle, D)
    scan = complement_scan(circle, D.points, P.r, P.R)
    gap = np.abs(P.h - scan).max()
    assert gap <= circle.step
    G = gram(circle, P).G
    G_scan = weighted_gram(circle, normalise(scan))
    # each partition function moves by at most (k + 1) gap over the smallest scanned row sum
    moved = (D.size + 1) * gap / scan.sum(axis=1).min()
    assert np.abs(G - G_scan).max() <= 2.0 * circle.measure * moved + 1e-12
