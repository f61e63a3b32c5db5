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

from cells.voronoi import voronoi_cells
from delone.sets import DeloneSet
from gram.frame import frame
from roe.maps import alpha, alpha_beta_defect, beta, compression_identity, multiplicativity_defect, norm_convergence
from roe.operators import BlockRank, FinitePropOperator, GridOperator, _node_vectors, _orthonormal_prefix, \
    eps_propagation, power_norm, propagation, truncate_k, weighted_norm
from roe.transform import truncated_multiplication, unit_truncated_banded


@pytest.fixture
def quarters(circle):
    return DeloneSet.create(circle, [0.0, 0.25, 0.5, 0.75])


@pytest.fixture
def circle_frames(circle):
    return [frame(circle, DeloneSet.create(circle, points)) for points in ([0.0], [0.0, 0.5], [0.0, 0.25, 0.5, 0.75])]


@pytest.fixture
def halves(circle):
    return voronoi_cells(circle, DeloneSet.create(circle, [0.0, 0.5]))


def test_propagation(quarters):
    M = np.zeros((4, 4))
    M[0, 2] = M[2, 0] = 1.0
    assert propagation(FinitePropOperator.create(quarters, M)) == 0.5
    assert propagation(FinitePropOperator.identity(quarters)) == 0.0
    assert propagation(FinitePropOperator.zero(quarters)) == 0.0
    with pytest.raises(ValueError):
        FinitePropOperator.create(quarters, np.eye(3))


def test_random_banded(quarters):
    T = FinitePropOperator.random_banded(quarters, 0.25, np.random.default_rng(1))
    assert T.prop <= 0.25
    assert T.M[0, 2] == 0.0
    assert T.norm() == pytest.approx(1.0)
    np.testing.assert_array_equal(T.M, T.M.T)


def test_eps_propagation(circle):
    f = circle.sample(lambda x: np.cos(2.0 * np.pi * x[:, 0]))
    assert eps_propagation(GridOperator.multiplication(f), 1e-3) == 0.0
    S = GridOperator.random_banded(circle, 0.1, np.random.default_rng(2))
    assert eps_propagation(S, 1e-3) <= 0.1
    assert eps_propagation(S, 10.0) == 0.0
    with pytest.raises(ValueError):
        eps_propagation(S, 0.0)


@pytest.mark.parametrize('eps', [1e-1, 1e-2, 1e-3])
def test_eps_propagation_radius_passes(circle, eps):
    S = GridOperator.random_banded(circle, 0.2, np.random.default_rng(5))
    s = eps_propagation(S, eps)
    distance = circle.distances(circle.nodes, circle.nodes)
    assert weighted_norm(np.where(distance > s, S.M, 0.0), circle.weights) < eps


def test_norms_agree():
    rng = np.random.default_rng(3)
    u = rng.standard_normal(12)
    u /= np.linalg.norm(u)
    A = 3.0 * np.outer(u, u) + 0.1 * rng.standard_normal((12, 12))
    weights = rng.uniform(0.5, 2.0, 12)
    assert power_norm(A) == pytest.approx(weighted_norm(A, np.ones(12)), rel=1e-8)
    assert power_norm(A, weights) == pytest.approx(weighted_norm(A, weights), rel=1e-8)
    assert weighted_norm(np.diag([3.0, -4.0, 1.0]), weights[:3]) == pytest.approx(4.0)
    assert power_norm(np.zeros((3, 3))) == 0.0


def test_grid_adjoint(circle):
    S = GridOperator.random_banded(circle, 0.1, np.random.default_rng(4))
    assert S.is_self_adjoint()
    A = GridOperator.create(circle, np.triu(np.ones((64, 64))))
    assert not A.is_self_adjoint()
    np.testing.assert_allclose(A.adjoint().adjoint().M, A.M)


def test_beta_inverts_alpha(circle_frames):
    rng = np.random.default_rng(5)
    for I in circle_frames:
        T = FinitePropOperator.random_banded(I.delone, 0.5, rng)
        np.testing.assert_allclose(beta(I, alpha(I, T)).M, T.M, atol=1e-10)
        assert alpha(I, T).norm() == pytest.approx(T.norm(), abs=1e-10)


def test_units(circle, circle_frames):
    for I in circle_frames:
        np.testing.assert_allclose(alpha(I, FinitePropOperator.identity(I.delone)).M, I.projection_matrix(),
                                   atol=1e-12)
        np.testing.assert_allclose(beta(I, GridOperator.identity(circle)).M, np.eye(I.sites), atol=1e-10)


def test_single_site_compression(circle, circle_frames):
    f = circle.sample(lambda x: np.cos(2.0 * np.pi * x[:, 0]))
    assert abs(beta(circle_frames[0], GridOperator.multiplication(f)).M[0, 0]) < 1e-14


def test_compression_identity(circle, circle_frames):
    S = GridOperator.random_banded(circle, 0.2, np.random.default_rng(6))
    for I in circle_frames:
        assert compression_identity(I, S) < 1e-10


def test_maps_reject_mismatches(circle, tiny, circle_frames, quarters):
    with pytest.raises(ValueError):
        alpha(circle_frames[0], FinitePropOperator.identity(quarters))
    with pytest.raises(ValueError):
        beta(circle_frames[0], GridOperator.identity(tiny))


def test_truncate_whole_cells(circle, halves):
    S = GridOperator.random_banded(circle, 0.2, np.random.default_rng(7))
    np.testing.assert_allclose(truncate_k(S, halves, BlockRank.by_distance(halves, None)).M, S.M, atol=1e-12)
    assert not truncate_k(S, halves, BlockRank.by_distance(halves, 0)).M.any()
    with pytest.raises(ValueError):
        BlockRank.by_distance(halves, 33)


def test_truncate_is_a_compression(circle, halves, circle_frames):
    S = GridOperator.random_banded(circle, 0.2, np.random.default_rng(8))
    for B in (BlockRank.by_distance(halves, 3), BlockRank.adapted(halves, 2, circle_frames[-1].pou)):
        T = truncate_k(S, halves, B)
        np.testing.assert_allclose(truncate_k(T, halves, B).M, T.M, atol=1e-12)
        assert T.norm() <= S.norm() + 1e-12
        for basis in B.bases:
            np.testing.assert_allclose(basis.T @ (circle.weights[:, None] * basis), np.eye(basis.shape[1]),
                                       atol=1e-10)


def test_truncate_rejects_other_cells(circle, halves):
    other = voronoi_cells(circle, DeloneSet.create(circle, [0.25, 0.75]))
    with pytest.raises(ValueError):
        truncate_k(GridOperator.identity(circle), halves, BlockRank.by_distance(other, 2))


def test_reconstruction(rig, coarse_cells, rank, frames):
    T = truncate_k(GridOperator.random_banded(rig, 0.05, np.random.default_rng(9)), coarse_cells, rank)
    rows = alpha_beta_defect(frames, T, coarse_cells, rank)
    assert [row.n for row in rows if row.exact_expected] == [4, 5, 6]
    for row in rows:
        assert row.m_min == [0, 0, 1, 3, 7, 15][row.n - 1]
        if row.exact_expected:
            assert row.value < 1e-6


def test_reconstruction_of_zero(rig, coarse_cells, rank, frames):
    rows = alpha_beta_defect(frames[:3], GridOperator.zero(rig), coarse_cells, rank)
    assert all(row.value == 0.0 and row.truncation_gap == 0.0 for row in rows)


def test_identity_is_multiplicative(circle, circle_frames):
    S = GridOperator.random_banded(circle, 0.2, np.random.default_rng(10))
    rows = multiplicativity_defect(circle_frames, GridOperator.identity(circle), S)
    assert max(row.value for row in rows) < 1e-10
    assert rows[0].scale == pytest.approx(1.0)


def test_identity_norms(circle, circle_frames):
    for row in norm_convergence(circle_frames, GridOperator.identity(circle)):
        assert row.value == pytest.approx(1.0, abs=1e-10)
        assert row.identity_gap < 1e-10
        assert row.gap < 1e-10


def test_orthonormal_prefix_skips_dependent_columns(circle):
    candidates = 2.0 * _node_vectors(circle, np.array([3, 3, 5, 7]))
    basis = _orthonormal_prefix(circle, candidates, 2)
    np.testing.assert_allclose(basis, _node_vectors(circle, np.array([3, 5])), atol=1e-12)
    assert _orthonormal_prefix(circle, candidates, 0).shape == (circle.node_count, 0)


def test_policy_level(coarse_cells, frames, policy):
    assert policy.level == 4
    assert policy.at_level(frames[5].pou).level is None
    assert BlockRank.by_distance(coarse_cells, 2).level is None


def test_truncated_products_converge(rig, coarse_cells, policy, rank, frames):
    rng = np.random.default_rng(11)
    for _ in range(3):
        R = unit_truncated_banded(rig, 0.1, coarse_cells, policy, rng)
        S = unit_truncated_banded(rig, 0.1, coarse_cells, policy, rng)
        rows = multiplicativity_defect(frames, R, S)
        assert rows[-1].value < 0.1 * rows[-1].scale
        assert rows[3].value < 1e-8
    R = unit_truncated_banded(rig, 0.1, coarse_cells, rank, rng)
    S = unit_truncated_banded(rig, 0.1, coarse_cells, rank, rng)
    assert multiplicativity_defect(frames, R, S)[-1].value < 1e-8


def test_truncated_cosine_norms(rig, coarse_cells, policy, frames):
    S = truncated_multiplication(rig, coarse_cells, policy)
    rows = norm_convergence(frames, S)
    for row in rows:
        assert row.identity_gap < 1e-8
        assert row.value <= row.target + 1e-9
    assert rows[3].gap < 1e-8
    assert 0.0 < rows[-1].gap < 0.05 * rows[-1].target
