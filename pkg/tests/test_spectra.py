"""Eigenstructure, word enumeration, and translation lengths."""

import numpy as np
import pytest

import oracles
from projends import GeometryError, ProjMap, ProjPoint, Subspace
from projends.convex import ConeBody
from projends.spectra import (
    algebra_dimension,
    cwl_upper,
    enumerate_words,
    invariant_subspaces,
    is_scalar,
    matrix_ball,
    matrix_key,
    reduced_ball_size,
    rel_spectrum,
    spectrum,
    translation_length,
    unit_norm_deviation,
)


def rot2(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def block_diag(*blocks):
    n = sum(np.atleast_2d(b).shape[0] for b in blocks)
    out = np.zeros((n, n))
    k = 0
    for b in blocks:
        b = np.atleast_2d(b)
        out[k:k + b.shape[0], k:k + b.shape[0]] = b
        k += b.shape[0]
    return out


UNIPOTENT3 = np.array([[1.0, 1, 0], [0, 1, 1], [0, 0, 1]])


class TestSpectrum:
    def test_identity(self):
        s = spectrum(np.eye(4))
        assert len(s.norm_classes) == 1
        c = s.norm_classes[0]
        assert c.mu == pytest.approx(1.0)
        assert c.multiplicity == 4
        assert c.subspace.dim == 4
        assert not s.indeterminate

    def test_three_norm_diagonal(self):
        s = spectrum(np.diag([2.0, 1.0, 0.5]))
        assert s.norms == pytest.approx([2.0, 1.0, 0.5])
        assert [c.multiplicity for c in s.norm_classes] == [1, 1, 1]
        for c, axis in zip(s.norm_classes, np.eye(3)):
            assert c.subspace.contains(ProjPoint(axis))
        assert not s.indeterminate

    def test_eigenvalues_sorted_by_norm(self):
        s = spectrum(np.diag([0.5, 2.0, 1.0]))
        assert np.abs(s.eigenvalues) == pytest.approx([2.0, 1.0, 0.5])

    def test_unipotent_single_class(self):
        s = spectrum(UNIPOTENT3)
        assert len(s.norm_classes) == 1
        c = s.norm_classes[0]
        assert c.mu == pytest.approx(1.0, abs=1e-12)
        assert c.multiplicity == 3
        assert c.subspace.dim == 3
        assert not s.indeterminate

    def test_conjugated_unipotent(self):
        # integer unimodular conjugation keeps entries exact, so the
        # defective cluster must still collapse to one class
        C = np.array([[1.0, 0, 0], [1, 1, 0], [2, 1, 1]])
        assert round(np.linalg.det(C)) == 1
        M = C @ UNIPOTENT3 @ np.linalg.inv(C)
        M = np.round(M)
        s = spectrum(M)
        assert len(s.norm_classes) == 1
        assert s.norm_classes[0].multiplicity == 3

    def test_rotation_block(self):
        M = block_diag(rot2(0.7), np.array([[0.5]]))
        s = spectrum(M)
        assert s.norms == pytest.approx([1.0, 0.5])
        assert [c.multiplicity for c in s.norm_classes] == [2, 1]
        plane = Subspace(np.eye(3)[:2])
        assert plane.contains_subspace(s.norm_classes[0].subspace)

    def test_close_norms_flagged(self):
        s = spectrum(np.diag([2.0, 1.0 + 5e-5, 1.0]))
        assert len(s.norm_classes) == 3
        assert s.indeterminate

    def test_well_separated_not_flagged(self):
        s = spectrum(np.diag([2.0, 1.0, 0.5]))
        assert not s.indeterminate

    def test_class_subspaces_invariant(self):
        rng = np.random.default_rng(3)
        A = rng.normal(size=(4, 4))
        M = A @ np.diag([3.0, 2.0, 1.0, 0.5]) @ np.linalg.inv(A)
        s = spectrum(M)
        for c in s.norm_classes:
            img = M @ c.subspace.basis.T
            resid = img - c.subspace.projector() @ img
            assert np.abs(resid).max() < 1e-8 * np.abs(M).max()

    def test_norm_product_is_one_for_normalized(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            g = ProjMap(rng.normal(size=(4, 4)))
            s = spectrum(g)
            total = sum(np.log(c.mu) * c.multiplicity for c in s.norm_classes)
            assert abs(total) < 1e-9

    def test_class_lookup(self):
        s = spectrum(np.diag([2.0, 1.0, 0.5]))
        assert s.class_of_norm(2.0).multiplicity == 1
        assert s.class_of_norm(0.3) is None


class TestUnitNormDeviation:
    def test_unipotent_exactly_zero(self):
        assert unit_norm_deviation(UNIPOTENT3) == 0.0

    def test_parabolic_products_exactly_zero(self):
        # translations along two null directions of a Lorentz form,
        # conjugated into a frame with dyadic entries
        def parab(w):
            w = np.asarray(w, float)
            T = np.eye(4)
            T[0, 1:3] = 2 * w
            T[0, 3] = w @ w
            T[1:3, 3] = w
            return T

        C = np.array([[0.5, 0, 0, 0.5], [-0.5, 0, 0, 0.5],
                      [0, 1.0, 0, 0], [0, 0, 1.0, 0]])
        Ci = np.linalg.inv(C)
        worst = 0.0
        for a in range(-4, 5):
            for b in range(-4, 5):
                if abs(a) + abs(b) > 4:
                    continue
                worst = max(worst, unit_norm_deviation(C @ parab([a, b]) @ Ci))
        assert worst == 0.0

    def test_two_norm_matrix(self):
        assert unit_norm_deviation(np.diag([2.0, 1.0, 0.5])) == pytest.approx(1.0)

    def test_rotation(self):
        assert unit_norm_deviation(block_diag(rot2(0.7), np.eye(1))) < 1e-12


class TestRelSpectrum:
    def test_diagonal_example(self):
        g = np.diag([2.0, 1.0, 0.5])
        rs = rel_spectrum(g, Subspace(np.eye(3)[2:]), ProjPoint([0, 0, 1]))
        assert rs.lambda1 == pytest.approx(2.0)
        assert rs.lambda_np1 == pytest.approx(1.0)
        assert rs.lambda_inf == pytest.approx(0.5)
        assert rs.lambda_inf_prime == pytest.approx(0.5)
        assert rs.lambda_vertex == pytest.approx(0.5)

    def test_rotation_outside(self):
        g = block_diag(rot2(0.6), np.array([[0.5]]))
        rs = rel_spectrum(g, Subspace(np.eye(3)[2:]), ProjPoint([0, 0, 1]))
        assert rs.lambda1 == pytest.approx(1.0)
        assert rs.lambda_np1 == pytest.approx(1.0)
        assert rs.lambda_inf == pytest.approx(0.5)
        assert rs.lambda_vertex == pytest.approx(0.5)

    def test_inverse_swaps_extremes(self):
        g = np.diag([4.0, 2.0, 1.0, 0.25])
        V = Subspace(np.eye(4)[2:])
        v = ProjPoint([0, 0, 0, 1])
        a = rel_spectrum(g, V, v)
        b = rel_spectrum(np.linalg.inv(g), V, v)
        assert b.lambda1 == pytest.approx(1.0 / a.lambda_np1, rel=1e-9)
        assert b.lambda_np1 == pytest.approx(1.0 / a.lambda1, rel=1e-9)
        assert b.lambda_inf == pytest.approx(1.0 / a.lambda_inf_prime, rel=1e-9)
        assert b.lambda_inf_prime == pytest.approx(1.0 / a.lambda_inf, rel=1e-9)
        assert b.lambda_vertex == pytest.approx(1.0 / a.lambda_vertex, rel=1e-9)

    def test_rejects_non_invariant_subspace(self):
        g = np.diag([2.0, 1.0, 0.5])
        V = Subspace.spanned_by([[1.0, 1.0, 0.0]])
        with pytest.raises(GeometryError, match="not invariant"):
            rel_spectrum(g, V, ProjPoint([0, 0, 1]))

    def test_rejects_unfixed_vertex(self):
        g = np.diag([2.0, 1.0, 0.5])
        with pytest.raises(GeometryError, match="not fixed"):
            rel_spectrum(g, Subspace(np.eye(3)[2:]), ProjPoint([1, 1, 0]))

    def test_rejects_full_subspace(self):
        g = np.diag([2.0, 1.0, 0.5])
        with pytest.raises(GeometryError, match="inside"):
            rel_spectrum(g, Subspace(np.eye(3)), ProjPoint([1, 0, 0]))


FREE_A = np.array([[2.0, 1.0], [1.0, 1.0]])
FREE_B = np.array([[1.0, 1.0], [1.0, 2.0]])


class TestWords:
    def test_ball_counts(self):
        words = list(enumerate_words([FREE_A, FREE_B], 3))
        assert len(words) == oracles.BALL_2GENS_L3
        by_len = {}
        for w in words:
            by_len[len(w)] = by_len.get(len(w), 0) + 1
        assert by_len == {0: 1, 1: 4, 2: 12, 3: 36}

    def test_shortlex_order(self):
        labels = [w.label() for w in enumerate_words([FREE_A, FREE_B], 2)]
        assert labels[:5] == ["e", "g0", "g0^-1", "g1", "g1^-1"]
        assert labels[5:8] == ["g0.g0", "g0.g1", "g0.g1^-1"]

    def test_no_adjacent_inverses(self):
        for w in enumerate_words([FREE_A, FREE_B], 4):
            for (i, e), (j, f) in zip(w.letters, w.letters[1:]):
                assert not (i == j and e == -f)

    def test_matrix_accumulates_left_to_right(self):
        a = ProjMap(FREE_A).matrix
        b = ProjMap(FREE_B).matrix
        words = {w.label(): w for w in enumerate_words([FREE_A, FREE_B], 2)}
        assert np.allclose(words["g0.g1"].matrix, a @ b, atol=1e-12)
        assert np.allclose(words["g1.g0"].matrix, b @ a, atol=1e-12)

    def test_zero_radius(self):
        words = list(enumerate_words([FREE_A], 0))
        assert len(words) == 1
        assert words[0].label() == "e"
        assert np.allclose(words[0].matrix, np.eye(2))

    def test_reduced_ball_size(self):
        assert reduced_ball_size(2, 0) == 1
        assert reduced_ball_size(2, 3) == oracles.BALL_2GENS_L3
        assert reduced_ball_size(2, 8) == oracles.BALL_2GENS_L8

    def test_matrix_ball_commuting_grid(self):
        g1 = np.eye(3)
        g1[0, 2] = 1.0
        g2 = np.eye(3)
        g2[1, 2] = 1.0
        ball = matrix_ball([g1, g2], 8)
        assert len(ball) == oracles.ABELIAN_GRID_L8

    def test_matrix_ball_cap(self):
        ball = matrix_ball([FREE_A, FREE_B], 6, cap=10)
        assert len(ball) == 10

    def test_matrix_key_scale_invariant(self):
        M = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert matrix_key(M) == matrix_key(3.7 * M)

    def test_is_scalar(self):
        assert is_scalar(3.0 * np.eye(4))
        assert is_scalar(-np.eye(2))
        assert not is_scalar(np.diag([1.0, 2.0]))


class TestCwlUpper:
    def test_generator(self):
        assert cwl_upper([(0, 1)], [FREE_A, FREE_B], 1) == 1

    def test_explicit_conjugate(self):
        word = [(0, 1), (1, 1), (0, -1)]
        assert cwl_upper(word, [FREE_A, FREE_B], 1) == 1

    def test_matrix_identification_commuting(self):
        g1 = np.eye(3)
        g1[0, 2] = 1.0
        g2 = np.eye(3)
        g2[1, 2] = 1.0
        # a b a^-1 = b when the generators commute; only the matrix
        # lookup can discover that at conjugation radius zero
        assert cwl_upper([(0, 1), (1, 1), (0, -1)], [g1, g2], 0) == 1

    def test_matches_brute_force_on_free_pair(self):
        word = [(0, 1), (0, 1), (1, 1)]
        got = cwl_upper(word, [FREE_A, FREE_B], 2)
        assert got <= oracles.cwl_upper_brute(word, 2, 2)
        assert got == 3


class TestTranslationLength:
    def test_identity_is_zero(self):
        K = ConeBody.klein_ball(2)
        t = translation_length(K, np.eye(3))
        assert t.value == 0.0
        assert t.proxy == 0.0
        assert not t.flagged

    def test_interval_doubling(self):
        # boost with eigenvalues 2 and 1/2 on the 1-ball: the metric
        # infimum is log 4, twice the eigenvalue proxy
        K = ConeBody.klein_ball(1)
        g = np.array([[1.25, 0.75], [0.75, 1.25]])
        t = translation_length(K, g, seeds=64, seed=1)
        assert abs(t.value - oracles.LOG4) < 1e-4
        assert t.value > oracles.LOG4 - 1e-6
        assert t.proxy == pytest.approx(0.5 * oracles.LOG4, rel=1e-9)
        assert t.flagged

    def test_planar_boost_doubling(self):
        K = ConeBody.klein_ball(2)
        tpar = np.log(2.0)
        g = block_diag(np.array([[np.cosh(tpar), np.sinh(tpar)],
                                 [np.sinh(tpar), np.cosh(tpar)]]), np.eye(1))
        t = translation_length(K, g, seeds=128, seed=0)
        assert abs(t.value - 2 * tpar) < 1e-3
        assert t.flagged

    def test_rotation_has_zero_length(self):
        K = ConeBody.klein_ball(2)
        g = block_diag(np.eye(1), rot2(0.8))
        t = translation_length(K, g, seeds=64, seed=2)
        assert t.value < 5e-3
        assert not t.flagged

    def test_rejects_non_preserving_map(self):
        K = ConeBody.klein_ball(2)
        with pytest.raises(GeometryError, match="preserve"):
            translation_length(K, np.diag([2.0, 1.0, 1.0]))

    def test_rejects_flat_body(self):
        K = ConeBody(kind="polyhedral",
                     generators=np.array([[1.0, 0, 0], [0, 1.0, 0], [-1.0, 0, 0]]))
        with pytest.raises(GeometryError, match="properly convex"):
            translation_length(K, np.eye(3))


class TestInvariantSubspaces:
    def test_diagonal_full_lattice(self):
        subs = invariant_subspaces([np.diag([2.0, 1.0, 0.5])], seed=0)
        assert len(subs) == 6
        assert sorted(s.dim for s in subs) == [1, 1, 1, 2, 2, 2]
        for axis in np.eye(3):
            assert any(s.dim == 1 and s.contains(ProjPoint(axis)) for s in subs)

    def test_irreducible_pair_certified(self):
        rx = block_diag(np.eye(1), rot2(0.7))
        rz = block_diag(rot2(0.53), np.eye(1))
        rng = np.random.default_rng(5)
        A = rng.normal(size=(3, 3))
        Ai = np.linalg.inv(A)
        gens = [A @ rx @ Ai, A @ rz @ Ai]
        assert algebra_dimension(gens) == 9
        assert invariant_subspaces(gens, seed=0) == []

    def test_shared_plane_found(self):
        g1 = block_diag(1.3 * rot2(0.7), 0.9 * np.eye(1))
        g2 = block_diag(0.8 * rot2(-0.4), 1.7 * np.eye(1))
        subs = invariant_subspaces([g1, g2], seed=0)
        plane = Subspace(np.eye(3)[:2])
        assert any(s.dim == 2 and plane.contains_subspace(s) for s in subs)
        assert any(s.dim == 1 and s.contains(ProjPoint([0, 0, 1])) for s in subs)

    def test_algebra_dimension_identity(self):
        assert algebra_dimension([np.eye(3)]) == 1
