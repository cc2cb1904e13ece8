import math

import numpy as np
import pytest

from projends import _halfspace
from projends.convex import ConeBody, body_hausdorff, klein_point, strict_join
from projends.duality import (
    AugBoundaryPoint,
    dual_cone,
    dual_factor,
    dual_map,
    duality_map_samples,
)
from projends.projcore import GeometryError, ProjMap, ProjPoint, hausdorff

import oracles


def rng(seed=0):
    return np.random.default_rng(seed)


def random_pc_cone(r, ambient=4, m=8, spread=0.6):
    axis = r.normal(size=ambient)
    axis /= np.linalg.norm(axis)
    gens = []
    for _ in range(m):
        u = r.normal(size=ambient)
        u -= np.dot(u, axis) * axis
        u /= np.linalg.norm(u)
        gens.append(axis + spread * u)
    return ConeBody(np.array(gens))


class TestHalfspaceKernel:
    def test_orthant(self):
        rays = _halfspace.extreme_rays(np.eye(3))
        assert rays.shape == (3, 3)
        assert hausdorff(rays, np.eye(3)) < 1e-12

    def test_square_cone_dual_rays(self):
        gens = np.array([[1.0, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]])
        # constraints phi . g >= 0; put height coordinate first
        G = gens[:, [1, 2, 0]] * 0 + gens  # keep layout explicit below
        G = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [-1.0, 1.0, 1.0], [-1.0, -1.0, 1.0]])
        rays = _halfspace.extreme_rays(G)
        want = np.array(oracles.SQUARE_CONE_DUAL_RAYS)
        assert hausdorff(rays, want / np.linalg.norm(want, axis=1, keepdims=True)) < 1e-10

    def test_zero_cone_is_empty(self):
        A = np.array([[1.0, 0], [-1.0, 0], [0, 1.0], [0, -1.0]])
        assert _halfspace.extreme_rays(A).shape[0] == 0

    def test_lineality_raises(self):
        with pytest.raises(_halfspace.LinealityError):
            _halfspace.extreme_rays(np.array([[1.0, 0.0, 0.0]] * 2))

    def test_membership(self):
        G = np.eye(3)
        assert _halfspace.in_cone([1.0, 2.0, 0.5], G)
        assert not _halfspace.in_cone([1.0, -0.5, 0.0], G)

    def test_minimal_generators(self):
        G = np.array([[1.0, 0, 0], [0, 1.0, 0], [1.0, 1.0, 0]])
        assert _halfspace.minimal_generators(G).shape[0] == 2


class TestDualCone:
    def test_orthant_self_dual(self):
        C = ConeBody(np.eye(3))
        assert body_hausdorff(dual_cone(C), C) < 1e-12

    def test_lorentz_quadric_self_dual(self):
        C = ConeBody.klein_ball(2)
        D = dual_cone(C)
        assert D.kind == "quadric"
        scale = D.quadric[0, 0] / C.quadric[0, 0]
        assert np.max(np.abs(D.quadric - scale * C.quadric)) < 1e-12

    def test_square_cone_dual_and_back(self):
        gens = np.array([[1.0, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]])
        C = ConeBody(gens)
        D = dual_cone(C)
        want = [ProjPoint([v[1], v[2], v[0]]) for v in
                [(1.0, 1, 0), (1.0, -1, 0), (1.0, 0, 1), (1.0, 0, -1)]]
        # dual rays of the height-last square cone: (+-1, 0, 1), (0, +-1, 1)
        got = D.extreme_generators()
        assert got.shape[0] == 4
        assert body_hausdorff(dual_cone(D), C) < 1e-8

    def test_involution_random(self):
        r = rng(10)
        for _ in range(25):
            C = random_pc_cone(r, ambient=4, m=int(r.integers(4, 13)))
            assert body_hausdorff(dual_cone(dual_cone(C)), C) < 1e-8

    def test_involution_dim5(self):
        r = rng(11)
        for _ in range(5):
            C = random_pc_cone(r, ambient=5, m=9)
            assert body_hausdorff(dual_cone(dual_cone(C)), C) < 1e-8

    def test_inclusion_reversal(self):
        r = rng(12)
        for _ in range(20):
            C1 = random_pc_cone(r, ambient=4, m=5, spread=0.4)
            extra = C1.generators.mean(axis=0) + 0.55 * r.normal(size=4) * 0.3
            C2 = ConeBody(np.vstack([C1.generators, extra]))
            if not C2.properly_convex:
                continue
            D1, D2 = dual_cone(C1), dual_cone(C2)
            for phi in D2.generators:
                assert _halfspace.in_cone(phi, D1.generators, 1e-7)

    def test_equivariance(self):
        r = rng(13)
        C = random_pc_cone(r, ambient=4, m=7)
        for _ in range(20):
            g = ProjMap(np.eye(4) + 0.3 * r.normal(size=(4, 4)))
            lhs = dual_cone(C.map_by(g))
            rhs = dual_cone(C).map_by(dual_map(g))
            assert body_hausdorff(lhs, rhs) < 1e-8

    def test_lower_dimensional_dual_has_lineality(self):
        C = ConeBody([[1.0, 0.2, 0.0], [0.2, 1.0, 0.0]])
        D = dual_cone(C)
        assert not D.properly_convex
        assert D.contains_ray([0.0, 0.0, 1.0])
        assert D.contains_ray([0.0, 0.0, -1.0])


class TestDualMap:
    def test_identity(self):
        g = ProjMap(np.eye(4))
        assert np.max(np.abs(dual_map(g).matrix - np.eye(4))) < 1e-12

    def test_diagonal(self):
        g = ProjMap(np.diag([2.0, 1.0, 0.5]))
        assert np.max(np.abs(dual_map(g).matrix - np.diag([0.5, 1.0, 2.0]))) < 1e-12

    def test_involution(self):
        r = rng(14)
        for _ in range(10):
            g = ProjMap(r.normal(size=(5, 5)))
            gg = dual_map(dual_map(g))
            assert np.max(np.abs(gg.matrix - g.matrix)) < 1e-12


class TestJoinDuality:
    def complementary_pair(self, r, n1=4, ka=2):
        M = r.normal(size=(n1, n1))
        while abs(np.linalg.det(M)) < 0.1:
            M = r.normal(size=(n1, n1))
        A_mix = r.uniform(0.2, 1.0, size=(3, ka))
        B_mix = r.uniform(0.2, 1.0, size=(3, n1 - ka))
        A = ConeBody(A_mix @ M[:, :ka].T)
        B = ConeBody(B_mix @ M[:, ka:].T)
        return A, B

    def test_join_duality_identity(self):
        r = rng(15)
        done = 0
        while done < 12:
            A, B = self.complementary_pair(r)
            J = strict_join([A, B])
            if not J.properly_convex:
                continue
            lhs = dual_cone(J)
            rhs = strict_join([dual_factor(A, B), dual_factor(B, A)])
            assert body_hausdorff(lhs, rhs) < 1e-8
            done += 1

    def test_annihilator_pairing_required(self):
        # with non-orthogonal spans, pairing the factor dual inside its
        # own span (inner-product identification) misses the answer
        r = rng(16)
        A, B = self.complementary_pair(r)
        J = strict_join([A, B])
        lhs = dual_cone(J)
        for w in dual_factor(A, B).generators:
            assert np.min(A.generators @ w) > -1e-9
            assert np.max(np.abs(B.generators @ w)) < 1e-9
        assert body_hausdorff(
            lhs, strict_join([dual_factor(A, B), dual_factor(B, A)])) < 1e-8


class TestAugmentedBoundary:
    def test_klein_ball_conormal(self):
        ball = ConeBody.klein_ball(2)
        pairs = duality_map_samples(ball, 16)
        Q = ball.quadric
        for a, b in pairs:
            x, h = a.x.coords, a.h.coords
            assert abs(np.dot(x, h)) < 1e-9
            conormal = -Q @ x
            conormal /= np.linalg.norm(conormal)
            assert np.max(np.abs(h - conormal)) < 1e-9
            # involution: the image pair swaps back
            assert b.x == a.h and b.h == a.x

    def test_square_vertex_has_multiple_supports(self):
        gens = np.array([[1.0, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]])
        body = ConeBody(gens)
        pairs = duality_map_samples(body, 40)
        vertex = ProjPoint([1.0, 1.0, 1.0])
        hs = []
        for a, _ in pairs:
            if a.x == vertex:
                if not any(a.h == h for h in hs):
                    hs.append(a.h)
        assert len(hs) >= 2

    def test_triangle_edge_point_unique_support(self):
        gens = np.array([[1.0, 1.0, 0.2], [1.0, -1.0, 0.2], [1.0, 0.0, 1.0]])
        body = ConeBody(gens)
        F = body.facets()
        x = (gens[0] + gens[1])
        x /= np.linalg.norm(x)
        tight = [f for f in F if abs(np.dot(f, x)) < 1e-9]
        assert len(tight) == 1

    def test_requires_properly_convex(self):
        body = ConeBody([[1.0, 0, 0], [-1.0, 0, 0], [0, 1.0, 0]])
        with pytest.raises(GeometryError):
            duality_map_samples(body, 4)

    def test_validation_rejects_bad_pair(self):
        ball = ConeBody.klein_ball(2)
        bad = AugBoundaryPoint(klein_point([1.0, 0.0]), klein_point([0.3, 0.2]))
        assert not bad.valid_for(ball)
