import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projends.projcore import (
    GeometryError,
    ProjMap,
    ProjPoint,
    Subspace,
    act,
    cross_ratio,
    hausdorff,
    induced_map,
    linking_basis,
    normalize,
    radial_project,
    simple_distance,
    sphere_distance,
)

import oracles


def rng(seed=0):
    return np.random.default_rng(seed)


class TestProjPoint:
    def test_unit_norm_on_construction(self):
        p = ProjPoint([3.0, 4.0, 0.0])
        assert abs(np.linalg.norm(p.coords) - 1.0) < 1e-12

    def test_antipodes_are_distinct(self):
        p = ProjPoint([1.0, 0.0, 0.0])
        assert p != p.antipode()

    def test_equality_tolerance(self):
        p = ProjPoint([1.0, 0.0, 0.0])
        q = ProjPoint([1.0, 1e-12, 0.0])
        assert p == q

    def test_lift_flips_sign(self):
        p = ProjPoint.lift([-2.0, 1.0, 0.0])
        assert p.coords[0] > 0

    def test_lift_skips_leading_zeros(self):
        p = ProjPoint.lift([0.0, -1.0, 5.0])
        assert p.coords[1] > 0

    def test_zero_vector_rejected(self):
        with pytest.raises(GeometryError):
            ProjPoint([0.0, 0.0, 0.0])


class TestSubspace:
    def test_spanned_by_orthonormalizes(self):
        S = Subspace.spanned_by([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 1.0, 0.0]])
        assert S.dim == 2
        assert np.max(np.abs(S.basis @ S.basis.T - np.eye(2))) < 1e-12

    def test_non_orthonormal_rejected(self):
        with pytest.raises(GeometryError):
            Subspace([[1.0, 1.0, 0.0]])

    def test_contains(self):
        S = Subspace.spanned_by([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        assert S.contains(ProjPoint([1.0, 1.0, 0.0]))
        assert not S.contains(ProjPoint([0.0, 0.0, 1.0]))

    def test_orthogonal_complement(self):
        S = Subspace.spanned_by([[1.0, 0.0, 0.0]])
        C = S.orthogonal_complement()
        assert C.dim == 2
        assert np.max(np.abs(C.basis @ S.basis.T)) < 1e-12


class TestProjMap:
    def test_det_normalized(self):
        g = ProjMap(np.diag([4.0, 1.0, 1.0]))
        assert abs(abs(np.linalg.det(g.matrix)) - 1.0) < 1e-10

    def test_singular_rejected(self):
        with pytest.raises(GeometryError):
            ProjMap(np.zeros((3, 3)))

    def test_identity_fixes_point(self):
        p = ProjPoint([1.0, 0.0, 0.0])
        assert act(ProjMap(np.eye(3)), p) == p

    def test_eigendirection_fixed(self):
        g = ProjMap(np.diag([2.0, 1.0, 0.5]))
        p = ProjPoint([0.0, 0.0, 1.0])
        assert act(g, p) == p

    def test_dual_action_is_inverse_transpose(self):
        # diag(2,1,1/2) has dual diag(1/2,1,2); e1 stays put either way
        g = ProjMap(np.diag([2.0, 1.0, 0.5]))
        p = ProjPoint([1.0, 0.0, 0.0])
        assert act(g, p, dual=True) == p
        dual_mat = np.linalg.inv(g.matrix).T
        assert np.allclose(np.diag(dual_mat), np.diag(g.matrix)[::-1], atol=1e-12)

    def test_composition_associates_with_action(self):
        r = rng(7)
        for _ in range(20):
            g = ProjMap(r.normal(size=(4, 4)))
            h = ProjMap(r.normal(size=(4, 4)))
            p = ProjPoint(r.normal(size=4))
            lhs = act(g @ h, p)
            rhs = act(g, act(h, p))
            assert np.max(np.abs(lhs.coords - rhs.coords)) < 1e-10


class TestCrossRatio:
    def line(self, ts, u=None, w=None):
        if u is None:
            u = np.array([1.0, 0.0, 0.0])
            w = np.array([0.0, 1.0, 0.0])
        return [ProjPoint(u + t * w) for t in ts]

    def test_reference_value(self):
        o, s, q, p = self.line([-1.0, 1.0, 0.5, 0.0])
        assert abs(cross_ratio(o, s, q, p) - 3.0) < 1e-12

    def test_equal_middle_points_give_one(self):
        o, s, q, p = self.line([-1.0, 1.0, 0.25, 0.25])
        assert abs(cross_ratio(o, s, q, p) - 1.0) < 1e-12

    def test_matches_fraction_oracle(self):
        r = rng(3)
        for _ in range(50):
            ts = r.integers(-12, 12, size=4)
            while len(set(ts.tolist())) < 4:
                ts = r.integers(-12, 12, size=4)
            u = r.normal(size=4)
            w = r.normal(size=4)
            pts = [ProjPoint(u + float(t) * w) for t in ts]
            want = oracles.cross_ratio_affine(*[int(t) for t in ts])
            got = cross_ratio(*pts)
            assert abs(got - float(want)) < 1e-9 * max(1.0, abs(float(want)))

    def test_projective_invariance(self):
        r = rng(11)
        o, s, q, p = self.line([-1.0, 1.0, 0.5, 0.0])
        base = cross_ratio(o, s, q, p)
        for _ in range(100):
            g = ProjMap(r.normal(size=(3, 3)))
            imgs = [act(g, x) for x in (o, s, q, p)]
            assert abs(cross_ratio(*imgs) - base) < 1e-9

    def test_non_collinear_rejected(self):
        pts = [ProjPoint(v) for v in np.eye(3)] + [ProjPoint([1.0, 1.0, 1.0])]
        with pytest.raises(GeometryError):
            cross_ratio(*pts)

    def test_degenerate_rejected(self):
        # p coincides with o: denominator det vanishes
        o, s, q, p = self.line([-1.0, 1.0, 0.5, -1.0])
        with pytest.raises(GeometryError):
            cross_ratio(o, s, q, p)


class TestRadialProject:
    def test_already_orthogonal(self):
        v = ProjPoint([0.0, 0.0, 1.0])
        x = ProjPoint([1.0, 0.0, 0.0])
        assert radial_project(v, x) == x

    def test_diagonal_direction(self):
        v = ProjPoint([0.0, 0.0, 1.0])
        x = ProjPoint(np.array([1.0, 0.0, 1.0]) / math.sqrt(2.0))
        assert radial_project(v, x) == ProjPoint([1.0, 0.0, 0.0])

    def test_vertex_input_rejected(self):
        v = ProjPoint([0.0, 0.0, 1.0])
        with pytest.raises(GeometryError):
            radial_project(v, v)
        with pytest.raises(GeometryError):
            radial_project(v, v.antipode())

    def test_equivariance_under_vertex_fixing_map(self):
        v = ProjPoint([0.0, 0.0, 1.0])
        g = ProjMap(np.diag([2.0, 1.0, 1.0]))
        U, A = induced_map(g, v)
        r = rng(5)
        for _ in range(50):
            x = ProjPoint(r.normal(size=3))
            lhs = radial_project(v, act(g, x))
            rhs_link = A @ (U @ radial_project(v, x).coords)
            rhs = ProjPoint(U.T @ rhs_link)
            assert lhs == rhs

    def test_linking_basis_orthonormal_to_vertex(self):
        r = rng(9)
        for _ in range(20):
            v = ProjPoint(r.normal(size=5))
            U = linking_basis(v)
            assert np.max(np.abs(U @ U.T - np.eye(4))) < 1e-10
            assert np.max(np.abs(U @ v.coords)) < 1e-12


class TestHausdorff:
    def test_identical_sets(self):
        K = [ProjPoint([1.0, 0.0, 0.0]), ProjPoint([0.0, 1.0, 0.0])]
        assert hausdorff(K, K) == 0.0

    def test_orthogonal_singletons(self):
        K1 = [ProjPoint([1.0, 0.0, 0.0])]
        K2 = [ProjPoint([0.0, 1.0, 0.0])]
        assert abs(hausdorff(K1, K2) - math.pi / 2) < 1e-12

    def test_rotated_circle(self):
        th = np.linspace(0.0, 2.0 * math.pi, 100, endpoint=False)
        circ = [ProjPoint([math.cos(t), math.sin(t), 0.0]) for t in th]
        rot = [ProjPoint([math.cos(t + 0.01), math.sin(t + 0.01), 0.0]) for t in th]
        gap = 2.0 * math.pi / 100
        assert hausdorff(circ, rot) <= 0.01 + gap

    def test_matches_brute_oracle(self):
        r = rng(2)
        K1 = [tuple(v) for v in r.normal(size=(8, 3))]
        K2 = [tuple(v) for v in r.normal(size=(6, 3))]
        got = hausdorff([ProjPoint(v) for v in K1], [ProjPoint(v) for v in K2])
        assert abs(got - oracles.hausdorff_brute(K1, K2)) < 1e-12
        got_s = simple_distance([ProjPoint(v) for v in K1], [ProjPoint(v) for v in K2])
        assert abs(got_s - oracles.simple_distance_brute(K1, K2)) < 1e-12

    def test_symmetry_and_triangle(self):
        r = rng(4)
        sets = [[ProjPoint(v) for v in r.normal(size=(7, 4))] for _ in range(3)]
        A, B, C = sets
        assert abs(hausdorff(A, B) - hausdorff(B, A)) < 1e-12
        assert hausdorff(A, C) <= hausdorff(A, B) + hausdorff(B, C) + 1e-12

    def test_empty_rejected(self):
        with pytest.raises(GeometryError):
            hausdorff([], [ProjPoint([1.0, 0.0])])


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=6).filter(
    lambda v: sum(abs(x) for x in v) > 1e-6))
def test_normalize_is_idempotent(vec):
    v = normalize(vec)
    assert abs(np.linalg.norm(v) - 1.0) < 1e-12
    assert np.max(np.abs(normalize(v) - v)) < 1e-12


@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20),
       st.integers(-20, 20))
@settings(max_examples=60)
def test_cross_ratio_matches_affine_formula(a, b, c, d):
    ts = [a, b, c, d]
    if len({a, b}) < 2 or len({a, d}) < 2 or len({b, c}) < 2:
        return
    u = np.array([1.0, 0.2, -0.4])
    w = np.array([0.1, 1.0, 0.3])
    pts = [ProjPoint(u + t * w) for t in ts]
    want = float(oracles.cross_ratio_affine(*ts))
    got = cross_ratio(*pts)
    assert abs(got - want) < 1e-8 * max(1.0, abs(want))


def test_sphere_distance_range():
    p = ProjPoint([1.0, 0.0, 0.0])
    assert sphere_distance(p, p) == 0.0
    assert abs(sphere_distance(p, p.antipode()) - math.pi) < 1e-12
