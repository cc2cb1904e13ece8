"""Convex cones and domains on the projective sphere.

A ConeBody is a convex cone in R^{n+1} described by generator rays
(V-representation) or, for ellipsoidal domains, by a quadratic form Q
with exactly one negative eigenvalue whose interior is x^T Q x < 0.
Proper convexity (the projectivized body misses some hyperplane, i.e.
the cone is pointed and salient) is decided at construction; properly
convex polyhedral bodies get their facet functionals enumerated right
away so later reads never mutate the object.

The Hilbert metric of a properly convex body is computed from chord
endpoints: d(p, q) = log |[o, s, q, p]| with o on the p side.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from . import _halfspace
from .config import DEFAULT, Tolerances
from .projcore import (
    GeometryError,
    ProjPoint,
    Subspace,
    cross_ratio,
    hausdorff as _hausdorff_points,
    normalize,
)


def _gen_matrix(generators) -> np.ndarray:
    if isinstance(generators, np.ndarray):
        G = np.atleast_2d(np.asarray(generators, dtype=float))
    else:
        rows = [g.coords if isinstance(g, ProjPoint) else np.asarray(g, dtype=float)
                for g in generators]
        G = np.vstack(rows) if rows else np.zeros((0, 0))
    if G.size:
        nrm = np.linalg.norm(G, axis=1)
        if np.any(nrm == 0):
            raise GeometryError("zero generator ray")
        G = G / nrm[:, None]
    return G


def _canonical_quadric(Q) -> np.ndarray:
    """Scale to unit spectral norm and flip sign so exactly one
    eigenvalue is negative."""
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise GeometryError("quadric must be a square matrix")
    Q = 0.5 * (Q + Q.T)
    w = np.linalg.eigvalsh(Q)
    top = np.max(np.abs(w))
    if top == 0 or np.min(np.abs(w)) < 1e-12 * top:
        raise GeometryError("degenerate quadric")
    Q = Q / top
    w = w / top
    neg = int(np.sum(w < 0))
    if neg > Q.shape[0] - neg:
        Q = -Q
    return Q


class ConeBody:
    """Convex cone body: generator rays plus optional quadric data.

    properly_convex, the pointedness margin, the linear span, and (for
    properly convex polyhedral bodies) the facet functionals are all
    computed once at construction.
    """

    def __init__(self, generators, kind: str = "polyhedral",
                 quadric=None, tols: Tolerances = DEFAULT):
        if kind not in ("polyhedral", "quadric"):
            raise GeometryError("kind must be 'polyhedral' or 'quadric'")
        self.kind = kind
        self.tols = tols
        self.generators = _gen_matrix(generators)
        self.quadric: Optional[np.ndarray] = None
        self.axis: Optional[np.ndarray] = None

        if kind == "quadric":
            if quadric is None:
                raise GeometryError("quadric body needs a quadratic form")
            self.quadric = _canonical_quadric(quadric)
            w, V = np.linalg.eigh(self.quadric)
            neg_count = int(np.sum(w < 0))
            self._signature_ok = neg_count == 1
            axis = V[:, 0]
            idx = np.nonzero(np.abs(axis) > 1e-13)[0]
            if idx.size and axis[idx[0]] < 0:
                axis = -axis
            self.axis = axis
            self.properly_convex = self._signature_ok
            self.pointedness_margin = 1.0 if self._signature_ok else 0.0
            n1 = self.quadric.shape[0]
            self.span = Subspace(np.eye(n1))
            self.facets_span = None
            self.span_basis = np.eye(n1)
            if self.generators.size and self.generators.shape[1] != n1:
                raise GeometryError("generator dimension does not match quadric")
        else:
            if quadric is not None:
                raise GeometryError("polyhedral body cannot carry a quadric")
            if self.generators.shape[0] == 0:
                raise GeometryError("polyhedral body needs at least one generator")
            self.span = Subspace.spanned_by(self.generators)
            self.span_basis = self.span.basis
            self.pointedness_margin = self._lp_margin()
            self.properly_convex = self.pointedness_margin > tols.equality
            self.facets_span = None
            if self.properly_convex:
                reduced = self.generators @ self.span_basis.T
                self.facets_span = _halfspace.extreme_rays(reduced)

    # -------------------------------------------------------------- basics

    @classmethod
    def klein_ball(cls, n: int, tols: Tolerances = DEFAULT) -> "ConeBody":
        """The unit ball of the projective model of hyperbolic n-space:
        Q = diag(-1, 1, ..., 1)."""
        Q = np.diag([-1.0] + [1.0] * n)
        return cls(np.zeros((0, n + 1)), kind="quadric", quadric=Q, tols=tols)

    @property
    def ambient(self) -> int:
        if self.kind == "quadric":
            return self.quadric.shape[0]
        return self.generators.shape[1]

    @property
    def dim(self) -> int:
        """Linear dimension of the span."""
        if self.kind == "quadric":
            return self.ambient
        return self.span.dim

    def _lp_margin(self) -> float:
        """max over box-bounded functionals of the least value on the
        unit generators; positive exactly when the cone misses a
        hyperplane."""
        G = self.generators
        m, d = G.shape
        # variables (phi, t), maximize t subject to phi . g_i >= t
        c = np.zeros(d + 1)
        c[-1] = -1.0
        A_ub = np.hstack([-G, np.ones((m, 1))])
        b_ub = np.zeros(m)
        bounds = [(-1.0, 1.0)] * d + [(None, None)]
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
        if not res.success:
            raise GeometryError("pointedness LP failed: %s" % res.message)
        return float(-res.fun)

    def facets(self) -> np.ndarray:
        """Facet functionals in ambient coordinates (rows); only
        properly convex polyhedral bodies have them."""
        if self.kind == "quadric":
            raise GeometryError("quadric bodies have no facet list")
        if self.facets_span is None:
            raise GeometryError("facets exist only for properly convex bodies")
        return self.facets_span @ self.span_basis

    def extreme_generators(self) -> np.ndarray:
        """Minimal generator set (redundant rays dropped)."""
        if self.kind == "quadric":
            raise GeometryError("quadric bodies have no ray description")
        return _halfspace.minimal_generators(self.generators, self.tols.membership)

    def reduced(self) -> "ConeBody":
        return ConeBody(self.extreme_generators(), tols=self.tols)

    # ------------------------------------------------------------ membership

    def contains_ray(self, x, tol: Optional[float] = None) -> bool:
        """Closed-cone membership of a direction."""
        tol = self.tols.membership if tol is None else tol
        v = normalize(x.coords if isinstance(x, ProjPoint) else x)
        if self.kind == "quadric":
            val = float(v @ self.quadric @ v)
            side = float(v @ self.quadric @ self.axis)
            return val <= tol and side <= tol
        if not self.span.contains(v, tol):
            return False
        return _halfspace.cone_membership_residual(v, self.generators) <= tol

    def interior_margin(self, x) -> float:
        """Signed slack of a direction: positive inside, negative out.

        Polyhedral: least facet slack in span coordinates (points off
        the span get -inf).  Quadric: -x^T Q x on the body's nappe.
        """
        v = normalize(x.coords if isinstance(x, ProjPoint) else x)
        if self.kind == "quadric":
            if float(v @ self.quadric @ self.axis) > 0:
                return -math.inf
            return float(-(v @ self.quadric @ v))
        if self.facets_span is None:
            raise GeometryError("interior test needs a properly convex body")
        if not self.span.contains(v, self.tols.membership):
            return -math.inf
        vr = self.span_basis @ v
        vr = vr / np.linalg.norm(vr)
        return float(np.min(self.facets_span @ vr))

    def is_interior(self, x, margin: Optional[float] = None) -> bool:
        margin = self.tols.interior_margin if margin is None else margin
        return self.interior_margin(x) >= margin

    def sample_interior(self, count: int, seed: int = 0) -> list[ProjPoint]:
        """Deterministic interior samples: positive generator mixtures
        (polyhedral) or radial samples around the axis (quadric)."""
        rng = np.random.default_rng(seed)
        out: list[ProjPoint] = []
        if self.kind == "quadric":
            w, V = np.linalg.eigh(self.quadric)
            # coordinates where the form is diag(w); interior is a ball
            for _ in range(count):
                u = rng.normal(size=self.ambient - 1)
                u /= np.linalg.norm(u)
                r = 0.9 * rng.random() ** (1.0 / max(self.ambient - 1, 1))
                y = np.concatenate([[1.0], r * u * np.sqrt(-w[0] / w[1:])])
                v = V @ y
                if float(v @ self.quadric @ self.axis) > 0:
                    v = -v
                out.append(ProjPoint(v))
            return out
        weights = rng.exponential(size=(count, self.generators.shape[0]))
        for row in weights:
            out.append(ProjPoint(row @ self.generators))
        return out

    # ---------------------------------------------------------------- misc

    def map_by(self, g) -> "ConeBody":
        """Image body under a projective map."""
        M = g.matrix if hasattr(g, "matrix") else np.asarray(g, dtype=float)
        if self.kind == "quadric":
            Minv = np.linalg.inv(M)
            return ConeBody(
                self.generators @ M.T if self.generators.size else self.generators,
                kind="quadric",
                quadric=Minv.T @ self.quadric @ Minv,
                tols=self.tols,
            )
        return ConeBody(self.generators @ M.T, tols=self.tols)

    def __repr__(self):
        return "ConeBody(kind=%s, gens=%d, ambient=%d, properly_convex=%s)" % (
            self.kind, self.generators.shape[0], self.ambient, self.properly_convex)


def is_properly_convex(body: ConeBody) -> bool:
    """A strictly positive supporting functional exists (polyhedral) or
    the quadric has the ball signature."""
    return bool(body.properly_convex)


def join(A: ConeBody, B: ConeBody, tols: Tolerances = DEFAULT) -> ConeBody:
    """Cone generated by the union of the two generator sets."""
    for X in (A, B):
        if X.generators.shape[0] == 0:
            raise GeometryError("join needs generator data on both bodies")
    return ConeBody(np.vstack([A.generators, B.generators]), tols=tols)


def strict_join(bodies: Sequence[ConeBody], tols: Tolerances = DEFAULT) -> ConeBody:
    """Join of bodies whose linear spans are independent."""
    spans = [b.span for b in bodies]
    total = sum(s.dim for s in spans)
    stacked = np.vstack([b.generators for b in bodies])
    joint = Subspace.spanned_by(stacked)
    if joint.dim != total:
        raise GeometryError("not a strict join: spans are dependent")
    return ConeBody(stacked, tols=tols)


def cone_sum(bodies: Sequence[ConeBody], tols: Tolerances = DEFAULT) -> ConeBody:
    """Body generated by sums picking one generator from each body."""
    if not bodies:
        raise GeometryError("cone_sum needs at least one body")
    acc = bodies[0].generators
    for b in bodies[1:]:
        acc = (acc[:, None, :] + b.generators[None, :, :]).reshape(-1, acc.shape[1])
    return ConeBody(acc, tols=tols)


class Chord:
    """Maximal segment of a body through two interior points.

    Endpoints o (on the p side) and s (on the q side); the pairs (o, q)
    and (p, s) interleave along the line.
    """

    __slots__ = ("o", "s", "p", "q")

    def __init__(self, o: ProjPoint, s: ProjPoint, p: ProjPoint, q: ProjPoint):
        self.o, self.s, self.p, self.q = o, s, p, q


def chord_endpoints(body: ConeBody, p: ProjPoint, q: ProjPoint,
                    tols: Tolerances = DEFAULT) -> Chord:
    """Boundary endpoints of the maximal segment through p and q."""
    if p == q:
        raise GeometryError("chord needs two distinct interior points")
    if body.interior_margin(p) < tols.interior_margin or \
       body.interior_margin(q) < tols.interior_margin:
        raise GeometryError("chord endpoints need interior points")

    if body.kind == "quadric":
        return _quadric_chord(body, p, q)
    return _polyhedral_chord(body, p, q, tols)


def _chord_frame(pc: np.ndarray, qc: np.ndarray):
    e1 = pc / np.linalg.norm(pc)
    r = qc - np.dot(qc, e1) * e1
    n = np.linalg.norm(r)
    if n < 1e-14:
        raise GeometryError("chord needs two distinct interior points")
    e2 = r / n
    theta_q = math.atan2(float(np.dot(qc, e2)), float(np.dot(qc, e1)))
    return e1, e2, theta_q


def _polyhedral_chord(body: ConeBody, p: ProjPoint, q: ProjPoint,
                      tols: Tolerances) -> Chord:
    U = body.span_basis
    pr, qr = U @ p.coords, U @ q.coords
    e1, e2, theta_q = _chord_frame(pr, qr)
    F = body.facets_span
    alpha = F @ e1
    beta = F @ e2
    psi = np.arctan2(beta, alpha)
    # each facet's feasible arc is [psi - pi/2, psi + pi/2]; p at 0 and
    # q at theta_q are strictly inside every arc
    lo = float(np.max(psi) - 0.5 * math.pi)
    hi = float(np.min(psi) + 0.5 * math.pi)
    if not (lo < 0.0 < theta_q < hi):
        raise GeometryError("chord arc inconsistent; body may be degenerate")
    o = ProjPoint(U.T @ (math.cos(lo) * e1 + math.sin(lo) * e2))
    s = ProjPoint(U.T @ (math.cos(hi) * e1 + math.sin(hi) * e2))
    return Chord(o, s, p, q)


def _quadric_chord(body: ConeBody, p: ProjPoint, q: ProjPoint) -> Chord:
    Q = body.quadric
    e1, e2, theta_q = _chord_frame(p.coords, q.coords)
    A = float(e1 @ Q @ e1)
    B = float(e1 @ Q @ e2)
    C = float(e2 @ Q @ e2)
    M = np.array([[A, B], [B, C]])
    w, R = np.linalg.eigh(M)
    if not (w[0] < 0.0 < w[1]):
        raise GeometryError("chord plane does not cut the quadric")
    t = math.sqrt(-w[0] / w[1])
    thetas = []
    for sign in (1.0, -1.0):
        d2 = R @ np.array([1.0, sign * t])
        d = d2[0] * e1 + d2[1] * e2
        if float(d @ Q @ p.coords) > 0:
            d = -d
        thetas.append(math.atan2(float(np.dot(d, e2)), float(np.dot(d, e1))))
    lo, hi = min(thetas), max(thetas)
    if not (lo < 0.0 < theta_q < hi):
        raise GeometryError("chord arc inconsistent with the interior points")
    o = ProjPoint(math.cos(lo) * e1 + math.sin(lo) * e2)
    s = ProjPoint(math.cos(hi) * e1 + math.sin(hi) * e2)
    return Chord(o, s, p, q)


def hilbert_distance(body: ConeBody, p: ProjPoint, q: ProjPoint,
                     tols: Tolerances = DEFAULT) -> float:
    """log |[o, s, q, p]| along the chord through p and q."""
    if not body.properly_convex:
        raise GeometryError("Hilbert metric undefined: body is not properly convex")
    if p == q:
        return 0.0
    ch = chord_endpoints(body, p, q, tols)
    return abs(math.log(abs(cross_ratio(ch.o, ch.s, ch.q, ch.p, tols))))


def body_hausdorff(A: ConeBody, B: ConeBody) -> float:
    """Hausdorff distance between the extreme-ray direction sets of two
    polyhedral bodies (canonicalized so redundant generators do not
    bias the comparison)."""
    return _hausdorff_points(A.extreme_generators(), B.extreme_generators())


def klein_point(x) -> ProjPoint:
    """Affine Klein-chart point (x_1, ..., x_n) -> sphere point
    normalize(1, x)."""
    x = np.asarray(x, dtype=float).ravel()
    return ProjPoint(np.concatenate([[1.0], x]))
