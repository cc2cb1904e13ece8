"""Dual cones, dual group actions, and augmented boundary sampling.

The dual of a cone C is the cone of linear functionals taking
nonnegative values on C (strictly positive on the interior side).
Polyhedral duals are enumerated by the double-description kernel;
quadric duals invert the form.  The augmented boundary of a properly
convex body is the set of pairs (x, h) with x a boundary direction and
h an oriented supporting functional vanishing at x; the duality map
swaps the pair into the augmented boundary of the dual body.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _halfspace
from .config import DEFAULT, Tolerances
from .convex import ConeBody
from .projcore import GeometryError, ProjMap, ProjPoint, Subspace, normalize


def dual_map(g: ProjMap) -> ProjMap:
    """Inverse transpose, the action on functionals."""
    return ProjMap(np.linalg.inv(g.matrix).T)


def dual_cone(C: ConeBody, tols: Tolerances = DEFAULT) -> ConeBody:
    """Functionals nonnegative on the cone.

    Quadric bodies dualize by inverting the form (boundary samples map
    along x -> -Qx).  Polyhedral bodies run double description in the
    span; a deficient span contributes its orthogonal complement as
    lineality generators, so the dual of a lower-dimensional body is
    returned with properly_convex False rather than as an error.
    """
    if C.kind == "quadric":
        Qinv = np.linalg.inv(C.quadric)
        gens = C.generators @ (-C.quadric).T if C.generators.size else C.generators
        body = ConeBody(gens, kind="quadric", quadric=Qinv, tols=tols)
        hint = -C.quadric @ C.axis
        if float(hint @ body.quadric @ body.axis) > 0:
            body.axis = -body.axis
        return body

    if C.generators.shape[0] == 0:
        raise GeometryError("dual of a cone with zero generators")
    U = C.span_basis
    k = U.shape[0]
    n1 = C.ambient
    reduced = C.generators @ U.T
    rays_reduced = _halfspace.extreme_rays(reduced)
    rays = rays_reduced @ U if rays_reduced.size else np.zeros((0, n1))
    if k < n1:
        comp = Subspace(U).orthogonal_complement().basis
        rays = np.vstack([rays, comp, -comp])
    if rays.shape[0] == 0:
        raise GeometryError("dual cone is trivial (input spans everything)")
    return ConeBody(rays, tols=tols)


def dual_factor(A: ConeBody, B: ConeBody, tols: Tolerances = DEFAULT) -> ConeBody:
    """The dual of A paired against the annihilator of B's span:
    functionals nonnegative on A and vanishing on B.

    For a strict join A * B spanning the ambient space, the dual of
    the join is the strict join of dual_factor(A, B) and
    dual_factor(B, A).
    """
    W = Subspace.spanned_by(B.generators).orthogonal_complement()
    U = W.basis
    reduced = A.generators @ U.T
    rays = _halfspace.extreme_rays(reduced)
    if rays.shape[0] == 0:
        raise GeometryError("dual factor is trivial")
    return ConeBody(rays @ U, tols=tols)


@dataclass(frozen=True)
class AugBoundaryPoint:
    """Boundary direction plus an oriented supporting functional."""

    x: ProjPoint
    h: ProjPoint

    def residuals(self, body: ConeBody) -> tuple[float, float]:
        """(|<h, x>|, worst negative slack of h on the body)."""
        pairing = abs(float(np.dot(self.h.coords, self.x.coords)))
        if body.kind == "quadric":
            # smooth boundary: the oriented supporting functional at x
            # is exactly the outward conormal -Qx
            conormal = normalize(-body.quadric @ self.x.coords)
            return pairing, -float(np.linalg.norm(self.h.coords - conormal))
        gens = body.generators
        slack = float(np.min(gens @ self.h.coords)) if gens.size else 0.0
        return pairing, min(slack, 0.0)

    def valid_for(self, body: ConeBody, tol: float = 1e-9) -> bool:
        pairing, slack = self.residuals(body)
        return pairing < tol and slack > -tol


def _quadric_boundary_samples(body: ConeBody, m: int, seed: int = 0) -> np.ndarray:
    w, V = np.linalg.eigh(body.quadric)
    rng = np.random.default_rng(seed)
    d = body.ambient - 1
    out = []
    for _ in range(m):
        u = rng.normal(size=d)
        u /= np.linalg.norm(u)
        y = np.concatenate([[1.0 / np.sqrt(-w[0])], u / np.sqrt(w[1:])])
        x = V @ y
        if float(x @ body.quadric @ body.axis) > 0:
            x = -x
        out.append(x / np.linalg.norm(x))
    return np.array(out)


def duality_map_samples(body: ConeBody, m: int, seed: int = 0,
                        tols: Tolerances = DEFAULT):
    """Sample the augmented boundary and push each point through the
    duality map (x, h) -> (h, x).

    Returns a list of pairs (aug point of the body, aug point of the
    dual body); every image is validated against the dual.
    """
    if not body.properly_convex:
        raise GeometryError("augmented boundary needs a properly convex body")
    if m < 1:
        raise GeometryError("need at least one sample")
    dual = dual_cone(body, tols)
    pairs = []

    if body.kind == "quadric":
        Q = body.quadric
        for x in _quadric_boundary_samples(body, m, seed):
            h = normalize(-Q @ x)
            a = AugBoundaryPoint(ProjPoint(x), ProjPoint(h))
            b = AugBoundaryPoint(ProjPoint(h), ProjPoint(x))
            pairs.append((a, b))
    else:
        F = body.facets()
        G = body.extreme_generators()
        candidates = []
        # face-interior points first, then vertex-facet incidences
        for f in F:
            tight = G[np.abs(G @ f) <= tols.membership]
            if tight.shape[0] == 0:
                continue
            candidates.append((normalize(tight.sum(axis=0)), normalize(f)))
        for g in G:
            for f in F:
                if abs(float(g @ f)) <= tols.membership:
                    candidates.append((normalize(g), normalize(f)))
        for i in range(m):
            x, h = candidates[i % len(candidates)]
            a = AugBoundaryPoint(ProjPoint(x), ProjPoint(h))
            b = AugBoundaryPoint(ProjPoint(h), ProjPoint(x))
            pairs.append((a, b))

    for a, b in pairs:
        if not a.valid_for(body):
            raise GeometryError("augmented boundary sample failed validation")
        if not b.valid_for(dual):
            raise GeometryError("dual augmented boundary sample failed validation")
    return pairs
