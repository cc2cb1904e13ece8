"""Halfspace-intersection kernel: extreme rays of {x : Ax >= 0}.

Double-description with floating-point pivots.  Rows are processed in
index order (lexicographic tie-breaking is the ordering itself), rays
are kept unit-norm, and a fixed degeneracy threshold decides which side
of a new halfspace a ray falls on.  Intended for desk dimensions
(ambient dimension <= 7 or so); no attempt at rational arithmetic.
"""

from __future__ import annotations

import numpy as np

DEGENERACY = 1e-10


class LinealityError(ValueError):
    """The constraint matrix does not pin down a pointed cone; callers
    must quotient out the lineality space first."""


def _normalize_rows(A: np.ndarray) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    nrm = np.linalg.norm(A, axis=1)
    keep = nrm > 0
    return A[keep] / nrm[keep, None]


def _initial_basis(A: np.ndarray, d: int) -> list[int]:
    """Greedy row selection by index order until rank d."""
    chosen: list[int] = []
    for i in range(A.shape[0]):
        trial = chosen + [i]
        s = np.linalg.svd(A[trial], compute_uv=False)
        if s[-1] > 1e-10 * s[0]:
            chosen = trial
            if len(chosen) == d:
                return chosen
    raise LinealityError(
        "constraints have rank %d < %d; cone is not pointed" % (len(chosen), d)
    )


def extreme_rays(A, tol: float = DEGENERACY) -> np.ndarray:
    """Extreme rays (unit rows) of the pointed cone {x : Ax >= 0}.

    Raises LinealityError when rank(A) < d.  The zero cone returns an
    empty (0, d) array.
    """
    A = _normalize_rows(A)
    if A.ndim != 2 or A.size == 0:
        raise ValueError("need at least one constraint row")
    d = A.shape[1]
    basis_idx = _initial_basis(A, d)
    B = A[basis_idx]
    rays = np.linalg.inv(B).T          # ray j solves B r = e_j
    nrm = np.linalg.norm(rays, axis=1, keepdims=True)
    rays = rays / nrm

    processed = list(basis_idx)
    for i in range(A.shape[0]):
        if i in basis_idx:
            continue
        a = A[i]
        vals = rays @ a
        pos = rays[vals > tol]
        zero = rays[np.abs(vals) <= tol]
        neg = rays[vals < -tol]
        if neg.shape[0] == 0:
            processed.append(i)
            rays = np.vstack([pos, zero])
            continue
        tight_rows = A[processed]
        new = []
        for rp in pos:
            vp = float(a @ rp)
            for rn in neg:
                if not _adjacent(rp, rn, tight_rows, d, tol):
                    continue
                vn = float(a @ rn)
                r = vp * rn - vn * rp
                n = np.linalg.norm(r)
                if n > tol:
                    new.append(r / n)
        parts = [p for p in (pos, zero, np.array(new).reshape(-1, d)) if p.size]
        rays = np.vstack(parts) if parts else np.zeros((0, d))
        rays = _dedupe(rays, tol)
        processed.append(i)
    return _dedupe(rays, tol)


def _adjacent(r1, r2, rows, d, tol) -> bool:
    """Algebraic adjacency: the constraints tight at both rays span a
    (d-2)-dimensional space."""
    t1 = np.abs(rows @ r1) <= tol
    t2 = np.abs(rows @ r2) <= tol
    common = rows[t1 & t2]
    if common.shape[0] < d - 2:
        return False
    if d == 2:
        return True
    s = np.linalg.svd(common, compute_uv=False)
    rank = int(np.sum(s > 1e-8 * s[0])) if s.size else 0
    return rank == d - 2


def _dedupe(rays: np.ndarray, tol: float) -> np.ndarray:
    if rays.shape[0] <= 1:
        return rays
    keep: list[int] = []
    for i in range(rays.shape[0]):
        dup = False
        for j in keep:
            if np.dot(rays[i], rays[j]) > 1.0 - 100.0 * tol:
                dup = True
                break
        if not dup:
            keep.append(i)
    return rays[keep]


def in_cone(x, generators, tol: float = 1e-8) -> bool:
    """Is x a nonnegative combination of the generator rows?"""
    from scipy.optimize import nnls

    G = _normalize_rows(generators)
    v = np.asarray(x, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        return True
    if G.shape[0] == 0:
        return False
    v = v / n
    _, resid = nnls(G.T, v)
    return bool(resid <= tol)


def cone_membership_residual(x, generators) -> float:
    from scipy.optimize import nnls

    G = _normalize_rows(generators)
    v = np.asarray(x, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        return 0.0
    if G.shape[0] == 0:
        return 1.0
    _, resid = nnls(G.T, v / n)
    return float(resid)


def _extreme_ray_prefilter(G: np.ndarray) -> np.ndarray:
    """Cheap superset of the extreme rays of a pointed generated cone.

    Slices the cone by a hyperplane transverse to the ray mean and keeps
    the rays that land on convex-hull vertices of the slice.  Returns
    the input unchanged when no transverse slice exists or the hull
    computation degenerates; the exact scan then does all the work.
    """
    from scipy.spatial import ConvexHull, QhullError

    c = G.mean(axis=0)
    h = G @ c
    if h.min() <= 1e-9 * max(1.0, np.linalg.norm(c)):
        return G
    P = G / h[:, None]
    Pc = P - P.mean(axis=0)
    _, s, Vt = np.linalg.svd(Pc, full_matrices=False)
    k = int(np.sum(s > 1e-9 * max(1.0, s[0])))
    if k == 0:
        return G[:1]
    Y = Pc @ Vt[:k].T
    if k == 1:
        idx = sorted({int(np.argmin(Y[:, 0])), int(np.argmax(Y[:, 0]))})
        return G[idx]
    try:
        hull = ConvexHull(Y)
    except QhullError:
        return G
    return G[np.sort(np.unique(hull.vertices))]


def minimal_generators(generators, tol: float = 1e-8) -> np.ndarray:
    """Drop generators that are nonnegative combinations of the rest.

    Scans in index order against the current survivor set, so the
    result is deterministic.  Large inputs go through a hull slice
    first; the quadratic scan is hopeless at orbit-closure sizes.
    """
    G = _normalize_rows(generators)
    if G.shape[0] > 64:
        G = _extreme_ray_prefilter(G)
        if G.shape[0] > 1500:
            # every survivor is a hull vertex already; the quadratic
            # scan below is unaffordable at this size and would only
            # drop near-duplicates within facet tolerance
            return G
    m = G.shape[0]
    alive = list(range(m))
    for i in range(m):
        others = [j for j in alive if j != i]
        if not others:
            continue
        if in_cone(G[i], G[others], tol):
            alive.remove(i)
    return G[alive]
