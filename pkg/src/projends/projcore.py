"""Arithmetic on the projective sphere.

Points live on the unit sphere in R^{n+1} and antipodal points are
distinct, so the classes here model the double cover of projective
space.  Inputs meant projectively (either lift acceptable) go through
:func:`lift`, which picks the representative whose first nonzero
coordinate is positive.

The module houses points, great subspaces, projective maps, the cross
ratio of four collinear points, radial projection to the linking
sphere of a vertex, and spherical distances between compact sets.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT, Tolerances


class GeometryError(Exception):
    """Raised when numerical data does not describe a valid object or a
    geometric operation is undefined for its inputs."""


def _as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise GeometryError("expected a 1-d coordinate vector, got shape %s" % (v.shape,))
    if not np.all(np.isfinite(v)):
        raise GeometryError("non-finite coordinates")
    return v


def normalize(x) -> np.ndarray:
    """Scale a vector to unit Euclidean norm (positive scaling only)."""
    v = _as_vector(x)
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        raise GeometryError("cannot normalize the zero vector")
    return v / nrm


class ProjPoint:
    """A point of the projective sphere: a unit vector in R^{n+1}.

    Equality is coordinatewise within the ``equality`` tolerance;
    antipodal points are *not* equal.
    """

    __slots__ = ("coords",)

    def __init__(self, coords):
        self.coords = normalize(coords)

    @classmethod
    def lift(cls, coords) -> "ProjPoint":
        """Lift projective-space input: flip sign so the first nonzero
        coordinate is positive."""
        v = normalize(coords)
        idx = np.nonzero(np.abs(v) > 1e-13)[0]
        if idx.size and v[idx[0]] < 0:
            v = -v
        return cls(v)

    @property
    def dim(self) -> int:
        """Dimension n of the sphere the point lives on."""
        return self.coords.shape[0] - 1

    def antipode(self) -> "ProjPoint":
        return ProjPoint(-self.coords)

    def close_to(self, other: "ProjPoint", tol: float = DEFAULT.equality) -> bool:
        return bool(np.max(np.abs(self.coords - other.coords)) <= tol)

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.close_to(other)

    def __repr__(self):
        return "ProjPoint(%s)" % np.array2string(self.coords, precision=6)


def sphere_distance(p: ProjPoint, q: ProjPoint) -> float:
    """Geodesic (angular) distance on the sphere, in radians.

    Computed from the chord length, which stays accurate for nearly
    equal points where arccos of the dot product loses half the digits.
    """
    chord = 0.5 * float(np.linalg.norm(p.coords - q.coords))
    return 2.0 * float(np.arcsin(min(chord, 1.0)))


class Subspace:
    """A great subspace, stored as an orthonormal basis of its linear span.

    ``dim`` is the linear dimension; the projective dimension is one
    less.
    """

    __slots__ = ("basis",)

    def __init__(self, basis):
        B = np.atleast_2d(np.asarray(basis, dtype=float))
        if B.size == 0:
            B = B.reshape(0, 0)
        gram = B @ B.T
        if B.shape[0] and np.max(np.abs(gram - np.eye(B.shape[0]))) > 1e-10:
            raise GeometryError("basis is not orthonormal; use Subspace.spanned_by")
        self.basis = B

    @classmethod
    def spanned_by(cls, vectors, tol: float = 1e-12) -> "Subspace":
        """Orthonormalize a spanning set (SVD, rank cut at ``tol``
        relative to the top singular value)."""
        M = np.atleast_2d(np.asarray(vectors, dtype=float))
        if M.size == 0:
            return cls(np.zeros((0, M.shape[1] if M.ndim == 2 else 0)))
        u, s, vt = np.linalg.svd(M, full_matrices=False)
        if s.size == 0 or s[0] == 0.0:
            return cls(np.zeros((0, M.shape[1])))
        rank = int(np.sum(s > tol * s[0]))
        return cls(vt[:rank])

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def contains(self, p, tol: float = DEFAULT.membership) -> bool:
        v = p.coords if isinstance(p, ProjPoint) else normalize(p)
        resid = v - self.projector() @ v
        return bool(np.linalg.norm(resid) <= tol)

    def contains_subspace(self, other: "Subspace", tol: float = DEFAULT.membership) -> bool:
        resid = other.basis - other.basis @ self.projector()
        return bool(resid.size == 0 or np.max(np.abs(resid)) <= tol)

    def orthogonal_complement(self) -> "Subspace":
        n = self.ambient
        if self.dim == 0:
            return Subspace(np.eye(n))
        u, s, vt = np.linalg.svd(self.basis)
        return Subspace(vt[self.dim:])

    def __repr__(self):
        return "Subspace(dim=%d, ambient=%d)" % (self.dim, self.ambient)


def intersect_subspaces(A: Subspace, B: Subspace, tol: float = 1e-9) -> Subspace:
    """Intersection of two great subspaces (kernel of the stacked
    orthogonal projectors)."""
    n = A.ambient
    P = np.vstack([np.eye(n) - A.projector(), np.eye(n) - B.projector()])
    u, s, vt = np.linalg.svd(P)
    null = vt[np.sum(s > tol):]
    return Subspace(null) if null.size else Subspace(np.zeros((0, n)))


class ProjMap:
    """A projective automorphism: an (n+1)x(n+1) matrix scaled so
    |det| = 1."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        M = np.asarray(matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise GeometryError("projective map must be square, got %s" % (M.shape,))
        if not np.all(np.isfinite(M)):
            raise GeometryError("non-finite matrix entries")
        sign, logdet = np.linalg.slogdet(M)
        if sign == 0 or not np.isfinite(logdet):
            raise GeometryError("singular matrix cannot act projectively")
        # rounding in slogdet would pollute an already-normalized matrix;
        # exact entries must survive for the exact spectrum path
        if abs(logdet) < 1e-12:
            self.matrix = M
        else:
            self.matrix = M * np.exp(-logdet / M.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0] - 1

    def inverse(self) -> "ProjMap":
        return ProjMap(np.linalg.inv(self.matrix))

    def compose(self, other: "ProjMap") -> "ProjMap":
        return ProjMap(self.matrix @ other.matrix)

    def __matmul__(self, other):
        if isinstance(other, ProjMap):
            return self.compose(other)
        return NotImplemented

    def __repr__(self):
        return "ProjMap(%s)" % np.array2string(self.matrix, precision=6)


def act(g: ProjMap, p: ProjPoint, dual: bool = False) -> ProjPoint:
    """Apply the map to a point; with ``dual`` set, apply the dual
    action (inverse transpose), which moves supporting functionals the
    way the map moves hyperplanes."""
    M = np.linalg.inv(g.matrix).T if dual else g.matrix
    return ProjPoint(M @ p.coords)


def act_many(g: ProjMap, coords: np.ndarray, dual: bool = False) -> np.ndarray:
    """Row-wise action on an array of unit vectors; rows renormalized."""
    M = np.linalg.inv(g.matrix).T if dual else g.matrix
    out = coords @ M.T
    nrm = np.linalg.norm(out, axis=1, keepdims=True)
    if np.any(nrm == 0):
        raise GeometryError("map sent a sample to zero")
    return out / nrm


def cross_ratio(o: ProjPoint, s: ProjPoint, q: ProjPoint, p: ProjPoint,
                tols: Tolerances = DEFAULT) -> float:
    """Cross ratio of four collinear points.

    In an affine chart on the common line with coordinates obar, sbar,
    qbar, pbar the value is
    (obar-qbar)(sbar-pbar) / ((sbar-qbar)(obar-pbar)).
    Computed chart-free from 2x2 determinants in the spanning plane, so
    any chart choice cancels exactly.
    """
    stack = np.vstack([o.coords, s.coords, q.coords, p.coords])
    u, sv, vt = np.linalg.svd(stack)
    if sv[0] == 0.0 or (sv.size > 2 and sv[2] / sv[0] > tols.collinearity):
        raise GeometryError("cross-ratio needs collinear points (rank > 2)")
    plane = vt[:2]
    a, b = stack @ plane[0], stack @ plane[1]

    def det2(i, j):
        return a[i] * b[j] - a[j] * b[i]

    num = det2(0, 2) * det2(1, 3)
    den = det2(1, 2) * det2(0, 3)
    if abs(den) < 1e-14:
        raise GeometryError("degenerate cross-ratio")
    return float(num / den)


def radial_project(v: ProjPoint, x: ProjPoint, tols: Tolerances = DEFAULT) -> ProjPoint:
    """Direction at the vertex ``v`` of the geodesic through ``x``: a
    point of the linking sphere (the unit sphere of the orthogonal
    complement of v)."""
    resid = x.coords - np.dot(x.coords, v.coords) * v.coords
    if np.linalg.norm(resid) <= tols.membership:
        raise GeometryError("undefined direction: point coincides with the vertex")
    return ProjPoint(resid)


def linking_basis(v: ProjPoint) -> np.ndarray:
    """Deterministic orthonormal basis of the hyperplane orthogonal to
    v, as rows.  Built from coordinate vectors (largest |v_i| dropped,
    lowest index wins ties) so repeated runs agree bit-for-bit."""
    n1 = v.coords.shape[0]
    j = int(np.argmax(np.abs(v.coords)))
    rows = []
    for i in range(n1):
        if i == j:
            continue
        w = np.zeros(n1)
        w[i] = 1.0
        w = w - np.dot(w, v.coords) * v.coords
        for r in rows:
            w = w - np.dot(w, r) * r
        nrm = np.linalg.norm(w)
        if nrm < 1e-12:
            raise GeometryError("degenerate linking basis")
        rows.append(w / nrm)
    return np.array(rows)


def induced_map(g: ProjMap, v: ProjPoint, tols: Tolerances = DEFAULT):
    """Matrix of the action induced on the linking sphere of a fixed
    point v, in the coordinates of :func:`linking_basis`.

    Requires g to fix v projectively.  Returns (U, A) with U the
    linking basis (rows) and A = U g U^T, so that radial projection is
    equivariant: the link coordinates of the image of x are parallel
    to A times the link coordinates of x.
    """
    gv = g.matrix @ v.coords
    lam = float(np.dot(gv, v.coords))
    if np.linalg.norm(gv - lam * v.coords) > tols.fixed_point * max(1.0, abs(lam)):
        raise GeometryError("vertex is not fixed by the map")
    U = linking_basis(v)
    return U, U @ g.matrix @ U.T


def hausdorff(K1, K2) -> float:
    """Spherical Hausdorff distance between finite point sets: the max
    of the two directed sup-inf angular distances."""
    D = _pairwise_angles(K1, K2)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def simple_distance(K1, K2) -> float:
    """Smallest angular distance between any pair drawn from the two
    sets."""
    return float(_pairwise_angles(K1, K2).min())


def _coords_array(K) -> np.ndarray:
    if isinstance(K, np.ndarray):
        A = np.atleast_2d(np.asarray(K, dtype=float))
    else:
        pts = list(K)
        if not pts:
            raise GeometryError("distance between point sets needs nonempty sets")
        A = np.vstack([p.coords if isinstance(p, ProjPoint) else normalize(p) for p in pts])
    if A.size == 0:
        raise GeometryError("distance between point sets needs nonempty sets")
    nrm = np.linalg.norm(A, axis=1, keepdims=True)
    return A / nrm


def _pairwise_angles(K1, K2) -> np.ndarray:
    A, B = _coords_array(K1), _coords_array(K2)
    out = np.empty((A.shape[0], B.shape[0]))
    block = max(1, 2_000_000 // max(B.shape[0] * B.shape[1], 1))
    for i in range(0, A.shape[0], block):
        diff = A[i:i + block, None, :] - B[None, :, :]
        chord = 0.5 * np.linalg.norm(diff, axis=2)
        out[i:i + block] = 2.0 * np.arcsin(np.minimum(chord, 1.0))
    return out
