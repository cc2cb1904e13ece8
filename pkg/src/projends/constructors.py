"""Ground-truth end constructions.

Factories for every classifier branch: cusp lattices inside a standard
parabolic, hyper-ideal cones over a hyperplane domain, quasi-lens
extensions with a translation part, quasi-join families with their
nilpotent lattice, and bending deformations of a hyperbolic end.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT, Tolerances
from .convex import ConeBody
from .ends import RadialEnd
from .projcore import GeometryError, ProjMap, ProjPoint
from .spectra import matrix_ball, spectrum


# ------------------------------------------------------------------- specs


@dataclass
class CuspSpec:
    """A cusp construction request: ambient dimension and the lattice of
    parabolic translations (row vectors in R^{n-1})."""

    n: int
    lattice: np.ndarray


@dataclass
class QuasiJoinSpec:
    """Block data for a quasi-join family.

    K2_gens are the leaf-space matrices S(g); lambda_v, v_g, O5 and a7
    give the remaining blocks, one entry per generator.  nil_lattice
    holds the translation vectors generating the nilpotent lattice.
    """

    n: int
    i0: int
    K2_gens: Sequence[np.ndarray]
    lambda_v: Sequence[float]
    v_g: Sequence[np.ndarray]
    O5: Sequence[np.ndarray]
    a7: Sequence[float]
    nil_lattice: np.ndarray


@dataclass
class BendSpec:
    """Bending data: the Klein eigenvalue of the distinguished curve,
    one deformation parameter (b for the unipotent type, s for the
    diagonal type), the generator indices to conjugate, and the indices
    whose curves cross the bending curve an odd number of times (those
    are premultiplied)."""

    lam: float
    b: float = 0.0
    s: float = 1.0
    partition: Tuple[int, ...] = ()
    cross: Tuple[int, ...] = ()


# ------------------------------------------------------------------- cusps


def _cusp_frame(n: int) -> np.ndarray:
    """Change of basis from null coordinates (u, y, w) to standard ones
    where the fixed null direction is (1, -1, 0, ..., 0)."""
    F = np.zeros((n + 1, n + 1))
    F[0, 0], F[1, 0] = 0.5, -0.5
    F[0, n], F[1, n] = 0.5, 0.5
    for j in range(1, n):
        F[j + 1, j] = 1.0
    return F


def _parabolic(n: int, t: np.ndarray) -> np.ndarray:
    """Unipotent translation by t in null coordinates; preserves
    |y|^2 - u*w."""
    P = np.eye(n + 1)
    P[0, 1:n] = 2.0 * t
    P[0, n] = float(t @ t)
    P[1:n, n] = t
    return P


def cusp_group(spec: CuspSpec, tols: Tolerances = DEFAULT) -> RadialEnd:
    """Lattice of parabolic translations fixing the null direction
    (1, -1, 0, ..., 0), one generator per lattice vector.

    The returned end carries the preserved Lorentz form as the
    attribute ``lorentz_form``; every generator satisfies
    g^T Q g = Q to working precision and has all eigenvalues one.
    """
    n = spec.n
    T = np.atleast_2d(np.asarray(spec.lattice, dtype=float))
    if T.shape[1] != n - 1:
        raise GeometryError(
            "lattice vectors live in R^%d, got length %d" % (n - 1, T.shape[1]))
    if np.linalg.matrix_rank(T, tol=1e-10) < T.shape[0]:
        raise GeometryError("degenerate lattice: vectors are dependent")
    F = _cusp_frame(n)
    Fi = np.linalg.inv(F)
    Q_null = np.zeros((n + 1, n + 1))
    Q_null[1:n, 1:n] = np.eye(n - 1)
    Q_null[0, n] = Q_null[n, 0] = -0.5
    Q = Fi.T @ Q_null @ Fi
    gens = [F @ _parabolic(n, t) @ Fi for t in T]
    for k, g in enumerate(gens):
        resid = float(np.abs(g.T @ Q @ g - Q).max())
        if resid > 1e-12:
            raise GeometryError(
                "generator %d does not preserve the form (residual %.3e)"
                % (k, resid))
    rng = np.random.default_rng(0)
    samples = []
    for _ in range(3):
        y = 0.25 * rng.uniform(-1.0, 1.0, n - 1)
        w = float(y @ y) + rng.uniform(0.2, 0.5)
        x_null = np.concatenate([[1.0], y, [w]])
        samples.append(ProjPoint(F @ x_null))
    vertex = ProjPoint([1.0, -1.0] + [0.0] * (n - 1))
    end = RadialEnd(vertex=vertex, gens=gens, domain_samples=samples,
                    tols=tols)
    end.lorentz_form = Q
    return end


# -------------------------------------------------------- hyperideal cones


def hyperideal_lens_cone(D_gens, Q, tols: Tolerances = DEFAULT):
    """Cone over a hyperplane domain from the pole of its hyperplane.

    The generators must span a hyperplane section meeting the ball of Q;
    the vertex is the polar point p = Q^{-1} h, which lies outside the
    closed ball exactly when the section is transversal.  Returns the
    pair (p, cone body over {p} and the domain generators).
    """
    D = np.atleast_2d(np.asarray(D_gens, dtype=float))
    n1 = D.shape[1]
    Q = np.asarray(Q, dtype=float)
    _, s, Vh = np.linalg.svd(D)
    null_dim = n1 - int(np.sum(s > 1e-10 * s[0]))
    if null_dim != 1:
        raise GeometryError(
            "domain generators span a subspace of codimension %d, "
            "not a hyperplane" % null_dim)
    h = Vh[-1]
    p = np.linalg.solve(Q, h)
    # p^T Q p = h^T Q^{-1} h > 0 is transversality of the hyperplane
    disc = float(h @ p)
    if disc <= 1e-10:
        raise GeometryError(
            "hyperplane is tangent to or misses the ball (h Q^-1 h = %.3e)"
            % disc)
    polarity = float(np.abs(D @ Q @ p).max()) / max(1.0, float(np.abs(p).max()))
    if polarity > 1e-10:
        raise GeometryError(
            "pole is not orthogonal to the domain (residual %.3e)" % polarity)
    vertex = ProjPoint.lift(p)
    body = ConeBody(np.vstack([vertex.coords[None, :], D]), tols=tols)
    return vertex, body


# --------------------------------------------------------- quasi-lens ends


def _split_blocks(g: np.ndarray, tol: float = 1e-10):
    """Split an n x n matrix fixing the last coordinate axis and its
    complementary hyperplane into (S, lambda_v)."""
    n = g.shape[0]
    off = max(float(np.abs(g[:n - 1, n - 1]).max()),
              float(np.abs(g[n - 1, :n - 1]).max()))
    if off > tol * max(1.0, float(np.abs(g).max())):
        raise GeometryError(
            "generator does not split off the vertex axis (residual %.3e)"
            % off)
    return g[:n - 1, :n - 1], float(g[n - 1, n - 1])


@dataclass
class TranslationReport:
    """Positive-translation diagnostics of a quasi-lens family: the
    per-word ratio v(w) / log(lambda_v / lambda_2) over the words where
    the vertex norm dominates, their infimum, and the comparison with
    the requested threshold."""

    ratios: dict = field(default_factory=dict)
    infimum: Optional[float] = None
    c1: Optional[float] = None
    positive: Optional[bool] = None
    degenerate: bool = False


def quasi_lens_group(G_gens, zeta, v, c1: Optional[float] = None,
                     L: int = 4, tols: Tolerances = DEFAULT) -> RadialEnd:
    """Quasi-lens family: each n x n generator splitting as
    (S(g), lambda_v) is extended by one dimension so the vertex
    eigenvalue becomes the Jordan block [[l, l*v(g)], [0, l]].

    v must give one translation per generator of G followed by one for
    zeta when present.  zeta has to commute with every generator.  The
    positive-translation diagnostics over the length-L ball are
    attached as ``translation_report``.
    """
    mats = [np.asarray(g, dtype=float) for g in G_gens]
    if zeta is not None:
        z = np.asarray(zeta, dtype=float)
        for g in mats:
            resid = float(np.abs(z @ g - g @ z).max())
            if resid > 1e-10 * max(1.0, float(np.abs(z @ g).max())):
                raise GeometryError(
                    "zeta must commute with G (residual %.3e)" % resid)
        mats = mats + [z]
    trans = [float(t) for t in v]
    if len(trans) != len(mats):
        raise GeometryError(
            "need one translation per generator, got %d for %d"
            % (len(trans), len(mats)))
    n = mats[0].shape[0]
    gens = []
    for g, t in zip(mats, trans):
        S, lam = _split_blocks(g)
        A = np.zeros((n + 1, n + 1))
        A[:n - 1, :n - 1] = S
        A[n - 1, n - 1] = lam
        A[n - 1, n] = lam * t
        A[n, n] = lam
        gens.append(A)
    rng = np.random.default_rng(0)
    samples = []
    for _ in range(2):
        x = rng.uniform(0.3, 1.0, n + 1)
        samples.append(ProjPoint(x))
    # the Jordan block [[l, l t], [0, l]] fixes the first of its two
    # coordinates; that is the join point of D * v
    vertex = ProjPoint(np.eye(n + 1)[n - 1])
    end = RadialEnd(vertex=vertex, gens=gens, domain_samples=samples,
                    tols=tols)
    end.translation_report = _translation_report(end, n, c1, L, tols)
    return end


def _translation_report(end: RadialEnd, n: int, c1, L: int,
                        tols: Tolerances) -> TranslationReport:
    rep = TranslationReport(c1=c1)
    rep.degenerate = all(
        abs(float(g[n - 1, n])) <= 1e-12 for g in end.gens)
    for w in matrix_ball(end.gens, L):
        if not w.letters:
            continue
        M = w.matrix
        lam = float(M[n, n])
        if abs(lam) < 1e-300:
            continue
        t = float(M[n - 1, n]) / lam
        lam2 = float(np.max(np.abs(np.linalg.eigvals(M[:n - 1, :n - 1]))))
        if abs(lam) <= lam2 * (1.0 + 1e-9):
            continue
        rep.ratios[w.label()] = t / float(np.log(abs(lam) / lam2))
    if rep.ratios:
        rep.infimum = min(rep.ratios.values())
        if c1 is not None:
            rep.positive = rep.infimum > c1
    return rep


# --------------------------------------------------------- quasi-join ends


def nil_translation(n: int, i0: int, v: np.ndarray) -> np.ndarray:
    """Nilpotent lattice element N(v) in split standard form: identity
    plus the translation column, its mirror row, and the half-norm
    corner entry."""
    v = np.asarray(v, dtype=float)
    if v.shape != (i0,):
        raise GeometryError("translation vector must have length %d" % i0)
    m = n - i0 - 1
    N = np.eye(n + 1)
    N[m + 1:m + 1 + i0, m] = v
    N[n, m] = 0.5 * float(v @ v)
    N[n, m + 1:m + 1 + i0] = v
    return N


def quasi_join_group(spec: QuasiJoinSpec,
                     tols: Tolerances = DEFAULT) -> RadialEnd:
    """Assemble a quasi-join family block-wise.

    Each generator is built from (S(g), lambda_v, v_g, O5, a7) with the
    fiber block lambda_v * O5, the translation column lambda_v * v_g,
    and the mirror row lambda_v * v_g O5; the result is normalized to
    unit determinant.  The nilpotent lattice elements are appended to
    the generator list and also kept on the ``nil_gens`` attribute.
    """
    n, i0 = spec.n, spec.i0
    m = n - i0 - 1
    if i0 < 1 or m < 1:
        raise GeometryError("need 1 <= i0 <= n - 2, got i0=%d, n=%d" % (i0, n))
    k = len(spec.K2_gens)
    if not (len(spec.lambda_v) == len(spec.v_g) == len(spec.O5)
            == len(spec.a7) == k):
        raise GeometryError("inconsistent block sizes: per-generator data "
                            "must all have length %d" % k)
    gens = []
    for S, lam, vg, O, a7 in zip(spec.K2_gens, spec.lambda_v, spec.v_g,
                                 spec.O5, spec.a7):
        S = np.asarray(S, dtype=float)
        O = np.atleast_2d(np.asarray(O, dtype=float))
        vg = np.atleast_1d(np.asarray(vg, dtype=float))
        if S.shape != (m, m) or O.shape != (i0, i0) or vg.shape != (i0,):
            raise GeometryError(
                "inconsistent block sizes: S %s, O5 %s, v %s for (n, i0) "
                "= (%d, %d)" % (S.shape, O.shape, vg.shape, n, i0))
        if float(np.abs(O.T @ O - np.eye(i0)).max()) > 1e-10:
            raise GeometryError("O5 block is not orthogonal")
        lam = float(lam)
        A = np.zeros((n + 1, n + 1))
        A[:m, :m] = S
        A[m, m] = lam
        A[m + 1:m + 1 + i0, m] = lam * vg
        A[m + 1:m + 1 + i0, m + 1:m + 1 + i0] = lam * O
        A[n, m] = float(a7)
        A[n, m + 1:m + 1 + i0] = lam * (vg @ O)
        A[n, n] = lam
        gens.append(ProjMap(A).matrix)
    nil = [nil_translation(n, i0, v)
           for v in np.atleast_2d(np.asarray(spec.nil_lattice, dtype=float))]
    rng = np.random.default_rng(0)
    samples = [ProjPoint(np.concatenate([rng.uniform(0.4, 1.2, n), [1.0]]))
               for _ in range(2)]
    vertex = ProjPoint(np.eye(n + 1)[n])
    end = RadialEnd(vertex=vertex, gens=gens + nil, domain_samples=samples,
                    tols=tols)
    end.nil_gens = nil
    return end


# ------------------------------------------------------------------ bending


def _bend_maps(spec: BendSpec):
    if spec.s <= 0.0:
        raise GeometryError("the diagonal bending parameter must be positive")
    if spec.s != 1.0 and spec.b != 0.0:
        raise GeometryError("choose one bending type: b or s, not both")
    if spec.s != 1.0:
        k = np.diag([spec.s, spec.s, spec.s, spec.s ** -3])
        ki = np.diag([1.0 / spec.s] * 3 + [spec.s ** 3])
    else:
        k = np.eye(4)
        k[3, 2] = spec.b
        ki = np.eye(4)
        ki[3, 2] = -spec.b
    return k, ki


def bending_map(spec: BendSpec) -> ProjMap:
    """The commuting deformation matrix alone: unit lower-triangular
    with entry b, or diag(s, s, s, 1/s^3)."""
    return ProjMap(_bend_maps(spec)[0])


def bending(spec: BendSpec, end: RadialEnd,
            tols: Tolerances = DEFAULT):
    """Bend an end along a distinguished hyperbolic curve.

    One generator must equal diag(lam, 1/lam, 1, 1); generators listed
    in ``partition`` are conjugated by the bending matrix, generators in
    ``cross`` (odd crossing number with the bending curve) are
    premultiplied, everything else is untouched.  The trivial parameters
    b=0, s=1 return the input end itself.
    """
    if spec.lam <= 1.0:
        raise GeometryError("the curve eigenvalue must exceed one")
    if end.dim != 3:
        raise GeometryError("bending is defined for three-dimensional ends")
    target = np.diag([spec.lam, 1.0 / spec.lam, 1.0, 1.0])
    hit = [i for i, g in enumerate(end.gens)
           if np.abs(np.asarray(g, dtype=float) - target).max() <= 1e-9]
    if not hit:
        raise GeometryError(
            "no generator is diag(%g, %g, 1, 1) within 1e-9"
            % (spec.lam, 1.0 / spec.lam))
    touched = set(spec.partition) | set(spec.cross)
    if set(spec.partition) & set(spec.cross):
        raise GeometryError("partition and cross indices must be disjoint")
    if touched and (min(touched) < 0 or max(touched) >= len(end.gens)):
        raise GeometryError("bending index out of range")
    if spec.s == 1.0 and spec.b == 0.0:
        return ProjMap(np.eye(4)), end
    k, ki = _bend_maps(spec)
    bent = []
    for i, g in enumerate(end.gens):
        M = np.asarray(g, dtype=float)
        if i in spec.partition:
            bent.append(k @ M @ ki)
        elif i in spec.cross:
            bent.append(k @ M)
        else:
            bent.append(g)
    out = RadialEnd(vertex=end.vertex, gens=bent,
                    domain_samples=end.domain_samples, tols=tols)
    return ProjMap(k), out
