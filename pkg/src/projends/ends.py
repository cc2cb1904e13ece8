"""Radial end classification.

The pieces: the link domain of a radial end (directions at the common
fixed vertex of the orbit of the sample points), the convexity
trichotomy of that domain, fiber structure of the non-properly-convex
case, eigenvalue-gap conditions over word balls, horosphericity, the
two-norm dichotomy of complete-affine ends, vertex relocation, and the
block diagnostics of quasi-joined ends.

Everything here is bounded evidence: group-level statements are only
ever certified on a finite word ball, and the reports say so.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import DEFAULT, Tolerances
from ._halfspace import minimal_generators, _extreme_ray_prefilter
from .convex import ConeBody, is_properly_convex
from .projcore import (GeometryError, ProjMap, ProjPoint, Subspace,
                       linking_basis)
from .spectra import (algebra_dimension, is_scalar, matrix_ball, matrix_key,
                      rel_spectrum, spectrum, translation_length,
                      unit_norm_deviation)


def _mat(g) -> np.ndarray:
    return g.matrix if isinstance(g, ProjMap) else np.asarray(g, dtype=float)


def vertex_eigenvalue(g, vertex: ProjPoint, tols: Tolerances = DEFAULT) -> float:
    """Signed eigenvalue of g at a fixed vertex."""
    M = _mat(g)
    gv = M @ vertex.coords
    lam = float(np.dot(gv, vertex.coords))
    resid = float(np.linalg.norm(gv - lam * vertex.coords))
    if resid > tols.fixed_point * max(1.0, abs(lam)):
        raise GeometryError("vertex is not fixed (residual %.3e)" % resid)
    return lam


# ------------------------------------------------------------------- types


@dataclass
class RadialEnd:
    """A radial end: the vertex, the maps fixing it, and sample points
    of an end neighborhood used to grow the link domain."""

    vertex: ProjPoint
    gens: list
    domain_samples: list = field(default_factory=list)
    tols: Tolerances = DEFAULT

    def __post_init__(self):
        for k, g in enumerate(self.gens):
            try:
                vertex_eigenvalue(g, self.vertex, self.tols)
            except GeometryError as exc:
                raise GeometryError(
                    "generator %d does not fix the vertex: %s" % (k, exc))

    @property
    def dim(self) -> int:
        """Dimension n of the ambient projective sphere."""
        return self.vertex.dim


class LinkClass(str):
    """Trichotomy value ("CA", "PC", "NPCC" or "indeterminate") that
    compares as a plain string but carries an explanation."""

    detail = ""


def _link_class(value: str, detail: str = "") -> LinkClass:
    out = LinkClass(value)
    out.detail = detail
    return out


@dataclass
class FiberData:
    """Structure of a non-properly-convex link: the flat sphere, the
    properly convex leaf space, and the words acting trivially on it.

    S_inf lives in link coordinates; K in the leaf-space coordinates of
    ``comp_basis`` (rows, orthonormal inside the link chart)."""

    i0: int
    S_inf: Subspace
    K: ConeBody
    NK_gens: list
    N_gens: list
    link_frame: np.ndarray = field(default=None, repr=False)
    comp_basis: np.ndarray = field(default=None, repr=False)


@dataclass
class MecResult:
    """Outcome of an eigenvalue-gap check over a word ball."""

    variant: str
    flag: str                       # pass | fail | indeterminate
    witness: Optional[str] = None   # extremal word label
    margin: float = 0.0
    detail: dict = field(default_factory=dict)


@dataclass
class HorosphericalResult:
    flag: bool
    max_deviation: float
    link_class: str
    parabolic_residual: Optional[float] = None
    form_residual: Optional[float] = None


@dataclass
class CaDichotomy:
    kind: str                       # UnitNorms | TwoNorms | violation | indeterminate
    table: list                     # per word: (label, norms, multiplicities)
    witness: Optional[str] = None
    detail: str = ""


@dataclass
class QuasiJoinElement:
    """Block data of one word in the adapted coordinates: leaf block S
    with couplings s1/s2 around the join eigenvalue a1, fiber block A5
    with shears C1/a4, and the vertex row (c2, a7, a8, a9)."""

    label: str
    S: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    a1: float
    a4: np.ndarray
    A5: np.ndarray
    C1: np.ndarray
    c2: np.ndarray
    a7: float
    a8: np.ndarray
    a9: float
    a5: float
    O5: np.ndarray
    v_g: np.ndarray
    mu_g: float
    Mg: np.ndarray
    alpha7: float
    lambda2: Optional[float]
    mu7: Optional[float]
    residuals: dict


@dataclass
class QuasiJoinDiagnostics:
    verdict: str                    # joined | quasi-joined | neither | uncertified
    elements: list
    residual_summary: dict
    inf_mu7: Optional[float]
    mu1_family: bool
    additivity_residual: Optional[float]
    basis: np.ndarray = field(repr=False, default=None)
    witness: Optional[str] = None


@dataclass
class EndReport:
    trichotomy: str
    mec_flags: dict
    horospherical: HorosphericalResult
    fiber: Optional[FiberData]
    shape_label: str
    shape_condition: str
    diagnostics: dict
    assumptions: list


# ------------------------------------------------------------- link domain


def link_domain(end: RadialEnd, L: int = 6, cap: int = 20000,
                tols: Tolerances = DEFAULT) -> ConeBody:
    """Cone hull, on the linking sphere of the vertex, of the orbit
    directions of the domain samples under words of length <= L.

    The body lives in the coordinates of ``linking_basis``; the induced
    generator actions in the same coordinates are attached as
    ``induced_gens`` together with the frame ``link_frame``.
    """
    if not end.domain_samples:
        raise GeometryError("link domain requires domain samples")
    U = linking_basis(end.vertex)
    X = np.array([p.coords for p in end.domain_samples])
    rays = []
    for w in matrix_ball(end.gens, L, cap=cap):
        Yl = (X @ w.matrix.T) @ U.T
        nrm = np.linalg.norm(Yl, axis=1)
        if np.any(nrm <= tols.membership):
            raise GeometryError(
                "sample orbit hits the vertex direction at word %s" % w.label())
        rays.append(Yl / nrm[:, None])
    R = np.vstack(rays)
    _, first = np.unique(np.round(R, 10), axis=0, return_index=True)
    body = ConeBody(R[np.sort(first)], tols=tols)
    body.link_frame = U
    body.induced_gens = [U @ _mat(g) @ U.T for g in end.gens]
    return body


def _antipodal_pairs(R: np.ndarray, gap: float):
    """Antipodal defect of a ray set and the index pairs that realize
    it within ``gap``.  Chunked so large regrown orbits never
    materialize the full Gram matrix."""
    m = R.shape[0]
    defect = np.inf
    pi, pj = [], []
    step = max(1, int(2 ** 22 // max(m, 1)))
    for i0 in range(0, m, step):
        blk = R[i0:i0 + step] @ R.T
        defect = min(defect, float(1.0 + blk.min()))
        ii, jj = np.nonzero(1.0 + blk <= gap)
        ii = ii + i0
        keep = ii < jj
        if np.any(keep):
            pi.append(ii[keep])
            pj.append(jj[keep])
    if pi:
        return defect, np.concatenate(pi), np.concatenate(pj)
    empty = np.array([], dtype=int)
    return defect, empty, empty


def _flat_frame(R: np.ndarray, ii: np.ndarray, jj: np.ndarray):
    """Gram frame of the unit pair differences: columns of V ordered by
    captured mass, plus the best single-pair projection onto each
    column."""
    n = R.shape[1]
    G = np.zeros((n, n))
    step = 65536
    for a in range(0, ii.size, step):
        D = R[ii[a:a + step]] - R[jj[a:a + step]]
        D = D / np.linalg.norm(D, axis=1)[:, None]
        G += D.T @ D
    w, V = np.linalg.eigh(G)
    V = V[:, np.argsort(w)[::-1]]
    reach = np.zeros(n)
    for a in range(0, ii.size, step):
        D = R[ii[a:a + step]] - R[jj[a:a + step]]
        D = D / np.linalg.norm(D, axis=1)[:, None]
        reach = np.maximum(reach, np.abs(D @ V).max(axis=0))
    return V, reach


def _flat_span(R: np.ndarray, ii: np.ndarray, jj: np.ndarray) -> Subspace:
    """Span of the near-antipodal directions, estimated from pair
    differences.  A finite orbit ray keeps an O(1/length) transverse
    part, which cancels in the difference of an antipodal pair.  A
    direction counts toward the span when some single pair points at
    least halfway into it; unlike a mass cut this cannot be swamped by
    pair multiplicity (measured: genuine directions reach 0.96+, the
    contamination stays below 0.26)."""
    V, reach = _flat_frame(R, ii, jj)
    return Subspace(V.T[reach >= 0.5])


def _evidence_residual(R: np.ndarray, ii: np.ndarray, jj: np.ndarray,
                       B: np.ndarray) -> float:
    """Largest part of any unit pair difference that falls outside the
    row span of B."""
    P = B.T @ B
    worst = 0.0
    step = 65536
    for a in range(0, ii.size, step):
        D = R[ii[a:a + step]] - R[jj[a:a + step]]
        D = D / np.linalg.norm(D, axis=1)[:, None]
        out = D - D @ P
        worst = max(worst, float(np.linalg.norm(out, axis=1).max()))
    return worst


def _invariance_residual(mats, B: np.ndarray) -> float:
    P = B.T @ B
    return max(float(np.abs(A @ B.T - P @ (A @ B.T)).max()) for A in mats)


def _nearest_invariant_subspace(mats, B0: np.ndarray, tol: float = 1e-12,
                                iters: int = 8):
    """Refine an approximate invariant subspace (rows) to the nearest
    exactly invariant one.

    Freezes the restriction N_A = B A B^T of each map and solves the
    linear joint-kernel problem A V = V N_A for the basis columns V;
    re-estimating N_A from the solution converges quadratically.  A
    gradient-blind direction (a shear acting trivially to first order)
    still shows up linearly here, which the residual-driven Newton
    correction cannot see.  Returns (basis, residual)."""
    _, _, Vt = np.linalg.svd(B0)
    B = Vt[:B0.shape[0]]
    k, n = B.shape
    spectra = [np.linalg.eigvals(A) for A in mats]
    best, best_resid = B, _invariance_residual(mats, B)
    for _ in range(iters):
        if best_resid <= tol:
            break
        ops = []
        for A, evA in zip(mats, spectra):
            NA = B @ A @ B.T
            # snap the estimated restriction spectrum onto the exact
            # one; a contaminated basis otherwise feeds its own error
            # back through NA and the iteration stalls at a fixed point
            w, W = np.linalg.eig(NA)
            w = np.array([evA[np.argmin(np.abs(evA - wi))] for wi in w])
            if np.linalg.cond(W) < 1e8:
                NA = np.real(W @ np.diag(w) @ np.linalg.inv(W))
            ops.append(np.kron(np.eye(k), A) - np.kron(NA.T, np.eye(n)))
        _, s, Vh = np.linalg.svd(np.vstack(ops))
        # the null space holds vec(B^T Q) for Q in the commutant of the
        # restrictions; aggregate enough trailing vectors to span it
        near = int(np.sum(s <= max(10.0 * s[-1], 1e-10 * s[0])))
        take = min(max(k, near), k * k, Vh.shape[0])
        agg = np.hstack([Vh[-(r + 1)].reshape((n, k), order="F")
                         for r in range(take)])
        U2, _, _ = np.linalg.svd(agg)
        B = U2[:, :k].T
        resid = _invariance_residual(mats, B)
        if resid < best_resid:
            best, best_resid = B, resid
    return best, best_resid


def classify_link(Sigma: ConeBody, tols: Tolerances = DEFAULT) -> LinkClass:
    """Convexity trichotomy of a link domain.

    Near-antipodal generator pairs are checked first: their span tells
    a full hemisphere (CA) apart from a partial flat (NPCC).  Without
    them the domain must be pointed with a definite margin to count as
    properly convex; anything in between is indeterminate.
    """
    if Sigma.kind == "quadric":
        if Sigma.properly_convex:
            return _link_class("PC", "ball-signature quadric")
        return _link_class("indeterminate", "quadric without ball signature")
    n = Sigma.ambient
    if Sigma.dim < n:
        return _link_class(
            "indeterminate",
            "hull spans %d of %d link dimensions" % (Sigma.dim, n))
    R = Sigma.generators
    defect, ii, jj = _antipodal_pairs(R, tols.link_antipodal_gap)
    if defect <= tols.link_antipodal_gap:
        flat = _flat_span(R, ii, jj)
        if flat.dim >= n - 1:
            return _link_class(
                "CA", "flat span fills the equator (dim %d)" % flat.dim)
        return _link_class(
            "NPCC", "flat span dimension %d of %d" % (flat.dim, n))
    if defect <= 4.0 * tols.link_antipodal_gap:
        # a slowly closing orbit (parabolic directions shrink like the
        # inverse word length) can hover just above the gap; a genuinely
        # pointed hull sits near defect 1, so this band is undecided
        return _link_class(
            "indeterminate",
            "antipodal defect %.3g is marginal" % defect)
    if Sigma.pointedness_margin >= tols.link_pointed_margin:
        return _link_class(
            "PC", "pointedness margin %.3g" % Sigma.pointedness_margin)
    return _link_class(
        "indeterminate",
        "antipodal defect %.3g, margin %.3g" % (defect,
                                                Sigma.pointedness_margin))


def _link_with_class(end: RadialEnd, L: int, tols: Tolerances):
    """Link domain plus its class, regrowing the orbit once (to 4L)
    when the first pass cannot decide."""
    Sigma = link_domain(end, L, tols=tols)
    cls = classify_link(Sigma, tols)
    if cls == "indeterminate":
        Sigma = link_domain(end, 4 * L, tols=tols)
        cls = classify_link(Sigma, tols)
    return Sigma, cls


# -------------------------------------------------------------- fiber data


def _complement_basis(B: np.ndarray, n: int) -> np.ndarray:
    """Deterministic orthonormal basis (rows) of the orthogonal
    complement of the row span of B, built from coordinate vectors in
    index order."""
    rows = []
    for i in range(n):
        w = np.zeros(n)
        w[i] = 1.0
        if B.size:
            w = w - B.T @ (B @ w)
        for r in rows:
            w = w - np.dot(w, r) * r
        nrm = np.linalg.norm(w)
        if nrm > 1e-9:
            rows.append(w / nrm)
    return np.array(rows)


def fiber_data(end: RadialEnd, Sigma: ConeBody, L: int = 3,
               tols: Tolerances = DEFAULT) -> FiberData:
    """Flat sphere, leaf space and leaf-trivial words of an NPCC link.

    The flat sphere is the invariant closure of the span of the
    near-antipodal directions; the leaf space is the projection of the
    hull onto its orthogonal complement inside the link chart.
    """
    cls = classify_link(Sigma, tols)
    if cls != "NPCC":
        raise GeometryError("fiber data requires an NPCC link (got %s)" % cls)
    U = getattr(Sigma, "link_frame", None)
    if U is None:
        U = linking_basis(end.vertex)
    induced = getattr(Sigma, "induced_gens", None)
    if induced is None:
        induced = [U @ _mat(g) @ U.T for g in end.gens]
    n = Sigma.ambient
    R = Sigma.generators
    _, ii, jj = _antipodal_pairs(R, tols.link_antipodal_gap)
    if ii.size == 0:
        raise GeometryError("NPCC structure not detected at tolerance")
    V, reach = _flat_frame(R, ii, jj)
    k0 = max(1, int(np.sum(reach >= 0.5)))
    S = None
    polish_resid = np.inf
    for k in range(k0, n - 1):
        B, polish_resid = _nearest_invariant_subspace(induced, V.T[:k])
        if polish_resid > 1e-8:
            continue
        # the polish can land on an unrelated invariant axis (an
        # attracting direction is always on offer); only a span that
        # still carries the antipodal evidence counts.  A sparse pair
        # sample may under-seed the dimension, hence the escalation.
        if _evidence_residual(R, ii, jj, B) <= 0.35:
            S = Subspace(B)
            break
    if S is None:
        raise GeometryError(
            "flat sphere did not converge to an invariant subspace "
            "(residual %.3e)" % polish_resid)
    for _ in range(n):
        imgs = [S.basis]
        for A in induced:
            imgs.append((A @ S.basis.T).T)
        grown = Subspace.spanned_by(np.vstack(imgs))
        if grown.dim == S.dim:
            break
        S = grown
    i0 = S.dim
    if i0 < 1 or i0 > n - 2:
        raise GeometryError("NPCC structure not detected at tolerance")
    for A in induced:
        img = (A @ S.basis.T).T
        if np.max(np.abs(img - img @ S.projector())) > 1e-8 * max(1.0, np.abs(A).max()):
            raise GeometryError("flat sphere is not invariant at tolerance")
    C = _complement_basis(S.basis, n)
    proj = R @ C.T
    nrm = np.linalg.norm(proj, axis=1)
    keep = nrm > 1e-7
    if not np.any(keep):
        raise GeometryError("NPCC structure not detected at tolerance")
    Kr = proj[keep] / nrm[keep, None]
    _, first = np.unique(np.round(Kr, 10), axis=0, return_index=True)
    Kr = Kr[np.sort(first)]
    if Kr.shape[0] > 64:
        Kr = _extreme_ray_prefilter(Kr)
    # probe pointedness before the exact reduction: the quadratic scan
    # inside it assumes a pointed input and is unaffordable otherwise
    if not is_properly_convex(ConeBody(Kr, tols=tols)):
        raise GeometryError("NPCC structure not detected at tolerance")
    # only the extreme rays matter for the hull, and the descent used by
    # translation lengths scales with the generator count
    K = ConeBody(minimal_generators(Kr), tols=tols)
    NK = [C @ A @ C.T for A in induced]
    N_words = []
    for w in matrix_ball(end.gens, L, cap=4000):
        if not w.letters:
            continue
        Aw = U @ w.matrix @ U.T
        if is_scalar(C @ Aw @ C.T, tol=1e-7):
            N_words.append(w)
    return FiberData(i0=i0, S_inf=S, K=K, NK_gens=NK, N_gens=N_words,
                     link_frame=U, comp_basis=C)


def _ambient_flat_span(fiber: FiberData, vertex: ProjPoint) -> Subspace:
    """Span, in ambient coordinates, of the flat sphere together with
    the vertex line."""
    rows = np.vstack([fiber.S_inf.basis @ fiber.link_frame,
                      vertex.coords[None, :]])
    return Subspace.spanned_by(rows)


# ----------------------------------------------------- eigenvalue conditions


_MEC_VARIANTS = ("middle", "weak", "uniform", "weak_uniform", "weak_npcc")


def check_mec(end: RadialEnd, variant: str, L: int = 6,
              C_search: float = 1e3, tols: Tolerances = DEFAULT,
              ball=None, link: Optional[ConeBody] = None,
              fiber: Optional[FiberData] = None) -> MecResult:
    """Evaluate an eigenvalue-gap condition over the word ball.

    middle: the top norm strictly exceeds the vertex norm for every
    nonscalar word.  weak: whenever the vertex norm is maximal its
    class has multiplicity at least two.  uniform / weak_uniform: a
    two-sided comparison of log-gaps with translation lengths admits a
    constant below C_search.  weak_npcc: the top norm is attained
    outside the flat span and dominates the vertex norm.
    """
    if variant not in _MEC_VARIANTS:
        raise GeometryError("unknown eigenvalue condition %r" % variant)
    if ball is None:
        ball = matrix_ball(end.gens, L)
    if variant == "middle":
        return _mec_middle(end, ball, tols)
    if variant == "weak":
        return _mec_weak(end, ball, tols)
    if variant == "weak_npcc":
        return _mec_weak_npcc(end, ball, L, tols, link, fiber)
    return _mec_uniform(end, variant, ball, L, C_search, tols, link, fiber)


def _mec_middle(end: RadialEnd, ball, tols: Tolerances) -> MecResult:
    worst = None
    worst_ratio = np.inf
    for w in ball:
        if is_scalar(w.matrix):
            continue
        lam_v = abs(vertex_eigenvalue(w.matrix, end.vertex, tols))
        ratio = spectrum(w.matrix, tols).norms[0] / lam_v
        if ratio < worst_ratio:
            worst_ratio = ratio
            worst = w
    if worst is None:
        return MecResult("middle", "indeterminate", None, 0.0,
                         {"note": "ball contains only scalar words"})
    flag = "pass" if worst_ratio > 1.0 + 1e-9 else "fail"
    return MecResult("middle", flag, worst.label(), worst_ratio - 1.0,
                     {"min_ratio": float(worst_ratio)})


def _mec_weak(end: RadialEnd, ball, tols: Tolerances) -> MecResult:
    for w in ball:
        lam_v = abs(vertex_eigenvalue(w.matrix, end.vertex, tols))
        spec = spectrum(w.matrix, tols)
        cls = spec.class_of_norm(lam_v)
        if cls is None:
            return MecResult("weak", "indeterminate", w.label(), 0.0,
                             {"note": "vertex norm unmatched among classes"})
        if cls.mu >= spec.norms[0] * (1.0 - 1e-9) and cls.multiplicity < 2:
            return MecResult("weak", "fail", w.label(), 0.0,
                             {"note": "maximal vertex norm has multiplicity 1"})
    return MecResult("weak", "pass")


def _mec_weak_npcc(end: RadialEnd, ball, L: int, tols: Tolerances,
                   link: Optional[ConeBody],
                   fiber: Optional[FiberData]) -> MecResult:
    if fiber is None:
        if link is None:
            link, cls = _link_with_class(end, L, tols)
        fiber = fiber_data(end, link, tols=tols)
    V = _ambient_flat_span(fiber, end.vertex)
    worst = None
    worst_margin = np.inf
    for w in ball:
        rel = rel_spectrum(w.matrix, V, end.vertex, tols)
        lam_bar = spectrum(w.matrix, tols).norms[0]
        margin = min(rel.lambda1 / rel.lambda_vertex, rel.lambda1 / lam_bar)
        if margin < worst_margin:
            worst_margin = margin
            worst = w
    flag = "pass" if worst_margin >= 1.0 - 1e-9 else "fail"
    return MecResult("weak_npcc", flag,
                     worst.label() if worst is not None else None,
                     worst_margin - 1.0, {"min_ratio": float(worst_margin)})


def _length_estimate(K: ConeBody, A: np.ndarray, tols: Tolerances) -> float:
    """Translation-length estimate of the induced word action, falling
    back to the eigenvalue log ratio when the sampled body is not
    exactly invariant.  The ratio equals the displacement infimum of a
    semisimple map whose axis lies in the body, so both routes use the
    same metric convention."""
    try:
        return translation_length(K, A, seeds=16, descents=4,
                                  tols=tols).value
    except GeometryError:
        norms = np.abs(np.linalg.eigvals(A))
        lo = max(float(norms.min()), 1e-300)
        return float(np.log(float(norms.max()) / lo))


def _mec_uniform(end: RadialEnd, variant: str, ball, L: int,
                 C_search: float, tols: Tolerances,
                 link: Optional[ConeBody],
                 fiber: Optional[FiberData]) -> MecResult:
    if fiber is None:
        if link is None:
            link, cls = _link_with_class(end, L, tols)
        else:
            cls = classify_link(link, tols)
        if cls == "NPCC":
            fiber = fiber_data(end, link, tols=tols)
    if fiber is not None:
        K_body = fiber.K
        U, C = fiber.link_frame, fiber.comp_basis

        def length_matrix(w):
            return C @ (U @ w.matrix @ U.T) @ C.T
    else:
        if cls != "PC":
            raise GeometryError(
                "uniform gap condition needs a properly convex link or leaf space")
        K_body = link
        U = getattr(link, "link_frame", None)
        if U is None:
            U = linking_basis(end.vertex)

        def length_matrix(w):
            return U @ w.matrix @ U.T

    if variant == "weak_uniform":
        weak = _mec_weak(end, ball, tols)
        if weak.flag != "pass":
            return MecResult("weak_uniform", weak.flag, weak.witness, 0.0,
                             {"note": "multiplicity condition failed"})

    # translation lengths are the expensive part; a shorter sub-ball
    # keeps the fit usable inside larger classification runs
    Lu = min(L, 4)
    C_fit = 1.0
    worst = None
    used = 0
    for w in ball:
        if len(w) > Lu:
            break
        if is_scalar(w.matrix):
            continue
        lam_v = abs(vertex_eigenvalue(w.matrix, end.vertex, tols))
        r = float(np.log(spectrum(w.matrix, tols).norms[0] / lam_v))
        if variant == "weak_uniform" and r <= 1e-9:
            continue
        ell = _length_estimate(K_body, length_matrix(w), tols)
        if r <= 1e-9 and ell <= 1e-6:
            continue
        if r <= 1e-9 or ell <= 1e-6:
            return MecResult(variant, "fail", w.label(), 0.0,
                             {"log_ratio": r, "length": ell,
                              "ball_length": Lu})
        used += 1
        local = max(r / ell, ell / r)
        if local > C_fit:
            C_fit = local
            worst = w
    if used == 0:
        return MecResult(variant, "indeterminate", None, 0.0,
                         {"note": "no word with a usable gap",
                          "ball_length": Lu})
    feasible = C_fit <= C_search - 1e-9
    return MecResult(variant, "pass" if feasible else "fail",
                     worst.label() if worst is not None else None,
                     C_search - C_fit,
                     {"C": float(C_fit), "ball_length": Lu})


# ----------------------------------------------------------- horosphericity


def _sym_basis(n1: int):
    out = []
    for i in range(n1):
        for j in range(i, n1):
            E = np.zeros((n1, n1))
            E[i, j] = E[j, i] = 1.0
            out.append(E)
    return out


def _invariant_lorentz_form(mats):
    """Invariant symmetric form of ball signature from the null space
    of the stacked invariance operator; returns (Q, residual) or
    (None, residual) when no candidate has the right signature."""
    n1 = mats[0].shape[0]
    Es = _sym_basis(n1)
    cols = [np.concatenate([(M.T @ E @ M - E).ravel() for M in mats])
            for E in Es]
    Op = np.array(cols).T
    _, sv, Vt = np.linalg.svd(Op)
    if sv[0] <= 0:
        return None, 1.0
    take = [k for k in range(len(sv)) if sv[k] <= 1e-9 * sv[0]]
    if not take:
        take = [len(sv) - 1]
    cands = [Vt[k] for k in take]
    for a in range(len(take)):
        for b in range(a + 1, len(take)):
            cands.append(Vt[take[a]] + Vt[take[b]])
            cands.append(Vt[take[a]] - Vt[take[b]])
    for vec in cands:
        Q = sum(c * E for c, E in zip(vec, Es))
        w = np.linalg.eigvalsh(Q)
        scale = float(np.abs(w).max())
        if scale <= 0:
            continue
        Q = Q / scale
        w = w / scale
        if int(np.sum(w < -1e-7)) == n1 - 1:
            Q = -Q
            w = -w[::-1]
        if int(np.sum(w < -1e-7)) == 1 and int(np.sum(w > 1e-7)) == n1 - 1:
            resid = max(float(np.abs(M.T @ Q @ M - Q).max()) for M in mats)
            return Q, resid
    return None, float(sv[-1] / sv[0])


def _parabolic_residual(mats, Q: np.ndarray, vertex: ProjPoint) -> float:
    """Residual of the generators against the stabilizer pattern of a
    null direction: unipotent corners, zero lower blocks, orthogonal
    rotation part, in the null frame (vertex, tangent, opposite)."""
    n1 = Q.shape[0]
    v = vertex.coords
    if abs(float(v @ Q @ v)) > 1e-6:
        return 1.0
    u = Q @ v
    den = float(u @ u)
    if den <= 1e-12:
        return 1.0
    z = u / den
    z = z - 0.5 * float(z @ Q @ z) * v
    T = []
    for i in range(n1):
        w = np.zeros(n1)
        w[i] = 1.0
        w = w - float(w @ Q @ z) * v - float(w @ Q @ v) * z
        for t in T:
            w = w - float(w @ Q @ t) * t
        nq = float(w @ Q @ w)
        if nq > 1e-9:
            T.append(w / np.sqrt(nq))
    if len(T) != n1 - 2:
        return 1.0
    F = np.column_stack([v] + T + [z])
    Fi = np.linalg.inv(F)
    resid = 0.0
    for M in mats:
        G = Fi @ M @ F
        c = float(G[0, 0])
        R = G[1:-1, 1:-1]
        resid = max(resid,
                    float(np.abs(G[1:, 0]).max()),
                    float(np.abs(G[-1, 1:-1]).max()),
                    abs(float(G[-1, -1]) - c),
                    abs(abs(c) - 1.0),
                    float(np.abs(R.T @ R - np.eye(n1 - 2)).max()))
    return float(resid)


def is_horospherical(end: RadialEnd, L: int = 6, tols: Tolerances = DEFAULT,
                     ball=None, link_cls=None) -> HorosphericalResult:
    """Bounded-evidence horosphericity: every ball word has all
    eigenvalue norms within 1e-7 of one and the link is complete
    affine.  On success the generators are matched against the
    stabilizer of a null direction of an invariant Lorentz form and the
    residual of that conjugation is reported."""
    if ball is None:
        ball = matrix_ball(end.gens, L)
    dev = 0.0
    for w in ball:
        dev = max(dev, unit_norm_deviation(w.matrix))
    if link_cls is None:
        _, link_cls = _link_with_class(end, L, tols)
    if not (dev <= 1e-7 and link_cls == "CA"):
        return HorosphericalResult(False, dev, str(link_cls))
    mats = [_mat(g) for g in end.gens]
    Q, form_resid = _invariant_lorentz_form(mats)
    if Q is None:
        return HorosphericalResult(True, dev, str(link_cls),
                                   parabolic_residual=1.0,
                                   form_residual=form_resid)
    pat = _parabolic_residual(mats, Q, end.vertex)
    return HorosphericalResult(True, dev, str(link_cls),
                               parabolic_residual=max(pat, form_resid),
                               form_residual=form_resid)


# ------------------------------------------------------ two-norm dichotomy


def ca_dichotomy(end: RadialEnd, L: int = 6, tols: Tolerances = DEFAULT,
                 ball=None, link_cls=None) -> CaDichotomy:
    """Norm-class dichotomy of a complete-affine end over the ball:
    either every word has all norms one, or every word carries at most
    two norm classes with the vertex class simple whenever two are
    present.  Anything else is reported as a violation."""
    if link_cls is None:
        _, link_cls = _link_with_class(end, L, tols)
    if link_cls != "CA":
        raise GeometryError(
            "dichotomy requires a complete-affine link (got %s)" % link_cls)
    if ball is None:
        ball = matrix_ball(end.gens, L)
    table = []
    all_unit = True
    saw_two = False
    for w in ball:
        spec = spectrum(w.matrix, tols)
        if spec.indeterminate:
            return CaDichotomy("indeterminate", table, w.label(),
                               "norm classes too close to separate")
        table.append((w.label(), tuple(spec.norms),
                      tuple(c.multiplicity for c in spec.norm_classes)))
        if unit_norm_deviation(w.matrix) <= 1e-7:
            continue
        all_unit = False
        k = len(spec.norm_classes)
        if k > 2:
            return CaDichotomy("violation", table, w.label(),
                               "more than two eigenvalue norms (%d)" % k)
        if k < 2:
            return CaDichotomy("indeterminate", table, w.label(),
                               "norm deviation without class separation")
        lam_v = abs(vertex_eigenvalue(w.matrix, end.vertex, tols))
        cls = spec.class_of_norm(lam_v)
        if cls is None:
            return CaDichotomy("indeterminate", table, w.label(),
                               "vertex norm unmatched among classes")
        if cls.multiplicity != 1:
            return CaDichotomy("violation", table, w.label(),
                               "vertex norm class has multiplicity %d"
                               % cls.multiplicity)
        saw_two = True
    if all_unit:
        return CaDichotomy("UnitNorms", table)
    if saw_two:
        return CaDichotomy("TwoNorms", table)
    return CaDichotomy("indeterminate", table, None,
                       "no word with two norm classes")


# ------------------------------------------------------------- re-vertexing


_COMBO_WEIGHTS = (1.0, 0.37, 0.151, 0.0713, 0.02941, 0.011, 0.00447)


def _polish_common_eigvec(mats, x0: np.ndarray) -> np.ndarray:
    """One joint null-space refinement of an approximate common
    eigenvector (eigenvalues re-estimated from x0)."""
    x0 = x0 / np.linalg.norm(x0)
    rows = []
    for M in mats:
        lam = float(x0 @ M @ x0)
        rows.append(M - lam * np.eye(M.shape[0]))
    _, _, Vt = np.linalg.svd(np.vstack(rows))
    x = Vt[-1]
    if np.dot(x, x0) < 0:
        x = -x
    return x if abs(np.dot(x, x0)) > 0.5 else x0


def _common_fixed_directions(mats, tol: float = 1e-7):
    """Unit directions fixed (projectively) by every matrix, found from
    eigenvectors of fixed generic combinations and polished by a joint
    null-space solve.  Signs follow the first-nonzero-positive lift."""
    n = mats[0].shape[0]
    combos = [sum(w * M for w, M in zip(_COMBO_WEIGHTS, mats))]
    if len(mats) > 1:
        rev = tuple(reversed(_COMBO_WEIGHTS[:len(mats)]))
        combos.append(sum(w * M for w, M in zip(rev, mats)))
    combos.extend(mats[:2])
    out = []
    for A in combos:
        _, vecs = np.linalg.eig(A)
        for j in range(n):
            x = vecs[:, j]
            if np.abs(x.imag).max() > 1e-9 * np.abs(x).max():
                continue
            x = _polish_common_eigvec(mats, np.real(x))
            ok = True
            for M in mats:
                y = M @ x
                lam = float(x @ y)
                if np.linalg.norm(y - lam * x) > tol * max(1.0, abs(lam)):
                    ok = False
                    break
            if not ok:
                continue
            idx = np.nonzero(np.abs(x) > 1e-12)[0]
            if idx.size and x[idx[0]] < 0:
                x = -x
            if not any(np.allclose(x, z, atol=1e-8) for z in out):
                out.append(x)
    return out


def revertex(end: RadialEnd, L: int = 6, tols: Tolerances = DEFAULT) -> RadialEnd:
    """Move the vertex of a two-norm complete-affine end to the common
    fixed point inside the complementary invariant hyperspace, chosen
    so that the new link is NPCC with fiber dimension n-2."""
    ca = ca_dichotomy(end, min(L, 4), tols)
    if ca.kind != "TwoNorms":
        raise GeometryError(
            "re-vertexing requires a two-norm end (got %s)" % ca.kind)
    mats = [_mat(g) for g in end.gens]
    n1 = mats[0].shape[0]
    A_space = None
    for w in matrix_ball(end.gens, min(L, 4)):
        spec = spectrum(w.matrix, tols)
        if spec.indeterminate or len(spec.norm_classes) != 2:
            continue
        lam_v = abs(vertex_eigenvalue(w.matrix, end.vertex, tols))
        for c in spec.norm_classes:
            if c.multiplicity == n1 - 1 \
                    and abs(c.mu - lam_v) > 1e-7 * max(c.mu, lam_v):
                A_space = c.subspace
                break
        if A_space is not None:
            break
    if A_space is None:
        raise GeometryError("re-vertexing failed: no invariant hyperspace")
    P = A_space.projector()
    for M in mats:
        img = (M @ A_space.basis.T).T
        if np.max(np.abs(img - img @ P)) > 1e-7 * max(1.0, np.abs(M).max()):
            raise GeometryError("re-vertexing failed: hyperspace not invariant")
    B = A_space.basis
    restricted = [B @ M @ B.T for M in mats]
    cands = _common_fixed_directions(restricted)
    cands.sort(key=lambda x: tuple(np.round(x, 12)))
    for x in cands:
        q = ProjPoint.lift(B.T @ x)
        if abs(float(np.dot(q.coords, end.vertex.coords))) > 1.0 - 1e-9:
            continue
        try:
            moved = RadialEnd(vertex=q, gens=end.gens,
                              domain_samples=end.domain_samples, tols=end.tols)
            Sigma, cls = _link_with_class(moved, L, tols)
            if cls != "NPCC":
                continue
            fib = fiber_data(moved, Sigma, tols=tols)
        except GeometryError:
            continue
        if fib.i0 == n1 - 3:
            return moved
    raise GeometryError("re-vertexing failed: no fixed point gives an "
                        "NPCC link of fiber dimension %d" % (n1 - 3))


# ----------------------------------------------------- quasi-join analysis


def _nil_standard(vvec: np.ndarray, m: int) -> np.ndarray:
    """Fiber translation in the adapted coordinates, split form (no
    leaf-space shear): identity plus v against the join column and the
    vertex row picking up v^T and |v|^2/2."""
    i0 = vvec.shape[0]
    n1 = m + 1 + i0 + 1
    N = np.eye(n1)
    N[m + 1:m + 1 + i0, m] = vvec
    N[n1 - 1, m] = 0.5 * float(vvec @ vvec)
    N[n1 - 1, m + 1:m + 1 + i0] = vvec
    return N


def _standard_frame(end: RadialEnd, fiber: FiberData,
                    tols: Tolerances) -> np.ndarray:
    """Orthonormal frame (columns) adapted to the end: leaf-space
    complement, join direction, fiber directions, vertex.

    The join direction is the fixed leaf-space direction whose
    eigenvalue tracks the vertex eigenvalue; its invariant complement
    comes from the fixed functional of the transposed action."""
    U, C = fiber.link_frame, fiber.comp_basis
    m_leaf = C.shape[0]
    cands = _common_fixed_directions(fiber.NK_gens)
    if not cands:
        raise GeometryError("leaf space has no fixed join direction")
    lam_v = [vertex_eigenvalue(g, end.vertex, tols) for g in end.gens]

    def score(x):
        s = 0.0
        for A, lv in zip(fiber.NK_gens, lam_v):
            s = max(s, abs(float(x @ (A @ x)) - lv))
        return s

    inside = [x for x in cands
              if fiber.K.contains_ray(x) or fiber.K.contains_ray(-x)]
    pool = inside if inside else cands
    pool.sort(key=lambda x: (round(score(x), 9), tuple(np.round(x, 12))))
    k_dir = pool[0]
    phi = None
    best = 0.0
    for f in _common_fixed_directions([A.T for A in fiber.NK_gens]):
        d = abs(float(f @ k_dir))
        if d > max(1e-7, best):
            best = d
            phi = f
    if phi is None:
        raise GeometryError("leaf space has no invariant complement")
    rows = []
    for i in range(m_leaf):
        w = np.zeros(m_leaf)
        w[i] = 1.0
        w = w - (float(phi @ w) / float(phi @ phi)) * phi
        for r in rows:
            w = w - float(w @ r) * r
        nrm = np.linalg.norm(w)
        if nrm > 1e-9:
            rows.append(w / nrm)
    if len(rows) != m_leaf - 1:
        raise GeometryError("standard coordinates are degenerate")
    cols = [U.T @ (C.T @ r) for r in rows]

    def append_orthonormal(vec):
        for c in cols:
            vec = vec - float(vec @ c) * c
        nrm = np.linalg.norm(vec)
        if nrm < 1e-9:
            raise GeometryError("standard coordinates are degenerate")
        cols.append(vec / nrm)

    append_orthonormal(U.T @ (C.T @ k_dir))
    for b in fiber.S_inf.basis:
        append_orthonormal(U.T @ b)
    append_orthonormal(end.vertex.coords.copy())
    T = np.column_stack(cols)
    if T.shape[0] != T.shape[1]:
        raise GeometryError("standard coordinates are degenerate")
    return T


def _qj_element(label: str, G: np.ndarray, m: int, i0: int) -> QuasiJoinElement:
    k = m
    f0 = m + 1
    vL = m + 1 + i0
    S = G[:m, :m].copy()
    s1 = G[:m, k].copy()
    s2 = G[k, :m].copy()
    a1 = float(G[k, k])
    C1 = G[f0:vL, :m].copy()
    a4 = G[f0:vL, k].copy()
    A5 = G[f0:vL, f0:vL].copy()
    c2 = G[vL, :m].copy()
    a7 = float(G[vL, k])
    a8 = G[vL, f0:vL].copy()
    a9 = float(G[vL, vL])
    pattern = float(np.abs(G[:f0, f0:]).max())
    a5 = abs(float(np.linalg.det(A5))) ** (1.0 / i0)
    O5 = A5 / a5 if a5 > 0 else A5.copy()
    orth = float(np.abs(O5.T @ O5 - np.eye(i0)).max())
    sim = abs(a5 ** 2 - a1 * a9) / max(abs(a1 * a9), 1e-12)
    mu_g = a5 / a1
    Mg = A5.T / a1
    v_g = a4 / a1
    alpha7 = a7 / a9 - 0.5 * float(v_g @ v_g)
    return QuasiJoinElement(
        label=label, S=S, s1=s1, s2=s2, a1=a1, a4=a4, A5=A5, C1=C1, c2=c2,
        a7=a7, a8=a8, a9=a9, a5=a5, O5=O5, v_g=v_g, mu_g=mu_g, Mg=Mg,
        alpha7=alpha7, lambda2=None, mu7=None,
        residuals={"pattern": pattern, "orthogonality": orth,
                   "similarity": sim})


def _conjugation_residual(G: np.ndarray, Mg: np.ndarray, m: int,
                          i0: int) -> float:
    Gi = np.linalg.inv(G)
    tests = [np.eye(i0)[j] for j in range(i0)]
    tests.append(np.ones(i0) / np.sqrt(i0))
    worst = 0.0
    for t in tests:
        lhs = G @ _nil_standard(t, m) @ Gi
        rhs = _nil_standard(t @ Mg, m)
        worst = max(worst,
                    float(np.abs(lhs - rhs).max())
                    / max(1.0, float(np.abs(lhs).max())))
    return worst


def quasi_join_diagnostics(end: RadialEnd, fiber: FiberData, L: int = 6,
                           tols: Tolerances = DEFAULT,
                           ball=None) -> QuasiJoinDiagnostics:
    """Block decomposition of every ball word in the adapted frame, the
    invariants derived from it, and the join verdict.

    For equal-rate families (mu identically one) the shear invariant
    alpha7 decides: identically zero means joined; on the words whose
    vertex norm is strictly maximal, a negative value is a
    counterexample witness and a normalized version bounded away from
    zero certifies quasi-joined.  Words without a strictly maximal
    vertex norm leave the sign unconstrained (their inverses carry the
    opposite shear)."""
    T = _standard_frame(end, fiber, tols)
    if ball is None:
        ball = matrix_ball(end.gens, L)
    n1 = T.shape[0]
    i0 = fiber.i0
    m = n1 - i0 - 2
    if m < 1:
        raise GeometryError("standard coordinates are degenerate")
    elements = []
    alpha_by_key = {}
    summary = {"pattern": 0.0, "orthogonality": 0.0, "similarity": 0.0,
               "conjugation": 0.0, "mu_deviation": 0.0}
    inf_mu7 = None
    neg_witness = None
    for w in ball:
        G = T.T @ w.matrix @ T
        el = _qj_element(w.label(), G, m, i0)
        el.residuals["conjugation"] = _conjugation_residual(G, el.Mg, m, i0)
        spec = spectrum(w.matrix, tols)
        lam_vert = abs(el.a9)
        if lam_vert >= spec.norms[0] * (1.0 - 1e-9):
            for mu in spec.norms:
                if mu < lam_vert * (1.0 - 1e-9):
                    el.lambda2 = mu
                    el.mu7 = el.alpha7 / float(np.log(lam_vert / mu))
                    break
        if el.mu7 is not None:
            inf_mu7 = el.mu7 if inf_mu7 is None else min(inf_mu7, el.mu7)
        elements.append(el)
        alpha_by_key[matrix_key(w.matrix)] = el.alpha7
        summary["pattern"] = max(summary["pattern"], el.residuals["pattern"])
        summary["orthogonality"] = max(summary["orthogonality"],
                                       el.residuals["orthogonality"])
        summary["similarity"] = max(summary["similarity"],
                                    el.residuals["similarity"])
        summary["conjugation"] = max(summary["conjugation"],
                                     el.residuals["conjugation"])
        summary["mu_deviation"] = max(summary["mu_deviation"],
                                      abs(el.mu_g - 1.0))
        if el.lambda2 is not None and el.alpha7 < -1e-8 \
                and neg_witness is None:
            neg_witness = el.label
    add_resid = None
    pairs = 0
    for i, wi in enumerate(ball):
        if pairs >= 500:
            break
        for wj in ball:
            if len(wi) + len(wj) > L or (len(wi) == 0 and len(wj) == 0):
                continue
            key = matrix_key(wi.matrix @ wj.matrix)
            if key not in alpha_by_key:
                continue
            lhs = alpha_by_key[key]
            r = abs(lhs - alpha_by_key[matrix_key(wi.matrix)]
                    - alpha_by_key[matrix_key(wj.matrix)])
            add_resid = r if add_resid is None else max(add_resid, r)
            pairs += 1
            if pairs >= 500:
                break
    summary["alpha7_additivity"] = add_resid
    mu1 = summary["mu_deviation"] <= 1e-7
    amax = max(abs(el.alpha7) for el in elements)
    if not mu1:
        verdict = "uncertified"
        witness = None
    elif amax <= 1e-8:
        verdict, witness = "joined", None
    elif neg_witness is not None:
        verdict, witness = "neither", neg_witness
    elif inf_mu7 is not None and inf_mu7 > 0.0:
        verdict, witness = "quasi-joined", None
    else:
        verdict, witness = "uncertified", None
    return QuasiJoinDiagnostics(verdict=verdict, elements=elements,
                                residual_summary=summary, inf_mu7=inf_mu7,
                                mu1_family=mu1,
                                additivity_residual=add_resid,
                                basis=T, witness=witness)


# ------------------------------------------------------------ full report


def _skipped(variant: str, why: str) -> MecResult:
    return MecResult(variant, "indeterminate", None, 0.0, {"note": why})


def classify_end(end: RadialEnd, L: int = 6, C_search: float = 1e3,
                 tols: Tolerances = DEFAULT) -> EndReport:
    """Full classification: link trichotomy, gap conditions,
    horosphericity, branch-specific structure, and a shape label that
    is attached only when every checkable hypothesis passed.

    Unverifiable hypotheses (discreteness, irreducibility, density of
    the virtual center) are listed as assumptions with whatever
    heuristic evidence the ball provides.
    """
    Sigma, cls = _link_with_class(end, L, tols)
    ball = matrix_ball(end.gens, L)
    flags = {"middle": _mec_middle(end, ball, tols),
             "weak": _mec_weak(end, ball, tols)}
    horo = is_horospherical(end, L, tols, ball=ball, link_cls=cls)
    fiber = None
    shape, condition = "unlabeled", ""
    diagnostics = {"link_detail": getattr(cls, "detail", ""),
                   "ball_words": len(ball)}
    assumptions = [
        "group-level statements certified only on the word ball "
        "(length <= %d)" % L,
        "discreteness and freeness of the group action are assumed",
    ]

    if cls == "PC":
        flags["uniform"] = check_mec(end, "uniform", L, C_search, tols,
                                     ball=ball, link=Sigma)
        flags["weak_uniform"] = check_mec(end, "weak_uniform", L, C_search,
                                          tols, ball=ball, link=Sigma)
        flags["weak_npcc"] = _skipped("weak_npcc",
                                      "needs a non-properly-convex link")
        adim = algebra_dimension(end.gens)
        full = (end.dim + 1) ** 2
        assumptions.append(
            "strong irreducibility assumed; heuristic evidence: matrix "
            "algebra dimension %d of %d" % (adim, full))
        if flags["uniform"].flag == "pass":
            shape = "generalized-lens"
            condition = ("properly convex link with a two-sided gap "
                         "certificate (C=%.3g) on the ball"
                         % flags["uniform"].detail.get("C", float("nan")))
        elif flags["weak_uniform"].flag == "pass":
            shape = "quasi-lens"
            condition = ("properly convex link; gap certificate on the "
                         "strictly expanding words only, no uniform "
                         "certificate at ball length %d" % L)
    elif cls == "CA":
        flags["uniform"] = _skipped("uniform", "link is not properly convex")
        flags["weak_uniform"] = _skipped("weak_uniform",
                                         "link is not properly convex")
        flags["weak_npcc"] = _skipped("weak_npcc",
                                      "needs a non-properly-convex link")
        ca = ca_dichotomy(end, L, tols, ball=ball, link_cls=cls)
        diagnostics["ca_dichotomy"] = ca.kind
        if ca.detail:
            diagnostics["ca_detail"] = ca.detail
        if horo.flag:
            shape = "cusp"
            condition = ("unit-norm word ball and complete-affine link "
                         "(horospherical end)")
        elif ca.kind == "TwoNorms":
            try:
                moved = revertex(end, L, tols)
                Sig2, _ = _link_with_class(moved, L, tols)
                fib2 = fiber_data(moved, Sig2, tols=tols)
                diagnostics["revertex"] = (
                    "NPCC with fiber dimension %d after moving the vertex"
                    % fib2.i0)
            except GeometryError as exc:
                diagnostics["revertex"] = "failed: %s" % exc
    elif cls == "NPCC":
        fiber = fiber_data(end, Sigma, tols=tols)
        diagnostics["fiber_dimension"] = fiber.i0
        flags["weak_npcc"] = check_mec(end, "weak_npcc", L, C_search, tols,
                                       ball=ball, link=Sigma, fiber=fiber)
        flags["uniform"] = check_mec(end, "uniform", L, C_search, tols,
                                     ball=ball, fiber=fiber)
        flags["weak_uniform"] = check_mec(end, "weak_uniform", L, C_search,
                                          tols, ball=ball, fiber=fiber)
        qj = quasi_join_diagnostics(end, fiber, L, tols, ball=ball)
        diagnostics["quasi_join_verdict"] = qj.verdict
        diagnostics["quasi_join_residuals"] = qj.residual_summary
        if qj.inf_mu7 is not None:
            diagnostics["inf_mu7"] = qj.inf_mu7
        assumptions.append(
            "density of the virtual center assumed; heuristic evidence: "
            "%d ball words act trivially on the leaf space"
            % len(fiber.N_gens))
        if flags["weak_npcc"].flag == "pass" \
                and qj.verdict in ("joined", "quasi-joined"):
            shape = "quasi-join"
            condition = ("non-properly-convex link, top norm attained "
                         "outside the flat span, %s shear invariant"
                         % qj.verdict)
    else:
        flags["uniform"] = _skipped("uniform", "link class indeterminate")
        flags["weak_uniform"] = _skipped("weak_uniform",
                                         "link class indeterminate")
        flags["weak_npcc"] = _skipped("weak_npcc",
                                      "link class indeterminate")

    return EndReport(trichotomy=str(cls), mec_flags=flags,
                     horospherical=horo, fiber=fiber, shape_label=shape,
                     shape_condition=condition, diagnostics=diagnostics,
                     assumptions=assumptions)
