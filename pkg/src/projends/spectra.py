"""Eigenstructure of holonomy elements.

For a projective map g, the eigenvalue norms split the space into
invariant subspaces: R_mu(g) is the real span of the generalized
eigenspaces whose eigenvalue norm is mu.  On top of that sit the
relative extremal norms with respect to an invariant subspace (the
data the end classifier consumes), translation lengths over a convex
body, free-word enumeration for ball sweeps, a conjugate-word-length
upper bound, and a heuristic common-invariant-subspace detector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from ._halfspace import cone_membership_residual
from .config import DEFAULT, Tolerances
from .convex import ConeBody, hilbert_distance
from .projcore import GeometryError, ProjMap, ProjPoint, Subspace


# ------------------------------------------------------- exact eigen data
#
# Eigenvalues of a matrix with a defective (repeated, non-diagonalizable)
# cluster are ill conditioned: a k-fold Jordan block smears into a ring of
# radius eps^(1/k), which is ~1e-4 for k=4.  Unit-norm checks at 1e-9 are
# hopeless on such output.  When the entries are exactly representable
# small rationals (structured generators and their short products are),
# the characteristic polynomial can be computed exactly instead; its
# square-free part has simple, well-conditioned roots.


def _fraction_matrix(M: np.ndarray, max_bits: int = 64):
    rows = []
    for i in range(M.shape[0]):
        row = []
        for x in M[i]:
            f = Fraction(float(x))
            if f.denominator.bit_length() > max_bits:
                return None
            row.append(f)
        rows.append(row)
    return rows


def _charpoly_exact(M: np.ndarray):
    """Monic characteristic polynomial over Q (descending coefficients),
    or None when the entries are not small rationals."""
    F = _fraction_matrix(M)
    if F is None:
        return None
    d = len(F)
    N = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    coeffs = [Fraction(1)]
    for k in range(1, d + 1):
        N = [[sum(F[i][l] * N[l][j] for l in range(d)) for j in range(d)]
             for i in range(d)]
        ck = -sum(N[i][i] for i in range(d)) / k
        coeffs.append(ck)
        for i in range(d):
            N[i][i] += ck
    return coeffs


def _poly_trim(p):
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def _poly_mod(p, q):
    r = _poly_trim(list(p))
    while len(r) >= len(q) and any(c != 0 for c in r):
        f = r[0] / q[0]
        for i in range(len(q)):
            r[i] -= f * q[i]
        r = _poly_trim(r[1:]) if len(r) > 1 else [Fraction(0)]
    return r if r else [Fraction(0)]


def _poly_gcd(p, q):
    p, q = _poly_trim(list(p)), _poly_trim(list(q))
    while not (len(q) == 1 and q[0] == 0):
        p, q = q, _poly_mod(p, q)
    return [c / p[0] for c in p]


def _poly_div(p, q):
    r = list(p)
    out = []
    while len(r) >= len(q):
        f = r[0] / q[0]
        out.append(f)
        for i in range(len(q)):
            r[i] -= f * q[i]
        r = r[1:]
    return out


def exact_root_set(M: np.ndarray):
    """Distinct eigenvalues via the exact characteristic polynomial:
    roots of its square-free part.  None when exact arithmetic does not
    apply to the entries."""
    coeffs = _charpoly_exact(M)
    if coeffs is None:
        return None
    d = len(coeffs) - 1
    deriv = [coeffs[i] * (d - i) for i in range(d)]
    g = _poly_gcd(coeffs, deriv)
    sf = _poly_div(coeffs, g) if len(g) > 1 else coeffs
    return np.roots([float(c) for c in sf])


def unit_norm_deviation(g) -> float:
    """max | |lambda| - 1 | over the eigenvalues, through the exact
    characteristic polynomial whenever possible.

    Distinct roots of the square-free part cover every eigenvalue norm,
    so the deviation is unaffected by dropping multiplicities."""
    M = _matrix_of(g)
    # defective-cluster rounding stays below ~1e-4, so a clearly large
    # float deviation needs no exact confirmation
    rough = float(np.max(np.abs(np.abs(np.linalg.eigvals(M)) - 1.0)))
    if rough > 1e-3:
        return rough
    roots = exact_root_set(M)
    if roots is None or len(roots) == 0:
        return rough
    return float(np.max(np.abs(np.abs(roots) - 1.0)))


def _snap_eigenvalues(eigvals: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Replace float eigenvalues by exact-polynomial roots when each has
    an unambiguous nearest root; defective clusters collapse back onto
    their true center."""
    roots = exact_root_set(M)
    if roots is None or len(roots) == 0:
        return eigvals
    scale = max(1.0, float(np.abs(roots).max()))
    if len(roots) > 1:
        sep = min(abs(a - b) for i, a in enumerate(roots)
                  for b in roots[:i])
        radius = min(1e-3 * scale, 0.25 * sep)
    else:
        radius = 1e-3 * scale
    out = eigvals.copy()
    for i, lam in enumerate(eigvals):
        k = int(np.argmin(np.abs(roots - lam)))
        if abs(roots[k] - lam) <= radius:
            out[i] = roots[k]
    return out


# ---------------------------------------------------------------- spectrum


@dataclass(frozen=True)
class NormClass:
    mu: float
    subspace: Subspace
    multiplicity: int


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray           # complex, with multiplicity
    norm_classes: tuple               # NormClass, sorted by mu descending
    indeterminate: bool               # adjacent norms too close to decide

    @property
    def norms(self) -> list:
        return [c.mu for c in self.norm_classes]

    def class_of_norm(self, mu: float, rel_tol: float = 1e-7) -> Optional[NormClass]:
        for c in self.norm_classes:
            if abs(c.mu - mu) <= rel_tol * max(c.mu, mu):
                return c
        return None


def _matrix_of(g) -> np.ndarray:
    return g.matrix if isinstance(g, ProjMap) else np.asarray(g, dtype=float)


def spectrum(g, tols: Tolerances = DEFAULT) -> Spectrum:
    """Eigenvalues and norm-affiliated invariant subspaces.

    Norms are grouped with relative tolerance ``eigen_group``; when two
    adjacent groups are separated by less than ``eigen_gap_flag`` the
    spectrum is flagged indeterminate (the grouping stands, but
    classifiers should not lean on it).
    """
    M = _matrix_of(g)
    n1 = M.shape[0]
    eigvals = _snap_eigenvalues(np.linalg.eigvals(M), M)
    order = np.argsort(-np.abs(eigvals))
    eigvals = eigvals[order]
    norms = np.abs(eigvals)

    groups: list[list[int]] = []
    for i, mu in enumerate(norms):
        if groups and abs(mu - norms[groups[-1][0]]) <= tols.eigen_group * norms[groups[-1][0]]:
            groups[-1].append(i)
        else:
            groups.append([i])

    indeterminate = False
    for a, b in zip(groups, groups[1:]):
        hi, lo = norms[a[0]], norms[b[0]]
        if hi > 0 and (hi - lo) / hi < tols.eigen_gap_flag:
            indeterminate = True

    # band boundaries at geometric midpoints between adjacent groups;
    # within-band scatter of a defective cluster then stays far from the
    # cut, which per-group tight bands would not survive
    reps = [float(np.mean(norms[grp])) for grp in groups]
    bounds = [np.sqrt(hi_mu * lo_mu) if lo_mu > 0 else 0.5 * hi_mu
              for hi_mu, lo_mu in zip(reps, reps[1:])]

    classes = []
    for k, grp in enumerate(groups):
        mu = reps[k]
        lo_b = bounds[k] if k < len(bounds) else -1.0
        hi_b = bounds[k - 1] if k > 0 else np.inf

        def selector(re, im, lo_b=lo_b, hi_b=hi_b):
            r = abs(complex(re, im))
            return lo_b < r <= hi_b

        try:
            T, Z, sdim = scipy.linalg.schur(M, output="real", sort=selector)
        except Exception as exc:
            raise GeometryError(
                "Schur factorization failed (cond=%.3e): %s"
                % (np.linalg.cond(M), exc)
            )
        if sdim != len(grp):
            raise GeometryError(
                "norm class selection mismatch: wanted %d eigenvalues, Schur gave %d"
                % (len(grp), sdim)
            )
        sub = Subspace(Z[:, :sdim].T)
        resid = np.max(np.abs(M @ sub.basis.T - sub.projector() @ M @ sub.basis.T))
        if resid > 1e-6 * max(1.0, np.abs(M).max()):
            raise GeometryError("norm-class subspace is not invariant (resid %.3e)" % resid)
        classes.append(NormClass(mu=mu, subspace=sub, multiplicity=len(grp)))

    total = sum(c.multiplicity for c in classes)
    if total != n1:
        raise GeometryError("norm classes lost eigenvalues (%d of %d)" % (total, n1))
    return Spectrum(eigenvalues=eigvals, norm_classes=tuple(classes),
                    indeterminate=indeterminate)


# ---------------------------------------------------------- relative norms


@dataclass(frozen=True)
class RelSpectrum:
    """Extremal eigenvalue norms relative to an invariant subspace.

    lambda1 / lambda_np1: largest and smallest norm affiliated with a
    subspace not inside V_inf; lambda_inf / lambda_inf_prime: largest
    and smallest norm of the restriction to V_inf; lambda_vertex: the
    norm of the eigenvalue at the vertex.
    """

    lambda1: float
    lambda_np1: float
    lambda_inf: float
    lambda_inf_prime: float
    lambda_vertex: float


def rel_spectrum(g, V_inf: Subspace, vertex: ProjPoint,
                 tols: Tolerances = DEFAULT) -> RelSpectrum:
    M = _matrix_of(g)
    P = V_inf.projector()
    if V_inf.dim == 0:
        raise GeometryError("V_inf must be nonzero")
    inv_resid = np.max(np.abs(M @ V_inf.basis.T - P @ M @ V_inf.basis.T))
    if inv_resid > tols.membership * max(1.0, np.abs(M).max()):
        raise GeometryError("V_inf is not invariant (residual %.3e)" % inv_resid)
    gv = M @ vertex.coords
    lam_v = float(np.dot(gv, vertex.coords))
    fix_resid = np.linalg.norm(gv - lam_v * vertex.coords)
    if fix_resid > tols.fixed_point * max(1.0, abs(lam_v)):
        raise GeometryError("vertex is not fixed (residual %.3e)" % fix_resid)

    spec = spectrum(g, tols)
    outside = [c.mu for c in spec.norm_classes
               if not V_inf.contains_subspace(c.subspace, tols.membership)]
    if not outside:
        raise GeometryError("every norm class sits inside V_inf")
    restric = V_inf.basis @ M @ V_inf.basis.T
    inf_norms = np.abs(np.linalg.eigvals(restric))
    return RelSpectrum(
        lambda1=float(max(outside)),
        lambda_np1=float(min(outside)),
        lambda_inf=float(inf_norms.max()),
        lambda_inf_prime=float(inf_norms.min()),
        lambda_vertex=abs(lam_v),
    )


# ------------------------------------------------------------------- words


@dataclass(frozen=True)
class Word:
    """Freely reduced word with its accumulated matrix (letters applied
    left to right)."""

    letters: tuple                    # ((gen index, +-1), ...)
    matrix: np.ndarray = field(compare=False)

    def __len__(self):
        return len(self.letters)

    @property
    def projmap(self) -> ProjMap:
        return ProjMap(self.matrix)

    def label(self) -> str:
        if not self.letters:
            return "e"
        parts = []
        for i, e in self.letters:
            parts.append("g%d" % i if e > 0 else "g%d^-1" % i)
        return ".".join(parts)


def _gen_matrices(gens: Sequence) -> list[np.ndarray]:
    out = []
    for g in gens:
        M = _matrix_of(g)
        out.append(ProjMap(M).matrix)
    return out


def _matrix_inverse(M: np.ndarray) -> np.ndarray:
    """Inverse, via exact Gauss-Jordan when the entries are small
    rationals.  Keeps products of structured generators exactly
    representable, which the exact spectrum path depends on."""
    F = _fraction_matrix(M)
    if F is not None:
        d = len(F)
        aug = [row[:] + [Fraction(int(i == j)) for j in range(d)]
               for i, row in enumerate(F)]
        ok = True
        for col in range(d):
            piv = max(range(col, d), key=lambda r: abs(aug[r][col]))
            if aug[piv][col] == 0:
                ok = False
                break
            aug[col], aug[piv] = aug[piv], aug[col]
            pv = aug[col][col]
            aug[col] = [x / pv for x in aug[col]]
            for r in range(d):
                if r != col and aug[r][col] != 0:
                    f = aug[r][col]
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
        if ok:
            return np.array([[float(x) for x in row[d:]] for row in aug])
    return np.linalg.inv(M)


def enumerate_words(gens: Sequence, L: int):
    """All freely reduced words of length <= L in shortlex order
    (alphabet g0 < g0^-1 < g1 < g1^-1 < ...)."""
    mats = _gen_matrices(gens)
    invs = [_matrix_inverse(M) for M in mats]
    n1 = mats[0].shape[0] if mats else 0
    alphabet = []
    for i in range(len(mats)):
        alphabet.append(((i, 1), mats[i]))
        alphabet.append(((i, -1), invs[i]))
    frontier = [Word(letters=(), matrix=np.eye(n1))]
    yield frontier[0]
    for _ in range(L):
        nxt = []
        for w in frontier:
            for letter, M in alphabet:
                if w.letters and w.letters[-1][0] == letter[0] \
                        and w.letters[-1][1] == -letter[1]:
                    continue
                nxt.append(Word(letters=w.letters + (letter,),
                                matrix=w.matrix @ M))
        for w in nxt:
            yield w
        frontier = nxt


def matrix_key(M: np.ndarray, digits: int = 8) -> bytes:
    scale = np.abs(M).max()
    if scale == 0:
        scale = 1.0
    return np.round(M / scale, digits).tobytes()


def matrix_ball(gens: Sequence, L: int, cap: int = 20000):
    """Words of length <= L with duplicate matrices dropped (first
    shortlex representative kept).  Stops at ``cap`` distinct matrices.

    Duplicates are pruned from the search frontier as well: extensions
    of a dropped word reproduce extensions of its kept representative,
    so the ball of distinct matrices is unchanged while groups with
    heavy relations (lattices) stay enumerable at large radius."""
    mats = _gen_matrices(gens)
    invs = [_matrix_inverse(M) for M in mats]
    n1 = mats[0].shape[0] if mats else 0
    alphabet = []
    for i in range(len(mats)):
        alphabet.append(((i, 1), mats[i]))
        alphabet.append(((i, -1), invs[i]))
    root = Word(letters=(), matrix=np.eye(n1))
    out = [root]
    seen = {matrix_key(root.matrix)}
    frontier = [root]
    for _ in range(L):
        nxt = []
        for w in frontier:
            for letter, M in alphabet:
                if w.letters and w.letters[-1][0] == letter[0] \
                        and w.letters[-1][1] == -letter[1]:
                    continue
                P = w.matrix @ M
                key = matrix_key(P)
                if key in seen:
                    continue
                if len(out) >= cap:
                    return out
                nw = Word(letters=w.letters + (letter,), matrix=P)
                seen.add(key)
                out.append(nw)
                nxt.append(nw)
        if not nxt:
            break
        frontier = nxt
    return out


def is_scalar(M: np.ndarray, tol: float = 1e-9) -> bool:
    d = float(np.trace(M)) / M.shape[0]
    return bool(np.max(np.abs(M - d * np.eye(M.shape[0]))) <= tol * max(1.0, abs(d)))


def cwl_upper(word, gens: Sequence, L: int) -> int:
    """Upper bound on the conjugacy word length: the shortest reduced
    length of h w h^-1 over all h in the ball of radius L, improved by
    matrix identification against the enumerated ball when feasible."""
    if isinstance(word, Word):
        letters = list(word.letters)
    else:
        letters = list(word)
    mats = _gen_matrices(gens)
    invs = [_matrix_inverse(M) for M in mats]

    def mat_of(ls):
        n1 = mats[0].shape[0]
        M = np.eye(n1)
        for i, e in ls:
            M = M @ (mats[i] if e > 0 else invs[i])
        return M

    def reduce_letters(ls):
        out = []
        for li in ls:
            if out and out[-1][0] == li[0] and out[-1][1] == -li[1]:
                out.pop()
            else:
                out.append(li)
        return out

    best = len(reduce_letters(letters))

    # matrix lookup over a ball big enough to contain the conjugates we
    # form; identification can only shorten, so capping the radius when
    # the ball would blow up keeps the value a valid upper bound
    lookup = {}
    lookup_radius = 2 * L + len(reduce_letters(letters))
    if reduced_ball_size(len(gens), lookup_radius) <= 60000:
        for w in enumerate_words(gens, lookup_radius):
            key = matrix_key(w.matrix)
            if key not in lookup:
                lookup[key] = len(w.letters)

    for h in enumerate_words(gens, L):
        hinv = [(i, -e) for i, e in reversed(h.letters)]
        conj = reduce_letters(list(h.letters) + letters + hinv)
        best = min(best, len(conj))
        if lookup:
            key = matrix_key(mat_of(conj))
            if key in lookup:
                best = min(best, lookup[key])
    return best


def reduced_ball_size(num_gens: int, L: int) -> int:
    """Number of freely reduced words of length <= L."""
    total, shell = 1, 2 * num_gens
    for _ in range(1, max(L, 0) + 1):
        total += shell
        shell *= 2 * num_gens - 1
    return total


# ------------------------------------------------------ translation length


@dataclass(frozen=True)
class TranslationLength:
    """Numeric infimum of the displacement plus the eigenvalue proxy.

    ``flagged`` is set when the two disagree by more than 1e-2; the
    proxy is a cross-check quantity, not the metric value.
    """

    value: float
    proxy: float
    flagged: bool


def _preserves_body(K: ConeBody, M: np.ndarray, tol: float = 1e-7) -> bool:
    if K.kind == "quadric":
        Minv = np.linalg.inv(M)
        Qi = Minv.T @ K.quadric @ Minv
        scale = np.abs(Qi).max() / np.abs(K.quadric).max()
        return bool(np.max(np.abs(Qi - scale * K.quadric)) <= 1e-6 * np.abs(Qi).max())
    for g in K.generators:
        img = M @ g
        if cone_membership_residual(img, K.generators) > tol:
            return False
    return True


def translation_length(K: ConeBody, g, seeds: int = 512, seed: int = 0,
                       descents: int = 8,
                       tols: Tolerances = DEFAULT) -> TranslationLength:
    """inf over interior points of the Hilbert displacement d(x, gx),
    estimated by seeded sampling plus coordinate descent."""
    M = _matrix_of(g)
    if not K.properly_convex:
        raise GeometryError("translation length needs a properly convex body")
    if not _preserves_body(K, M):
        raise GeometryError("map does not preserve the body")

    norms = np.abs(np.linalg.eigvals(ProjMap(M).matrix))
    proxy = 0.5 * float(np.log(norms.max() / norms.min()))

    if is_scalar(M):
        return TranslationLength(value=0.0, proxy=proxy, flagged=proxy > 1e-2)

    gmap = ProjMap(M)

    def displacement(x: ProjPoint) -> float:
        y = ProjPoint(gmap.matrix @ x.coords)
        return hilbert_distance(K, x, y, tols)

    pts = K.sample_interior(seeds, seed=seed)
    vals = []
    for x in pts:
        try:
            vals.append((displacement(x), x))
        except GeometryError:
            continue
    if not vals:
        raise GeometryError("no usable interior seed")
    vals.sort(key=lambda t: t[0])
    best_val = vals[0][0]

    for v0, x0 in vals[:descents]:
        v, x = _descend(K, displacement, x0, v0)
        best_val = min(best_val, v)
    return TranslationLength(value=best_val, proxy=proxy,
                             flagged=abs(best_val - proxy) > 1e-2)


def _descend(K: ConeBody, f, x0: ProjPoint, f0: float):
    """Pattern search in span coordinates; the parameter count stays at
    the body dimension, not the generator count.  Exterior trial points
    raise inside f and are skipped."""
    if K.kind == "quadric":
        w, V = np.linalg.eigh(K.quadric)
        y0 = V.T @ x0.coords
        coord = y0[1:] / y0[0]

        def make(c):
            v = V @ np.concatenate([[1.0], c])
            return ProjPoint(v if float(v @ K.quadric @ K.axis) <= 0 else -v)
    else:
        B = K.span_basis
        coord = B @ x0.coords

        def make(c):
            return ProjPoint(c @ B)

    best_x, best_f = coord.copy(), f0
    scale = max(float(np.linalg.norm(coord)), 1e-9)
    step = 0.5
    for _ in range(60):
        improved = False
        for i in range(coord.shape[0]):
            for sgn in (1.0, -1.0):
                c = best_x.copy()
                c[i] += sgn * step * scale
                try:
                    val = f(make(c))
                except GeometryError:
                    continue
                if val < best_f - 1e-14:
                    best_x, best_f = c, val
                    improved = True
        if not improved:
            step *= 0.5
            if step < 1e-7:
                break
    return best_f, make(best_x)


# ------------------------------------------------- invariant subspaces


def algebra_dimension(gens: Sequence, max_len: int = 6) -> int:
    """Dimension of the linear span of short products of the
    generators (with identity); (n+1)^2 certifies irreducibility."""
    mats = _gen_matrices(gens)
    n1 = mats[0].shape[0]
    basis_vecs: list[np.ndarray] = []
    rank = 0

    def try_add(M):
        nonlocal rank
        v = M.ravel() / max(np.abs(M).max(), 1e-300)
        for b in basis_vecs:
            v = v - np.dot(v, b) * b
        nv = np.linalg.norm(v)
        if nv > 1e-10:
            basis_vecs.append(v / nv)
            rank += 1
            return True
        return False

    layer = [np.eye(n1)]
    try_add(np.eye(n1))
    for _ in range(max_len):
        nxt = []
        for M in layer:
            for A in mats:
                P = M @ A
                if try_add(P):
                    nxt.append(P)
        if not nxt or rank == n1 * n1:
            break
        layer = nxt
    return rank


def invariant_subspaces(gens: Sequence, trials: int = 4, seed: int = 0,
                        tols: Tolerances = DEFAULT) -> list[Subspace]:
    """Common invariant subspaces of the generated algebra, found by
    splitting eigen-atoms of random algebra elements and keeping the
    subsets invariant under every generator.

    An empty list is heuristic evidence of irreducibility; when
    algebra_dimension is the full matrix square it is a certificate.
    """
    mats = _gen_matrices(gens)
    n1 = mats[0].shape[0]
    if algebra_dimension(gens) == n1 * n1:
        return []
    rng = np.random.default_rng(seed)
    pool = [np.eye(n1)] + list(mats) + [A @ B for A in mats for B in mats]

    found: dict[bytes, Subspace] = {}
    for _ in range(trials):
        coeffs = rng.normal(size=len(pool))
        T = sum(c * P for c, P in zip(coeffs, pool))
        eigvals = np.linalg.eigvals(T)
        atoms = _conjugate_atoms(eigvals)
        if len(atoms) > 14:
            continue
        for mask in range(1, 2 ** len(atoms) - 1):
            chosen = [atoms[i] for i in range(len(atoms)) if mask >> i & 1]
            sel = np.concatenate(chosen)

            def selector(re, im, sel=sel):
                lam = complex(re, im)
                return bool(np.min(np.abs(sel - lam)) < 1e-7 * max(1.0, abs(lam)))

            try:
                _, Z, sdim = scipy.linalg.schur(T, output="real", sort=selector)
            except Exception:
                continue
            if sdim == 0 or sdim == n1:
                continue
            sub = Subspace(Z[:, :sdim].T)
            if _invariant_under_all(sub, mats, tols.membership):
                key = _subspace_key(sub)
                if key not in found:
                    found[key] = sub
    out = sorted(found.values(), key=lambda s: (s.dim, _subspace_key(s)))
    return out


def _conjugate_atoms(eigvals: np.ndarray) -> list[np.ndarray]:
    """Cluster eigenvalues into conjugation-closed groups (a complex
    pair or a coincident real cluster forms one atom)."""
    remaining = list(range(len(eigvals)))
    atoms = []
    while remaining:
        i = remaining.pop(0)
        group = [i]
        lam = eigvals[i]
        for j in remaining[:]:
            if abs(eigvals[j] - lam) < 1e-8 * max(1.0, abs(lam)) or \
               abs(eigvals[j] - np.conj(lam)) < 1e-8 * max(1.0, abs(lam)):
                group.append(j)
                remaining.remove(j)
        atoms.append(eigvals[group])
    return atoms


def _invariant_under_all(sub: Subspace, mats, tol) -> bool:
    P = sub.projector()
    for M in mats:
        img = M @ sub.basis.T
        resid = np.max(np.abs(img - P @ img))
        if resid > tol * max(1.0, np.abs(M).max()):
            return False
    return True


def _subspace_key(sub: Subspace) -> bytes:
    P = sub.projector()
    return np.round(P, 7).tobytes()
