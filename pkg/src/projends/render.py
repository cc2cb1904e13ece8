"""Deterministic SVG figures: the Klein-chart orbit tiling of a scene
and a summary picture of its link domain.

Byte-stable output is part of the contract, so the SVG hash salt is
pinned and the date metadata suppressed before any figure is written.
"""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "0"

import matplotlib.pyplot as plt
from matplotlib.patches import Circle, Polygon

from .config import DEFAULT, Tolerances
from .projcore import GeometryError, ProjMap
from .scene import SceneFile, end_from_scene

_SAVE = {"format": "svg", "metadata": {"Date": None}}


def _new_axes():
    fig, ax = plt.subplots(figsize=(4.0, 4.0), dpi=100)
    ax.set_xlim(-1.1, 1.1)
    ax.set_ylim(-1.1, 1.1)
    ax.set_aspect("equal")
    ax.axis("off")
    return fig, ax


def _chart(points: np.ndarray) -> np.ndarray:
    """Dehomogenize rows to the x0 = 1 affine chart; rows too close to
    the chart boundary come back as nan and are dropped by callers."""
    out = np.full((points.shape[0], points.shape[1] - 1), np.nan)
    ok = np.abs(points[:, 0]) > 1e-9 * np.abs(points).max(axis=1)
    out[ok] = points[ok, 1:] / points[ok, 0, None]
    return out


def render_domain(scene: SceneFile, out: str, L: int = 3, cap: int = 4000,
                  tols: Tolerances = DEFAULT) -> int:
    """Orbit tiling of the sample polygon in the affine chart, one path
    per word of the length-L ball, plus the domain boundary (the unit
    circle for ball scenes, the orbit hull otherwise).  Returns the
    tile count."""
    from .spectra import matrix_ball

    if scene.n != 2:
        raise GeometryError(
            "domain rendering needs a 2-dimensional scene (got n=%d)"
            % scene.n)
    if not scene.samples:
        raise GeometryError("scene has no domain samples")
    if not scene.generators:
        raise GeometryError("scene has no generators")
    # tiling generators need not share a fixed point, so the radial-end
    # wrapper is skipped on purpose
    gens = [ProjMap(g) for g in scene.generators]
    X = np.array(scene.samples, dtype=float)
    fig, ax = _new_axes()
    tiles = 0
    cloud = []
    for w in matrix_ball(gens, L, cap=cap):
        Y = _chart(X @ w.matrix.T)
        if np.any(~np.isfinite(Y)) or np.abs(Y).max() > 8.0:
            continue
        cloud.append(Y)
        ax.add_patch(Polygon(Y, closed=True, facecolor="#c8d8f0",
                             edgecolor="#305080", linewidth=0.4))
        tiles += 1
    if scene.metadata.get("domain") == "ball":
        ax.add_patch(Circle((0.0, 0.0), 1.0, fill=False,
                            edgecolor="black", linewidth=1.0))
    elif cloud:
        from scipy.spatial import ConvexHull, QhullError

        pts = np.vstack(cloud)
        try:
            hull = ConvexHull(pts)
            ax.add_patch(Polygon(pts[hull.vertices], closed=True,
                                 fill=False, edgecolor="black",
                                 linewidth=1.0))
        except QhullError:
            pass
    fig.savefig(out, **_SAVE)
    plt.close(fig)
    return tiles


def _plane_coords(rays: np.ndarray) -> np.ndarray:
    """Deterministic 2-axis projection of unit rays: the top two right
    singular directions, signs fixed by the first nonzero entry."""
    _, _, Vt = np.linalg.svd(rays, full_matrices=False)
    B = Vt[:2]
    for i in range(B.shape[0]):
        idx = np.nonzero(np.abs(B[i]) > 1e-12)[0]
        if idx.size and B[i, idx[0]] < 0:
            B[i] = -B[i]
    return rays @ B.T


def render_link(scene: SceneFile, out: str, L: int = 3, cap: int = 4000,
                tols: Tolerances = DEFAULT) -> str:
    """Summary picture of the link domain.

    Non-properly-convex links of any dimension get the structure
    picture: leaf-space rays with the hull segment between the extreme
    ones, and the flat-sphere directions marked at the poles.  Other
    links are drawn as a ray cloud with its planar hull, which is
    faithful only up to n = 3.  Returns the link class drawn."""
    from .ends import classify_link, fiber_data, link_domain

    end = end_from_scene(scene, tols)
    Sigma = link_domain(end, L, cap=cap, tols=tols)
    cls = classify_link(Sigma, tols)
    fig, ax = _new_axes()
    ax.add_patch(Circle((0.0, 0.0), 1.0, fill=False, edgecolor="black",
                        linewidth=1.0))
    if cls == "NPCC":
        fiber = fiber_data(end, Sigma, tols=tols)
        leaf = fiber.K.generators[:, :2]
        nrm = np.linalg.norm(leaf, axis=1)
        leaf = leaf[nrm > 1e-9] / nrm[nrm > 1e-9, None]
        order = np.argsort(np.arctan2(leaf[:, 1], leaf[:, 0]))
        leaf = leaf[order]
        ax.plot(leaf[:, 0], leaf[:, 1], linestyle="-", color="#b03030",
                linewidth=2.0)
        ax.plot(leaf[:, 0], leaf[:, 1], linestyle="", marker="o",
                markersize=4.0, color="#b03030")
        for sgn in (1.0, -1.0):
            ax.plot([0.0], [0.92 * sgn], linestyle="", marker="*",
                    markersize=10.0, color="#303030")
    elif scene.n <= 3:
        Y = _plane_coords(Sigma.generators)
        ax.plot(Y[:, 0], Y[:, 1], linestyle="", marker=".",
                markersize=2.5, color="#305080")
        if Y.shape[0] >= 3:
            from scipy.spatial import ConvexHull, QhullError

            try:
                hull = ConvexHull(Y)
                V = Y[np.append(hull.vertices, hull.vertices[0])]
                ax.plot(V[:, 0], V[:, 1], linestyle="-", color="#305080",
                        linewidth=0.8)
            except QhullError:
                pass
    else:
        plt.close(fig)
        raise GeometryError(
            "link rendering supports n <= 3 or a non-properly-convex "
            "structure picture (got n=%d, class %s)" % (scene.n, cls))
    fig.savefig(out, **_SAVE)
    plt.close(fig)
    return str(cls)
