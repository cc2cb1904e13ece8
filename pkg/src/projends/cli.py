"""Command-line surface: classify, construct, render, dual, hilbert.

Reports are plain key: value text with a fixed key order and floats at
17 significant digits, so identical inputs give byte-identical output
(single orchestration thread; --threads is accepted for symmetry and
anything above 1 still runs the deterministic sequential path).

Exit codes: 0 for a determinate answer, 2 for an indeterminate
classification, 1 for any error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import load_tolerances
from .projcore import GeometryError, ProjMap, ProjPoint
from .scene import (SceneFile, SceneFormatError, end_from_scene, read_scene,
                    scene_from_end, write_scene)


def _fmt_val(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt_val(x) for x in v)
    if isinstance(v, np.floating):
        return "%.17g" % float(v)
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


_MEC_ORDER = ("middle", "weak", "uniform", "weak_uniform", "weak_npcc")


def format_report(report, figures=()) -> str:
    """EndReport as deterministic key: value lines."""
    lines = ["projends end report"]
    put = lines.append
    put("trichotomy: %s" % report.trichotomy)
    put("shape: %s" % report.shape_label)
    if report.shape_condition:
        put("shape_condition: %s" % report.shape_condition)
    horo = report.horospherical
    put("horospherical: %s" % _fmt_val(horo.flag))
    put("horospherical_max_deviation: %s" % _fmt_val(horo.max_deviation))
    put("horospherical_link: %s" % horo.link_class)
    if horo.parabolic_residual is not None:
        put("parabolic_residual: %s" % _fmt_val(horo.parabolic_residual))
    if horo.form_residual is not None:
        put("form_residual: %s" % _fmt_val(horo.form_residual))
    if report.fiber is not None:
        put("fiber_dimension: %d" % report.fiber.i0)
        put("fiber_leaf_generators: %d"
            % report.fiber.K.generators.shape[0])
        put("fiber_trivial_words: %d" % len(report.fiber.N_gens))
    for name in _MEC_ORDER:
        res = report.mec_flags.get(name)
        if res is None:
            continue
        put("mec.%s: %s" % (name, res.flag))
        if res.witness is not None:
            put("mec.%s.witness: %s" % (name, res.witness))
        put("mec.%s.margin: %s" % (name, _fmt_val(res.margin)))
        for key in sorted(res.detail):
            put("mec.%s.%s: %s" % (name, key, _fmt_val(res.detail[key])))
    for key in sorted(report.diagnostics):
        put("diag.%s: %s" % (key, _fmt_val(report.diagnostics[key])))
    for a in report.assumptions:
        put("assumption: %s" % a)
    for fig in figures:
        put("figure: %s" % fig)
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ subcommands


def _cmd_classify(args) -> int:
    tols = load_tolerances(args.tolerances)
    scene = read_scene(args.scene)
    end = end_from_scene(scene, tols)
    from .ends import classify_end

    report = classify_end(end, L=args.ball_length, tols=tols)
    figures = []
    if args.report:
        import os

        base, _ = os.path.splitext(args.report)
        from . import render

        try:
            render.render_link(scene, base + ".link.svg", tols=tols)
            figures.append(base + ".link.svg")
        except GeometryError:
            pass
        if scene.n == 2 and scene.samples:
            try:
                render.render_domain(scene, base + ".domain.svg", tols=tols)
                figures.append(base + ".domain.svg")
            except GeometryError:
                pass
    text = format_report(report, figures)
    if args.report:
        with open(args.report, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0 if report.trichotomy in ("CA", "PC", "NPCC") else 2


def _mats(data) -> list:
    return [np.asarray(m, dtype=float) for m in data]


def _cmd_construct(args) -> int:
    from . import constructors as C

    with open(args.params, "r", encoding="ascii") as fh:
        params = json.load(fh)
    tols = load_tolerances(args.tolerances)
    fam = args.family
    stamp = {"family": fam, "seed": str(args.seed)}
    if fam == "cusp":
        spec = C.CuspSpec(n=int(params["n"]),
                          lattice=np.asarray(params["lattice"], dtype=float))
        scene = scene_from_end(C.cusp_group(spec, tols=tols), stamp)
    elif fam == "hyperideal":
        vertex, body = C.hyperideal_lens_cone(
            np.asarray(params["D_gens"], dtype=float),
            np.asarray(params["Q"], dtype=float), tols=tols)
        scene = SceneFile(n=body.ambient - 1, vertex=vertex.coords,
                          generators=[],
                          samples=list(body.generators), metadata=stamp)
    elif fam == "quasilens":
        end = C.quasi_lens_group(
            _mats(params["G_gens"]),
            np.asarray(params["zeta"], dtype=float),
            [float(t) for t in params["v"]],
            c1=params.get("c1"), L=int(params.get("L", 4)), tols=tols)
        scene = scene_from_end(end, stamp)
    elif fam == "quasijoin":
        spec = C.QuasiJoinSpec(
            n=int(params["n"]), i0=int(params["i0"]),
            K2_gens=_mats(params["K2_gens"]),
            lambda_v=[float(t) for t in params["lambda_v"]],
            v_g=_mats(params["v_g"]),
            O5=_mats(params["O5"]),
            a7=[float(t) for t in params["a7"]],
            nil_lattice=np.asarray(params["nil_lattice"], dtype=float))
        scene = scene_from_end(C.quasi_join_group(spec, tols=tols), stamp)
    elif fam == "bend":
        base = read_scene(params["scene"])
        spec = C.BendSpec(lam=float(params["lam"]),
                          b=float(params.get("b", 0.0)),
                          s=float(params.get("s", 1.0)),
                          partition=tuple(params.get("partition", ())),
                          cross=tuple(params.get("cross", ())))
        _, end = C.bending(spec, end_from_scene(base, tols), tols=tols)
        # identity parameters must reproduce the input scene, so the
        # metadata is carried over untouched
        scene = scene_from_end(end, dict(base.metadata))
    else:
        raise GeometryError("unknown family %r" % fam)
    write_scene(scene, args.out)
    return 0


def _cmd_render(args) -> int:
    from . import render

    scene = read_scene(args.scene)
    tols = load_tolerances(args.tolerances)
    if args.mode == "domain":
        render.render_domain(scene, args.out, L=args.ball_length, tols=tols)
    else:
        render.render_link(scene, args.out, L=args.ball_length, tols=tols)
    return 0


def _cmd_dual(args) -> int:
    from .convex import ConeBody
    from .duality import dual_cone, dual_map

    scene = read_scene(args.in_path)
    tols = load_tolerances(args.tolerances)
    if not scene.samples:
        raise SceneFormatError("dual needs domain samples (cone rays)")
    body = ConeBody(np.array(scene.samples, dtype=float), tols=tols)
    D = dual_cone(body, tols=tols)
    gens = [dual_map(ProjMap(g)).matrix for g in scene.generators]
    meta = dict(scene.metadata)
    meta["dual_of"] = args.in_path
    out = SceneFile(n=scene.n, vertex=scene.vertex, generators=gens,
                    samples=list(D.generators), metadata=meta)
    write_scene(out, args.out)
    return 0


def _point(text: str, n: int) -> ProjPoint:
    vals = np.array([float(t) for t in text.split(",")])
    if vals.size == n:
        vals = np.concatenate([[1.0], vals])
    if vals.size != n + 1:
        raise GeometryError(
            "point needs %d chart or %d homogeneous coordinates, got %d"
            % (n, n + 1, vals.size))
    return ProjPoint(vals)


def _cmd_hilbert(args) -> int:
    from .convex import ConeBody, hilbert_distance

    scene = read_scene(args.domain)
    tols = load_tolerances(args.tolerances)
    if scene.metadata.get("domain") == "ball":
        body = ConeBody.klein_ball(scene.n, tols=tols)
    elif scene.samples:
        body = ConeBody(np.array(scene.samples, dtype=float), tols=tols)
    else:
        raise SceneFormatError(
            "hilbert needs domain samples or metadata 'domain ball'")
    d = hilbert_distance(body, _point(args.p, scene.n),
                         _point(args.q, scene.n), tols=tols)
    sys.stdout.write("%.17g\n" % d)
    return 0


# ----------------------------------------------------------------- parser


def _common(sub) -> None:
    sub.add_argument("--tolerances", default=None,
                     help="tolerance override file (PROJENDS_TOL also read)")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker count; determinism is stated for 1")
    sub.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="projends",
        description="end-type classification and constructions on the "
                    "projective sphere")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify a scene's end type")
    c.add_argument("scene")
    c.add_argument("--ball-length", type=int, default=6)
    c.add_argument("--report", default=None,
                   help="also write the report here, with SVG figures "
                        "alongside")
    _common(c)
    c.set_defaults(func=_cmd_classify)

    c = sub.add_parser("construct", help="build a standard family scene")
    c.add_argument("--family", required=True,
                   choices=("cusp", "hyperideal", "quasilens", "quasijoin",
                            "bend"))
    c.add_argument("--params", required=True, help="JSON parameter file")
    c.add_argument("--out", required=True)
    _common(c)
    c.set_defaults(func=_cmd_construct)

    c = sub.add_parser("render", help="draw a scene to SVG")
    c.add_argument("scene")
    c.add_argument("--mode", required=True, choices=("link", "domain"))
    c.add_argument("--out", required=True)
    c.add_argument("--ball-length", type=int, default=3)
    _common(c)
    c.set_defaults(func=_cmd_render)

    c = sub.add_parser("dual", help="dualize a scene's sample cone")
    c.add_argument("--in", dest="in_path", required=True)
    c.add_argument("--out", required=True)
    _common(c)
    c.set_defaults(func=_cmd_dual)

    c = sub.add_parser("hilbert", help="Hilbert distance inside a domain")
    c.add_argument("--domain", required=True, help="scene file; its "
                   "samples generate the cone (metadata 'domain ball' "
                   "selects the Klein ball)")
    c.add_argument("--p", required=True, help="comma-separated point")
    c.add_argument("--q", required=True, help="comma-separated point")
    _common(c)
    c.set_defaults(func=_cmd_hilbert)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GeometryError, OSError, ValueError, KeyError,
            json.JSONDecodeError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
