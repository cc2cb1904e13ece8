"""Scene files: the text serialization the command line reads and writes.

One record per line, floats at 17 significant digits so a write/read
cycle is exact, matrices row-major.  Sphere lifts follow the
first-nonzero-coordinate-positive convention of ProjPoint.lift; the
header comment in every emitted file repeats this.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from .config import DEFAULT, Tolerances
from .projcore import GeometryError, ProjMap, ProjPoint

SCENE_VERSION = 1
_MAGIC = "projends scene v%d" % SCENE_VERSION


class SceneFormatError(GeometryError):
    """Unparseable or inconsistent scene text; messages carry the
    offending 1-based line number where one exists."""


def _fmt(values) -> str:
    return " ".join("%.17g" % v
                    for v in np.asarray(values, dtype=float).ravel())


def _floats(text: str, count: int, lineno: int, what: str) -> np.ndarray:
    parts = text.split()
    if len(parts) != count:
        raise SceneFormatError(
            "line %d: %s needs %d entries, got %d"
            % (lineno, what, count, len(parts)))
    try:
        vals = np.array([float(p) for p in parts])
    except ValueError as exc:
        raise SceneFormatError("line %d: %s" % (lineno, exc)) from None
    if not np.all(np.isfinite(vals)):
        raise SceneFormatError("line %d: %s has a non-finite entry"
                               % (lineno, what))
    return vals


@dataclass
class SceneFile:
    """Serialized end data: ambient projective dimension, the vertex
    lift, generator matrices, optional domain samples, and a free-form
    string map."""

    n: int
    vertex: np.ndarray
    generators: List[np.ndarray] = field(default_factory=list)
    samples: List[np.ndarray] = field(default_factory=list)
    metadata: Dict[str, str] = field(default_factory=dict)
    version: int = SCENE_VERSION

    def __post_init__(self):
        if self.version != SCENE_VERSION:
            raise SceneFormatError("unsupported scene version %r"
                                   % (self.version,))
        d = self.n + 1
        self.vertex = np.asarray(self.vertex, dtype=float).ravel()
        if self.vertex.shape != (d,):
            raise SceneFormatError(
                "vertex needs %d coordinates, got %d" % (d, self.vertex.size))
        self.generators = [np.asarray(g, dtype=float).reshape(d, d)
                           for g in self.generators]
        self.samples = [np.asarray(s, dtype=float).ravel()
                        for s in self.samples]
        for s in self.samples:
            if s.shape != (d,):
                raise SceneFormatError(
                    "sample needs %d coordinates, got %d" % (d, s.size))


def dumps(scene: SceneFile) -> str:
    lines = [
        _MAGIC,
        "# lifts: first nonzero coordinate positive; matrices row-major,"
        " 17 significant digits",
        "n: %d" % scene.n,
        "vertex: %s" % _fmt(scene.vertex),
    ]
    for g in scene.generators:
        lines.append("gen: %s" % _fmt(g))
    for s in scene.samples:
        lines.append("sample: %s" % _fmt(s))
    for key in sorted(scene.metadata):
        if any(c.isspace() for c in key):
            raise SceneFormatError("metadata key %r contains whitespace"
                                   % key)
        lines.append("meta: %s %s" % (key, scene.metadata[key]))
    return "\n".join(lines) + "\n"


def loads(text: str) -> SceneFile:
    lines = text.splitlines()
    if not lines or lines[0].strip() != _MAGIC:
        raise SceneFormatError("line 1: expected header %r" % _MAGIC)
    n = None
    vertex = None
    gens: List[np.ndarray] = []
    samples: List[np.ndarray] = []
    meta: Dict[str, str] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(":")
        key, rest = key.strip(), rest.strip()
        if key == "n":
            try:
                n = int(rest)
            except ValueError:
                raise SceneFormatError(
                    "line %d: n must be an integer, got %r"
                    % (lineno, rest)) from None
            if n < 1:
                raise SceneFormatError("line %d: n must be positive"
                                       % lineno)
        elif key == "vertex":
            if n is None:
                raise SceneFormatError(
                    "line %d: vertex before the dimension line" % lineno)
            vertex = _floats(rest, n + 1, lineno, "vertex")
        elif key == "gen":
            if n is None:
                raise SceneFormatError(
                    "line %d: gen before the dimension line" % lineno)
            d = n + 1
            gens.append(_floats(rest, d * d, lineno,
                                "generator").reshape(d, d))
        elif key == "sample":
            if n is None:
                raise SceneFormatError(
                    "line %d: sample before the dimension line" % lineno)
            samples.append(_floats(rest, n + 1, lineno, "sample"))
        elif key == "meta":
            mkey, _, mval = rest.partition(" ")
            if not mkey:
                raise SceneFormatError("line %d: empty metadata key"
                                       % lineno)
            meta[mkey] = mval
        else:
            raise SceneFormatError("line %d: unknown field %r"
                                   % (lineno, key))
    if n is None:
        raise SceneFormatError("missing dimension line 'n:'")
    if vertex is None:
        raise SceneFormatError("missing 'vertex:' line")
    return SceneFile(n=n, vertex=vertex, generators=gens, samples=samples,
                     metadata=meta)


def write_scene(scene: SceneFile, path: str) -> None:
    text = dumps(scene)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def read_scene(path: str) -> SceneFile:
    if not os.path.exists(path):
        raise SceneFormatError("no such scene file: %s" % path)
    with open(path, "r", encoding="ascii") as fh:
        return loads(fh.read())


# ------------------------------------------------------- end conversion


def scene_from_end(end, metadata: Dict[str, str] | None = None) -> SceneFile:
    from .ends import _mat

    return SceneFile(
        n=end.dim,
        vertex=np.array(end.vertex.coords),
        generators=[np.array(_mat(g)) for g in end.gens],
        samples=[np.array(p.coords) for p in end.domain_samples],
        metadata=dict(metadata or {}))


def end_from_scene(scene: SceneFile, tols: Tolerances = DEFAULT):
    from .ends import RadialEnd

    if not scene.generators:
        raise SceneFormatError("scene has no generators")
    return RadialEnd(
        vertex=ProjPoint(scene.vertex),
        gens=[ProjMap(g) for g in scene.generators],
        domain_samples=[ProjPoint(s) for s in scene.samples],
        tols=tols)
