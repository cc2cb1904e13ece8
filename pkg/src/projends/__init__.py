"""Projective-sphere geometry, Hilbert metrics, convex-cone duality,
eigenvalue spectra, and an end-type classifier for radial-end holonomy
data, with constructors for the standard example families."""

from .config import Tolerances, load_tolerances
from .projcore import GeometryError, ProjMap, ProjPoint, Subspace

__all__ = [
    "GeometryError",
    "ProjMap",
    "ProjPoint",
    "Subspace",
    "Tolerances",
    "load_tolerances",
]

__version__ = "0.1.0"
