"""Numeric tolerance policy.

Every comparison threshold used by the library lives in a Tolerances
value so that all of them can be overridden together, either
programmatically or from a small text file (``key = value`` lines,
``#`` comments).  The environment variable ``PROJENDS_TOL`` may hold a
path to such a file; it takes precedence over any file passed
explicitly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Default comparison thresholds.

    equality : pointwise equality of normalized coordinate vectors
    membership : subspace / cone membership residuals
    normalization : construction-time unit-norm and unit-determinant checks
    collinearity : relative singular-value bound for rank-2 tests
    interior_margin : minimal facet slack for a point to count as interior
    eigen_group : relative gap under which eigenvalue norms share a class
    eigen_gap_flag : relative gap under which a class split is flagged
        indeterminate rather than decided
    degeneracy : double-description pivot / ray-inclusion threshold
    fixed_point : residual for "g fixes this point projectively"
    link_antipodal_gap : defect 1 + <x, y> below which an orbit-hull pair
        counts as antipodal (coarse, classifier-level)
    link_pointed_margin : LP margin above which an orbit hull counts as
        properly convex (coarse, classifier-level)
    """

    equality: float = 1e-9
    membership: float = 1e-8
    normalization: float = 1e-12
    collinearity: float = 1e-8
    interior_margin: float = 1e-9
    eigen_group: float = 1e-7
    eigen_gap_flag: float = 1e-4
    degeneracy: float = 1e-10
    fixed_point: float = 1e-8
    link_antipodal_gap: float = 0.05
    link_pointed_margin: float = 5e-3

    def with_overrides(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT = Tolerances()

_FIELD_NAMES = {f.name for f in fields(Tolerances)}


def parse_tolerance_file(path: str) -> dict:
    """Read ``key = value`` lines into a dict of floats.

    Unknown keys raise ValueError naming the offender, so a typo in an
    override file cannot silently leave a default in place.
    """
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            for sep in ("=", ":"):
                if sep in line:
                    key, _, val = line.partition(sep)
                    break
            else:
                raise ValueError(
                    "%s:%d: expected 'key = value', got %r" % (path, lineno, raw.rstrip())
                )
            key = key.strip()
            if key not in _FIELD_NAMES:
                raise ValueError("%s:%d: unknown tolerance %r" % (path, lineno, key))
            out[key] = float(val.strip())
    return out


def load_tolerances(path: str | None = None) -> Tolerances:
    """Build a Tolerances value from defaults, an optional file, and the
    PROJENDS_TOL environment variable (strongest)."""
    overrides: dict = {}
    if path is not None:
        overrides.update(parse_tolerance_file(path))
    env_path = os.environ.get("PROJENDS_TOL")
    if env_path:
        overrides.update(parse_tolerance_file(env_path))
    return Tolerances(**{**{}, **overrides}) if overrides else Tolerances()
