"""Central tolerance table.

Every geometric predicate in the package reads its threshold from ``TOL`` at
call time, so overriding a value here (or through ``HYP_TOL_FILE`` in the CLI)
changes all predicates consistently.
"""

import json
import os

DEFAULTS = {
    "unit": 1e-12,  # unit-vector normalisation of boundary points
    "boundary": 1e-12,  # interior points must satisfy |p| < 1 - boundary
    "on": 1e-9,  # |<x, e>| below this counts as lying on a plane
    "sep": 1e-9,  # minimal angular separation of geodesic endpoints
    "edge": 1e-7,  # hits closer than this to a second face plane abort
    "lambda": 1e-6,  # |lambda - pi/omega| for the integrality check
    "concircular": 1e-8,  # face vertices vs. their fitted circle
    "ideal": 1e-9,  # | |u| - 1 | for vertices read from files
    "hausdorff": 1e-6,  # refinement stop for sampled Hausdorff distance
    "conv": 1e-8,  # limit-point residual required by reconstruct
}

TOL = dict(DEFAULTS)

ENV_VAR = "HYP_TOL_FILE"


def override(values):
    """Update ``TOL`` in place; unknown keys raise ``KeyError``."""
    for key, value in values.items():
        if key not in DEFAULTS:
            raise KeyError(f"unknown tolerance {key!r}")
        TOL[key] = float(value)


def reset():
    TOL.clear()
    TOL.update(DEFAULTS)


def load_env():
    """Apply overrides from the JSON file named by ``$HYP_TOL_FILE``, if set."""
    path = os.environ.get(ENV_VAR)
    if path:
        with open(path) as fh:
            override(json.load(fh))
