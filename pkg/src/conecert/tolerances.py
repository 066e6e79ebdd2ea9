"""Default numerical tolerances, kept in one place.

Every report written by the CLI echoes the values actually used.
"""

import os

#: Relative threshold for definiteness, membership and predicate checks.
DEFAULT_TOL = 1e-9

#: Absolute strictness band on the min-max LMI objective.
LMI_TOL = 1e-7

#: Floor on cone coordinates of interior vectors before a ratio is taken.
COORD_FLOOR = 1e-12

#: Relative accuracy demanded of D v = w when building D from (v, w).
DMAP_RTOL = 1e-10

#: Relative accuracy of the block identity M (v, v) = -(w, w) / 2.
BLOCK_IDENTITY_RTOL = 1e-8

ENV_VAR = "CONECERT_TOL"


def default_tol():
    """DEFAULT_TOL, unless overridden by the ``CONECERT_TOL`` environment variable."""
    raw = os.environ.get(ENV_VAR)
    if raw is None or not raw.strip():
        return DEFAULT_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{ENV_VAR} must be a positive number, got {raw!r}")
    return value
