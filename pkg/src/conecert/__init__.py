"""Quasi-monotone maps on self-dual cones: predicates, diffusive stability
certificates and certified diagonal LMI feasibility."""

from .certificates import (
    LyapunovCertificate,
    RiccatiCertificate,
    assemble_block,
    assumption_d_map,
    lyapunov_diffusive,
    riccati_diffusive,
)
from .cones import (
    Orthant,
    PsdCone,
    RotatedOrthant,
    SimplicialSelfDual,
    coordinates,
    generators,
    interior_point,
    membership,
    verify_self_dual,
)
from .counterexample import reproduce_counterexample
from .linalg import is_negative_definite, is_stable, lp_solve, sym_eig_extremes
from .lmi import common_lyapunov_diag, minimize_convex_simplex, objective
from .psd import jordan_quadratic_rep, non_diffusivity_demo, quadratic_rep, trace_inner
from .qm import (
    adjoint,
    d_stability,
    is_diffusive,
    is_k_nonnegative,
    is_qm,
    stability_witness,
)

__version__ = "0.1.0"
