"""Two positive delay systems with a common diagonal Lyapunov matrix but no
common diagonal Lyapunov-Krasovskii pair ``(D, Q)``."""

from __future__ import annotations

import numpy as np

from .certificates import riccati_diffusive
from .cones import Orthant
from .errors import ConeCertError
from .linalg import is_stable, sym_eig_extremes
from .lmi import minimize_convex_simplex
from .qm import is_k_nonnegative, is_qm
from .tolerances import DEFAULT_TOL, LMI_TOL

A1 = np.array([[-1.4093, 0.1501], [0.0986, -1.3504]])
B1 = np.array([[0.7743, 0.1205], [0.6820, 0.7193]])
A2 = np.array([[-0.5474, 0.0626], [0.1537, -1.1340]])
B2 = np.array([[0.1619, 0.6812], [0.1202, 0.1448]])
E = np.diag([0.7266, 0.5828])

PAIRS = [(A1, B1), (A2, B2)]


def _check(name, verdict, margin, **extra):
    entry = {"name": name, "verdict": bool(verdict),
             "margin": float(margin) if margin is not None and np.isfinite(margin) else None}
    entry.update(extra)
    return entry


def _trace_det_stable(M):
    return np.trace(M) < 0 and np.linalg.det(M) > 0


def reproduce_counterexample(resolution=60, refine_iters=60, tol=DEFAULT_TOL, lmi_tol=LMI_TOL):
    """Run every check on the hard-coded example and return a JSON-ready report.

    The joint problem is solved for both block layouts.  The ``"DB"`` layout
    (the Riccati inequality ``A^T D + D A + Q + D B Q^{-1} B^T D < 0``) carries
    the headline verdict.
    """
    K = Orthant(2)
    checks = []
    for i, (A, B) in enumerate(PAIRS, start=1):
        qm = is_qm(A, K, tol)
        checks.append(_check(f"A{i} Metzler", qm.verdict, qm.margin))
        nn = is_k_nonnegative(B, K, tol)
        checks.append(_check(f"B{i} nonnegative", nn.verdict, nn.margin))
    for i, (A, B) in enumerate(PAIRS, start=1):
        hi = sym_eig_extremes(A.T @ E + E @ A)[1]
        checks.append(_check(f"E: lambda_max(A{i}^T E + E A{i}) < 0", hi < 0, -hi,
                             lambda_max=hi))
    for i, (A, B) in enumerate(PAIRS, start=1):
        S = A + B
        hi = sym_eig_extremes(S.T @ E + E @ S)[1]
        checks.append(_check(f"E: lambda_max((A{i}+B{i})^T E + E (A{i}+B{i})) < 0", hi < 0, -hi,
                             lambda_max=hi))
    for i, (A, B) in enumerate(PAIRS, start=1):
        S = A + B
        ok = _trace_det_stable(S)
        checks.append(_check(f"A{i}+B{i} Hurwitz (trace/det)", ok and is_stable(S),
                             min(-np.trace(S), np.linalg.det(S)),
                             trace=float(np.trace(S)), det=float(np.linalg.det(S))))
    for layout in ("DB", "BtD"):
        for i, (A, B) in enumerate(PAIRS, start=1):
            try:
                cert = riccati_diffusive(A, B, K, tol, layout=layout)
                checks.append(_check(f"pair {i} diffusive Riccati certificate [{layout}]",
                                     cert.residual < 0, -cert.residual,
                                     residual=cert.residual,
                                     D=cert.D.tolist(), Q=cert.Q.tolist()))
            except ConeCertError as exc:
                checks.append(_check(f"pair {i} diffusive Riccati certificate [{layout}]",
                                     False, None, error=str(exc)))

    joint = {}
    for layout in ("DB", "BtD"):
        v = minimize_convex_simplex(PAIRS, resolution, refine_iters, layout, lmi_tol)
        joint[layout] = v
        if v.infeasible:
            margin = v.bound
        elif v.feasible:
            margin = v.residual
        else:
            margin = None
        checks.append(_check(f"no common diagonal (D, Q) [{layout}] -> {v.status}",
                             v.infeasible, margin, **v.to_dict()))

    main = joint["DB"]
    return {
        "inputs": {"A1": A1.tolist(), "B1": B1.tolist(), "A2": A2.tolist(),
                   "B2": B2.tolist(), "E": E.tolist()},
        "checks": checks,
        "verdict": main.status,
        "bound": main.bound,
        "mesh": main.mesh,
        "lipschitz": main.lipschitz,
        "layout": "DB",
        "resolution": resolution,
        "tolerances": {"tol": tol, "lmi_tol": lmi_tol},
        "notes": [
            "DB layout: [[A^T D + D A + Q, D B], [B^T D, -Q]] (delay-system Riccati inequality)",
            "BtD layout: [[A^T D + D A + Q, B^T D], [D B, -Q]] (transposed coupling)",
            f"BtD joint verdict: {joint['BtD'].status}",
        ],
    }
