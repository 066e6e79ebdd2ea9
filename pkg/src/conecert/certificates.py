"""Diffusive Lyapunov and Riccati stability certificates.

Every constructor re-verifies what it builds with independent predicate
calls and raises InternalVerificationFailed rather than return a
certificate that does not check out in floating point.

Two block layouts are supported for the Riccati operator::

    "BtD":  [[A^T D + D A + Q,  B^T D],      "DB":  [[A^T D + D A + Q,  D B],
             [D B,             -Q    ]]              [B^T D,           -Q  ]]

"DB" is the Lyapunov-Krasovskii block of  x' = A x + B x(t - tau)  with
V = x^T D x + int x^T Q x; its Schur complement is the Riccati inequality
A^T D + D A + Q + D B Q^{-1} B^T D < 0.  "BtD" is the transposed-coupling
variant (Schur complement A^T D + D A + Q + B^T D Q^{-1} D B).  Both admit
diffusive certificates for QM ``A``, K-nonnegative ``B`` and Hurwitz ``A + B``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cones import (
    PsdCone,
    cone_from_dict,
    cone_to_dict,
    has_orthonormal_generators,
    membership,
    require_simplicial,
)
from .errors import (
    DimensionMismatch,
    InputError,
    InternalVerificationFailed,
    NotInterior,
    NotKNonnegative,
    NotSymmetric,
    NotQuasiMonotone,
    NotStable,
    UnsupportedCone,
)
from .linalg import (
    as_matrix,
    as_vector,
    is_negative_definite,
    is_stable,
    sym_eig_extremes,
)
from .qm import is_diffusive, is_k_nonnegative, is_qm, stability_witness
from .tolerances import BLOCK_IDENTITY_RTOL, COORD_FLOOR, DEFAULT_TOL, DMAP_RTOL

LAYOUTS = ("BtD", "DB")


def _check_layout(layout):
    if layout not in LAYOUTS:
        raise InputError(f"unknown block layout {layout!r}; expected one of {LAYOUTS}")


def _supported_generators(K):
    if isinstance(K, PsdCone):
        raise UnsupportedCone("certificates are not available on the PSD cone")
    require_simplicial(K)
    if not has_orthonormal_generators(K):
        # the coefficient-ratio map is then diffusive but not self-adjoint
        raise UnsupportedCone("the (v, w) diagonal map needs orthonormal generators")
    return K.generator_matrix()


def assumption_d_map(K, v, w, tol=DEFAULT_TOL):
    """Self-adjoint diffusive ``D`` with ``D v = w`` for interior ``v``, ``w``.

    With O the (orthogonal) generator matrix, ``D = O diag(a) O^T`` where
    ``a_i = (O^T w)_i / (O^T v)_i``.
    """
    O = _supported_generators(K)
    n = O.shape[0]
    v = as_vector(v, "v", dim=n)
    w = as_vector(w, "w", dim=n)
    for name, x in (("v", v), ("w", w)):
        if not membership(K, x, tol).interior:
            raise NotInterior(f"{name} is not in the interior of K")
    cv = O.T @ v
    cw = O.T @ w
    if cv.min() < COORD_FLOOR * np.linalg.norm(v):
        raise NotInterior("v is too close to the boundary of K")
    D = O @ np.diag(cw / cv) @ O.T
    D = 0.5 * (D + D.T)
    err = np.linalg.norm(D @ v - w)
    if err > DMAP_RTOL * max(1.0, np.linalg.norm(w)):
        raise InternalVerificationFailed(f"D v = w violated by {err:.3e}")
    return D


def assemble_block(A, B, D, Q, layout="BtD"):
    """The 2n x 2n Riccati block operator for the given layout."""
    _check_layout(layout)
    A = as_matrix(A, "A", square=True)
    n = A.shape[0]
    mats = [A]
    for name, m in (("B", B), ("D", D), ("Q", Q)):
        m = as_matrix(m, name, square=True)
        if m.shape[0] != n:
            raise DimensionMismatch(f"{name} is {m.shape[0]}x{m.shape[0]}, expected {n}x{n}")
        mats.append(m)
    A, B, D, Q = mats
    top = A.T @ D + D @ A + Q
    if layout == "BtD":
        upper, lower = B.T @ D, D @ B
    else:
        upper, lower = D @ B, B.T @ D
    return np.block([[top, upper], [lower, -Q]])


@dataclass(frozen=True)
class LyapunovCertificate:
    A: np.ndarray
    D: np.ndarray
    v: np.ndarray
    w: np.ndarray
    residual: float
    lambda_min_D: float

    def check(self, K, tol=DEFAULT_TOL):
        """Independent re-check of the four invariants; returns a dict of named results."""
        D = self.D
        S = self.A.T @ D + D @ self.A
        lo_d, _ = sym_eig_extremes(D)
        _, res = sym_eig_extremes(S)
        return {
            "symmetric": (bool(np.abs(D - D.T).max() <= 1e-9 * max(1.0, np.abs(D).max())),
                          float(np.abs(D - D.T).max())),
            "diffusive": (is_diffusive(D, K, tol).verdict, is_diffusive(D, K, tol).margin),
            "positive_definite": (lo_d > 0, lo_d),
            "residual_negative": (res < 0 and is_negative_definite(S, tol), res),
        }

    def to_dict(self):
        return {
            "kind": "lyapunov",
            "A": self.A.tolist(),
            "D": self.D.tolist(),
            "v": self.v.tolist(),
            "w": self.w.tolist(),
            "residual": self.residual,
            "lambda_min_D": self.lambda_min_D,
        }


@dataclass(frozen=True)
class RiccatiCertificate:
    A: np.ndarray
    B: np.ndarray
    D: np.ndarray
    Q: np.ndarray
    v: np.ndarray
    w: np.ndarray
    residual: float
    identity_error: float
    layout: str = "BtD"

    def block(self):
        return assemble_block(self.A, self.B, self.D, self.Q, self.layout)

    def check(self, K, tol=DEFAULT_TOL):
        M = self.block()
        _, res = sym_eig_extremes(M)
        top = M[: self.A.shape[0], : self.A.shape[0]]
        err = block_identity_error(M, self.v, self.w)
        return {
            "D_diffusive": (is_diffusive(self.D, K, tol).verdict, is_diffusive(self.D, K, tol).margin),
            "Q_diffusive": (is_diffusive(self.Q, K, tol).verdict, is_diffusive(self.Q, K, tol).margin),
            "residual_negative": (res < 0 and is_negative_definite(M, tol), res),
            "block_identity": (err <= BLOCK_IDENTITY_RTOL, err),
            "top_left_negative": (sym_eig_extremes(top)[1] < 0, sym_eig_extremes(top)[1]),
            "Q_positive": (sym_eig_extremes(self.Q)[0] > 0, sym_eig_extremes(self.Q)[0]),
        }

    def to_dict(self):
        return {
            "kind": "riccati",
            "layout": self.layout,
            "A": self.A.tolist(),
            "B": self.B.tolist(),
            "D": self.D.tolist(),
            "Q": self.Q.tolist(),
            "v": self.v.tolist(),
            "w": self.w.tolist(),
            "residual": self.residual,
            "identity_error": self.identity_error,
        }


def block_identity_error(M, v, w):
    """Relative error of ``M (v, v) = -(w, w) / 2``."""
    vv = np.concatenate([v, v])
    target = -0.5 * np.concatenate([w, w])
    return float(np.linalg.norm(M @ vv - target) / max(1.0, np.linalg.norm(target)))


def _require_qm_stable(A, K, tol, name="A"):
    report = is_qm(A, K, tol)
    if not report:
        raise NotQuasiMonotone(f"{name} is not quasi-monotone: violations {report.violations}")
    if not is_stable(A):
        raise NotStable(f"{name} is not Hurwitz")


def lyapunov_diffusive(A, K, tol=DEFAULT_TOL):
    """Symmetric diffusive ``D > 0`` with ``A^T D + D A < 0`` for stable QM ``A``."""
    A = as_matrix(A, "A", square=True)
    _supported_generators(K)
    _require_qm_stable(A, K, tol)
    wv = stability_witness(A, K, tol)
    ww = stability_witness(A.T, K, tol)
    if wv is None or ww is None:
        raise InternalVerificationFailed("no interior witness for a stable QM map")
    D = assumption_d_map(K, wv.v, ww.v, tol)
    lo, _ = sym_eig_extremes(D)
    _, res = sym_eig_extremes(A.T @ D + D @ A)
    cert = LyapunovCertificate(A, D, wv.v, ww.v, res, lo)
    failed = [k for k, (ok, _) in cert.check(K, tol).items() if not ok]
    if failed:
        raise InternalVerificationFailed(f"Lyapunov certificate failed: {failed}")
    return cert


def riccati_diffusive(A, B, K, tol=DEFAULT_TOL, layout="BtD"):
    """Diffusive ``(D, Q)`` making the Riccati block negative definite.

    ``D`` comes from the Lyapunov certificate of ``A + B``;
    ``v`` is an interior witness for ``S = (A+B)^T D + D (A+B)``, ``w = -S v``,
    and ``Q`` is the diagonal map sending ``v`` to ``C v + w / 2`` where
    ``C`` is the lower-left coupling block (``D B`` or ``B^T D``).  This makes
    ``M (v, v) = -(w, w) / 2`` exactly.
    """
    _check_layout(layout)
    A = as_matrix(A, "A", square=True)
    B = as_matrix(B, "B", square=True)
    if B.shape != A.shape:
        raise DimensionMismatch(f"B has shape {B.shape}, A has shape {A.shape}")
    _supported_generators(K)
    report = is_qm(A, K, tol)
    if not report:
        raise NotQuasiMonotone(f"A is not quasi-monotone: violations {report.violations}")
    nonneg = is_k_nonnegative(B, K, tol)
    if not nonneg:
        raise NotKNonnegative(f"B is not K-nonnegative: violations {nonneg.violations}")
    if not is_stable(A + B):
        raise NotStable("A + B is not Hurwitz")

    D = lyapunov_diffusive(A + B, K, tol).D
    S = (A + B).T @ D + D @ (A + B)
    S = 0.5 * (S + S.T)
    try:
        ws = stability_witness(S, K, tol)
    except NotQuasiMonotone as exc:
        raise InternalVerificationFailed(f"S lost quasi-monotonicity: {exc}") from exc
    if ws is None:
        raise InternalVerificationFailed("no interior witness for S")
    v = ws.v
    w = -S @ v
    coupling = D @ B if layout == "BtD" else B.T @ D
    Q = assumption_d_map(K, v, coupling @ v + 0.5 * w, tol)
    M = assemble_block(A, B, D, Q, layout)
    _, res = sym_eig_extremes(M)
    cert = RiccatiCertificate(A, B, D, Q, v, w, res, block_identity_error(M, v, w), layout)
    failed = [k for k, (ok, _) in cert.check(K, tol).items() if not ok]
    if failed:
        raise InternalVerificationFailed(f"Riccati certificate failed: {failed}")
    return cert


# -- serialisation -----------------------------------------------------------


def certificate_report(cert, K, tol=DEFAULT_TOL):
    """Machine-readable report: inputs, cone, certificate and every check margin."""
    checks = cert.check(K, tol)
    out = cert.to_dict()
    out["cone"] = cone_to_dict(K)
    out["tolerance"] = tol
    out["checks"] = [
        {"name": name, "verdict": bool(ok), "margin": float(margin)}
        for name, (ok, margin) in checks.items()
    ]
    out["verdict"] = all(c["verdict"] for c in out["checks"])
    return out


def certificate_from_dict(d):
    """Rebuild ``(certificate, cone)`` from :func:`certificate_report` output."""
    K = cone_from_dict(d["cone"])
    arr = lambda key: np.array(d[key], dtype=float)  # noqa: E731
    if d["kind"] == "lyapunov":
        cert = LyapunovCertificate(arr("A"), arr("D"), arr("v"), arr("w"),
                                   float(d["residual"]), float(d["lambda_min_D"]))
    elif d["kind"] == "riccati":
        cert = RiccatiCertificate(arr("A"), arr("B"), arr("D"), arr("Q"), arr("v"), arr("w"),
                                  float(d["residual"]), float(d["identity_error"]),
                                  d.get("layout", "BtD"))
    else:
        raise InputError(f"unknown certificate kind {d['kind']!r}")
    return cert, K


def reverify(d, tol=None, rtol=1e-9):
    """Recompute a serialised certificate from its matrices.

    Returns ``(ok, problems)``; ``ok`` requires every invariant to hold and
    every stored residual/margin to be reproduced to ``rtol``.
    """
    tol = d.get("tolerance", DEFAULT_TOL) if tol is None else tol
    cert, K = certificate_from_dict(d)
    try:
        return _reverify(d, cert, K, tol, rtol)
    except NotSymmetric as exc:
        # a tampered or corrupted certificate is a failed certificate, not bad input
        return False, [str(exc)]


def _reverify(d, cert, K, tol, rtol):
    problems = []
    checks = cert.check(K, tol)
    for name, (ok, _) in checks.items():
        if not ok:
            problems.append(f"invariant {name} fails")
    stored = {c["name"]: c["margin"] for c in d.get("checks", [])}
    for name, (_, margin) in checks.items():
        if name in stored and not np.isclose(margin, stored[name], rtol=rtol, atol=rtol):
            problems.append(f"margin {name}: stored {stored[name]!r}, recomputed {margin!r}")
    if d["kind"] == "lyapunov":
        res = sym_eig_extremes(cert.A.T @ cert.D + cert.D @ cert.A)[1]
    else:
        res = sym_eig_extremes(cert.block())[1]
    if not np.isclose(res, cert.residual, rtol=rtol, atol=rtol):
        problems.append(f"residual: stored {cert.residual!r}, recomputed {res!r}")
    return not problems, problems
