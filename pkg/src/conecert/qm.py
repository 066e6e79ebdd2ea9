"""Quasi-monotone, K-nonnegative and diffusive maps on simplicial self-dual cones.

Checks run over generator pairs only.  If ``x = sum a_i g_i`` and
``y = sum b_j g_j`` lie in K with ``<x, y> = 0``, every term
``a_i b_j <g_i, g_j>`` is nonnegative (self-duality), so each pair with
``a_i b_j > 0`` is itself orthogonal.  Hence ``<x, T y>`` is a nonnegative
combination of ``<g_i, T g_j>`` over orthogonal generator pairs, and the
finite test is equivalent to the definition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cones import require_simplicial
from .errors import (
    DimensionMismatch,
    NotDiffusive,
    NotQuasiMonotone,
    NotStable,
    SingularE,
)
from .linalg import LpProblem, as_matrix, is_stable, lp_solve, scale_of
from .tolerances import DEFAULT_TOL


@dataclass(frozen=True)
class PredicateReport:
    """``violations`` holds ``(i, j, value)`` triples of offending generator pairs."""

    verdict: bool
    violations: list = field(default_factory=list)
    margin: float = float("inf")

    def __bool__(self):
        return self.verdict

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "violations": [[i, j, v] for i, j, v in self.violations],
            "margin": self.margin if np.isfinite(self.margin) else None,
        }


@dataclass(frozen=True)
class StabilityWitness:
    """Interior ``v`` with ``-A v`` interior, normalised so every margin is at least 1."""

    v: np.ndarray
    margins_v: np.ndarray
    margins_Av: np.ndarray

    @property
    def margin(self):
        return float(min(self.margins_v.min(), self.margins_Av.min()))


def adjoint(A):
    return as_matrix(A, "A", square=True).T.copy()


def _setup(T, K, name):
    G = require_simplicial(K).generator_matrix()
    T = as_matrix(T, name, square=True)
    if T.shape[0] != G.shape[0]:
        raise DimensionMismatch(f"{name} is {T.shape[0]}x{T.shape[0]}, cone has dimension {G.shape[0]}")
    return T, G


def _orthogonal_pairs(G, tol):
    gram = G.T @ G
    n = G.shape[1]
    return [(i, j) for i in range(n) for j in range(n) if i != j and abs(gram[i, j]) <= tol]


def is_qm(A, K, tol=DEFAULT_TOL):
    """Quasi-monotonicity; on the orthant this is exactly the Metzler test."""
    A, G = _setup(A, K, "A")
    C = G.T @ A @ G
    bound = -tol * scale_of(A)
    violations = []
    margin = float("inf")
    for i, j in _orthogonal_pairs(G, tol):
        margin = min(margin, float(C[i, j]))
        if C[i, j] < bound:
            violations.append((i, j, float(C[i, j])))
    return PredicateReport(not violations, violations, margin)


def is_k_nonnegative(B, K, tol=DEFAULT_TOL):
    """``B(K) ⊆ K``, checked on the images of the generators.

    Violations are reported as ``(i, j, <g_j, B g_i>)``.
    """
    B, G = _setup(B, K, "B")
    # column i: inner products of B g_i with every generator, i.e. membership of B g_i;
    # scaled by ||B|| so images that vanish numerically are not misread
    C = G.T @ B @ G
    bound = -tol * scale_of(B)
    violations = [(i, j, float(C[j, i]))
                  for i in range(G.shape[1]) for j in range(G.shape[1]) if C[j, i] < bound]
    margin = float(C.min()) if C.size else float("inf")
    return PredicateReport(not violations, violations, margin)


def is_diffusive(D, K, tol=DEFAULT_TOL):
    D, G = _setup(D, K, "D")
    nonneg = is_k_nonnegative(D, K, tol)
    C = G.T @ D @ G
    bound = tol * scale_of(D)
    violations = list(nonneg.violations)
    margin = nonneg.margin
    for i, j in _orthogonal_pairs(G, tol):
        margin = min(margin, -abs(float(C[i, j])))
        if abs(C[i, j]) > bound:
            violations.append((i, j, float(C[i, j])))
    return PredicateReport(not violations, violations, margin)


def stability_witness(A, K, tol=DEFAULT_TOL):
    """Search for ``v`` interior with ``-A v`` interior; ``None`` if there is none.

    For quasi-monotone ``A`` such a ``v`` exists exactly when ``A`` is
    Hurwitz.  Strict interiority is encoded as ``<g_i, v> >= 1`` and
    ``<g_i, -A v> >= 1``, which loses nothing because the conditions are
    positively homogeneous in ``v``.
    """
    report = is_qm(A, K, tol)
    if not report.verdict:
        raise NotQuasiMonotone(f"A is not quasi-monotone: violations {report.violations}")
    A = as_matrix(A, "A", square=True)
    G = require_simplicial(K).generator_matrix()
    n = G.shape[0]
    rows = np.vstack([G.T, -G.T @ A])
    # minimising sum_i <g_i, v> picks a canonical, bounded witness
    problem = LpProblem(rows, np.ones(2 * n), objective=G.sum(axis=1))
    result = lp_solve(problem, tol)
    if not result.feasible:
        return None
    v = result.z
    lo = float((rows @ v).min())
    if lo <= 0:
        return None
    if lo < 1.0:
        v = v / lo
    return StabilityWitness(v, G.T @ v, -G.T @ A @ v)


def d_stability(A, E, K, tol=DEFAULT_TOL):
    """Check that ``E A`` is Hurwitz for a stable QM ``A`` and invertible diffusive ``E``.

    All preconditions are verified first, so a ``False`` return would be a
    counterexample to the D-stability theorem rather than bad input.
    """
    A = as_matrix(A, "A", square=True)
    E, _ = _setup(E, K, "E")
    qm = is_qm(A, K, tol)
    if not qm:
        raise NotQuasiMonotone(f"A is not quasi-monotone: violations {qm.violations}")
    if not is_stable(A):
        raise NotStable("A is not Hurwitz")
    diff = is_diffusive(E, K, tol)
    if not diff:
        raise NotDiffusive(f"E is not diffusive: violations {diff.violations}")
    if abs(np.linalg.det(E)) <= tol * scale_of(E) ** E.shape[0]:
        raise SingularE("E is singular")
    return is_stable(E @ A)
