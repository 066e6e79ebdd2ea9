"""Certified feasibility of diagonal Lyapunov/Riccati LMIs on the orthant.

The unknowns ``theta = (d, q)`` (or ``e`` for the Lyapunov problem) enter
every block matrix linearly, so

    f(theta) = max_i lambda_max(sum_k theta_k N_ik)

is convex and positively homogeneous.  A strictly feasible diagonal
solution exists iff ``f < 0`` somewhere on the unit simplex, and
``min f > 0`` over the closed simplex rules out every ``D, Q > 0``.

Lower bounds on ``min f`` come from two independent routes:

* grid + Lipschitz: ``min_grid f - L h`` with ``L = max_i sum_k ||N_ik||_2``
  and ``h = 1 / resolution`` the max-norm mesh of the simplex lattice;
* supporting hyperplanes: for a unit vector ``u``,
  ``lambda_max(M(theta)) >= u^T M(theta) u``, which is linear in ``theta``.
  Any convex combination ``c`` of such cuts gives ``min f >= min_k c_k``.
  Cuts are collected at the best grid points and refined with Kelley's
  cutting-plane method; the combination weights are the LP duals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .certificates import LAYOUTS, assemble_block
from .cones import Orthant
from .errors import DimensionMismatch, InputError, ScaleTooLarge
from .linalg import as_matrix, is_negative_definite, sym_eig_extremes
from .qm import is_k_nonnegative, is_qm
from .tolerances import LMI_TOL

MAX_VARIABLES = 8
CHUNK = 200_000


@dataclass(frozen=True)
class SystemPair:
    """Metzler ``A`` and nonnegative ``B`` of a positive delay system."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A", square=True)
        B = as_matrix(self.B, "B", square=True)
        if A.shape != B.shape:
            raise DimensionMismatch(f"A is {A.shape}, B is {B.shape}")
        K = Orthant(A.shape[0])
        if not is_qm(A, K):
            raise InputError("A must be Metzler")
        if not is_k_nonnegative(B, K):
            raise InputError("B must be entrywise nonnegative")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class SimplexPoint:
    theta: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.theta, dtype=float)
        if t.ndim != 1 or t.size % 2:
            raise DimensionMismatch("theta must have even length 2n")
        if t.min() < 0 or abs(t.sum() - 1.0) > 1e-12:
            raise InputError("theta must be nonnegative and sum to 1")
        object.__setattr__(self, "theta", t)

    @property
    def d(self):
        return self.theta[: self.theta.size // 2]

    @property
    def q(self):
        return self.theta[self.theta.size // 2:]


@dataclass
class FeasibilityVerdict:
    """Outcome of a certified simplex minimisation.

    ``status`` is ``"Feasible"``, ``"InfeasibleCertified"`` or ``"Inconclusive"``.
    """

    status: str
    best_value: float
    best_theta: np.ndarray
    bound: float
    lipschitz_bound: float
    cut_bound: float
    lipschitz: float
    resolution: int
    mesh: float
    grid_min: float
    matrices: dict = field(default_factory=dict)
    residual: float | None = None
    message: str = ""

    @property
    def feasible(self):
        return self.status == "Feasible"

    @property
    def infeasible(self):
        return self.status == "InfeasibleCertified"

    def to_dict(self):
        fin = lambda x: float(x) if x is not None and np.isfinite(x) else None  # noqa: E731
        return {
            "status": self.status,
            "best_value": fin(self.best_value),
            "best_theta": self.best_theta.tolist(),
            "bound": fin(self.bound),
            "lipschitz_bound": fin(self.lipschitz_bound),
            "cut_bound": fin(self.cut_bound),
            "lipschitz": self.lipschitz,
            "resolution": self.resolution,
            "mesh": self.mesh,
            "grid_min": fin(self.grid_min),
            "residual": fin(self.residual),
            "matrices": {k: np.asarray(v).tolist() for k, v in self.matrices.items()},
            "message": self.message,
        }


# -- coefficient families ------------------------------------------------------


def _as_pairs(pairs):
    out = [p if isinstance(p, SystemPair) else SystemPair(*p) for p in pairs]
    if not out:
        raise InputError("at least one system pair is required")
    if len({p.n for p in out}) != 1:
        raise DimensionMismatch("all pairs must have the same dimension")
    return out


def riccati_family(pairs, layout="DB"):
    """Coefficient stack of shape ``(pairs, 2n, 2n, 2n)``: ``N[i, k]`` multiplies theta_k."""
    if layout not in LAYOUTS:
        raise InputError(f"unknown block layout {layout!r}")
    pairs = _as_pairs(pairs)
    n = pairs[0].n
    zero = np.zeros((n, n))
    out = np.empty((len(pairs), 2 * n, 2 * n, 2 * n))
    for i, p in enumerate(pairs):
        for k in range(n):
            E = np.zeros((n, n))
            E[k, k] = 1.0
            out[i, k] = assemble_block(p.A, p.B, E, zero, layout)
            out[i, n + k] = assemble_block(p.A, p.B, zero, E, layout)
    return out


def lyapunov_family(A_list):
    mats = [as_matrix(A, "A", square=True) for A in A_list]
    if not mats:
        raise InputError("at least one matrix is required")
    n = mats[0].shape[0]
    if any(A.shape[0] != n for A in mats):
        raise DimensionMismatch("all matrices must have the same dimension")
    out = np.empty((len(mats), n, n, n))
    for i, A in enumerate(mats):
        for k in range(n):
            E = np.zeros((n, n))
            E[k, k] = 1.0
            out[i, k] = A.T @ E + E @ A
    return out


def family_values(family, thetas):
    """``f`` at each row of ``thetas`` (shape ``(G, m)``)."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    best = np.full(thetas.shape[0], -np.inf)
    for Ni in family:
        M = np.tensordot(thetas, Ni, axes=(1, 0))
        best = np.maximum(best, np.linalg.eigvalsh(M)[:, -1])
    return best


def family_cuts(family, theta):
    """Supporting-hyperplane coefficients at ``theta``, one row per pair."""
    cuts = []
    for Ni in family:
        M = np.tensordot(theta, Ni, axes=(0, 0))
        _, vecs = np.linalg.eigh(M)
        u = vecs[:, -1]
        u = u / np.linalg.norm(u)
        cuts.append(np.einsum("i,kij,j->k", u, Ni, u) / (u @ u))
    return np.array(cuts)


def family_lipschitz(family):
    return float(max(sum(np.linalg.norm(Nk, 2) for Nk in Ni) for Ni in family))


def objective(pairs, theta, layout="DB"):
    """``max_i lambda_max`` of the Riccati blocks at ``D = diag(d)``, ``Q = diag(q)``.

    ``theta`` may be a SimplexPoint or any nonnegative vector ``(d, q)``.
    """
    pairs = _as_pairs(pairs)
    t = theta.theta if isinstance(theta, SimplexPoint) else np.asarray(theta, dtype=float)
    n = pairs[0].n
    if t.shape != (2 * n,):
        raise DimensionMismatch(f"theta must have length {2 * n}")
    D, Q = np.diag(t[:n]), np.diag(t[n:])
    return max(sym_eig_extremes(assemble_block(p.A, p.B, D, Q, layout))[1] for p in pairs)


# -- simplex grid ------------------------------------------------------------


def simplex_grid_size(m, resolution):
    return math.comb(resolution + m - 1, m - 1)


def simplex_grid(m, resolution):
    """Yield lattice points ``k / resolution`` (``sum k = resolution``) in lexicographic order."""
    R = resolution
    for bars in itertools.combinations(range(R + m - 1), m - 1):
        prev = -1
        comp = []
        for b in bars:
            comp.append(b - prev - 1)
            prev = b
        comp.append(R + m - 2 - prev)
        yield comp


def _grid_scan(family, resolution, keep):
    """Minimum of ``f`` over the lattice plus the ``keep`` lowest points.

    Ties resolve to the lexicographically first lattice point.
    """
    m = family.shape[1]
    it = simplex_grid(m, resolution)
    best_val, best_pt = np.inf, None
    pool_vals = np.empty(0)
    pool_pts = np.empty((0, m))
    while True:
        chunk = list(itertools.islice(it, CHUNK))
        if not chunk:
            break
        pts = np.array(chunk, dtype=float) / resolution
        vals = family_values(family, pts)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val, best_pt = float(vals[j]), pts[j]
        order = np.argsort(vals, kind="stable")[:keep]
        pool_vals = np.concatenate([pool_vals, vals[order]])
        pool_pts = np.vstack([pool_pts, pts[order]])
        sel = np.argsort(pool_vals, kind="stable")[:keep]
        pool_vals, pool_pts = pool_vals[sel], pool_pts[sel]
    return best_val, best_pt, pool_pts


def _cut_lp(cuts):
    """Minimise ``max_j cuts[j] . theta`` over the simplex.

    Returns ``(theta, certified_lower_bound)``; the bound is recomputed from
    the dual weights, so it does not depend on the LP solver's accuracy.
    """
    J, m = cuts.shape
    c = np.zeros(m + 1)
    c[-1] = 1.0
    A_ub = np.hstack([cuts, -np.ones((J, 1))])
    A_eq = np.hstack([np.ones((1, m)), np.zeros((1, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(J), A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * m + [(None, None)], method="highs")
    if res.status != 0:
        return None, -np.inf
    mu = np.clip(-np.asarray(res.ineqlin.marginals), 0.0, None)
    if mu.sum() <= 0:
        return np.clip(res.x[:m], 0, None), -np.inf
    mu = mu / mu.sum()
    bound = float((mu @ cuts).min())
    theta = np.clip(res.x[:m], 0, None)
    return theta / theta.sum(), bound


def _interior_push(family, theta, value, tol):
    """Move a feasible point off the simplex boundary, keeping ``f < -tol``."""
    m = theta.size
    if theta.min() > tol:
        return theta, value
    centre = np.full(m, 1.0 / m)
    eps = 1e-2
    while eps > 1e-12:
        t = (1 - eps) * theta + eps * centre
        fv = float(family_values(family, t)[0])
        if fv < -tol and t.min() > tol:
            return t, fv
        eps /= 4
    return None, value


def certify_simplex(family, resolution=60, refine_iters=60, tol=LMI_TOL, keep=64):
    """Minimise ``f`` over the unit simplex and classify the result.

    Returns a FeasibilityVerdict without the problem-specific ``matrices``.
    """
    m = family.shape[1]
    if m > MAX_VARIABLES:
        raise ScaleTooLarge(f"{m} simplex variables exceeds the cap of {MAX_VARIABLES}")
    if resolution < 1:
        raise InputError("resolution must be >= 1")
    L = family_lipschitz(family)
    h = 1.0 / resolution
    grid_min, best_pt, pool = _grid_scan(family, resolution, keep)
    best_val = grid_min
    lip_bound = grid_min - L * h

    cuts = np.vstack([family_cuts(family, p) for p in pool])
    theta, cut_bound = _cut_lp(cuts)
    for _ in range(refine_iters):
        if theta is None or best_val < -tol or cut_bound > tol:
            break
        if best_val - cut_bound < 1e-12:
            break
        fv = float(family_values(family, theta)[0])
        if fv < best_val:
            best_val, best_pt = fv, theta
        cuts = np.vstack([cuts, family_cuts(family, theta)])
        theta, new_bound = _cut_lp(cuts)
        cut_bound = max(cut_bound, new_bound)

    bound = max(lip_bound, cut_bound)
    common = dict(lipschitz_bound=lip_bound, cut_bound=cut_bound, lipschitz=L,
                  resolution=resolution, mesh=h, grid_min=grid_min)
    if best_val < -tol:
        pt, val = _interior_push(family, best_pt, best_val, tol)
        if pt is not None:
            return FeasibilityVerdict("Feasible", val, pt, bound, **common,
                                      message="strictly feasible diagonal solution found")
        return FeasibilityVerdict(
            "Inconclusive", best_val, best_pt, bound, **common,
            message="negative values only on the simplex boundary; raise the resolution")
    if bound > tol:
        return FeasibilityVerdict("InfeasibleCertified", best_val, best_pt, bound, **common,
                                  message="objective bounded away from zero on the whole simplex")
    return FeasibilityVerdict(
        "Inconclusive", best_val, best_pt, bound, **common,
        message=f"bound gap [{bound:.3e}, {best_val:.3e}] straddles the strictness band; "
                "raise --resolution or the refinement iterations")


def minimize_convex_simplex(pairs, resolution=60, refine_iters=60, layout="DB", tol=LMI_TOL):
    """Common diagonal ``(D, Q)`` for the Riccati blocks of several system pairs.

    ``Feasible`` verdicts are re-verified pair by pair with an independent
    block assembly and definiteness check.
    """
    pairs = _as_pairs(pairs)
    n = pairs[0].n
    if 2 * n > MAX_VARIABLES:
        raise ScaleTooLarge(f"2n = {2 * n} exceeds the cap of {MAX_VARIABLES}")
    family = riccati_family(pairs, layout)
    verdict = certify_simplex(family, resolution, refine_iters, tol)
    if verdict.feasible:
        D, Q = np.diag(verdict.best_theta[:n]), np.diag(verdict.best_theta[n:])
        blocks = [assemble_block(p.A, p.B, D, Q, layout) for p in pairs]
        if not all(is_negative_definite(M) for M in blocks):
            verdict.status = "Inconclusive"
            verdict.message = "candidate failed independent re-verification"
        else:
            verdict.residual = max(sym_eig_extremes(M)[1] for M in blocks)
            verdict.matrices = {"D": D, "Q": Q}
    return verdict


def common_lyapunov_diag(A_list, resolution=60, refine_iters=60, tol=LMI_TOL):
    """Common diagonal ``E > 0`` with ``A_i^T E + E A_i < 0`` for all ``i``."""
    mats = [as_matrix(A, "A", square=True) for A in A_list]
    if mats and mats[0].shape[0] > MAX_VARIABLES // 2:
        raise ScaleTooLarge(f"n = {mats[0].shape[0]} exceeds the cap of {MAX_VARIABLES // 2}")
    family = lyapunov_family(mats)
    verdict = certify_simplex(family, resolution, refine_iters, tol)
    if verdict.feasible:
        E = np.diag(verdict.best_theta)
        blocks = [A.T @ E + E @ A for A in mats]
        if not all(is_negative_definite(M) for M in blocks):
            verdict.status = "Inconclusive"
            verdict.message = "candidate failed independent re-verification"
        else:
            verdict.residual = max(sym_eig_extremes(M)[1] for M in blocks)
            verdict.matrices = {"E": E}
    return verdict
