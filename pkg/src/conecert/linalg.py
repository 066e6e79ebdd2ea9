"""Dense linear-algebra kernel.

Symmetric extreme eigenvalues, a Lyapunov-equation stability test and a
small LP feasibility solver.  Everything here is a pure function of its
arguments.

Matrix text format::

    # comment lines start with '#'
    2 2
    -1.0  0.5
     0.0 -2.0
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DidNotConverge,
    DimensionMismatch,
    InputError,
    NotSymmetric,
    ParseError,
)
from .tolerances import DEFAULT_TOL


def as_matrix(a, name="matrix", square=False):
    """Return ``a`` as a finite 2-D float array (copy), validating shape."""
    m = np.array(a, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{name} has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    return m


def as_vector(x, name="vector", dim=None):
    v = np.array(x, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} has non-finite entries")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"{name} has dimension {v.shape[0]}, expected {dim}")
    return v


def op_norm(a):
    """Spectral norm (largest singular value)."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def scale_of(a):
    """The tolerance scale max(1, ||a||_2) used by every relative threshold."""
    return max(1.0, op_norm(a))


# -- symmetric eigenvalues ---------------------------------------------------


def _check_symmetric(s, name="S"):
    s = as_matrix(s, name, square=True)
    asym = np.linalg.norm(s - s.T)
    if asym > 1e-9 * np.linalg.norm(s):
        raise NotSymmetric(f"{name} is not symmetric (||S - S^T||_F = {asym:.3e})")
    return 0.5 * (s + s.T)


def sym_eigvals(s):
    """All eigenvalues of a symmetric matrix, ascending."""
    s = _check_symmetric(s)
    try:
        return np.linalg.eigvalsh(s)
    except np.linalg.LinAlgError as exc:
        raise DidNotConverge(str(exc)) from exc


def sym_eig_extremes(s):
    """Return ``(lambda_min, lambda_max)`` of a symmetric matrix.

    Raises NotSymmetric when ``||S - S^T||_F > 1e-9 ||S||_F``.
    """
    w = sym_eigvals(s)
    return float(w[0]), float(w[-1])


def lambda_max(s):
    return sym_eig_extremes(s)[1]


def lambda_min(s):
    return sym_eig_extremes(s)[0]


def is_negative_definite(s, tol=DEFAULT_TOL):
    """True iff lambda_max(S) < -tol * max(1, ||S||)."""
    lo, hi = sym_eig_extremes(s)
    norm = max(abs(lo), abs(hi))
    return hi < -tol * max(1.0, norm)


def is_positive_definite(s, tol=DEFAULT_TOL):
    lo, hi = sym_eig_extremes(s)
    norm = max(abs(lo), abs(hi))
    return lo > tol * max(1.0, norm)


# -- stability ---------------------------------------------------------------


@dataclass(frozen=True)
class LyapunovTest:
    """Outcome of the Lyapunov-equation stability test.

    ``P`` solves ``A^T P + P A = -I`` when the Kronecker system is regular;
    it is ``None`` when the system is singular (then some pair of eigenvalues
    sums to zero and ``A`` cannot be Hurwitz).
    """

    stable: bool
    P: np.ndarray | None
    lambda_min_P: float | None
    diagnostic: str


def lyapunov_solve(A, C):
    """Solve ``A^T P + P A = C`` through the column-major Kronecker system.

    Returns ``(P, cond)``; ``P`` is ``None`` if the system is numerically singular.
    """
    A = as_matrix(A, "A", square=True)
    C = as_matrix(C, "C", square=True)
    n = A.shape[0]
    if C.shape != (n, n):
        raise DimensionMismatch(f"C has shape {C.shape}, expected {(n, n)}")
    eye = np.eye(n)
    # vec(A^T P) = (I kron A^T) vec(P), vec(P A) = (A^T kron I) vec(P)
    K = np.kron(eye, A.T) + np.kron(A.T, eye)
    cond = np.linalg.cond(K)
    if not np.isfinite(cond) or cond * np.finfo(float).eps > 1e-6:
        return None, float(cond)
    p = np.linalg.solve(K, C.reshape(-1, order="F"))
    P = p.reshape((n, n), order="F")
    return 0.5 * (P + P.T), float(cond)


def lyapunov_test(A):
    A = as_matrix(A, "A", square=True)
    P, cond = lyapunov_solve(A, -np.eye(A.shape[0]))
    if P is None:
        return LyapunovTest(
            False, None, None,
            f"Lyapunov system singular (cond={cond:.3e}): eigenvalues with "
            "lambda_i + lambda_j = 0 exist",
        )
    lo, hi = (float(x) for x in np.linalg.eigvalsh(P)[[0, -1]])
    # P = int exp(A^T t) exp(A t) dt >= I / (2 ||A||) when A is Hurwitz
    stable = lo > DEFAULT_TOL * max(1.0, abs(hi))
    diag = "P positive definite" if stable else "P not positive definite"
    return LyapunovTest(stable, P, lo, f"{diag} (lambda_min(P)={lo:.6g}, cond={cond:.3e})")


def is_stable(A):
    """Hurwitz test: all eigenvalues of ``A`` have negative real part."""
    return lyapunov_test(A).stable


# -- linear programming ------------------------------------------------------


@dataclass
class LpProblem:
    """Inequality rows ``<a_i, z> >= b_i`` over ``z`` in R^dim.

    ``objective`` (optional) is minimised; without it any feasible point will do.
    """

    rows: np.ndarray
    rhs: np.ndarray
    objective: np.ndarray | None = None
    dim: int = field(init=False)

    def __post_init__(self):
        self.rows = as_matrix(self.rows, "rows")
        self.rhs = as_vector(self.rhs, "rhs", dim=self.rows.shape[0])
        self.dim = self.rows.shape[1]
        if self.objective is not None:
            self.objective = as_vector(self.objective, "objective", dim=self.dim)

    def slacks(self, z):
        return self.rows @ z - self.rhs

    def row_scales(self, z):
        return np.maximum(
            1.0, np.maximum(np.abs(self.rhs), np.linalg.norm(self.rows, axis=1) * np.linalg.norm(z))
        )


@dataclass(frozen=True)
class LpResult:
    feasible: bool
    z: np.ndarray | None
    message: str = ""


def lp_solve(problem, tol=DEFAULT_TOL):
    """Find ``z`` with ``rows @ z >= rhs`` or report infeasibility.

    Every returned witness is checked against all rows with slack
    ``>= -tol * scale_i``; a violating solver answer raises DidNotConverge.
    """
    c = problem.objective if problem.objective is not None else np.zeros(problem.dim)
    res = linprog(
        c,
        A_ub=-problem.rows,
        b_ub=-problem.rhs,
        bounds=[(None, None)] * problem.dim,
        method="highs",
    )
    if res.status == 2:
        return LpResult(False, None, res.message)
    if res.status != 0:
        raise DidNotConverge(f"LP solver status {res.status}: {res.message}")
    z = np.asarray(res.x, dtype=float)
    slack = problem.slacks(z)
    bad = slack < -tol * problem.row_scales(z)
    if np.any(bad):
        raise DidNotConverge(
            f"LP witness violates {int(bad.sum())} row(s); worst slack {slack.min():.3e}"
        )
    return LpResult(True, z, res.message)


# -- matrix text format ------------------------------------------------------


def _tokens(line):
    """Yield ``(col, token)`` with 1-based character columns."""
    col = 0
    for tok in line.split():
        col = line.index(tok, col)
        yield col + 1, tok
        col += len(tok)


def _content_lines(lines, start=0):
    for i in range(start, len(lines)):
        stripped = lines[i].strip()
        if stripped and not stripped.startswith("#"):
            yield i


def _parse_number(tok, source, lineno, col):
    try:
        value = float(tok)
    except ValueError:
        raise ParseError(f"expected a number, got {tok!r}", source, lineno, col) from None
    if not np.isfinite(value):
        raise ParseError(f"non-finite value {tok!r}", source, lineno, col)
    return value


def _parse_int(tok, source, lineno, col):
    try:
        value = int(tok)
    except ValueError:
        raise ParseError(f"expected a positive integer, got {tok!r}", source, lineno, col) from None
    if value <= 0:
        raise ParseError(f"expected a positive integer, got {tok!r}", source, lineno, col)
    return value


def parse_matrix_lines(lines, source="<string>", start=0, header=True, shape=None):
    """Parse one matrix block from ``lines`` beginning at index ``start``.

    Returns ``(matrix, next_index)``.  With ``header=False`` the caller passes
    ``shape`` and the ``rows cols`` line is not expected.
    """
    it = _content_lines(lines, start)
    if header:
        try:
            i = next(it)
        except StopIteration:
            raise ParseError("missing 'rows cols' header", source, len(lines) or None) from None
        toks = list(_tokens(lines[i]))
        if len(toks) != 2:
            raise ParseError("header must be 'rows cols'", source, i + 1, 1)
        rows = _parse_int(toks[0][1], source, i + 1, toks[0][0])
        cols = _parse_int(toks[1][1], source, i + 1, toks[1][0])
        next_index = i + 1
    else:
        rows, cols = shape
        next_index = start
    out = np.empty((rows, cols))
    for r in range(rows):
        try:
            i = next(it)
        except StopIteration:
            raise ParseError(
                f"expected {rows} rows, found {r}", source, len(lines) or None
            ) from None
        toks = list(_tokens(lines[i]))
        if len(toks) != cols:
            col = toks[cols][0] if len(toks) > cols else len(lines[i].rstrip()) + 1
            raise ParseError(f"expected {cols} entries, found {len(toks)}", source, i + 1, col)
        for c, (col, tok) in enumerate(toks):
            out[r, c] = _parse_number(tok, source, i + 1, col)
        next_index = i + 1
    return out, next_index


def parse_matrix(text, source="<string>"):
    """Parse the matrix text format; trailing non-comment content is an error."""
    lines = text.splitlines()
    m, nxt = parse_matrix_lines(lines, source)
    for i in _content_lines(lines, nxt):
        raise ParseError("unexpected content after matrix", source, i + 1, 1)
    return m


def read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read(), str(path))


def format_matrix(m):
    m = as_matrix(m)
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    lines += [" ".join(repr(float(x)) for x in row) for row in m]
    return "\n".join(lines) + "\n"


def write_matrix(path, m):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(m))
