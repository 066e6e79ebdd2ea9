"""Proper self-dual cones with a finite membership test.

Three simplicial families (the nonnegative orthant, its orthogonal images,
and a self-dual cone given by an explicit generator matrix) plus the PSD
cone, which only supports inner products and membership.

For a self-dual cone, ``x`` lies in ``K`` iff ``<g, x> >= 0`` for every
generator ``g``; interior points make every such product strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DimensionMismatch,
    InputError,
    NotSelfDual,
    ParseError,
    SingularGenerators,
    UnsupportedCone,
)
from .linalg import _content_lines, _tokens, as_matrix, as_vector, parse_matrix_lines
from .tolerances import DEFAULT_TOL

PSD_MAX_ORDER = 8


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _unit_columns(G):
    norms = np.linalg.norm(G, axis=0)
    if np.any(norms == 0):
        raise SingularGenerators("zero generator column")
    return G / norms


def _check_independent(G):
    if G.shape[0] != G.shape[1]:
        raise SingularGenerators(f"generator matrix must be square, got {G.shape}")
    s = np.linalg.svd(G, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise SingularGenerators(f"generators are linearly dependent (sigma_min={s[-1]:.3e})")


@dataclass(frozen=True, eq=False)
class Orthant:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InputError("orthant dimension must be >= 1")

    @property
    def dim(self):
        return self.n

    def generator_matrix(self):
        return np.eye(self.n)

    def spec(self):
        return f"orthant {self.n}\n"


@dataclass(frozen=True, eq=False)
class RotatedOrthant:
    """The cone O(R^n_+) for an orthogonal matrix O."""

    O: np.ndarray

    def __post_init__(self):
        O = as_matrix(self.O, "O", square=True)
        err = np.abs(O.T @ O - np.eye(O.shape[0])).max()
        if err > 1e-9:
            raise InputError(f"O is not orthogonal (max |O^T O - I| = {err:.3e})")
        object.__setattr__(self, "O", _frozen(O))

    @property
    def dim(self):
        return self.O.shape[0]

    def generator_matrix(self):
        return np.array(self.O)

    def spec(self):
        from .linalg import format_matrix

        return f"rotated {self.dim}\n" + format_matrix(self.O)


@dataclass(frozen=True, eq=False)
class SimplicialSelfDual:
    """Cone generated by the columns of ``G``; self-duality is checked on construction."""

    G: np.ndarray

    def __post_init__(self):
        G = as_matrix(self.G, "G", square=True)
        _check_independent(G)
        U = _unit_columns(G)
        gram = U.T @ U
        if gram.min() < -1e-12:
            raise NotSelfDual(f"generator pair with negative inner product {gram.min():.3e}")
        if not verify_self_dual(G):
            raise NotSelfDual("dual generators do not match the primal generators")
        object.__setattr__(self, "G", _frozen(G))

    @property
    def dim(self):
        return self.G.shape[0]

    def generator_matrix(self):
        return _unit_columns(np.array(self.G))

    def spec(self):
        from .linalg import format_matrix

        return f"simplicial {self.dim}\n" + format_matrix(self.G)


@dataclass(frozen=True, eq=False)
class PsdCone:
    """Positive semidefinite n x n matrices under the trace inner product."""

    n: int

    def __post_init__(self):
        if not 1 <= self.n <= PSD_MAX_ORDER:
            raise InputError(f"PSD cone order must be in 1..{PSD_MAX_ORDER}, got {self.n}")

    @property
    def dim(self):
        return self.n * (self.n + 1) // 2

    def spec(self):
        return f"psd {self.n}\n"


SIMPLICIAL = (Orthant, RotatedOrthant, SimplicialSelfDual)


def require_simplicial(K):
    if not isinstance(K, SIMPLICIAL):
        raise UnsupportedCone(f"{type(K).__name__} has no finite generator set")
    return K


class Classification(str, Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class MembershipVerdict:
    classification: Classification
    inner_products: np.ndarray
    margin: float

    @property
    def inside(self):
        return self.classification is not Classification.OUTSIDE

    @property
    def interior(self):
        return self.classification is Classification.INTERIOR


def generators(K):
    """Unit-length generators of a simplicial cone, as a list of vectors."""
    G = require_simplicial(K).generator_matrix()
    return [G[:, i].copy() for i in range(G.shape[1])]


def _classify(products, norm, tol):
    margin = float(products.min())
    if margin > tol * norm:
        cls = Classification.INTERIOR
    elif margin < -tol * norm:
        cls = Classification.OUTSIDE
    else:
        cls = Classification.BOUNDARY
    return MembershipVerdict(cls, products, margin)


def membership(K, x, tol=DEFAULT_TOL):
    if isinstance(K, PsdCone):
        X = as_matrix(x, "x", square=True)
        if X.shape[0] != K.n:
            raise DimensionMismatch(f"x has order {X.shape[0]}, cone has order {K.n}")
        if np.abs(X - X.T).max() > 1e-12 * max(1.0, np.abs(X).max()):
            raise InputError("PSD membership needs a symmetric matrix")
        # <u u^T, X> over unit u ranges over [lambda_min, lambda_max]
        eig = np.linalg.eigvalsh(0.5 * (X + X.T))
        return _classify(eig, float(np.linalg.norm(X)), tol)
    G = require_simplicial(K).generator_matrix()
    x = as_vector(x, "x", dim=G.shape[0])
    return _classify(G.T @ x, float(np.linalg.norm(x)), tol)


def verify_self_dual(G, match_tol=1e-8):
    """True iff the simplicial cone spanned by the columns of ``G`` equals its dual.

    The dual of a simplicial cone is generated by the columns of ``G^{-T}``;
    the two unit-normalised generator sets are compared up to permutation.
    """
    G = as_matrix(G, "G", square=True)
    _check_independent(G)
    primal = _unit_columns(G)
    dual = _unit_columns(np.linalg.inv(G.T))
    unused = list(range(dual.shape[1]))
    for i in range(primal.shape[1]):
        dist = [np.linalg.norm(primal[:, i] - dual[:, j]) for j in unused]
        k = int(np.argmin(dist))
        if dist[k] > match_tol:
            return False
        unused.pop(k)
    return True


def interior_point(K):
    K = require_simplicial(K)
    if isinstance(K, SimplicialSelfDual):
        v = np.asarray(K.G).sum(axis=1)
    else:
        v = K.generator_matrix().sum(axis=1)
    if not membership(K, v).interior:  # pragma: no cover - positive combination
        raise AssertionError("sum of generators is not interior")
    return v


def coordinates(K, x):
    """Coefficients ``alpha`` with ``x = sum_i alpha_i g_i`` over the unit generators."""
    G = require_simplicial(K).generator_matrix()
    x = as_vector(x, "x", dim=G.shape[0])
    try:
        return np.linalg.solve(G, x)
    except np.linalg.LinAlgError as exc:
        raise SingularGenerators(str(exc)) from exc


def has_orthonormal_generators(K, tol=1e-9):
    if not isinstance(K, SIMPLICIAL):
        return False
    G = K.generator_matrix()
    return bool(np.abs(G.T @ G - np.eye(G.shape[1])).max() <= tol)


# -- cone spec files ---------------------------------------------------------


def parse_cone_spec(text, source="<string>"):
    """Parse ``orthant n`` / ``rotated n`` + matrix / ``simplicial n`` + matrix / ``psd n``.

    The matrix block may carry its own ``n n`` header line or consist of the
    bare n rows.
    """
    lines = text.splitlines()
    content = list(_content_lines(lines))
    if not content:
        raise ParseError("empty cone spec", source)
    first = content[0]
    toks = list(_tokens(lines[first]))
    if len(toks) != 2:
        raise ParseError("first line must be '<kind> <n>'", source, first + 1, 1)
    kind = toks[0][1].lower()
    try:
        n = int(toks[1][1])
    except ValueError:
        raise ParseError(f"bad dimension {toks[1][1]!r}", source, first + 1, toks[1][0]) from None
    if n < 1:
        raise ParseError(f"bad dimension {n}", source, first + 1, toks[1][0])
    rest = content[1:]
    if kind in ("orthant", "psd"):
        if rest:
            raise ParseError("unexpected content after cone header", source, rest[0] + 1, 1)
        return Orthant(n) if kind == "orthant" else PsdCone(n)
    if kind not in ("rotated", "simplicial"):
        raise ParseError(f"unknown cone kind {kind!r}", source, first + 1, toks[0][0])
    if len(rest) == n + 1:
        M, nxt = parse_matrix_lines(lines, source, first + 1)
    elif len(rest) == n:
        M, nxt = parse_matrix_lines(lines, source, first + 1, header=False, shape=(n, n))
    else:
        line = rest[0] + 1 if rest else first + 1
        raise ParseError(f"expected an {n}x{n} matrix block", source, line, 1)
    if M.shape != (n, n):
        raise ParseError(f"matrix block must be {n}x{n}, got {M.shape}", source, first + 2, 1)
    return RotatedOrthant(M) if kind == "rotated" else SimplicialSelfDual(M)


def read_cone_spec(path):
    with open(path, encoding="utf-8") as fh:
        return parse_cone_spec(fh.read(), str(path))


def cone_to_dict(K):
    d = {"kind": type(K).__name__, "dim": K.dim, "spec": K.spec()}
    return d


def cone_from_dict(d):
    return parse_cone_spec(d["spec"], "<certificate>")
