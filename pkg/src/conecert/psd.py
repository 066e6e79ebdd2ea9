"""Quadratic representations on symmetric matrices.

On S^n with the Jordan product ``a o b = (ab + ba) / 2`` the quadratic
representation ``P_a(x) = 2 a o (a o x) - (a o a) o x`` reduces to
``a x a``.  It preserves the PSD cone but, unlike a nonnegative diagonal
matrix on the orthant, it need not preserve orthogonality within the cone.
"""

from __future__ import annotations

import numpy as np

from .cones import PSD_MAX_ORDER
from .errors import DimensionMismatch, InputError
from .linalg import as_matrix


def as_sym(X, name="X"):
    X = as_matrix(X, name, square=True)
    if X.shape[0] > PSD_MAX_ORDER:
        raise InputError(f"{name} has order {X.shape[0]} > {PSD_MAX_ORDER}")
    if np.abs(X - X.T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(X).max(initial=0.0)):
        raise InputError(f"{name} is not symmetric")
    return X


def _same_order(X, Y):
    if X.shape != Y.shape:
        raise DimensionMismatch(f"orders differ: {X.shape[0]} vs {Y.shape[0]}")


def trace_inner(X, Y):
    X, Y = as_sym(X, "X"), as_sym(Y, "Y")
    _same_order(X, Y)
    # trace(XY) for symmetric X, Y
    return float(np.sum(X * Y))


def quadratic_rep(A, X):
    A, X = as_sym(A, "A"), as_sym(X, "X")
    _same_order(A, X)
    return A @ X @ A


def jordan_product(a, b):
    return 0.5 * (a @ b + b @ a)


def jordan_quadratic_rep(a, x):
    a, x = as_sym(a, "a"), as_sym(x, "x")
    _same_order(a, x)
    return 2.0 * jordan_product(a, jordan_product(a, x)) - jordan_product(jordan_product(a, a), x)


X_DEMO = np.array([[1.0, 0.0], [0.0, 0.0]])
Y_DEMO = np.array([[0.0, 0.0], [0.0, 1.0]])
A_DEMO = np.array([[1.0, 1.0], [1.0, 1.0]])


def non_diffusivity_demo(A=None):
    """Orthogonal PSD matrices X, Y whose orthogonality P_A destroys.

    Returns a report with ``<X, Y>`` and ``<X, A Y A>``; with the default
    ``A`` the second value is 1.
    """
    A = A_DEMO if A is None else as_sym(A, "A")
    AYA = quadratic_rep(A, Y_DEMO)
    xy = trace_inner(X_DEMO, Y_DEMO)
    x_aya = trace_inner(X_DEMO, AYA)
    return {
        "X": X_DEMO.tolist(),
        "Y": Y_DEMO.tolist(),
        "A": A.tolist(),
        "AYA": AYA.tolist(),
        "inner_XY": xy,
        "inner_X_AYA": x_aya,
        "diffusive_condition_violated": xy == 0.0 and x_aya > 0.0,
    }
