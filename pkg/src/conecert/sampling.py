"""Random instances for property checks.

QM maps are built as ``O (M - c I) O^T`` with ``M`` Metzler and ``O`` the
orthonormal generator matrix of the cone; the shift ``c`` is set from the
spectral abscissa of ``M`` so stability (or instability) holds with a
margin drawn from ``[0.1, 1]``.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import ortho_group

from .cones import Orthant, RotatedOrthant, SimplicialSelfDual

FAMILIES = ("orthant", "rotated", "simplicial")


def random_orthogonal(n, rng):
    if n == 1:
        return np.array([[rng.choice([-1.0, 1.0])]])
    return ortho_group.rvs(n, random_state=rng)


def random_cone(family, n, rng):
    if family == "orthant":
        return Orthant(n)
    O = random_orthogonal(n, rng)
    if family == "rotated":
        return RotatedOrthant(O)
    if family == "simplicial":
        return SimplicialSelfDual(O * rng.uniform(0.5, 3.0, size=n))
    raise ValueError(f"unknown cone family {family!r}")


def _metzler(n, rng, density=0.7):
    M = rng.uniform(0.0, 1.0, (n, n)) * (rng.random((n, n)) < density)
    np.fill_diagonal(M, rng.normal(0.0, 1.0, n))
    return M


def _nonneg(n, rng, density=0.7):
    return rng.uniform(0.0, 1.0, (n, n)) * (rng.random((n, n)) < density)


def spectral_abscissa(M):
    return float(np.linalg.eigvals(M).real.max())


def _conj(K, M):
    O = K.generator_matrix()
    return O @ M @ O.T


def random_qm(K, rng, stable=True):
    n = K.dim
    M = _metzler(n, rng)
    margin = rng.uniform(0.1, 1.0)
    shift = spectral_abscissa(M) + (margin if stable else -margin)
    return _conj(K, M - shift * np.eye(n))


def random_nonneg(K, rng):
    return _conj(K, _nonneg(K.dim, rng))


def random_diffusive(K, rng, invertible=True):
    lo = 0.1 if invertible else 0.0
    d = rng.uniform(lo, 10.0, K.dim)
    if not invertible:
        d[rng.random(K.dim) < 0.3] = 0.0
    return _conj(K, np.diag(d))


def random_interior(K, rng):
    return K.generator_matrix() @ rng.uniform(0.05, 5.0, K.dim)


def random_riccati_instance(K, rng):
    """``(A, B)`` with ``A`` QM, ``B`` K-nonnegative and ``A + B`` Hurwitz."""
    n = K.dim
    M = _metzler(n, rng)
    N = _nonneg(n, rng)
    shift = spectral_abscissa(M + N) + rng.uniform(0.1, 1.0)
    return _conj(K, M - shift * np.eye(n)), _conj(K, N)
