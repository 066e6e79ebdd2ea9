import numpy as np
import pytest

from conecert.errors import DimensionMismatch, InputError
from conecert.psd import (
    A_DEMO,
    X_DEMO,
    Y_DEMO,
    jordan_quadratic_rep,
    non_diffusivity_demo,
    quadratic_rep,
    trace_inner,
)


def _rand_sym(rng, n):
    X = rng.normal(size=(n, n))
    return X + X.T


def _rand_psd(rng, n):
    X = rng.normal(size=(n, n))
    return X @ X.T


def test_trace_inner_examples():
    assert trace_inner(np.eye(2), np.eye(2)) == 2
    e1, e2 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert trace_inner(e1, e2) == 0
    assert trace_inner(X_DEMO, Y_DEMO) == 0


def test_trace_inner_matches_trace(rng):
    for _ in range(50):
        X, Y = _rand_sym(rng, 3), _rand_sym(rng, 3)
        assert trace_inner(X, Y) == pytest.approx(np.trace(X @ Y))
        assert trace_inner(X, Y) == pytest.approx(trace_inner(Y, X))


def test_quadratic_rep_examples(rng):
    X = _rand_sym(rng, 3)
    np.testing.assert_allclose(quadratic_rep(np.eye(3), X), X)
    a = np.array([1.0, -2.0, 3.0])
    np.testing.assert_allclose(quadratic_rep(np.diag(a), X), np.outer(a, a) * X)
    np.testing.assert_array_equal(quadratic_rep(A_DEMO, Y_DEMO), [[1, 1], [1, 1]])


def test_jordan_quadratic_rep_examples():
    X = np.array([[1.0, 2.0], [2.0, -1.0]])
    np.testing.assert_allclose(jordan_quadratic_rep(np.eye(2), X), X)
    np.testing.assert_allclose(jordan_quadratic_rep(np.diag([2.0, 3.0]), np.eye(2)),
                               np.diag([4.0, 9.0]))


@pytest.mark.parametrize("n", [2, 3])
def test_jordan_identity(n, rng):
    for _ in range(500):
        a, x = _rand_sym(rng, n), _rand_sym(rng, n)
        np.testing.assert_allclose(jordan_quadratic_rep(a, x), a @ x @ a, atol=1e-12)


def test_quadratic_rep_preserves_psd(rng):
    for _ in range(200):
        A, X = _rand_sym(rng, 3), _rand_psd(rng, 3)
        Y = quadratic_rep(A, X)
        assert np.linalg.eigvalsh(Y)[0] >= -1e-10 * max(1.0, np.abs(Y).max())


def test_psd_self_duality_sampling(rng):
    for _ in range(200):
        assert trace_inner(_rand_psd(rng, 3), _rand_psd(rng, 3)) >= -1e-12


def test_demo():
    rep = non_diffusivity_demo()
    assert rep["inner_XY"] == 0.0
    assert rep["inner_X_AYA"] == pytest.approx(1.0, abs=1e-12)
    assert rep["diffusive_condition_violated"]
    ident = non_diffusivity_demo(np.eye(2))
    assert ident["inner_X_AYA"] == 0.0
    assert not ident["diffusive_condition_violated"]


def test_validation():
    with pytest.raises(DimensionMismatch):
        trace_inner(np.eye(2), np.eye(3))
    with pytest.raises(InputError):
        quadratic_rep([[0.0, 1.0], [0.0, 0.0]], np.eye(2))
    with pytest.raises(InputError):
        trace_inner(np.eye(9), np.eye(9))
