import numpy as np
import pytest
from oracles import boundary_pair, metzler_brute, routh_hurwitz_stable

from conecert.cones import Orthant, PsdCone, RotatedOrthant, membership
from conecert.errors import (
    DimensionMismatch,
    NotDiffusive,
    NotQuasiMonotone,
    NotStable,
    SingularE,
    UnsupportedCone,
)
from conecert.linalg import is_stable
from conecert.qm import (
    adjoint,
    d_stability,
    is_diffusive,
    is_k_nonnegative,
    is_qm,
    stability_witness,
)
from conecert.sampling import (
    FAMILIES,
    random_cone,
    random_diffusive,
    random_interior,
    random_nonneg,
    random_qm,
)

S = np.sqrt(0.5)
ROT45 = np.array([[S, -S], [S, S]])
A_EX = np.array([[-1.0, 2.0], [3.0, -5.0]])


def test_is_qm_orthant_examples():
    assert is_qm(A_EX, Orthant(2)).verdict
    rep = is_qm([[-1.0, -0.1], [0.0, -1.0]], Orthant(2))
    assert not rep.verdict
    assert rep.violations == [(0, 1, pytest.approx(-0.1))]


def test_is_qm_rotated_conjugation_oracle():
    K = RotatedOrthant(ROT45)
    A = ROT45 @ A_EX @ ROT45.T
    assert is_qm(A, K).verdict
    assert metzler_brute(ROT45.T @ A @ ROT45)
    bad = ROT45 @ np.array([[-1.0, -0.5], [0.2, -1.0]]) @ ROT45.T
    assert not is_qm(bad, K).verdict
    assert not metzler_brute(ROT45.T @ bad @ ROT45)


def test_is_qm_orthant_equivalence(rng):
    for _ in range(500):
        A = rng.normal(size=(3, 3)) + 0.3
        assert is_qm(A, Orthant(3)).verdict == metzler_brute(A)


def test_predicates_reject_psd_and_mismatch():
    with pytest.raises(UnsupportedCone):
        is_qm(np.eye(2), PsdCone(2))
    with pytest.raises(DimensionMismatch):
        is_qm(np.eye(3), Orthant(2))


def test_is_k_nonnegative_examples():
    B1 = np.array([[0.7743, 0.1205], [0.6820, 0.7193]])
    assert is_k_nonnegative(B1, Orthant(2)).verdict
    assert not is_k_nonnegative([[1.0, -0.2], [0.0, 1.0]], Orthant(2)).verdict
    for family in FAMILIES:
        K = random_cone(family, 3, np.random.default_rng(5))
        assert is_k_nonnegative(np.zeros((3, 3)), K).verdict


def test_is_diffusive_examples():
    assert is_diffusive(np.diag([0.0, 2.0, 5.0]), Orthant(3)).verdict
    rep = is_diffusive([[1.0, 1.0], [0.0, 1.0]], Orthant(2))
    assert not rep.verdict
    assert (0, 1, 1.0) in rep.violations
    K = RotatedOrthant(ROT45)
    D = ROT45 @ np.diag([0.5, 3.0]) @ ROT45.T
    assert is_diffusive(D, K).verdict
    # oracle: direct pairwise check on the generators
    G = K.generator_matrix()
    assert abs(G[:, 0] @ D @ G[:, 1]) < 1e-12 and abs(G[:, 1] @ D @ G[:, 0]) < 1e-12


@pytest.mark.parametrize("family", FAMILIES)
def test_finite_check_matches_definition(family, rng):
    """Raw definition on random orthogonal boundary pairs versus the generator test."""
    K = random_cone(family, 4, rng)
    G = K.generator_matrix()
    for _ in range(50):
        A = rng.normal(size=(4, 4))
        qm = is_qm(A, K).verdict
        worst = min(x @ A @ y for x, y in (boundary_pair(G, rng) for _ in range(200)))
        if qm:
            assert worst >= -1e-9
        # a violating generator pair is itself an orthogonal boundary pair
        if not qm:
            i, j, val = is_qm(A, K).violations[0]
            assert G[:, i] @ A @ G[:, j] == pytest.approx(val)
            assert val < 0


def test_adjoint():
    np.testing.assert_array_equal(adjoint([[1.0, 2.0], [3.0, 4.0]]), [[1, 3], [2, 4]])
    Sym = np.array([[1.0, 2.0], [2.0, 5.0]])
    np.testing.assert_array_equal(adjoint(Sym), Sym)
    A = np.random.default_rng(0).normal(size=(3, 3))
    np.testing.assert_array_equal(adjoint(adjoint(A)), A)


# -- witness -----------------------------------------------------------------


def test_stability_witness_examples():
    A = np.array([[-2.0, 1.0], [1.0, -2.0]])
    wit = stability_witness(A, Orthant(2))
    np.testing.assert_allclose(wit.v, [1.0, 1.0], atol=1e-9)
    np.testing.assert_allclose(-A @ wit.v, [1.0, 1.0], atol=1e-9)
    assert stability_witness([[0.0, 1.0], [1.0, 0.0]], Orthant(2)) is None


def test_stability_witness_example_matrix():
    A1 = np.array([[-1.4093, 0.1501], [0.0986, -1.3504]])
    assert routh_hurwitz_stable(A1)
    wit = stability_witness(A1, Orthant(2))
    assert wit is not None
    assert wit.margin >= 1 - 1e-9


def test_stability_witness_requires_qm():
    with pytest.raises(NotQuasiMonotone):
        stability_witness([[-1.0, -1.0], [0.0, -1.0]], Orthant(2))


@pytest.mark.parametrize("family", FAMILIES)
def test_witness_equivalence(family, rng):
    for k in range(60):
        K = random_cone(family, 3, rng)
        A = random_qm(K, rng, stable=bool(k % 2))
        wit = stability_witness(A, K)
        assert (wit is not None) == is_stable(A)
        if wit is not None:
            assert wit.margins_v.min() >= 1 - 1e-9
            assert wit.margins_Av.min() >= 1 - 1e-9


# -- lemmas ------------------------------------------------------------------


@pytest.mark.parametrize("family", FAMILIES)
def test_lemmas(family, rng):
    for _ in range(40):
        K = random_cone(family, 3, rng)
        A = random_qm(K, rng, stable=bool(rng.integers(2)))
        D = random_diffusive(K, rng, invertible=False)
        B = random_nonneg(K, rng)
        assert is_qm(A.T, K).verdict
        assert is_qm(D @ A, K).verdict
        assert is_qm(A.T @ D, K).verdict
        assert is_qm(A + B, K).verdict
        E = random_diffusive(K, rng)
        assert membership(K, E @ random_interior(K, rng)).interior


# -- D-stability --------------------------------------------------------------


def test_d_stability_examples():
    A = np.array([[-2.0, 1.0], [1.0, -2.0]])
    K = Orthant(2)
    assert d_stability(A, np.eye(2), K)
    EA = np.diag([10.0, 0.1]) @ A
    assert routh_hurwitz_stable(EA)
    assert d_stability(A, np.diag([10.0, 0.1]), K)
    with pytest.raises(SingularE):
        d_stability(A, np.diag([1.0, 0.0]), K)


def test_d_stability_preconditions():
    K = Orthant(2)
    with pytest.raises(NotQuasiMonotone):
        d_stability([[-1.0, -1.0], [0.0, -1.0]], np.eye(2), K)
    with pytest.raises(NotStable):
        d_stability([[0.0, 1.0], [1.0, 0.0]], np.eye(2), K)
    with pytest.raises(NotDiffusive):
        d_stability(-np.eye(2), [[1.0, 1.0], [0.0, 1.0]], K)


@pytest.mark.parametrize("family", FAMILIES)
def test_d_stability_random(family, rng):
    for _ in range(50):
        K = random_cone(family, 3, rng)
        A = random_qm(K, rng)
        E = random_diffusive(K, rng)
        assert d_stability(A, E, K)
