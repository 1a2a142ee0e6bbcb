import numpy as np
import pytest

import qobt
from qobt import linalg
from qobt.errors import BranchCutError, LyapunovError
from conftest import rel_err


# --- Lyapunov solves -------------------------------------------------------

def test_lyapunov_scalar():
    X = qobt.solve_lyapunov(np.array([[-1.0]]), np.array([[1.0]]))
    assert X[0, 0] == pytest.approx(0.5, abs=1e-14)


def test_lyapunov_diagonal_closed_form():
    # diagonal A: X_ij = G_ij / (-a_i - a_j)
    A = np.diag([-1.0, -2.0])
    X = qobt.solve_lyapunov(A, np.ones((2, 2)))
    np.testing.assert_allclose(X, [[0.5, 1 / 3], [1 / 3, 0.25]], atol=1e-13)


def test_lyapunov_zero_rhs():
    X = qobt.solve_lyapunov(np.diag([-1.0, -3.0]), np.zeros((2, 2)))
    assert np.array_equal(X, np.zeros((2, 2)))


def test_lyapunov_output_exactly_symmetric():
    sys = qobt.random_stable_system(12, 2, 1, 3, seed=0)
    X = qobt.solve_lyapunov(sys.A, sys.B @ sys.B.T)
    assert np.array_equal(X, X.T)


def test_lyapunov_residual_bound():
    for seed in range(6):
        sys = qobt.random_stable_system(15, 2, 1, 3, seed=seed)
        G = sys.B @ sys.B.T
        X = qobt.solve_lyapunov(sys.A, G)
        res = np.linalg.norm(sys.A @ X + X @ sys.A.T + G) / np.linalg.norm(G)
        assert res <= 1e-10


def test_lyapunov_singular_operator_names_eigenvalue_sum():
    with pytest.raises(LyapunovError, match="eigenvalue sum"):
        qobt.solve_lyapunov(np.diag([1.0, -1.0]), np.eye(2))


# --- matrix exponential ----------------------------------------------------

def test_expm_t_zero_is_identity():
    A = np.random.default_rng(0).standard_normal((4, 4))
    np.testing.assert_array_equal(qobt.matrix_exponential(A, 0.0), np.eye(4))


def test_expm_nilpotent_closed_form():
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(qobt.matrix_exponential(A, 1.0),
                               [[1.0, 1.0], [0.0, 1.0]], atol=1e-15)


def test_expm_scalar():
    E = qobt.matrix_exponential(np.array([[-1.0]]), 2.0)
    assert E[0, 0] == pytest.approx(np.exp(-2.0), rel=1e-14)


def test_expm_semigroup():
    rng = np.random.default_rng(1)
    for _ in range(5):
        A = rng.standard_normal((5, 5))
        A *= 2.5 / (np.linalg.norm(A) * 1.7)  # ||A||(s+t) <= 5 with s+t=1.7
        s, t = 0.7, 1.0
        Est = qobt.matrix_exponential(A, s + t)
        prod = qobt.matrix_exponential(A, s) @ qobt.matrix_exponential(A, t)
        assert rel_err(Est, prod) <= 1e-10


def test_expm_against_high_precision_reference():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 40
    rng = np.random.default_rng(2)
    for _ in range(3):
        A = rng.standard_normal((4, 4))
        t = 10.0 / (np.linalg.norm(A) * 1.3)  # keep ||A t|| <= 10
        E = qobt.matrix_exponential(A, t)
        ref = mp.expm(mp.matrix((A * t).tolist()))
        ref = np.array([[float(ref[i, j]) for j in range(4)]
                        for i in range(4)])
        assert rel_err(E, ref) <= 1e-12


def test_expm_overflow_advises_rescaling():
    with pytest.raises(OverflowError, match="rescale"):
        qobt.matrix_exponential(np.array([[1e4]]), 100.0)


def test_expm_call_counter():
    linalg.reset_call_counts()
    qobt.matrix_exponential(np.array([[-1.0]]), 1.0)
    assert linalg.call_counts()["expm"] == 1


# --- band prefactor --------------------------------------------------------

def quadrature_band_prefactor(A, w1, w2, nodes=120):
    """Independent route: Gauss-Legendre on Re((1/pi) int (j nu I - A)^{-1})."""
    from numpy.polynomial.legendre import leggauss
    x, w = leggauss(nodes)
    nu = 0.5 * (w2 - w1) * x + 0.5 * (w1 + w2)
    wq = 0.5 * (w2 - w1) * w
    n = A.shape[0]
    F = np.zeros((n, n))
    for nk, wk in zip(nu, wq):
        F += wk * np.real(np.linalg.inv(1j * nk * np.eye(n) - A)) / np.pi
    return F


def test_prefactor_scalar_unit_band():
    # quadrature of (1/2 pi) int_{-1}^{1} (j nu + 1)^{-1} d nu = arctan(1)/pi
    F = qobt.principal_log_ratio(np.array([[-1.0]]), 0.0, 1.0)
    assert F[0, 0] == pytest.approx(np.arctan(1.0) / np.pi, abs=1e-13)
    Fq = quadrature_band_prefactor(np.array([[-1.0]]), 0.0, 1.0)
    assert F[0, 0] == pytest.approx(Fq[0, 0], abs=1e-12)


def test_prefactor_empty_band_is_zero():
    F = qobt.principal_log_ratio(np.diag([-1.0, -2.0]), 0.7, 0.7)
    assert np.array_equal(F, np.zeros((2, 2)))


def test_prefactor_full_spectrum_limit():
    F = qobt.principal_log_ratio(np.array([[-1.0]]), 0.0, 1e6)
    assert abs(F[0, 0] - 0.5) < 1e-3


def test_prefactor_matches_quadrature_and_commutes():
    for seed in range(4):
        sys = qobt.random_stable_system(7, 1, 1, 2, seed=seed)
        F = qobt.principal_log_ratio(sys.A, 0.4, 2.1)
        Fq = quadrature_band_prefactor(sys.A, 0.4, 2.1)
        assert rel_err(F, Fq) <= 1e-9
        comm = np.linalg.norm(F @ sys.A - sys.A @ F)
        assert comm <= 1e-10 * np.linalg.norm(sys.A) * np.linalg.norm(F)


def test_prefactor_branch_cut_detected():
    # purely imaginary eigenvalues inside the band put the ratio spectrum
    # on the negative real axis
    A = np.array([[0.0, 1.5], [-1.5, 0.0]])
    with pytest.raises(BranchCutError):
        qobt.principal_log_ratio(A, 1.0, 2.0)


# --- semidefinite factorization -------------------------------------------

def test_semidef_rank_one():
    f = qobt.semidef_factor(qobt.LdlFactor(np.eye(2), np.diag([2.0, 0.0])),
                            tol=1e-12)
    assert f.Z.shape == (2, 1)
    np.testing.assert_allclose(f.Z @ f.Z.T, np.diag([2.0, 0.0]), atol=1e-14)


def test_semidef_negligible_negative_not_flagged():
    f = qobt.semidef_factor(qobt.LdlFactor(np.eye(2), np.diag([1.0, -1e-15])),
                            tol=1e-12)
    assert f.Z.shape == (2, 1)
    assert f.indefinite_warnings == 0


def test_semidef_reconstruction_random():
    rng = np.random.default_rng(3)
    L = rng.standard_normal((5, 3))
    W = rng.standard_normal((3, 3))
    D = W @ W.T
    f = qobt.semidef_factor(qobt.LdlFactor(L, D))
    assert np.linalg.norm(f.Z @ f.Z.T - L @ D @ L.T) <= 1e-10


def test_semidef_fully_indefinite_yields_empty():
    f = qobt.semidef_factor(qobt.LdlFactor(np.eye(3), -np.eye(3)))
    assert f.Z.shape == (3, 0)
    assert f.indefinite_warnings == 3


def test_semidef_dropped_mass_bound():
    rng = np.random.default_rng(4)
    L = rng.standard_normal((8, 5))
    D = np.diag([3.0, 1.0, 1e-14, -1e-15, 0.5])
    f = qobt.semidef_factor(qobt.LdlFactor(L, D))
    target = L @ D @ L.T
    err = np.linalg.norm(f.Z @ f.Z.T - target)
    assert err <= f.dropped_mass + 1e-12 * np.linalg.norm(target)


def test_semidef_empty_input():
    f = qobt.semidef_factor(qobt.LdlFactor(np.zeros((4, 0)), np.zeros((0, 0))))
    assert f.Z.shape == (4, 0)


# --- svd / cholesky --------------------------------------------------------

def test_svd_identity():
    U, s, V = qobt.svd(np.eye(3))
    np.testing.assert_allclose(s, np.ones(3))
    np.testing.assert_allclose(U @ np.diag(s) @ V.T, np.eye(3), atol=1e-14)


def test_cholesky_scalar():
    Z = qobt.cholesky(np.array([[4.0]]))
    assert Z[0, 0] == 2.0


def test_cholesky_reconstructs():
    P = np.array([[0.5, 1 / 3], [1 / 3, 0.25]])
    Z = qobt.cholesky(P)
    assert np.linalg.norm(Z @ Z.T - P) <= 1e-12


def test_cholesky_singular_psd_fallback_flag():
    P = np.diag([1.0, 0.0])
    with pytest.warns(RuntimeWarning, match="singular"):
        Z = qobt.cholesky(P)
    assert Z.shape[1] == 1
    np.testing.assert_allclose(Z @ Z.T, P, atol=1e-14)


def test_cholesky_rejects_indefinite():
    with pytest.raises(np.linalg.LinAlgError):
        qobt.cholesky(np.diag([1.0, -1.0]))
