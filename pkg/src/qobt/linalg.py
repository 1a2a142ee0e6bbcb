"""Dense matrix kernels backing the Gramian layer.

Lyapunov solves go through the real-Schur (Bartels-Stewart) path of SciPy
and are post-symmetrized with a residual check. The matrix exponential uses
scaling-and-squaring with a Pade core, the principal logarithm inverse
scaling-and-squaring; both are instrumented with call counters so cost
claims about paths that must avoid them can be verified.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .errors import BranchCutError, LyapunovError

__all__ = [
    "LdlFactor",
    "SemidefFactor",
    "solve_lyapunov",
    "matrix_exponential",
    "principal_log_ratio",
    "semidef_factor",
    "svd",
    "cholesky",
    "call_counts",
    "reset_call_counts",
]

# Incremented by matrix_exponential / principal_log_ratio; the timing report
# and the Laguerre cost tests read these to prove a path never formed e^{At}
# or log of A-sized matrices.
_CALLS = {"expm": 0, "logm": 0}


def call_counts() -> dict:
    return dict(_CALLS)


def reset_call_counts():
    _CALLS["expm"] = 0
    _CALLS["logm"] = 0


def _as_square(name, a):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a


def solve_lyapunov(A, G) -> np.ndarray:
    """Solve A X + X A^T + G = 0 for symmetric G.

    Uses the real-Schur reduction with quasi-triangular back-substitution.
    The result is explicitly symmetrized. The solve is well posed whenever
    no two eigenvalues of A sum to zero, which a Hurwitz A guarantees.

    Raises
    ------
    LyapunovError
        When the computed residual is far from zero; the message names the
        smallest eigenvalue sum of A, which is the quantity whose vanishing
        makes the operator singular.
    """
    A = _as_square("A", A)
    G = _as_square("G", G)
    if A.shape != G.shape:
        raise ValueError(f"A and G shapes differ: {A.shape} vs {G.shape}")
    G = (G + G.T) / 2.0
    gnorm = np.linalg.norm(G)
    if gnorm == 0.0:
        return np.zeros_like(G)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            X = sla.solve_continuous_lyapunov(A, -G)
        singular = any("eigenvalue pair" in str(w.message) for w in caught)
    except Exception as exc:
        raise LyapunovError(f"Lyapunov backend failed: {exc}") from exc
    X = (X + X.T) / 2.0
    res = np.linalg.norm(A @ X + X @ A.T + G) / gnorm
    if singular or not np.isfinite(res) or res > 1e-6:
        lam = np.linalg.eigvals(A)
        sums = lam[:, None] + np.conj(lam[None, :])
        worst = sums.flat[np.argmin(np.abs(sums))]
        raise LyapunovError(
            f"Lyapunov solve residual {res:.2e}; smallest eigenvalue sum "
            f"lambda_i + conj(lambda_j) = {worst:.3e} makes the operator "
            f"(near) singular")
    return X


def matrix_exponential(A, t: float = 1.0) -> np.ndarray:
    """e^{A t} by scaling-and-squaring with a Pade core."""
    A = _as_square("A", A)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    _CALLS["expm"] += 1
    with np.errstate(over="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        E = sla.expm(A * t)
    if not np.all(np.isfinite(E)):
        raise OverflowError(
            f"matrix exponential overflowed for ||A t|| = "
            f"{np.linalg.norm(A) * abs(t):.3e}; rescale the problem")
    return E


def principal_log_ratio(A, omega_1: float, omega_2: float) -> np.ndarray:
    """Real band prefactor Re((j/pi) ln((j w1 I + A)^{-1} (j w2 I + A))).

    This is the closed form of the resolvent band integral
    Re((1/pi) * integral_{w1}^{w2} (j nu I - A)^{-1} d nu); it commutes with
    A and drives every frequency-limited Lyapunov equation. For a Hurwitz A
    the ratio matrix provably has no eigenvalue on the closed negative real
    axis, so the principal logarithm branch is safe; the eigenvalues are
    still checked to catch non-Hurwitz input.
    """
    A = _as_square("A", A)
    if not (0 <= omega_1 <= omega_2) or not np.isfinite(omega_2):
        raise ValueError(
            f"need 0 <= omega_1 <= omega_2 finite, got [{omega_1}, {omega_2}]")
    n = A.shape[0]
    if omega_1 == omega_2:
        return np.zeros((n, n))
    I = np.eye(n)
    ratio = np.linalg.solve(1j * omega_1 * I + A, 1j * omega_2 * I + A)
    lam = np.linalg.eigvals(ratio)
    bad = (lam.real <= 0) & (np.abs(lam.imag) <= 1e-12 * np.abs(lam.real) + 1e-300)
    if np.any(bad):
        raise BranchCutError(
            f"ratio matrix eigenvalue {lam[bad][0]:.3e} lies on the closed "
            f"negative real axis (is A Hurwitz?)")
    _CALLS["logm"] += 1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # logm's accuracy estimate chatter
        L = sla.logm(ratio)
    # contiguous copy: a realview of complex storage would wreck every
    # downstream BLAS product
    return np.ascontiguousarray(np.real(1j / np.pi * L))


@dataclass(frozen=True)
class LdlFactor:
    """Indefinite low-rank factorization X ~= L D L^T with tall L and small
    symmetric (block-diagonal, possibly indefinite) D."""

    L: np.ndarray
    D: np.ndarray
    info: Optional[dict] = None

    @property
    def rank_bound(self) -> int:
        return self.L.shape[1]

    def reconstruct(self) -> np.ndarray:
        return self.L @ self.D @ self.L.T


@dataclass(frozen=True)
class SemidefFactor:
    """Positive-semidefinite factorization X ~= Z Z^T obtained by discarding
    negligible (and flagging negative) eigenvalue mass of an LDL^T factor."""

    Z: np.ndarray
    retained_eigenvalues: np.ndarray
    truncation_tol: float
    indefinite_warnings: int = 0
    dropped_mass: float = 0.0


def semidef_factor(ldl: LdlFactor, tol: float = 1e-12) -> SemidefFactor:
    """Convert an indefinite L D L^T factor to a semidefinite Z Z^T.

    Thin QR of L gives L = U1 R; the eigendecomposition R D R^T = U2 S U2^T
    exposes the true inertia. Eigenvalues above tol * max|S| are kept and
    Z = U1 U2 S^{1/2} on the retained block. Negative eigenvalues below
    -tol * max|S| are counted as indefiniteness warnings; smaller ones are
    dropped silently.
    """
    L = np.atleast_2d(np.asarray(ldl.L, dtype=float))
    D = np.atleast_2d(np.asarray(ldl.D, dtype=float))
    n, k = L.shape
    if k == 0 or not np.any(D):
        return SemidefFactor(np.zeros((n, 0)), np.zeros(0), tol)
    U1, R = np.linalg.qr(L)
    d = np.diag(D)
    if np.count_nonzero(D) == np.count_nonzero(d):
        W = (R * d) @ R.T  # diagonal D: skip the k x k product
    else:
        W = R @ D @ R.T
    W = (W + W.T) / 2.0
    lam, U2 = np.linalg.eigh(W)
    amax = np.max(np.abs(lam))
    if amax == 0.0:
        return SemidefFactor(np.zeros((n, 0)), np.zeros(0), tol)
    keep = lam > tol * amax
    warn = int(np.sum(lam < -tol * amax))
    dropped = float(np.sum(np.abs(lam[~keep])))
    Z = U1 @ (U2[:, keep] * np.sqrt(lam[keep]))
    order = np.argsort(lam[keep])[::-1]
    return SemidefFactor(Z[:, order], lam[keep][order], tol, warn, dropped)


def svd(mtx):
    """Thin singular value decomposition (U, s, V) with M = U diag(s) V^T."""
    U, s, Vh = np.linalg.svd(np.atleast_2d(np.asarray(mtx, float)),
                             full_matrices=False)
    return U, s, Vh.T


def cholesky(mat, *, tol: float = 1e-12) -> np.ndarray:
    """Lower factor Z with Z Z^T = mat for symmetric positive semidefinite mat.

    Falls back to an eigendecomposition-based semidefinite square root (with
    a RuntimeWarning flag) when the matrix is PSD but numerically singular,
    in which case Z has one column per retained eigenvalue.
    """
    mat = _as_square("mat", mat)
    mat = (mat + mat.T) / 2.0
    try:
        return np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        pass
    lam, U = np.linalg.eigh(mat)
    amax = np.max(np.abs(lam)) if lam.size else 0.0
    if amax == 0.0:
        return np.zeros((mat.shape[0], 0))
    if np.min(lam) < -1e-8 * amax:
        raise np.linalg.LinAlgError(
            f"matrix is not positive semidefinite (min eig "
            f"{np.min(lam):.3e} vs max {amax:.3e})")
    keep = lam > tol * amax
    warnings.warn(
        "numerically singular PSD matrix: using eigendecomposition-based "
        f"semidefinite square root with {int(np.sum(keep))} columns",
        RuntimeWarning, stacklevel=2)
    idx = np.argsort(lam[keep])[::-1]
    return (U[:, keep] * np.sqrt(np.clip(lam[keep], 0, None)))[:, idx]
