"""Low-rank Gramian factorizations.

Two routes produce tall factors Z with Gramian ~= Z Z^T:

* an LDL^T alternating-direction-implicit iteration on the scenario
  Lyapunov equation, fed by right-hand-side assemblies that encode the
  time-window endpoint corrections or the band prefactor coupling; and
* truncated expansions of the propagator (time domain) or resolvent
  (frequency domain) in scaled Laguerre basis functions, whose finite-window
  Gram matrices replace the identity that orthonormality would give on an
  unrestricted horizon.

Neither route forms e^{At} of the full state matrix on the Laguerre path;
that is the point of it.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla
from numpy.polynomial.legendre import leggauss

from . import linalg
from .errors import OracleBudgetError, StabilityError
from .model import FrequencyBand, LtiQoSystem, TimeInterval

__all__ = [
    "AdiConfig",
    "LaguerreConfig",
    "LowRankGramian",
    "ShiftedSolver",
    "adi_ldl",
    "assemble_time_rhs",
    "assemble_freq_rhs",
    "dominant_shifts",
    "laguerre_time_factor",
    "laguerre_freq_factor",
    "laguerre_gram_matrix",
]


@dataclass(frozen=True)
class AdiConfig:
    """Shift list and stopping rule for the LDL^T-ADI iteration.

    Shifts must lie strictly in the open left half-plane with complex ones
    in conjugate pairs (enforced). ``max_iter`` defaults to one pass over
    the shifts; iteration stops early once the relative residual drops
    below ``rel_residual_tol``.
    """

    shifts: tuple
    max_iter: Optional[int] = None
    rel_residual_tol: float = 1e-4

    def __post_init__(self):
        shifts = tuple(complex(s) for s in self.shifts)
        if any(s.real >= 0 for s in shifts):
            raise ValueError("all ADI shifts must have negative real part")
        i = 0
        while i < len(shifts):
            s = shifts[i]
            if abs(s.imag) > 0:
                if i + 1 >= len(shifts) or abs(shifts[i + 1] - s.conjugate()) > \
                        1e-12 * max(1.0, abs(s)):
                    raise ValueError(
                        f"complex shift {s} must be followed by its conjugate")
                i += 2
            else:
                i += 1
        object.__setattr__(self, "shifts", shifts)

    @property
    def iterations(self) -> int:
        return self.max_iter if self.max_iter is not None else len(self.shifts)


@dataclass(frozen=True)
class LaguerreConfig:
    """Scaling parameter and truncation order of the Laguerre expansions."""

    alpha: float = 1.0
    terms: int = 20

    def __post_init__(self):
        if not (self.alpha > 0):
            raise ValueError("alpha must be positive")
        if self.terms < 1:
            raise ValueError("terms must be >= 1")


@dataclass(frozen=True)
class LowRankGramian:
    """Tall factor Z with Gramian ~= Z Z^T plus provenance diagnostics."""

    Z: np.ndarray
    scenario: str
    method: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.Z.shape[1]

    def reconstruct(self) -> np.ndarray:
        return self.Z @ self.Z.T


class ShiftedSolver:
    """Shared LU factorizations of shifted copies of one state matrix.

    Solves (A + p I) X = W with one real factorization per shift. A
    conjugate shift pair goes through the real quadratic polynomial
    A^2 + 2 Re(p) A + |p|^2 I = (A + p I)(A + conj(p) I), so the iteration
    never touches complex arithmetic, and every factor also serves the
    transposed operator; a controllability / observability pair of
    iterations therefore factors each shift exactly once.
    """

    def __init__(self, A):
        self.A = np.ascontiguousarray(np.atleast_2d(np.asarray(A, float)))
        self._At = None
        self._lu = {}
        self._A2 = None

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @staticmethod
    def _key(p):
        return ("real", p.real) if p.imag == 0.0 else \
            ("pair", p.real, abs(p) ** 2)

    def _build(self, key):
        if key[0] == "real":
            M = self.A.copy()
            M.flat[:: self.n + 1] += key[1]
            return M
        if self._A2 is None:
            self._A2 = self.A @ self.A
        M = self._A2 + (2 * key[1]) * self.A
        M.flat[:: self.n + 1] += key[2]
        return M

    def _factor(self, key):
        if key not in self._lu:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                self._lu[key] = sla.lu_factor(self._build(key),
                                              check_finite=False)
        return self._lu[key]

    def prepare(self, shifts):
        """Factor every distinct shift up front; batching the large
        factorizations away from the small per-iteration solves keeps the
        BLAS pipeline warm."""
        for p in shifts:
            self._factor(self._key(complex(p)))

    def solve_real(self, a, W, transpose=False):
        return sla.lu_solve(self._factor(("real", a)), W,
                            trans=1 if transpose else 0, check_finite=False)

    def solve_pair(self, p, W, transpose=False):
        """u with (A^2 + 2 Re(p) A + |p|^2 I) u = W (transposed on request)."""
        return sla.lu_solve(self._factor(self._key(p)), W,
                            trans=1 if transpose else 0, check_finite=False)

    def apply(self, W, transpose=False):
        if transpose:
            if self._At is None:
                self._At = np.ascontiguousarray(self.A.T)
            return self._At @ W
        return self.A @ W


def adi_ldl(A_applied, K, S, cfg: AdiConfig, *,
            solver: Optional[ShiftedSolver] = None,
            transpose: bool = False) -> linalg.LdlFactor:
    """LDL^T-ADI iteration for AA X + X AA^T + K S K^T = 0.

    One shifted linear solve per iteration; a conjugate shift pair is
    handled as a single real double step contributing two real block
    columns (with u solving the real quadratic system, the blocks are AA u
    and |p| u). After every completed step the residual equals W S W^T for
    the running iterate W, which makes the relative residual cheap to track.

    ``solver`` optionally shares shifted factorizations across calls; the
    observability iteration runs on the transpose of the controllability
    operator, so passing the same solver with ``transpose=True`` reuses
    every factor. A solver given explicitly must have been built from AA
    (or from its transpose, with the flag set accordingly).

    Non-convergence within the iteration budget is not an error: the best
    factor is returned with ``info["converged"] = False`` and the recorded
    residual history, matching the protocol of proceeding with whatever the
    iteration produced.
    """
    A = np.atleast_2d(np.asarray(A_applied, dtype=float))
    n = A.shape[0]
    K = np.asarray(K, dtype=float)
    if K.ndim == 1:
        K = K[:, None]
    S = np.atleast_2d(np.asarray(S, dtype=float))

    def low_rank_norm(Wmat):
        # ||W S W^T||_F = sqrt(tr((S W^T W)^2)) without the n x n product
        G = S @ (Wmat.T @ Wmat)
        return float(np.sqrt(max(np.einsum("ij,ji->", G, G), 0.0)))

    rhs_norm = low_rank_norm(K) if K.size else 0.0
    if rhs_norm == 0.0:
        info = {"converged": True, "iterations": 0, "residuals": [],
                "final_residual": 0.0}
        return linalg.LdlFactor(np.zeros((n, 0)), np.zeros((0, 0)), info)
    if solver is None:
        solver = ShiftedSolver(A)
        transpose = False
    shifts = cfg.shifts
    scheduled = []
    it = idx = 0
    while it < cfg.iterations:
        p = shifts[idx % len(shifts)]
        scheduled.append(p)
        step = 1 if p.imag == 0.0 else 2
        it += step
        idx += step
    solver.prepare(scheduled)
    W = K.copy()
    L_blocks, D_blocks = [], []
    residuals = []
    it = 0
    idx = 0
    converged = False
    while it < cfg.iterations:
        p = shifts[idx % len(shifts)]
        if p.imag == 0.0:
            a = p.real
            V = solver.solve_real(a, W, transpose)
            L_blocks.append(V)
            D_blocks.append(-2.0 * a * S)
            W = W - 2.0 * a * V
            it += 1
            idx += 1
        else:
            a = p.real
            u = solver.solve_pair(p, W, transpose)
            V1 = solver.apply(u, transpose)
            L_blocks.extend([V1, abs(p) * u])
            D_blocks.extend([-4.0 * a * S, -4.0 * a * S])
            W = W - 4.0 * a * V1
            it += 2
            idx += 2
        res = low_rank_norm(W) / rhs_norm
        residuals.append(res)
        if res <= cfg.rel_residual_tol:
            converged = True
            break
    L = np.hstack(L_blocks)
    D = sla.block_diag(*D_blocks)
    info = {"converged": converged, "iterations": it,
            "residuals": residuals, "final_residual": residuals[-1]}
    return linalg.LdlFactor(L, D, info)


def _nonzero(M) -> bool:
    return bool(np.any(M))


def assemble_time_rhs(sys: LtiQoSystem, interval: TimeInterval, side: str,
                      Z_tau=None, *, exp_pair=None):
    """Right-hand-side factors (K, S) of the time-windowed Lyapunov equations.

    Controllability side: K = [E_i B, E_f B], S = diag(I, -I), with
    E_s = e^{A s} at the window endpoints. Observability side: K stacks
    E_s^T C^T and E_s^T M_i Z for both endpoints and every quadratic map
    (columns of an all-zero C are omitted), S alternating +/-I blockwise,
    and the iteration then runs on A^T. ``Z_tau`` must be the already
    truncated controllability factor.
    """
    if not isinstance(interval, TimeInterval):
        interval = TimeInterval(*interval)
    n = sys.n
    if exp_pair is None:
        E_i = np.eye(n) if interval.tau_i == 0.0 else \
            linalg.matrix_exponential(sys.A, interval.tau_i)
        E_f = linalg.matrix_exponential(sys.A, interval.tau_f)
    else:
        E_i, E_f = exp_pair
    if side == "controllability":
        blocks = [(E_i @ sys.B, 1.0), (E_f @ sys.B, -1.0)]
    elif side == "observability":
        if Z_tau is None:
            raise ValueError(
                "observability side needs the controllability factor Z_tau")
        Z = Z_tau.Z if hasattr(Z_tau, "Z") else np.asarray(Z_tau, float)
        if Z.ndim == 1:
            Z = Z[:, None]
        blocks = []
        if _nonzero(sys.C):
            blocks += [(E_i.T @ sys.C.T, 1.0), (E_f.T @ sys.C.T, -1.0)]
        for M in sys.M_list:
            MZ = M @ Z
            blocks += [(E_i.T @ MZ, 1.0), (E_f.T @ MZ, -1.0)]
    else:
        raise ValueError(f"unknown side {side!r}")
    K = np.hstack([b for b, _ in blocks]) if blocks else np.zeros((n, 0))
    S = sla.block_diag(*[s * np.eye(b.shape[1]) for b, s in blocks]) \
        if blocks else np.zeros((0, 0))
    return K, S


def assemble_freq_rhs(sys: LtiQoSystem, band: FrequencyBand, side: str,
                      Z_omega=None, F_omega=None):
    """Right-hand-side factors (K, S) of the band-limited Lyapunov equations.

    Controllability side: K = [B, F B], S = [[0, I], [I, 0]]. Observability
    side: K pairs C^T with F^T C^T and each M_i Z with F^T M_i Z, S repeating
    the 2x2 anti-diagonal block per pair (zero-C columns omitted).
    """
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)
    n = sys.n
    F = linalg.principal_log_ratio(sys.A, band.omega_1, band.omega_2) \
        if F_omega is None else np.asarray(F_omega, float)
    if side == "controllability":
        pairs = [(sys.B, F @ sys.B)]
    elif side == "observability":
        if Z_omega is None:
            raise ValueError(
                "observability side needs the controllability factor Z_omega")
        Z = Z_omega.Z if hasattr(Z_omega, "Z") else np.asarray(Z_omega, float)
        if Z.ndim == 1:
            Z = Z[:, None]
        pairs = []
        if _nonzero(sys.C):
            pairs.append((sys.C.T, F.T @ sys.C.T))
        for M in sys.M_list:
            MZ = M @ Z
            pairs.append((MZ, F.T @ MZ))
    else:
        raise ValueError(f"unknown side {side!r}")
    if not pairs:
        return np.zeros((n, 0)), np.zeros((0, 0))
    K = np.hstack([np.hstack(pair) for pair in pairs])
    S_blocks = []
    for first, _ in pairs:
        q = first.shape[1]
        S_blocks.append(np.block([[np.zeros((q, q)), np.eye(q)],
                                  [np.eye(q), np.zeros((q, q))]]))
    return K, sla.block_diag(*S_blocks)


def dominant_shifts(sys: LtiQoSystem, k: int) -> list:
    """Top-k poles of (A, B, C) ranked by residue dominance, conjugate-closed.

    Dominance of a pole lambda with right/left eigenvectors x, y is
    ||C x|| * ||y^H B|| / |Re lambda|. When C is all zero the linear-output
    factor drops out of the ranking; when the eigenvector basis is too
    ill-conditioned to trust, ranking falls back to plain eigenvalue
    magnitude. One extra shift is returned when the k-th spot would split a
    conjugate pair, keeping the list closed.
    """
    if k < 0 or k > sys.n:
        raise ValueError(f"need 0 <= k <= n, got k={k}")
    if k == 0:
        return []
    lam, X = np.linalg.eig(sys.A)
    if np.any(lam.real >= 0):
        raise StabilityError("dominant_shifts requires a Hurwitz state matrix")
    cond = np.linalg.cond(X)
    if not np.isfinite(cond) or cond > 1e12:
        score = np.abs(lam)
    else:
        Y = np.linalg.inv(X)  # rows are left eigenvectors, normalized y^H x = 1
        yb = np.linalg.norm(Y @ sys.B, axis=1)
        if _nonzero(sys.C):
            cx = np.linalg.norm(sys.C @ X, axis=0)
        else:
            cx = np.ones(sys.n)
        score = cx * yb / np.abs(lam.real)
    order = np.argsort(-score)
    chosen: list = []
    used = np.zeros(sys.n, dtype=bool)
    for j in order:
        if used[j] or len(chosen) >= k:
            continue
        z = lam[j]
        if abs(z.imag) <= 1e-12 * max(1.0, abs(z.real)):
            chosen.append(complex(z.real, 0.0))
            used[j] = True
        else:
            pair = complex(z.real, abs(z.imag))
            chosen.extend([pair, pair.conjugate()])
            used[j] = True
            # retire the conjugate partner from the candidate pool
            partner = np.argmin(np.abs(lam - z.conjugate()) + used * 1e30)
            used[partner] = True
    return chosen[:k + 1] if len(chosen) > k and chosen[k - 1] == \
        chosen[k].conjugate() else chosen[:k]


# ---------------------------------------------------------------------------
# Laguerre expansion route


def _laguerre_coefficient_blocks(A, B_like, alpha: float, terms: int):
    """Blocks [G_0 B, ..., G_{N-1} B] of the expansion coefficients.

    G_0 B = sqrt(2 alpha) (alpha I - A)^{-1} B and
    G_i B = -(alpha I - A)^{-1} (alpha I + A) G_{i-1} B; the single
    factorization of (alpha I - A) is reused across the recurrence. The same
    recurrence serves the time-domain propagator expansion and the
    frequency-domain resolvent expansion.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B_like = np.asarray(B_like, dtype=float)
    if B_like.ndim == 1:
        B_like = B_like[:, None]
    n = A.shape[0]
    shifted = alpha * np.eye(n) - A
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, piv = sla.lu_factor(shifted)
    tol = 1e-14 * max(np.linalg.norm(shifted), 1e-300)
    if np.any(np.abs(np.diag(lu)) <= tol):
        raise np.linalg.LinAlgError(
            f"alpha = {alpha} coincides with an eigenvalue of A")
    # -(aI - A)^{-1}(aI + A) X = X - 2a (aI - A)^{-1} X: one solve per term
    blocks = [np.sqrt(2.0 * alpha) * sla.lu_solve((lu, piv), B_like)]
    for _ in range(1, terms):
        prev = blocks[-1]
        blocks.append(prev - 2.0 * alpha * sla.lu_solve((lu, piv), prev))
    return blocks


def _scaled_laguerre_values(alpha: float, terms: int, t):
    """phi_i(t) = sqrt(2 alpha) e^{-alpha t} L_i(2 alpha t), stacked (len(t), N)."""
    t = np.asarray(t, dtype=float)
    x = 2.0 * alpha * t
    vals = np.empty((t.size, terms))
    L0 = np.ones_like(x)
    vals[:, 0] = L0
    if terms > 1:
        L1 = 1.0 - x
        vals[:, 1] = L1
        for kk in range(1, terms - 1):
            L2 = ((2 * kk + 1 - x) * L1 - kk * L0) / (kk + 1)
            vals[:, kk + 1] = L2
            L0, L1 = L1, L2
    return np.sqrt(2.0 * alpha) * np.exp(-alpha * t)[:, None] * vals


def _dbar_time_closed2(alpha, ti, tf):
    e_i, e_f = np.exp(-2 * alpha * ti), np.exp(-2 * alpha * tf)
    d00 = e_i - e_f
    d01 = 2 * alpha * tf * e_f - 2 * alpha * ti * e_i
    d11 = e_i * (4 * alpha ** 2 * ti ** 2 + 1) - e_f * (4 * alpha ** 2 * tf ** 2 + 1)
    return np.array([[d00, d01], [d01, d11]])


def _dbar_freq_closed2(alpha, w1, w2):
    diag = (2 / np.pi) * (np.arctan(w2 / alpha) - np.arctan(w1 / alpha))
    off = (2 * alpha / np.pi) * (w1 / (alpha ** 2 + w1 ** 2)
                                 - w2 / (alpha ** 2 + w2 ** 2))
    return np.array([[diag, off], [off, diag]])


def _time_cutoff(alpha, terms):
    # beyond u = 2 alpha t with u - 2 N log u > ~100 the integrand is dead
    u = 100.0 + 4.0 * terms
    for _ in range(60):
        u = 100.0 + 2.0 * terms * np.log(max(u, 2.0))
    return u / (2.0 * alpha)


def _dbar_time_quad(alpha, ti, tf, terms, nodes):
    t_hi = min(tf, ti + _time_cutoff(alpha, terms))
    if t_hi <= ti:
        return np.zeros((terms, terms))
    panels = max(1, int(np.ceil((t_hi - ti) * 2.0 * alpha / 8.0)))
    if panels > 4000:
        raise OracleBudgetError(
            f"{panels} quadrature panels needed for the basis Gram matrix "
            f"exceed the budget of 4000")
    x, w = leggauss(max(nodes, terms + 8))
    D = np.zeros((terms, terms))
    edges = np.linspace(ti, t_hi, panels + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        t = 0.5 * (b - a) * x + 0.5 * (a + b)
        wq = 0.5 * (b - a) * w
        Phi = _scaled_laguerre_values(alpha, terms, t)
        D += (Phi * wq[:, None]).T @ Phi
    return (D + D.T) / 2.0


def _dbar_freq_quad(alpha, w1, w2, terms, nodes):
    # Substituting nu = alpha tan(theta) maps the band to a bounded theta
    # range on which every basis product is a plain complex exponential;
    # panel count then only needs to track the truncation order.
    th1, th2 = np.arctan(w1 / alpha), np.arctan(w2 / alpha)
    if th2 <= th1:
        return np.zeros((terms, terms))
    panels = max(1, int(np.ceil(4.0 * terms * (th2 - th1) / np.pi)))
    x, w = leggauss(max(nodes, 16))
    lags = np.zeros(terms, dtype=complex)
    edges = np.linspace(th1, th2, panels + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        th = 0.5 * (b - a) * x + 0.5 * (a + b)
        wq = 0.5 * (b - a) * w
        for ell in range(terms):
            lags[ell] += (2.0 / np.pi) * ((-1.0) ** ell) * np.sum(
                wq * np.exp(-2j * ell * th))
    idx = np.abs(np.arange(terms)[:, None] - np.arange(terms)[None, :])
    return lags.real[idx]


def laguerre_gram_matrix(kind: str, window, alpha: float, terms: int,
                         quadrature_nodes: int = 48,
                         method: str = "auto") -> np.ndarray:
    """Finite-window Gram matrix of the scaled Laguerre basis.

    ``kind`` is "time" (window is a :class:`TimeInterval`, integrand
    Phi(t)^T Phi(t)) or "frequency" (window a :class:`FrequencyBand`,
    integrand Re((1/pi) Phi(j nu)^* Phi(j nu))). ``window=None`` returns the
    identity, the orthonormal unrestricted-horizon limit. Entries come from
    the hard-coded closed forms for two terms and composite Gauss-Legendre
    quadrature otherwise; ``method`` forces one route for cross-checking.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    if method not in ("auto", "closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if window is None:
        if method == "closed" and terms != 2:
            raise ValueError("closed form is only available for terms=2")
        return np.eye(terms)
    if kind == "time":
        win = window if isinstance(window, TimeInterval) else TimeInterval(*window)
        if method == "closed" or (method == "auto" and terms == 2):
            if terms != 2:
                raise ValueError("closed form is only available for terms=2")
            return _dbar_time_closed2(alpha, win.tau_i, win.tau_f)
        return _dbar_time_quad(alpha, win.tau_i, win.tau_f, terms,
                               quadrature_nodes)
    if kind == "frequency":
        win = window if isinstance(window, FrequencyBand) else FrequencyBand(*window)
        if method == "closed" or (method == "auto" and terms == 2):
            if terms != 2:
                raise ValueError("closed form is only available for terms=2")
            return _dbar_freq_closed2(alpha, win.omega_1, win.omega_2)
        return _dbar_freq_quad(alpha, win.omega_1, win.omega_2, terms,
                               quadrature_nodes)
    raise ValueError(f"unknown kind {kind!r}")


def _factor_from_blocks(blocks, dbar, cfg, tol=1e-12):
    """Assemble Z with Z Z^T = F (dbar x I_q) F^T from coefficient blocks.

    Cholesky of the small Gram matrix when it is positive definite;
    otherwise its eigendecomposition restricted to the significant positive
    part, which keeps the assembly in the coefficient space instead of
    running a QR on the full-width factor.
    """
    F = np.hstack(blocks)
    q = blocks[0].shape[1]
    terms = len(blocks)
    dbar = (dbar + dbar.T) / 2.0
    lam = np.linalg.eigvalsh(dbar)
    amax = float(np.max(np.abs(lam))) if lam.size else 0.0
    warn = 0
    if amax > 0 and np.min(lam) > tol * amax:
        G = np.linalg.cholesky(dbar)
        retained = terms
    else:
        lam, U = np.linalg.eigh(dbar)
        keep = lam > tol * amax if amax > 0 else np.zeros_like(lam, bool)
        warn = int(np.sum(lam < -tol * amax)) if amax > 0 else 0
        G = U[:, keep] * np.sqrt(lam[keep])
        retained = int(np.sum(keep))
    if G.size == 0:
        Z = np.zeros((F.shape[0], 0))
    else:
        # Z = F (G x I_q), contracted over the term axis with one dgemm
        stacked = F.reshape(F.shape[0], terms, q)
        Z = np.tensordot(stacked, G, axes=([1], [0]))  # (n, q, r)
        Z = np.ascontiguousarray(Z.transpose(0, 2, 1)).reshape(F.shape[0], -1)
    diag = {"alpha": cfg.alpha, "terms": cfg.terms,
            "gram_retained": retained, "indefinite_warnings": warn,
            "retained_rank": Z.shape[1]}
    return Z, diag


def laguerre_time_factor(A, B_like, interval: Optional[TimeInterval],
                         cfg: LaguerreConfig) -> LowRankGramian:
    """Low-rank time-window Gramian factor from the truncated propagator
    expansion in scaled Laguerre functions.

    Builds the coefficient blocks by the shifted-solve recurrence (one
    factorization of (alpha I - A), no matrix exponential), weighs them with
    the finite-window Gram matrix, and factors the result. ``interval=None``
    selects the unrestricted horizon where the Gram matrix is the identity.

    The observability-side factor is obtained by passing (A^T, [C^T, M_i Z ...]).
    """
    blocks = _laguerre_coefficient_blocks(A, B_like, cfg.alpha, cfg.terms)
    dbar = laguerre_gram_matrix("time", interval, cfg.alpha, cfg.terms)
    Z, diag = _factor_from_blocks(blocks, dbar, cfg)
    scenario = "time_limited" if interval is not None else "infinite"
    return LowRankGramian(Z, scenario, "laguerre", diag)


def laguerre_freq_factor(A, B_like, band: Optional[FrequencyBand],
                         cfg: LaguerreConfig) -> LowRankGramian:
    """Low-rank band Gramian factor from the truncated resolvent expansion.

    The resolvent coefficients satisfy the same shifted-solve recurrence as
    the time-domain ones, so only the Gram matrix changes: the band-limited
    basis products integrate to an inverse-tangent family instead of the
    identity. Output is real by construction.
    """
    blocks = _laguerre_coefficient_blocks(A, B_like, cfg.alpha, cfg.terms)
    dbar = laguerre_gram_matrix("frequency", band, cfg.alpha, cfg.terms)
    Z, diag = _factor_from_blocks(blocks, dbar, cfg)
    scenario = "frequency_limited" if band is not None else "infinite"
    return LowRankGramian(Z, scenario, "laguerre", diag)
