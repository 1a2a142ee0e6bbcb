"""State-space systems with quadratic outputs: construction, validation,
procedural generators, and Petrov-Galerkin projection.

A system is the realization (A, B, C, M_1 ... M_p) of

    x'(t) = A x(t) + B u(t),        x(0) = 0,
    y_i(t) = (C x(t))_i + x(t)^T M_i x(t),   i = 1 ... p,

with symmetric quadratic maps M_i. ``C`` may be all-zero for purely
quadratic outputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, StabilityError

__all__ = [
    "LtiQoSystem",
    "ReducedSystem",
    "TimeInterval",
    "FrequencyBand",
    "new_system",
    "spectral_abscissa",
    "random_stable_system",
    "modal_space_structure",
    "project",
]


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _require_finite(name, a):
    if not np.all(np.isfinite(a)):
        raise DimensionError(f"{name} contains non-finite entries")


@dataclass(frozen=True)
class TimeInterval:
    """Time window [tau_i, tau_f] in seconds, 0 <= tau_i <= tau_f < inf."""

    tau_i: float
    tau_f: float

    def __post_init__(self):
        if not (np.isfinite(self.tau_i) and np.isfinite(self.tau_f)):
            raise ValueError("interval endpoints must be finite")
        if self.tau_i < 0 or self.tau_f < self.tau_i:
            raise ValueError(
                f"need 0 <= tau_i <= tau_f, got [{self.tau_i}, {self.tau_f}]")

    @property
    def span(self) -> float:
        return self.tau_f - self.tau_i


@dataclass(frozen=True)
class FrequencyBand:
    """Frequency band [omega_1, omega_2] in rad/sec, 0 <= omega_1 <= omega_2 < inf."""

    omega_1: float
    omega_2: float

    def __post_init__(self):
        if not (np.isfinite(self.omega_1) and np.isfinite(self.omega_2)):
            raise ValueError("band endpoints must be finite")
        if self.omega_1 < 0 or self.omega_2 < self.omega_1:
            raise ValueError(
                f"need 0 <= omega_1 <= omega_2, got [{self.omega_1}, {self.omega_2}]")

    @property
    def span(self) -> float:
        return self.omega_2 - self.omega_1

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.omega_1 + self.omega_2)


@dataclass(frozen=True)
class LtiQoSystem:
    """Immutable realization (A, B, C, M_1 ... M_p) of order n with m inputs
    and p outputs. Every M_i is exactly symmetric; arrays are read-only."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    M_list: tuple
    n: int
    m: int
    p: int
    stable: Optional[bool] = None

    @property
    def has_linear_output(self) -> bool:
        return bool(np.any(self.C))


@dataclass(frozen=True)
class ReducedSystem(LtiQoSystem):
    """Reduced-order realization plus the projection pair that produced it.

    Shares the field layout of :class:`LtiQoSystem`, so it can be passed to
    every routine that consumes a full-order system."""

    projection: object = None
    full_order: Optional[int] = None


def new_system(A, B, C=None, M_list: Sequence = (), *,
               require_stable: bool = False) -> LtiQoSystem:
    """Validate and assemble a quadratic-output system.

    Each quadratic map is replaced by its symmetric part (M + M^T)/2, which
    leaves the quadratic form x^T M x unchanged. A missing ``C`` is stored as
    an all-zero matrix with one row per quadratic map.

    Parameters
    ----------
    A : (n, n) array
        State map. Must be Hurwitz when ``require_stable`` is set.
    B : (n, m) array
        Input map.
    C : (p, n) array, optional
        Linear output map; all-zero if omitted.
    M_list : sequence of (n, n) arrays
        Quadratic output maps, one per output channel.
    require_stable : bool
        Verify the spectral abscissa is negative and record the result.

    Raises
    ------
    DimensionError
        On inconsistent shapes (the offending field is named) or non-finite
        entries.
    StabilityError
        If ``require_stable`` is set and A is not Hurwitz.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"A must be square, got shape {A.shape}")
    n = A.shape[0]
    _require_finite("A", A)

    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if B.ndim != 2 or B.shape[0] != n:
        raise DimensionError(
            f"B must have {n} rows to match A, got shape {B.shape}")
    _require_finite("B", B)
    m = B.shape[1]

    M_sym = []
    for i, M in enumerate(M_list):
        M = np.atleast_2d(np.asarray(M, dtype=float))
        if M.shape != (n, n):
            raise DimensionError(
                f"M_list[{i}] must be {n}x{n} to match A, got shape {M.shape}")
        _require_finite(f"M_list[{i}]", M)
        M_sym.append(_frozen((M + M.T) / 2.0))
    p = len(M_sym)
    if p == 0:
        raise DimensionError("M_list must contain at least one quadratic map")

    if C is None:
        C = np.zeros((p, n))
    else:
        C = np.atleast_2d(np.asarray(C, dtype=float))
        if C.shape != (p, n):
            raise DimensionError(
                f"C must be {p}x{n} (one row per output), got shape {C.shape}")
        _require_finite("C", C)

    stable = None
    if require_stable:
        sys_tmp = LtiQoSystem(_frozen(A), _frozen(B), _frozen(C),
                              tuple(M_sym), n, m, p)
        alpha = spectral_abscissa(sys_tmp)
        if alpha >= 0:
            raise StabilityError(
                f"A is not Hurwitz (spectral abscissa {alpha:.3e} >= 0)")
        stable = True

    return LtiQoSystem(_frozen(A), _frozen(B), _frozen(C), tuple(M_sym),
                       n, m, p, stable)


def spectral_abscissa(sys_or_matrix) -> float:
    """Largest real part over the eigenvalues of the state map."""
    A = sys_or_matrix.A if hasattr(sys_or_matrix, "A") else np.asarray(
        sys_or_matrix, dtype=float)
    return float(np.max(np.linalg.eigvals(A).real))


def _is_hurwitz(sys: LtiQoSystem) -> bool:
    if sys.stable is not None:
        return sys.stable
    return spectral_abscissa(sys) < 0


def require_hurwitz(sys: LtiQoSystem, what: str = "operation"):
    if not _is_hurwitz(sys):
        raise StabilityError(f"{what} requires a Hurwitz state matrix")


def random_stable_system(n: int, m: int, p: int, quad_card: int,
                         seed=None, *, decay_range=(0.2, 2.0),
                         skew_scale: float = 1.0) -> LtiQoSystem:
    """Seeded random Hurwitz system with sparse 0/1 diagonal quadratic maps.

    The state map is built as A = Q (D + S) Q^T with D a diagonal of draws
    from -decay_range, S random skew-symmetric, and Q random orthogonal; the
    symmetric part of D + S is D, so the field of values (hence every
    eigenvalue real part) stays left of -min(decay_range). The abscissa is
    re-checked and the draw repeated if it ever fails. Each M_i is diagonal
    with exactly ``quad_card`` entries set to one at seeded positions, and
    C is dense random (recorded as such by the bundle writer).
    """
    if quad_card > n:
        raise ValueError(f"quad_card={quad_card} exceeds order n={n}")
    rng = np.random.default_rng(seed)
    lo, hi = decay_range
    if not (0 < lo <= hi):
        raise ValueError("decay_range must satisfy 0 < lo <= hi")
    for _ in range(100):
        D = np.diag(-rng.uniform(lo, hi, size=n))
        G = rng.standard_normal((n, n)) * skew_scale
        S = (G - G.T) / 2.0
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        A = Q @ (D + S) @ Q.T
        if np.max(np.linalg.eigvals(A).real) < 0:
            break
    else:  # pragma: no cover - construction is stable by design
        raise StabilityError("failed to draw a Hurwitz state matrix")
    B = rng.standard_normal((n, m))
    C = rng.standard_normal((p, n))
    M_list = []
    for _ in range(p):
        d = np.zeros(n)
        d[rng.choice(n, size=quad_card, replace=False)] = 1.0
        M_list.append(np.diag(d))
    sys = new_system(A, B, C, M_list)
    object.__setattr__(sys, "stable", True)  # abscissa verified in the loop
    return sys


def modal_space_structure(n_modes: int, m: int, p: int,
                          damping_range=(0.05, 0.2),
                          freq_range=(0.5, 10.0),
                          seed=None, *, quad_card: Optional[int] = None,
                          c_scale: float = 1.0) -> LtiQoSystem:
    """Procedural lightly-damped structural surrogate of order 2*n_modes.

    The state map is block diagonal with 2x2 modal blocks

        [[0, w_k], [-w_k, -2 z_k w_k]],

    whose eigenvalues are -z_k w_k +/- j w_k sqrt(1 - z_k^2); damping ratios
    z_k and natural frequencies w_k are seeded uniform draws from the given
    ranges. B and C are dense random, and each quadratic map is diagonal 0/1
    selecting ``quad_card`` states (default: one tenth of the order).
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    zlo, zhi = damping_range
    if not (0 < zlo <= zhi <= 1):
        raise ValueError("damping_range must lie in (0, 1]")
    wlo, whi = freq_range
    if not (0 < wlo <= whi):
        raise ValueError("freq_range must be positive")
    rng = np.random.default_rng(seed)
    n = 2 * n_modes
    zetas = rng.uniform(zlo, zhi, size=n_modes)
    omegas = rng.uniform(wlo, whi, size=n_modes)
    A = np.zeros((n, n))
    for k in range(n_modes):
        w, z = omegas[k], zetas[k]
        A[2 * k:2 * k + 2, 2 * k:2 * k + 2] = [[0.0, w], [-w, -2 * z * w]]
    B = rng.standard_normal((n, m))
    C = c_scale * rng.standard_normal((p, n))
    card = quad_card if quad_card is not None else max(1, n // 10)
    if card > n:
        raise ValueError(f"quad_card={card} exceeds order n={n}")
    M_list = []
    for _ in range(p):
        d = np.zeros(n)
        d[rng.choice(n, size=card, replace=False)] = 1.0
        M_list.append(np.diag(d))
    sys = new_system(A, B, C, M_list)
    # zeta, omega > 0 force every modal block Hurwitz; skip the dense eig.
    object.__setattr__(sys, "stable", True)
    return sys


def project(sys: LtiQoSystem, proj, *, biorth_tol: float = 1e-8) -> ReducedSystem:
    """Petrov-Galerkin projection of a system onto a biorthogonal pair.

    Given projection matrices with W^T V = I_r, forms A_r = W^T A V,
    B_r = W^T B, C_r = C V, and M_{i,r} = V^T M_i V (re-symmetrized).

    ``proj`` is either a :class:`~qobt.reduction.ProjectionPair` or a plain
    (V, W) tuple of n-by-r arrays.
    """
    if hasattr(proj, "V") and hasattr(proj, "W"):
        V, W = proj.V, proj.W
        pair = proj
    else:
        V, W = proj
        pair = None
    V = np.atleast_2d(np.asarray(V, dtype=float))
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if V.shape[0] != sys.n or W.shape[0] != sys.n or V.shape != W.shape:
        raise DimensionError(
            f"projection matrices must be {sys.n} x r, got V {V.shape}, W {W.shape}")
    r = V.shape[1]
    dev = np.max(np.abs(W.T @ V - np.eye(r)))
    if dev > biorth_tol:
        raise ValueError(
            f"projection pair is not biorthogonal: max |W^T V - I| = {dev:.3e} "
            f"exceeds {biorth_tol:.1e}")
    A_r = W.T @ sys.A @ V
    B_r = W.T @ sys.B
    C_r = sys.C @ V
    M_r = []
    for M in sys.M_list:
        Mr = V.T @ M @ V
        M_r.append(_frozen((Mr + Mr.T) / 2.0))
    return ReducedSystem(_frozen(A_r), _frozen(B_r), _frozen(C_r),
                         tuple(M_r), r, sys.m, sys.p, None,
                         projection=pair, full_order=sys.n)
