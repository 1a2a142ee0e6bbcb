"""Exact (dense) Gramians of quadratic-output systems for the unrestricted,
time-limited, and frequency-limited scenarios, the auxiliary Gramians tying
the limited quantities back to their full-horizon counterparts, energy
functionals, and a quadrature oracle evaluating the defining integrals
directly as an independent ground truth.

Scenario conventions
--------------------
The controllability Gramian P is the standard reachability integral; the
observability Gramian of a quadratic-output system splits as

    Q = Q_0 + sum_i Q_i,

where Q_0 is the classical linear-output Gramian of (A, C) and each Q_i is
the observability Gramian of the bilinear-free quadratic channel, whose
Lyapunov right-hand side couples M_i to P. Limited-interval variants
substitute the windowed P and add endpoint correction terms built from
matrix exponentials (time) or the band prefactor F (frequency).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.linalg as sla
from numpy.polynomial.legendre import leggauss

from . import linalg
from .errors import OracleBudgetError, SingularGramianError
from .model import FrequencyBand, LtiQoSystem, TimeInterval, require_hurwitz

__all__ = [
    "GramianSet",
    "AuxiliaryGramians",
    "gram_infinite",
    "gram_time_limited",
    "gram_freq_limited",
    "aux_time_gramians",
    "aux_freq_gramian",
    "energy_bounds",
    "quadrature_gramian_oracle",
]

Scenario = Union[str, TimeInterval, FrequencyBand]


@dataclass(frozen=True)
class GramianSet:
    """Symmetric PSD Gramian pair with provenance.

    ``scenario`` is one of ``"infinite"``, ``"time_limited"``, or
    ``"frequency_limited"``; ``window`` carries the interval or band for the
    limited scenarios. ``Q_parts`` holds (Q_0, Q_1, ..., Q_p) when retained.
    """

    P: np.ndarray
    Q: np.ndarray
    scenario: str
    window: Optional[Scenario] = None
    Q_parts: Optional[tuple] = None


@dataclass(frozen=True)
class AuxiliaryGramians:
    """Helper Gramians appearing in the windowing identities.

    Time scenario: ``q_hat_tau`` is the [0, tau] restriction of the
    observability integral that keeps the full-horizon inner Gramian, and
    ``q_bar_tau`` its correction carrying e^{A tau} P e^{A^T tau}; the
    windowed Gramian is their difference. Frequency scenario: ``q_tilde``
    solves the unrestricted observability equation with the band-limited
    inner Gramian, and the band Gramian is F^T q_tilde + q_tilde F.
    """

    q_hat_tau: Optional[np.ndarray] = None
    q_bar_tau: Optional[np.ndarray] = None
    q_tilde: Optional[np.ndarray] = None
    f_omega: Optional[np.ndarray] = None


def _scenario_tag(scenario: Scenario) -> str:
    if isinstance(scenario, TimeInterval):
        return "time_limited"
    if isinstance(scenario, FrequencyBand):
        return "frequency_limited"
    if scenario in (None, "infinite", "bt"):
        return "infinite"
    raise ValueError(f"unknown scenario {scenario!r}")


def gram_infinite(sys: LtiQoSystem) -> GramianSet:
    """Full-horizon Gramian pair.

    P solves A P + P A^T + B B^T = 0; Q_0 solves A^T Q0 + Q0 A + C^T C = 0;
    each Q_i solves A^T Qi + Qi A + M_i P M_i = 0, and Q is their sum.
    """
    require_hurwitz(sys, "gram_infinite")
    A = sys.A
    P = linalg.solve_lyapunov(A, sys.B @ sys.B.T)
    parts = [_obs_part(A, sys.C.T @ sys.C)]
    for M in sys.M_list:
        parts.append(_obs_part(A, M @ P @ M))
    Q = sum(parts)
    return GramianSet(P, Q, "infinite", None, tuple(parts))


def _obs_part(A, G):
    if not np.any(G):
        return np.zeros_like(A)
    return linalg.solve_lyapunov(A.T, G)


def gram_time_limited(sys: LtiQoSystem, interval: TimeInterval, *,
                      exp_pair=None) -> GramianSet:
    """Gramian pair restricted to the window [tau_i, tau_f] seconds.

    P_tau solves A P + P A^T + E_i B B^T E_i^T - E_f B B^T E_f^T = 0 with
    E_s = e^{A s}; the observability parts solve the transposed equations
    with C^T C and M_i P_tau M_i conjugated by the same two exponentials,
    which are computed once per call and shared across all right-hand sides.

    ``exp_pair`` optionally injects precomputed (e^{A tau_i}, e^{A tau_f}),
    letting callers time or reuse the exponential stage separately.
    """
    require_hurwitz(sys, "gram_time_limited")
    if not isinstance(interval, TimeInterval):
        interval = TimeInterval(*interval)
    A = sys.A
    n = sys.n
    if interval.span == 0.0:
        z = np.zeros((n, n))
        return GramianSet(z, z, "time_limited", interval,
                          tuple([z] * (sys.p + 1)))
    if exp_pair is None:
        E_i = np.eye(n) if interval.tau_i == 0.0 else linalg.matrix_exponential(
            A, interval.tau_i)
        E_f = linalg.matrix_exponential(A, interval.tau_f)
    else:
        E_i, E_f = exp_pair
    Bi, Bf = E_i @ sys.B, E_f @ sys.B
    P = linalg.solve_lyapunov(A, Bi @ Bi.T - Bf @ Bf.T)
    parts = []
    Ci, Cf = sys.C @ E_i, sys.C @ E_f
    parts.append(_obs_part(A, Ci.T @ Ci - Cf.T @ Cf))
    for M in sys.M_list:
        MPM = M @ P @ M
        parts.append(_obs_part(
            A, E_i.T @ MPM @ E_i - E_f.T @ MPM @ E_f))
    Q = sum(parts)
    return GramianSet(P, Q, "time_limited", interval, tuple(parts))


def gram_freq_limited(sys: LtiQoSystem, band: FrequencyBand, *,
                      f_omega=None) -> GramianSet:
    """Gramian pair restricted to the band [omega_1, omega_2] rad/sec.

    With F the real band prefactor from :func:`~qobt.linalg.principal_log_ratio`,
    P solves A P + P A^T + F B B^T + B B^T F^T = 0 and the observability
    parts solve the transposed equations with right-hand sides
    F^T C^T C + C^T C F and F^T M_i P M_i + M_i P M_i F.
    """
    require_hurwitz(sys, "gram_freq_limited")
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)
    A = sys.A
    n = sys.n
    if band.span == 0.0:
        z = np.zeros((n, n))
        return GramianSet(z, z, "frequency_limited", band,
                          tuple([z] * (sys.p + 1)))
    F = linalg.principal_log_ratio(A, band.omega_1, band.omega_2) \
        if f_omega is None else f_omega
    BBt = sys.B @ sys.B.T
    P = linalg.solve_lyapunov(A, F @ BBt + BBt @ F.T)
    parts = []
    CtC = sys.C.T @ sys.C
    parts.append(_obs_part(A, F.T @ CtC + CtC @ F))
    for M in sys.M_list:
        MPM = M @ P @ M
        parts.append(_obs_part(A, F.T @ MPM + MPM @ F))
    Q = sum(parts)
    return GramianSet(P, Q, "frequency_limited", band, tuple(parts))


def aux_time_gramians(sys: LtiQoSystem, tau: float) -> AuxiliaryGramians:
    """Windowing helpers for the time scenario over [0, tau].

    ``q_hat_tau`` solves the windowed observability equation that keeps the
    full-horizon inner Gramian P (right-hand side G - E^T G E with
    G = C^T C + sum M_i P M_i and E = e^{A tau}); ``q_bar_tau`` solves the
    analogous equation with the inner Gramian replaced by E P E^T. The
    identities

        Q = E^T Q E + q_hat_tau        and        Q_tau = q_hat_tau - q_bar_tau

    tie the full and windowed observability Gramians together.
    """
    require_hurwitz(sys, "aux_time_gramians")
    A = sys.A
    E = linalg.matrix_exponential(A, tau)
    P = linalg.solve_lyapunov(A, sys.B @ sys.B.T)
    CtC = sys.C.T @ sys.C
    q_hat = _obs_part(A, CtC - E.T @ CtC @ E)
    EPEt = E @ P @ E.T
    q_bar = np.zeros_like(A)
    for M in sys.M_list:
        MPM = M @ P @ M
        q_hat = q_hat + _obs_part(A, MPM - E.T @ MPM @ E)
        MEPM = M @ EPEt @ M
        q_bar = q_bar + _obs_part(A, MEPM - E.T @ MEPM @ E)
    return AuxiliaryGramians(q_hat_tau=q_hat, q_bar_tau=q_bar)


def aux_freq_gramian(sys: LtiQoSystem, band: FrequencyBand) -> AuxiliaryGramians:
    """Windowing helper for the frequency scenario.

    ``q_tilde`` solves A^T X + X A + C^T C + sum M_i P_band M_i = 0 with the
    band-limited inner Gramian; the band observability Gramian satisfies
    Q_band = F^T q_tilde + q_tilde F with the returned prefactor F.
    """
    require_hurwitz(sys, "aux_freq_gramian")
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)
    A = sys.A
    F = linalg.principal_log_ratio(A, band.omega_1, band.omega_2)
    gs = gram_freq_limited(sys, band, f_omega=F)
    G = sys.C.T @ sys.C
    for M in sys.M_list:
        G = G + M @ gs.P @ M
    q_tilde = _obs_part(A, G)
    return AuxiliaryGramians(q_tilde=q_tilde, f_omega=F)


def energy_bounds(P, Q, x0) -> tuple:
    """Input energy and output energy bound at an initial state.

    Returns (E_c, E_o_bound) with E_c = x0^T P^{-1} x0 the minimum input
    energy that steers the state to x0, and the output energy bounded by
    x0^T Q x0 (1 + E_c).
    """
    P = np.atleast_2d(np.asarray(P, float))
    Q = np.atleast_2d(np.asarray(Q, float))
    x0 = np.asarray(x0, float).reshape(-1)
    try:
        cf = sla.cho_factor((P + P.T) / 2.0)
        e_c = float(x0 @ sla.cho_solve(cf, x0))
    except np.linalg.LinAlgError as exc:
        raise SingularGramianError(
            "controllability Gramian is numerically singular; regularize it "
            "or restrict to the controllable subspace") from exc
    bound = float(x0 @ Q @ x0) * (1.0 + e_c)
    return e_c, bound


# ---------------------------------------------------------------------------
# quadrature oracle


class _Propagator:
    """e^{A t} at arbitrary t via one eigendecomposition, with a dense
    fallback when the eigenvector basis is badly conditioned."""

    def __init__(self, A):
        self.A = A
        lam, X = np.linalg.eig(A)
        cond = np.linalg.cond(X)
        self.ok = np.isfinite(cond) and cond < 1e10
        if self.ok:
            self.lam, self.X, self.Xi = lam, X, np.linalg.inv(X)

    def __call__(self, t):
        if self.ok:
            return np.ascontiguousarray(np.real(
                self.X @ (np.exp(self.lam * t)[:, None] * self.Xi)))
        return sla.expm(self.A * t)


def _panels(lo, hi, width, cap):
    count = max(1, int(np.ceil((hi - lo) / width)))
    if count > cap:
        raise OracleBudgetError(
            f"{count} quadrature panels needed for [{lo:.3g}, {hi:.3g}] "
            f"exceeds the budget of {cap}")
    return np.linspace(lo, hi, count + 1)


def _gl_nodes(edges, nodes):
    x, w = leggauss(nodes)
    ts, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        ts.append(0.5 * (b - a) * x + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(ts), np.concatenate(ws)


def quadrature_gramian_oracle(sys: LtiQoSystem, scenario: Scenario,
                              nodes: int = 48, *,
                              panel_cap: int = 2000) -> GramianSet:
    """Gramian pair evaluated directly from the defining integrals.

    Composite Gauss-Legendre with ``nodes`` points per panel; panel widths
    track the decay rate (time domain) or sharpest resonance (frequency
    domain), and infinite horizons are truncated where the propagator norm
    estimate drops below 1e-14. Deliberately independent of the Lyapunov /
    matrix-logarithm route: time propagation uses an eigendecomposition and
    band integrals use per-node resolvent solves.

    Intended as ground truth at modest order; cost is O(nodes * panels * n^3).
    """
    require_hurwitz(sys, "quadrature_gramian_oracle")
    tag = _scenario_tag(scenario)
    A, B, C = sys.A, sys.B, sys.C
    n = sys.n
    lam = np.linalg.eigvals(A)
    a = float(np.max(lam.real))

    if tag == "frequency_limited":
        band = scenario
        if band.span == 0.0:
            z = np.zeros((n, n))
            return GramianSet(z, z, tag, band, tuple([z] * (sys.p + 1)))
        sharp = float(np.min(np.abs(lam.real)))
        edges = _panels(band.omega_1, band.omega_2,
                        2.0 * max(sharp, 1e-2), panel_cap)
        nus, ws = _gl_nodes(edges, nodes)
        I = np.eye(n)
        resolvents = [np.linalg.inv(1j * nu * I - A) for nu in nus]
        P = np.zeros((n, n))
        for R, w in zip(resolvents, ws):
            RB = R @ B
            P += (w / np.pi) * np.real(RB @ RB.conj().T)
        parts = [np.zeros((n, n)) for _ in range(sys.p + 1)]
        for R, w in zip(resolvents, ws):
            CR = C @ R
            parts[0] += (w / np.pi) * np.real(CR.conj().T @ CR)
            for i, M in enumerate(sys.M_list):
                MR = M @ R
                parts[i + 1] += (w / np.pi) * np.real(MR.conj().T @ (P @ MR))
        P = (P + P.T) / 2.0
        parts = [(Qp + Qp.T) / 2.0 for Qp in parts]
        return GramianSet(P, sum(parts), tag, band, tuple(parts))

    if tag == "infinite":
        t_lo, t_hi = 0.0, 1.25 * np.log(1e14) / abs(a)
        window = None
    else:
        interval = scenario
        if interval.span == 0.0:
            z = np.zeros((n, n))
            return GramianSet(z, z, tag, interval, tuple([z] * (sys.p + 1)))
        t_lo, t_hi = interval.tau_i, interval.tau_f
        window = interval
    omega_max = float(np.max(np.abs(lam.imag)))
    width = 2.0 / abs(a)
    if omega_max > 0:
        width = min(width, 8.0 * 2.0 * np.pi / omega_max)
    edges = _panels(t_lo, t_hi, width, panel_cap)
    ts, ws = _gl_nodes(edges, nodes)
    prop = _Propagator(A)
    exps = [prop(t) for t in ts]
    P = np.zeros((n, n))
    for E, w in zip(exps, ws):
        EB = E @ B
        P += w * (EB @ EB.T)
    parts = [np.zeros((n, n)) for _ in range(sys.p + 1)]
    for E, w in zip(exps, ws):
        CE = C @ E
        parts[0] += w * (CE.T @ CE)
        for i, M in enumerate(sys.M_list):
            ME = M @ E
            parts[i + 1] += w * (ME.T @ (P @ ME))
    P = (P + P.T) / 2.0
    parts = [(Qp + Qp.T) / 2.0 for Qp in parts]
    return GramianSet(P, sum(parts), tag, window, tuple(parts))
