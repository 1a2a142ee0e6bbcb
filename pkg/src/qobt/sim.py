"""Time-domain simulation of full and reduced quadratic-output systems and
the relative-error bookkeeping used by the reduction experiments.

The state equation is integrated with an adaptive embedded Runge-Kutta 4(5)
pair from a zero initial condition; dense output is sampled on a uniform
reporting grid and the quadratic outputs are evaluated from the sampled
states. Error series compare two trajectories on an identical grid,
pointwise per channel, with a guard against division at output zeros.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import solve_ivp

from . import reduction
from .errors import GridMismatchError, SimulationError
from .model import FrequencyBand, LtiQoSystem, TimeInterval, spectral_abscissa

__all__ = [
    "Signal",
    "Trajectory",
    "ErrorSeries",
    "simulate",
    "evaluate_outputs",
    "relative_error",
    "restrict_series",
    "run_comparison",
]

REPORT_SAMPLES = 2000


@dataclass(frozen=True)
class Signal:
    """Input signal applied identically to all channels unless per-channel
    overrides are given.

    kinds: ``zero``; ``step`` (constant ``amplitude`` from t = 0);
    ``sinusoid`` (amplitude * cos(omega t + phase)).
    """

    kind: str = "zero"
    amplitude: float = 1.0
    omega: float = 0.0
    phase: float = 0.0
    per_channel: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("zero", "step", "sinusoid"):
            raise ValueError(f"unknown signal kind {self.kind!r}")
        for v in (self.amplitude, self.omega, self.phase):
            if not np.isfinite(v):
                raise ValueError("signal parameters must be finite")

    def _scalar(self, t: float) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "step":
            return self.amplitude
        return self.amplitude * np.cos(self.omega * t + self.phase)

    def __call__(self, t: float, m: int = 1) -> np.ndarray:
        if self.per_channel is not None:
            if len(self.per_channel) != m:
                raise ValueError(
                    f"{len(self.per_channel)} per-channel signals for {m} inputs")
            return np.array([sig._scalar(t) for sig in self.per_channel])
        return np.full(m, self._scalar(t))


@dataclass(frozen=True)
class Trajectory:
    """Sampled simulation result: strictly increasing times, state history
    (len(times) x n) and output history (len(times) x p) with
    y = C x + stack(x^T M_i x) holding at every sample."""

    times: np.ndarray
    states: np.ndarray
    outputs: np.ndarray


@dataclass(frozen=True)
class ErrorSeries:
    """Pointwise per-channel relative errors |y - y_r| / max(|y|, guard).

    Samples where |y| falls below the guard are flagged, excluded from the
    aggregates, and counted. ``max_error`` and ``integrated_mean`` aggregate
    over all channels; the per-channel versions keep the channel axis.
    """

    times: np.ndarray
    errors: np.ndarray
    max_error: float
    integrated_mean: float
    per_channel_max: np.ndarray
    per_channel_mean: np.ndarray
    guarded_count: int
    eps_guard: float
    flagged: np.ndarray = None


def evaluate_outputs(sys: LtiQoSystem, states: np.ndarray) -> np.ndarray:
    """y(t_k) = C x(t_k) + stack(x^T M_i x) for a (T, n) state history."""
    states = np.atleast_2d(states)
    y = states @ sys.C.T
    for i, M in enumerate(sys.M_list):
        y[:, i] = y[:, i] + np.einsum("ti,ij,tj->t", states, M, states)
    return y


def simulate(sys: LtiQoSystem, signal: Union[Signal, Callable],
             t_end: float, rtol: float = 1e-8, atol: float = 1e-10,
             samples: int = REPORT_SAMPLES) -> Trajectory:
    """Integrate the state equation from x(0) = 0 and sample the outputs.

    ``signal`` may be a :class:`Signal` or any callable t -> (m,) array.
    Local error is controlled by (rtol, atol); the dense RK solution is
    sampled on ``samples`` uniform report times over [0, t_end].
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    A, B = sys.A, sys.B
    m = sys.m
    if isinstance(signal, Signal):
        u = lambda t: signal(t, m)
    else:
        u = lambda t: np.broadcast_to(np.asarray(signal(t), float), (m,))

    def rhs(t, x):
        return A @ x + B @ u(t)

    sol = solve_ivp(rhs, (0.0, t_end), np.zeros(sys.n), method="RK45",
                    dense_output=True, rtol=rtol, atol=atol)
    if not sol.success:
        raise SimulationError(
            f"integrator failed near t = {sol.t[-1]:.6g}: {sol.message}")
    times = np.linspace(0.0, t_end, samples)
    states = sol.sol(times).T
    outputs = evaluate_outputs(sys, states)
    return Trajectory(times, states, outputs)


def relative_error(y: Trajectory, y_r: Trajectory,
                   eps_guard: float = 1e-300) -> ErrorSeries:
    """Pointwise relative error series between two trajectories.

    The time grids must coincide exactly; resampling is the caller's job.
    """
    if y.times.shape != y_r.times.shape or not np.array_equal(y.times, y_r.times):
        raise GridMismatchError("trajectories are on different time grids")
    ref = np.abs(y.outputs)
    err = np.abs(y.outputs - y_r.outputs) / np.maximum(ref, eps_guard)
    flagged = ref <= eps_guard
    return _series_from_errors(y.times, err, flagged, eps_guard)


def _series_from_errors(times, err, flagged, eps_guard) -> ErrorSeries:
    ok = ~flagged
    span = times[-1] - times[0] if times.size > 1 else 1.0
    p = err.shape[1]
    ch_max = np.zeros(p)
    ch_mean = np.zeros(p)
    for c in range(p):
        if np.any(ok[:, c]):
            ch_max[c] = np.max(err[ok[:, c], c])
            if times.size > 1:
                weight = np.trapezoid(ok[:, c].astype(float), times)
                ch_mean[c] = np.trapezoid(
                    np.where(ok[:, c], err[:, c], 0.0), times) / max(weight, 1e-300)
            else:
                ch_mean[c] = err[0, c] if ok[0, c] else 0.0
    max_error = float(np.max(ch_max)) if p else 0.0
    integrated_mean = float(np.mean(ch_mean)) if p else 0.0
    return ErrorSeries(times, err, max_error, integrated_mean,
                       ch_max, ch_mean, int(np.sum(flagged)), eps_guard,
                       flagged)


def restrict_series(series: ErrorSeries, t_lo: float, t_hi: float) -> ErrorSeries:
    """Error series restricted to the window [t_lo, t_hi]; aggregates are
    recomputed over the restricted grid."""
    mask = (series.times >= t_lo - 1e-12) & (series.times <= t_hi + 1e-12)
    if not np.any(mask):
        raise ValueError(f"window [{t_lo}, {t_hi}] contains no samples")
    return _series_from_errors(series.times[mask], series.errors[mask],
                               series.flagged[mask], series.eps_guard)


def run_comparison(sys: LtiQoSystem, scenario: str, r: int,
                   backend: str = "dense", *,
                   interval: Optional[TimeInterval] = None,
                   band: Optional[FrequencyBand] = None,
                   signal: Optional[Signal] = None,
                   horizon: Optional[float] = None,
                   rtol: float = 1e-8, atol: float = 1e-10,
                   samples: int = REPORT_SAMPLES,
                   adi_cfg=None, laguerre_cfg=None,
                   eps_guard: float = 1e-300) -> dict:
    """Reduce with the requested scenario and with plain balanced truncation
    at the same order, simulate all three systems on a shared grid, and
    return the error series per method.

    The input defaults to a sinusoid at the band midpoint for the
    frequency-limited scenario (the time-limited one has no natural
    frequency, so its signal must be given). Error series are restricted to
    the time window for the time-limited scenario and span the full horizon
    otherwise; the default horizon is the window end (time-limited) or
    twenty reciprocal spectral abscissae (frequency-limited).
    """
    scenario = {"tl": "tlbt", "fl": "flbt"}.get(scenario, scenario)
    if scenario not in ("tlbt", "flbt"):
        raise ValueError("run_comparison compares tlbt or flbt against bt")
    if scenario == "tlbt":
        if interval is None:
            raise ValueError("tlbt comparison requires an interval")
        interval = interval if isinstance(interval, TimeInterval) \
            else TimeInterval(*interval)
        if signal is None:
            raise ValueError("tlbt comparison requires an explicit signal")
        if horizon is None:
            horizon = interval.tau_f
    else:
        if band is None:
            raise ValueError("flbt comparison requires a band")
        band = band if isinstance(band, FrequencyBand) else FrequencyBand(*band)
        if signal is None:
            signal = Signal("sinusoid", amplitude=0.1, omega=band.midpoint)
        if horizon is None:
            horizon = 20.0 / abs(spectral_abscissa(sys))

    rom_bt, _, _ = reduction.reduce(sys, r, "bt", backend=backend,
                                    adi_cfg=adi_cfg, laguerre_cfg=laguerre_cfg)
    rom_sc, _, _ = reduction.reduce(sys, r, scenario, interval=interval,
                                    band=band, backend=backend,
                                    adi_cfg=adi_cfg, laguerre_cfg=laguerre_cfg)
    kwargs = dict(rtol=rtol, atol=atol, samples=samples)
    full = simulate(sys, signal, horizon, **kwargs)
    out = {}
    for name, rom in (("bt", rom_bt), (scenario, rom_sc)):
        traj = simulate(rom, signal, horizon, **kwargs)
        series = relative_error(full, traj, eps_guard=eps_guard)
        if scenario == "tlbt":
            series = restrict_series(series, interval.tau_i, interval.tau_f)
        out[name] = series
    return out
