"""Command-line front end.

Subcommands wrap one library operation each and compose through the file
bundle formats; ``pipeline`` chains them from a JSON experiment spec with
flag overrides (flags win). All randomness flows through one recorded seed
and numeric CSV output uses round-trip formatting, so a rerun with the same
seed reproduces identical CSV bytes.
"""
from __future__ import annotations

import argparse
import sys as _sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import gramians, io, lowrank, model, plots, reduction, sim
from .errors import QobtError

__all__ = ["main", "ExperimentSpec", "run_pipeline"]

SCENARIOS = {"bt": "bt", "tl": "tlbt", "tlbt": "tlbt", "fl": "flbt",
             "flbt": "flbt"}


def _parse_signal(text: str) -> sim.Signal:
    """kind[:param,param,...] -> Signal; e.g. sinusoid:0.1,3.5 or step:1."""
    kind, _, rest = text.partition(":")
    params = [float(v) for v in rest.split(",") if v] if rest else []
    if kind == "zero":
        return sim.Signal("zero")
    if kind == "step":
        return sim.Signal("step", amplitude=params[0] if params else 1.0)
    if kind == "sinusoid":
        if not params or len(params) > 3:
            raise ValueError(
                "sinusoid needs amplitude,omega[,phase], e.g. sinusoid:0.1,3.5")
        amp = params[0]
        omega = params[1] if len(params) > 1 else 1.0
        phase = params[2] if len(params) > 2 else 0.0
        return sim.Signal("sinusoid", amplitude=amp, omega=omega, phase=phase)
    raise ValueError(f"unknown signal kind {kind!r}")


@dataclass
class ExperimentSpec:
    """Validated description of one end-to-end experiment."""

    system: Optional[str] = None          # bundle directory
    generate: Optional[dict] = None       # generator params
    scenario: str = "bt"
    interval: Optional[list] = None
    band: Optional[list] = None
    order: int = 1
    backend: str = "dense"
    alpha: float = 1.0
    terms: int = 20
    shifts: int = 20
    tol: float = 1e-4
    signal: Optional[str] = None
    horizon: Optional[float] = None
    out: str = "qobt_out"
    seed: int = 0
    plots: bool = True

    def validate(self):
        if (self.system is None) == (self.generate is None):
            raise ValueError(
                "spec needs exactly one system source: 'system' or 'generate'")
        sc = SCENARIOS.get(self.scenario)
        if sc is None:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        self.scenario = sc
        if sc == "tlbt" and self.interval is None:
            raise ValueError("time-limited scenario requires an interval")
        if sc == "flbt" and self.band is None:
            raise ValueError("frequency-limited scenario requires a band")
        if sc == "bt" and (self.interval is not None or self.band is not None):
            raise ValueError("bt scenario takes neither interval nor band")
        if self.backend not in ("dense", "adi", "laguerre"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.order < 1:
            raise ValueError("order must be >= 1")
        return self

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        payload = io.load_json(path)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown spec fields: {sorted(unknown)}")
        return cls(**payload)


def _load_or_generate(spec: ExperimentSpec, out: Path):
    if spec.system is not None:
        return io.load_system(spec.system, require_stable=True), None
    g = dict(spec.generate)
    kind = g.pop("kind", "modal")
    seed = g.pop("seed", spec.seed)
    if kind == "modal":
        sysm = model.modal_space_structure(
            n_modes=int(g.pop("n_modes", 10)), m=int(g.pop("m", 1)),
            p=int(g.pop("p", 1)),
            damping_range=tuple(g.pop("damping_range", (0.05, 0.2))),
            freq_range=tuple(g.pop("freq_range", (0.5, 10.0))),
            seed=seed, quad_card=g.pop("quad_card", None),
            c_scale=float(g.pop("c_scale", 1.0)))
    elif kind == "random":
        sysm = model.random_stable_system(
            n=int(g.pop("n", 20)), m=int(g.pop("m", 1)), p=int(g.pop("p", 1)),
            quad_card=int(g.pop("quad_card", 4)), seed=seed)
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    if g:
        raise ValueError(f"unknown generator fields: {sorted(g)}")
    bundle = io.save_system(sysm, out / "system", seed=seed, generator=kind,
                            notes=("C drawn randomly by the generator",))
    return sysm, bundle


def _scenario_kwargs(spec: ExperimentSpec) -> dict:
    kw = {}
    if spec.interval is not None:
        kw["interval"] = model.TimeInterval(*spec.interval)
    if spec.band is not None:
        kw["band"] = model.FrequencyBand(*spec.band)
    return kw


def _backend_kwargs(spec: ExperimentSpec, sysm) -> dict:
    kw = {}
    if spec.backend == "adi":
        shifts = lowrank.dominant_shifts(sysm, min(spec.shifts, sysm.n))
        kw["adi_cfg"] = lowrank.AdiConfig(
            shifts=tuple(shifts), rel_residual_tol=spec.tol)
    elif spec.backend == "laguerre":
        kw["laguerre_cfg"] = lowrank.LaguerreConfig(alpha=spec.alpha,
                                                    terms=spec.terms)
    return kw


def run_pipeline(spec: ExperimentSpec) -> Path:
    """Generation -> Gramians -> reduction -> simulation -> artifacts."""
    stage = "validate spec"
    try:
        spec.validate()
        out = Path(spec.out)
        out.mkdir(parents=True, exist_ok=True)

        stage = "load system"
        sysm, _ = _load_or_generate(spec, out)

        stage = "gramians"
        sets = {"infinite": gramians.gram_infinite(sysm)}
        if spec.scenario == "tlbt":
            sets["time_limited"] = gramians.gram_time_limited(
                sysm, model.TimeInterval(*spec.interval))
        if spec.scenario == "flbt":
            sets["frequency_limited"] = gramians.gram_freq_limited(
                sysm, model.FrequencyBand(*spec.band))
        decay_curves = {}
        for tag, gs in sets.items():
            for name, G in (("P", gs.P), ("Q", gs.Q)):
                curve = reduction.eigenvalue_decay(G)
                decay_curves[f"{name}_{tag}"] = curve
                io.save_decay_csv(out / f"decay_{name}_{tag}.csv", curve)

        stage = "reduction"
        rom, pair, report = reduction.reduce(
            sysm, spec.order, spec.scenario, backend=spec.backend,
            **_scenario_kwargs(spec), **_backend_kwargs(spec, sysm))
        io.save_system(rom, out / "rom",
                       notes=(f"reduced order {spec.order} via "
                              f"{spec.scenario}/{spec.backend}",))
        io.save_csv(out / "sigma.csv", ["index", "sigma"],
                    [np.arange(1, pair.sigma.size + 1), pair.sigma])
        payload = report.as_dict()
        payload["notes"].append("C drawn randomly by the generator"
                                if spec.generate else "system from bundle")
        io.save_json(out / "report.json", payload)

        stage = "simulation"
        series = None
        if spec.scenario in ("tlbt", "flbt"):
            signal = _parse_signal(spec.signal) if spec.signal else None
            series = sim.run_comparison(
                sysm, spec.scenario, spec.order, spec.backend,
                signal=signal, horizon=spec.horizon,
                **_scenario_kwargs(spec), **_backend_kwargs(spec, sysm))
            for name, es in series.items():
                io.save_error_csv(out / f"error_{name}.csv", es)
        else:
            signal = _parse_signal(spec.signal) if spec.signal else \
                sim.Signal("step", amplitude=1.0)
            horizon = spec.horizon or 20.0 / abs(model.spectral_abscissa(sysm))
            full = sim.simulate(sysm, signal, horizon)
            traj = sim.simulate(rom, signal, horizon)
            es = sim.relative_error(full, traj)
            io.save_error_csv(out / "error_bt.csv", es)
            series = {"bt": es}

        stage = "figures"
        if spec.plots:
            plots.plot_decay(decay_curves, out / "decay.png")
            plots.plot_sigma(pair.sigma, out / "sigma.png",
                             discarded=report.discarded_sigma)
            plots.plot_error_series(series, out / "error.png")
    except Exception as exc:
        raise RuntimeError(f"pipeline stage '{stage}' failed: {exc}") from exc
    return out


# ---------------------------------------------------------------------------
# argument parsing


def _add_system_source(p: argparse.ArgumentParser):
    p.add_argument("--system", help="system bundle directory")


def _add_out(p: argparse.ArgumentParser):
    p.add_argument("--out", default="qobt_out", help="output directory")
    p.add_argument("--no-plots", action="store_true",
                   help="skip figure rendering")


def _add_scenario(p: argparse.ArgumentParser):
    p.add_argument("--scenario", default="bt",
                   choices=sorted(SCENARIOS), help="reduction scenario")
    p.add_argument("--interval", nargs=2, type=float, metavar=("TI", "TF"))
    p.add_argument("--band", nargs=2, type=float, metavar=("W1", "W2"))


def _add_backend(p: argparse.ArgumentParser):
    p.add_argument("--backend", default="dense",
                   choices=["dense", "adi", "laguerre"])
    p.add_argument("--alpha", type=float, default=1.0,
                   help="Laguerre scaling parameter")
    p.add_argument("--terms", type=int, default=20,
                   help="Laguerre truncation order N")
    p.add_argument("--shifts", type=int, default=20,
                   help="number of dominant-pole ADI shifts")
    p.add_argument("--tol", type=float, default=1e-4,
                   help="ADI relative residual tolerance")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qobt",
        description="Balanced truncation of quadratic-output systems in "
                    "unrestricted, time-limited, and frequency-limited "
                    "scenarios.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a system bundle")
    g.add_argument("--type", default="modal", choices=["modal", "random"])
    g.add_argument("--n", type=int, help="order (random generator)")
    g.add_argument("--modes", type=int, help="mode count (modal generator)")
    g.add_argument("--m", type=int, default=1)
    g.add_argument("--p", type=int, default=1)
    g.add_argument("--quad-card", type=int, default=None,
                   help="states summed by each quadratic output")
    g.add_argument("--damping", nargs=2, type=float, default=(0.05, 0.2))
    g.add_argument("--freq", nargs=2, type=float, default=(0.5, 10.0))
    g.add_argument("--c-scale", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    gr = sub.add_parser("gram", help="compute a Gramian pair")
    _add_system_source(gr)
    _add_scenario(gr)
    gr.add_argument("--parts", action="store_true",
                    help="also store the observability parts")
    _add_out(gr)

    rd = sub.add_parser("reduce", help="reduce a system bundle")
    _add_system_source(rd)
    _add_scenario(rd)
    _add_backend(rd)
    rd.add_argument("--order", type=int, required=True)
    rd.add_argument("--suggest-order", action="store_true",
                    help="also print a heuristic order from the sigma ladder")
    _add_out(rd)

    sm = sub.add_parser("simulate", help="simulate a system bundle")
    _add_system_source(sm)
    sm.add_argument("--signal", default="step:1.0",
                    help="kind:params, e.g. sinusoid:0.1,3.5")
    sm.add_argument("--horizon", type=float, required=True)
    sm.add_argument("--rtol", type=float, default=1e-8)
    sm.add_argument("--atol", type=float, default=1e-10)
    _add_out(sm)

    cp = sub.add_parser("compare",
                        help="error of scenario ROM vs plain BT ROM")
    _add_system_source(cp)
    _add_scenario(cp)
    _add_backend(cp)
    cp.add_argument("--order", type=int, required=True)
    cp.add_argument("--signal", default=None)
    cp.add_argument("--horizon", type=float, default=None)
    _add_out(cp)

    dc = sub.add_parser("decay", help="normalized eigenvalue decay of a matrix")
    dc.add_argument("--gramian", required=True, help="Matrix Market file")
    _add_out(dc)

    pl = sub.add_parser("pipeline", help="full experiment from a JSON spec")
    pl.add_argument("--spec", help="JSON experiment spec")
    _add_system_source(pl)
    _add_scenario(pl)
    _add_backend(pl)
    pl.add_argument("--order", type=int, default=None)
    pl.add_argument("--signal", default=None)
    pl.add_argument("--horizon", type=float, default=None)
    pl.add_argument("--seed", type=int, default=None)
    _add_out(pl)
    # overrides must be distinguishable from their defaults
    pl.set_defaults(scenario=None, backend=None, alpha=None, terms=None,
                    shifts=None, tol=None, out=None)
    return ap


def _require_system(args) -> model.LtiQoSystem:
    if not args.system:
        raise ValueError("--system bundle directory is required")
    return io.load_system(args.system, require_stable=True)


def _window_kwargs(args) -> dict:
    kw = {}
    if args.interval is not None:
        kw["interval"] = model.TimeInterval(*args.interval)
    if args.band is not None:
        kw["band"] = model.FrequencyBand(*args.band)
    return kw


def _cmd_gen(args):
    if args.type == "modal":
        modes = args.modes if args.modes is not None else 10
        sysm = model.modal_space_structure(
            modes, args.m, args.p, tuple(args.damping), tuple(args.freq),
            seed=args.seed, quad_card=args.quad_card, c_scale=args.c_scale)
    else:
        if args.n is None:
            raise ValueError("--n is required for the random generator")
        card = args.quad_card if args.quad_card is not None else \
            max(1, args.n // 10)
        sysm = model.random_stable_system(args.n, args.m, args.p, card,
                                          seed=args.seed)
    io.save_system(sysm, args.out, seed=args.seed, generator=args.type,
                   notes=("C drawn randomly by the generator",))
    print(f"wrote bundle {args.out} (n={sysm.n}, m={sysm.m}, p={sysm.p})")


def _cmd_gram(args):
    sysm = _require_system(args)
    scenario = SCENARIOS[args.scenario]
    if scenario == "tlbt":
        if args.interval is None:
            raise ValueError("time-limited Gramians require --interval")
        gs = gramians.gram_time_limited(sysm, model.TimeInterval(*args.interval))
    elif scenario == "flbt":
        if args.band is None:
            raise ValueError("frequency-limited Gramians require --band")
        gs = gramians.gram_freq_limited(sysm, model.FrequencyBand(*args.band))
    else:
        gs = gramians.gram_infinite(sysm)
    out = io.save_gramians(gs, args.out, parts=args.parts)
    for name, G in (("P", gs.P), ("Q", gs.Q)):
        io.save_decay_csv(Path(args.out) / f"decay_{name}.csv",
                          reduction.eigenvalue_decay(G))
    if not args.no_plots:
        plots.plot_decay(
            {"P": reduction.eigenvalue_decay(gs.P),
             "Q": reduction.eigenvalue_decay(gs.Q)},
            Path(args.out) / "decay.png")
    print(f"wrote Gramians ({gs.scenario}) to {out}")


def _cmd_reduce(args):
    sysm = _require_system(args)
    spec = ExperimentSpec(system=args.system, scenario=args.scenario,
                          interval=list(args.interval) if args.interval else None,
                          band=list(args.band) if args.band else None,
                          order=args.order, backend=args.backend,
                          alpha=args.alpha, terms=args.terms,
                          shifts=args.shifts, tol=args.tol)
    spec.validate()
    rom, pair, report = reduction.reduce(
        sysm, spec.order, spec.scenario, backend=spec.backend,
        **_window_kwargs(args), **_backend_kwargs(spec, sysm))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.save_system(rom, out / "rom")
    io.save_csv(out / "sigma.csv", ["index", "sigma"],
                [np.arange(1, pair.sigma.size + 1), pair.sigma])
    io.save_json(out / "report.json", report.as_dict())
    if not args.no_plots:
        plots.plot_sigma(pair.sigma, out / "sigma.png",
                         discarded=report.discarded_sigma)
    if args.suggest_order:
        ladder = np.concatenate([pair.sigma, report.discarded_sigma])
        print(f"heuristic order suggestion (sigma ratio 1e-4): "
              f"{reduction.suggest_order(ladder)}")
    print(f"wrote ROM of order {args.order} to {out}")


def _cmd_simulate(args):
    sysm = io.load_system(args.system) if args.system else None
    if sysm is None:
        raise ValueError("--system bundle directory is required")
    traj = sim.simulate(sysm, _parse_signal(args.signal), args.horizon,
                        rtol=args.rtol, atol=args.atol)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = ["time"] + [f"y_{i + 1}" for i in range(sysm.p)]
    io.save_csv(out / "trajectory.csv", header,
                [traj.times] + [traj.outputs[:, i] for i in range(sysm.p)])
    print(f"wrote trajectory ({len(traj.times)} samples) to {out}")


def _cmd_compare(args):
    sysm = _require_system(args)
    spec = ExperimentSpec(system=args.system, scenario=args.scenario,
                          interval=list(args.interval) if args.interval else None,
                          band=list(args.band) if args.band else None,
                          order=args.order, backend=args.backend,
                          alpha=args.alpha, terms=args.terms,
                          shifts=args.shifts, tol=args.tol)
    spec.validate()
    if spec.scenario == "bt":
        raise ValueError("compare needs a tl or fl scenario (bt is the baseline)")
    signal = _parse_signal(args.signal) if args.signal else None
    series = sim.run_comparison(
        sysm, spec.scenario, spec.order, spec.backend, signal=signal,
        horizon=args.horizon, **_window_kwargs(args),
        **_backend_kwargs(spec, sysm))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, es in series.items():
        io.save_error_csv(out / f"error_{name}.csv", es)
        print(f"{name}: max rel error {es.max_error:.3e}, "
              f"integrated mean {es.integrated_mean:.3e}")
    if not args.no_plots:
        plots.plot_error_series(series, out / "error.png")


def _cmd_decay(args):
    G = io.load_matrix(args.gramian)
    curve = reduction.eigenvalue_decay(G)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.save_decay_csv(out / "decay.csv", curve)
    if not args.no_plots:
        plots.plot_decay({Path(args.gramian).stem: curve}, out / "decay.png")
    print(f"wrote decay curve ({curve.size} entries) to {out}")


def _cmd_pipeline(args):
    spec = ExperimentSpec.from_json(args.spec) if args.spec else ExperimentSpec()
    # flags win over the JSON spec
    if args.system:
        spec.system = args.system
        spec.generate = None
    if args.interval is not None:
        spec.interval = list(args.interval)
    if args.band is not None:
        spec.band = list(args.band)
    for name in ("scenario", "backend", "alpha", "terms", "shifts", "tol",
                 "order", "signal", "horizon", "seed", "out"):
        val = getattr(args, name)
        if val is not None:
            setattr(spec, name, val)
    if args.no_plots:
        spec.plots = False
    out = run_pipeline(spec)
    print(f"pipeline artifacts in {out}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"gen": _cmd_gen, "gram": _cmd_gram, "reduce": _cmd_reduce,
                "simulate": _cmd_simulate, "compare": _cmd_compare,
                "decay": _cmd_decay, "pipeline": _cmd_pipeline}
    try:
        handlers[args.command](args)
    except (QobtError, ValueError, RuntimeError, FileNotFoundError) as exc:
        print(f"qobt {args.command}: error: {exc}", file=_sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
