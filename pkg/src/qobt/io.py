"""File formats: Matrix Market matrices, system bundles with a JSON
manifest, Gramian/factor exports with JSON sidecars, and full-precision CSV
series.

A system bundle is a directory holding A.mtx, B.mtx, C.mtx, M_1.mtx ...
M_p.mtx next to manifest.json with at least {n, m, p, stable}; generators
add their seed and a note that C was drawn randomly. CSV numbers are
written with shortest round-trip decimal formatting so identical runs
produce identical bytes.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from scipy.io import mmread, mmwrite

from .model import FrequencyBand, LtiQoSystem, TimeInterval, new_system

__all__ = [
    "save_matrix",
    "load_matrix",
    "save_system",
    "load_system",
    "save_gramians",
    "load_gramians",
    "save_factor",
    "save_csv",
    "save_decay_csv",
    "save_error_csv",
    "save_json",
    "load_json",
]


def save_matrix(path, a):
    mmwrite(str(path), np.atleast_2d(np.asarray(a, float)))


def load_matrix(path) -> np.ndarray:
    out = mmread(str(path))
    if hasattr(out, "toarray"):
        out = out.toarray()
    return np.atleast_2d(np.asarray(out, float))


def _fmt(x) -> str:
    return repr(float(x))


def save_csv(path, header, columns):
    """Write named columns with round-trip float formatting."""
    columns = [np.asarray(c).reshape(-1) for c in columns]
    rows = len(columns[0])
    if any(len(c) != rows for c in columns):
        raise ValueError("all CSV columns must share a length")
    fmts = [str if np.issubdtype(c.dtype, np.integer) else _fmt
            for c in columns]
    lines = [",".join(header)]
    for k in range(rows):
        lines.append(",".join(f(c[k]) for f, c in zip(fmts, columns)))
    Path(path).write_text("\n".join(lines) + "\n")


def save_decay_csv(path, values):
    values = np.asarray(values).reshape(-1)
    save_csv(path, ["index", "value"], [np.arange(1, values.size + 1), values])


def save_error_csv(path, series):
    """One time column plus one relative-error column per output channel."""
    p = series.errors.shape[1]
    header = ["time"] + [f"rel_error_{i + 1}" for i in range(p)]
    cols = [series.times] + [series.errors[:, i] for i in range(p)]
    save_csv(path, header, cols)


def save_json(path, payload: dict):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def save_system(sys: LtiQoSystem, bundle_dir, *, seed=None, generator=None,
                notes=()):
    """Write a system bundle (matrices plus manifest) into a directory."""
    d = Path(bundle_dir)
    d.mkdir(parents=True, exist_ok=True)
    save_matrix(d / "A.mtx", sys.A)
    save_matrix(d / "B.mtx", sys.B)
    save_matrix(d / "C.mtx", sys.C)
    for i, M in enumerate(sys.M_list, start=1):
        save_matrix(d / f"M_{i}.mtx", M)
    manifest = {"n": sys.n, "m": sys.m, "p": sys.p,
                "stable": bool(sys.stable) if sys.stable is not None else None,
                "notes": list(notes)}
    if seed is not None:
        manifest["seed"] = seed
    if generator is not None:
        manifest["generator"] = generator
    save_json(d / "manifest.json", manifest)
    return d


def load_system(bundle_dir, *, require_stable=False) -> LtiQoSystem:
    d = Path(bundle_dir)
    manifest = load_json(d / "manifest.json")
    p = int(manifest["p"])
    A = load_matrix(d / "A.mtx")
    B = load_matrix(d / "B.mtx")
    C = load_matrix(d / "C.mtx")
    M_list = [load_matrix(d / f"M_{i}.mtx") for i in range(1, p + 1)]
    sys = new_system(A, B, C, M_list, require_stable=require_stable)
    if not require_stable and manifest.get("stable") is True:
        object.__setattr__(sys, "stable", True)
    return sys


def _window_payload(gs):
    if isinstance(gs.window, TimeInterval):
        return {"interval": [gs.window.tau_i, gs.window.tau_f]}
    if isinstance(gs.window, FrequencyBand):
        return {"band": [gs.window.omega_1, gs.window.omega_2]}
    return {}


def save_gramians(gs, out_dir, *, parts=False):
    """P.mtx / Q.mtx plus a sidecar recording scenario and window."""
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    save_matrix(d / "P.mtx", gs.P)
    save_matrix(d / "Q.mtx", gs.Q)
    sidecar = {"scenario": gs.scenario}
    sidecar.update(_window_payload(gs))
    if parts and gs.Q_parts is not None:
        for i, Qp in enumerate(gs.Q_parts):
            save_matrix(d / f"Q_part_{i}.mtx", Qp)
        sidecar["q_parts"] = len(gs.Q_parts)
    save_json(d / "gramians.json", sidecar)
    return d


def load_gramians(out_dir):
    from .gramians import GramianSet
    d = Path(out_dir)
    sidecar = load_json(d / "gramians.json")
    window = None
    if "interval" in sidecar:
        window = TimeInterval(*sidecar["interval"])
    elif "band" in sidecar:
        window = FrequencyBand(*sidecar["band"])
    parts = None
    if "q_parts" in sidecar:
        parts = tuple(load_matrix(d / f"Q_part_{i}.mtx")
                      for i in range(sidecar["q_parts"]))
    return GramianSet(load_matrix(d / "P.mtx"), load_matrix(d / "Q.mtx"),
                      sidecar["scenario"], window, parts)


def save_factor(lrg, path_stem):
    """Z.mtx plus sidecar {method, scenario, diagnostics}."""
    stem = Path(path_stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    save_matrix(stem.with_suffix(".mtx"), lrg.Z)
    sidecar = {"method": lrg.method, "scenario": lrg.scenario}
    for key, val in lrg.diagnostics.items():
        if isinstance(val, (int, float, str, bool)):
            sidecar[key] = val
        elif isinstance(val, (list, tuple)):
            sidecar[key] = [float(np.real(v)) if isinstance(v, complex) else v
                            for v in val]
    save_json(stem.with_suffix(".json"), sidecar)
