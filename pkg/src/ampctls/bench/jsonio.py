"""JSON configuration: scenes, solvers, experiments.

Scene object::

    {"model": "harmonic", "m_samples": 32,
     "components": [{"amp": [20.0, 0.0], "params": [0.0984375]}, ...],
     "sigma": 0.1}                     # or "snr_db": 5.0 (exactly one)

rsf scenes may add "ratio" (carrier step ratio) and "code_seed" (pins the
carrier permutation across trials; omitted -> a fresh permutation per trial).
"amp" is a number or an [re, im] pair.

Solver object::

    {"name": "omp_320", "grid": [320]}                  # kind inferred
    {"name": "amp_ctls", "grid": [64], "stop": "k=3",
     "ije_max_iters": 14, "sigma_delta": 0.005}
    {"name": "ije", "kind": "ije_fixed", "initial_points": [[0.28125]]}

"kind" is one of amp_ctls | omp | ije_fixed; when omitted it is inferred
from the name prefix (amp*/omp*/ije*). "grid_points" (list of coordinate
vectors) replaces "grid" counts. Stop rules are "k=<int>", "res=<float>",
or "rel=<float>" (also accepted as {"mode": ..., "value": ...}).

Experiment object::

    {"name": "exp", "trials": 100, "seed": 0,
     "scene": {...},                   # or "cells": [{"sweep_value": v,
                                       #   "scene": {...}, "stop": "k=4"}, ...]
     "solvers": [...],                 # optional; defaults by model
     "sweep_name": "snr_db",           # optional label
     "recovery_threshold": 0.015625,   # optional
     "doa_aperture": 0.5}              # optional; reports angles too
"""

from __future__ import annotations

import json
from pathlib import Path

from ..ctls import CtlsSettings
from ..ije import IjeConfig
from ..solvers import StopRule
from .runner import Cell, ExperimentConfig, SolverSpec
from .scenes import MODELS, Component, SceneSpec, sigma_for_snr

__all__ = [
    "parse_stop",
    "scene_from_dict",
    "solver_from_dict",
    "config_from_dict",
    "load_scene",
    "load_config",
    "default_solvers",
]

_KIND_PREFIX = {"amp": "amp_ctls", "omp": "omp", "ije": "ije_fixed"}
_IJE_KEYS = ("ije_max_iters", "rel_residual_tol", "sigma_delta", "sigma_w",
             "newton_max_iters", "newton_tol")


def parse_stop(spec) -> StopRule:
    """Parse "k=3" / "res=0.05" / "rel=0.9" or {"mode":..., "value":...}."""
    if isinstance(spec, StopRule):
        return spec
    if isinstance(spec, dict):
        return StopRule(mode=spec["mode"], value=float(spec["value"]))
    text = str(spec).strip()
    if "=" not in text:
        raise ValueError(f"stop rule {spec!r} must look like k=3, res=0.05 or rel=0.9")
    key, _, val = text.partition("=")
    key = key.strip().lower()
    if key == "k":
        return StopRule.sparsity(int(val))
    if key == "res":
        return StopRule.residual(float(val))
    if key == "rel":
        return StopRule.relative(float(val))
    raise ValueError(f"unknown stop rule kind {key!r}")


def _amp(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError("amp pairs must be [re, im]")
        return complex(float(v[0]), float(v[1]))
    return complex(float(v), 0.0)


def scene_from_dict(d: dict) -> SceneSpec:
    model = d.get("model")
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    comps = tuple(Component(amp=_amp(c["amp"]), params=tuple(float(p) for p in c["params"]))
                  for c in d["components"])
    has_sigma, has_snr = "sigma" in d, "snr_db" in d
    if has_sigma == has_snr:
        raise ValueError("scene needs exactly one of 'sigma' or 'snr_db'")
    sigma = float(d["sigma"]) if has_sigma else sigma_for_snr(comps, float(d["snr_db"]))
    kwargs = {}
    if "ratio" in d:
        kwargs["rsf_ratio"] = float(d["ratio"])
    if "code_seed" in d:
        kwargs["rsf_code_seed"] = int(d["code_seed"])
    return SceneSpec(model=model, m_samples=int(d["m_samples"]),
                     components=comps, sigma=sigma, **kwargs)


def _infer_kind(name: str) -> str:
    for prefix, kind in _KIND_PREFIX.items():
        if name.lower().startswith(prefix):
            return kind
    raise ValueError(f"cannot infer solver kind from name {name!r}; set 'kind'")


def _ije_from_dict(d: dict) -> IjeConfig | None:
    if not any(k in d for k in _IJE_KEYS):
        return None
    ctls = CtlsSettings(
        sigma_delta=d.get("sigma_delta", 0.005),
        sigma_w=float(d.get("sigma_w", 1.0)),
        newton_max_iters=int(d.get("newton_max_iters", 20)),
        newton_tol=float(d.get("newton_tol", 1e-9)),
    )
    return IjeConfig(max_iters=int(d.get("ije_max_iters", 14)),
                     rel_residual_tol=float(d.get("rel_residual_tol", 1e-6)),
                     ctls=ctls)


def solver_from_dict(d: dict) -> SolverSpec:
    name = d["name"]
    kind = d.get("kind") or _infer_kind(name)
    grid_counts = tuple(int(c) for c in d["grid"]) if "grid" in d else None
    grid_points = (tuple(tuple(float(v) for v in pt) for pt in d["grid_points"])
                   if "grid_points" in d else None)
    initial = (tuple(tuple(float(v) for v in pt) for pt in d["initial_points"])
               if "initial_points" in d else None)
    stop = parse_stop(d["stop"]) if "stop" in d else None
    return SolverSpec(name=name, kind=kind, grid_counts=grid_counts,
                      grid_points=grid_points, stop=stop,
                      ije=_ije_from_dict(d), initial_points=initial)


def default_solvers(scene: SceneSpec) -> list[SolverSpec]:
    """Refined pursuit plus plain pursuit on a model-appropriate grid."""
    if scene.model == "rsf":
        counts: tuple[int, ...] = (scene.m_samples, scene.m_samples)
        sigma_delta = 0.025
    else:
        counts = (2 * scene.m_samples,)
        sigma_delta = 0.005
    ije = IjeConfig(ctls=CtlsSettings(sigma_delta=sigma_delta))
    return [
        SolverSpec("amp_ctls", "amp_ctls", grid_counts=counts, ije=ije),
        SolverSpec("omp", "omp", grid_counts=counts),
    ]


def config_from_dict(d: dict) -> ExperimentConfig:
    if "cells" in d:
        cells = []
        for i, c in enumerate(d["cells"]):
            cells.append(Cell(
                sweep_value=float(c.get("sweep_value", i)),
                scene=scene_from_dict(c["scene"]),
                stop_override=parse_stop(c["stop"]) if "stop" in c else None))
    elif "scene" in d:
        cells = [Cell(sweep_value=0.0, scene=scene_from_dict(d["scene"]))]
    else:
        raise ValueError("experiment needs 'scene' or 'cells'")
    solvers = ([solver_from_dict(s) for s in d["solvers"]]
               if "solvers" in d else default_solvers(cells[0].scene))
    return ExperimentConfig(
        name=str(d.get("name", "experiment")),
        sweep_name=str(d.get("sweep_name", "sweep")),
        cells=cells,
        solvers=solvers,
        trials=int(d.get("trials", 100)),
        seed=int(d.get("seed", 0)),
        recovery_threshold=(float(d["recovery_threshold"])
                            if "recovery_threshold" in d else None),
        doa_aperture=float(d["doa_aperture"]) if "doa_aperture" in d else None,
    )


def _load(path) -> dict:
    with open(Path(path)) as fh:
        return json.load(fh)


def load_scene(path) -> SceneSpec:
    d = _load(path)
    return scene_from_dict(d["scene"] if "scene" in d else d)


def load_config(path) -> ExperimentConfig:
    return config_from_dict(_load(path))
