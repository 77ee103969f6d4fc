"""Monte-Carlo benchmarking: scenes, oracle bounds, runner, presets, JSON IO."""

from .crb import CrbTable, crb, doa_map, single_tone_freq_crb
from .jsonio import (
    config_from_dict,
    default_solvers,
    load_config,
    load_scene,
    parse_stop,
    scene_from_dict,
    solver_from_dict,
)
from .presets import build_preset, fig2_trace, preset_names, run_preset
from .runner import (
    Cell,
    ExperimentConfig,
    ExperimentResult,
    SolverSpec,
    TrialRecord,
    match_components,
    run_experiment,
    wrap_diff,
    write_result,
)
from .scenes import MODELS, Component, SceneSpec, realize, sigma_for_snr, synthesize

__all__ = [
    "CrbTable",
    "crb",
    "doa_map",
    "single_tone_freq_crb",
    "config_from_dict",
    "default_solvers",
    "load_config",
    "load_scene",
    "parse_stop",
    "scene_from_dict",
    "solver_from_dict",
    "build_preset",
    "fig2_trace",
    "preset_names",
    "run_preset",
    "Cell",
    "ExperimentConfig",
    "ExperimentResult",
    "SolverSpec",
    "TrialRecord",
    "match_components",
    "run_experiment",
    "wrap_diff",
    "write_result",
    "MODELS",
    "Component",
    "SceneSpec",
    "realize",
    "sigma_for_snr",
    "synthesize",
]
