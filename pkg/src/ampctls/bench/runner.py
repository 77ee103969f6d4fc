"""Monte-Carlo harness: trials, matching, aggregation, CSV output.

An experiment is a list of cells (one per sweep value, each holding a scene
and optionally a per-cell stop override), a list of solver specs, a trial
count, and a master seed. Per trial the measurement is synthesized once and
every solver runs on the same realization. Per-trial RNG streams are derived
as SeedSequence((master_seed, cell_index, trial_index)), so execution order
(or a parallel executor) cannot change results; trials are aggregated by a
single writer.

Estimates are matched to ground-truth components by greedy nearest-parameter
assignment under wrap-around distance on [0, 1) per axis; the
magnitude-descending ordering of amplitude estimates is also recorded (it
drives the spurious-amplitude ratio when more atoms than true components are
requested). MSE is reported in dB as 10 log10(mean squared error).
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..dictionary import uniform_grid, wrap_unit
from ..ije import IjeConfig, ije_refine
from ..solvers import SolverState, StopRule, amp_ctls, omp
from .crb import crb, doa_map
from .scenes import SceneSpec, realize

__all__ = [
    "SolverSpec",
    "Cell",
    "ExperimentConfig",
    "TrialRecord",
    "ExperimentResult",
    "run_experiment",
    "wrap_diff",
    "match_components",
]

_KINDS = ("amp_ctls", "omp", "ije_fixed")


@dataclass(frozen=True)
class SolverSpec:
    """One solver entry: label, kind, candidate grid, stop rule, refinement config.

    grid_counts builds a uniform grid (per-axis counts); grid_points, when
    given, is used verbatim. ije_fixed runs refinement from initial_points
    with no atom selection (fixed support).
    """

    name: str
    kind: str
    grid_counts: tuple[int, ...] | None = None
    grid_points: tuple[tuple[float, ...], ...] | None = None
    stop: StopRule | None = None
    ije: IjeConfig | None = None
    initial_points: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if self.kind == "ije_fixed" and self.initial_points is None:
            raise ValueError("ije_fixed needs initial_points")
        if self.kind != "ije_fixed" and self.grid_counts is None and self.grid_points is None:
            raise ValueError(f"{self.kind} needs grid_counts or grid_points")


@dataclass
class Cell:
    sweep_value: float
    scene: SceneSpec
    stop_override: StopRule | None = None


@dataclass
class ExperimentConfig:
    name: str
    sweep_name: str
    cells: list[Cell]
    solvers: list[SolverSpec]
    trials: int
    seed: int
    recovery_threshold: float | None = None
    doa_aperture: float | None = None  # set -> report axis-0 params as angles


@dataclass
class TrialRecord:
    """One (trial, solver, component) row."""

    trial: int
    seed: int
    sweep_value: float
    solver: str
    component: int
    status: str
    params_true: tuple[float, ...]
    params_est: tuple[float, ...] | None
    sq_err: tuple[float, ...] | None
    amp_true: complex
    amp_est: complex | None
    residual_norm: float
    iterations: int
    spurious_ratio: float | None
    hit: float | None
    theta_true: float | None = None
    theta_est: float | None = None
    theta_sq_err: float | None = None
    code: tuple[int, ...] | None = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[TrialRecord]
    summary: list[dict]


def wrap_diff(a, b) -> np.ndarray:
    """Signed wrap-around difference a - b per axis, in (-0.5, 0.5]."""
    return (np.asarray(a, float) - np.asarray(b, float) + 0.5) % 1.0 - 0.5


def match_components(truth: np.ndarray, est: np.ndarray) -> list[int | None]:
    """Greedy bijective nearest-parameter assignment.

    Returns, for each truth row, the matched estimate row index (or None
    when there are fewer estimates than truths). Pairs are claimed globally
    by ascending wrap-around distance; ties break on (truth, estimate) index.
    """
    k, L = truth.shape[0], est.shape[0]
    pairs = []
    for i in range(k):
        for j in range(L):
            d = float(np.linalg.norm(wrap_diff(truth[i], est[j])))
            pairs.append((d, i, j))
    pairs.sort()
    out: list[int | None] = [None] * k
    used: set[int] = set()
    for d, i, j in pairs:
        if out[i] is None and j not in used:
            out[i] = j
            used.add(j)
    return out


def _trial_seed(master: int, cell_index: int, trial: int) -> int:
    return int(np.random.SeedSequence((master, cell_index, trial)).generate_state(1)[0])


def _resolve_grid(spec: SolverSpec, arity: int) -> np.ndarray:
    if spec.grid_points is not None:
        return np.asarray(spec.grid_points, dtype=float)
    counts = spec.grid_counts
    return uniform_grid(arity, counts[0] if arity == 1 else counts)


def _run_solver(spec: SolverSpec, stop: StopRule, dictionary, y) -> SolverState:
    if spec.kind == "omp":
        return omp(y, dictionary, _resolve_grid(spec, dictionary.arity), stop)
    if spec.kind == "amp_ctls":
        return amp_ctls(y, dictionary, _resolve_grid(spec, dictionary.arity), stop,
                        spec.ije or IjeConfig())
    res = ije_refine(y, dictionary, np.asarray(spec.initial_points, dtype=float),
                     spec.ije or IjeConfig())
    return SolverState(
        support=list(range(len(spec.initial_points))),
        grid_estimates=res.grid,
        x_estimates=res.x,
        residual=res.residual,
        iterations=res.loops_run,
        aborted="rank_deficient_refit" if res.flag == "rank_deficient_refit" else None,
    )


def run_experiment(config: ExperimentConfig, out_dir=None) -> ExperimentResult:
    """Run all cells x solvers x trials; aggregate; optionally write CSVs.

    Solver failures (rank deficiency, degenerate geometry) are recorded on
    the trial rows and excluded from MSE aggregation; they still count as
    misses for recovery rates. Byte-identical outputs for identical
    (config, seed).
    """
    records: list[TrialRecord] = []
    summary: list[dict] = []

    for ci, cell in enumerate(config.cells):
        scene = cell.scene
        truth = scene.params
        amps = scene.amplitudes
        k = truth.shape[0]
        arity = scene.arity
        names = scene.param_names
        thetas_true = None
        if config.doa_aperture is not None:
            thetas_true = np.array([doa_map(wrap_unit(truth[i, 0]), config.doa_aperture)
                                    for i in range(k)])

        crb_samples: list[np.ndarray] = []  # (k, arity) per contributing trial
        errs: dict[tuple[str, int, int], list[float]] = {}
        theta_errs: dict[tuple[str, int], list[float]] = {}
        res_norms: dict[str, list[float]] = {s.name: [] for s in config.solvers}
        ratios: dict[str, list[float]] = {s.name: [] for s in config.solvers}
        hits: dict[tuple[str, int], list[float]] = {}

        for t in range(config.trials):
            seed_t = _trial_seed(config.seed, ci, t)
            dictionary, y, _ = realize(scene, seed_t)
            code = tuple(int(v) for v in dictionary.code) if scene.model == "rsf" else None
            if scene.sigma > 0 and (scene.model == "rsf" or not crb_samples):
                try:
                    crb_samples.append(crb(scene, code=np.asarray(code) if code else None).params)
                except (ValueError, np.linalg.LinAlgError):
                    pass

            for spec in config.solvers:
                stop = cell.stop_override or spec.stop or StopRule.sparsity(k)
                status = "ok"
                try:
                    state = _run_solver(spec, stop, dictionary, y)
                    if state.aborted:
                        status = state.aborted
                except (np.linalg.LinAlgError, ValueError) as exc:
                    state = None
                    status = f"failed:{type(exc).__name__}"

                est = wrap_unit(state.grid_estimates) if state is not None else np.zeros((0, arity))
                x_est = state.x_estimates if state is not None else np.zeros(0, complex)
                assign = match_components(truth, est)
                ratio = None
                if x_est.shape[0] > k:
                    mags = np.sort(np.abs(x_est))[::-1]
                    ratio = float(mags[k] / mags[k - 1]) if mags[k - 1] > 0 else float("inf")
                if ratio is not None and status == "ok":
                    ratios[spec.name].append(ratio)
                if state is not None and status == "ok":
                    res_norms[spec.name].append(float(np.linalg.norm(state.residual)))

                for i in range(k):
                    j = assign[i]
                    params_est = sq = amp_est = None
                    hit = None
                    th_t = th_e = th_sq = None
                    if thetas_true is not None:
                        th_t = float(thetas_true[i])
                    if j is not None and status == "ok":
                        pe = est[j]
                        d = wrap_diff(truth[i], pe)
                        params_est = tuple(float(v) for v in pe)
                        sq = tuple(float(v * v) for v in d)
                        amp_est = complex(x_est[j])
                        for c in range(arity):
                            errs.setdefault((spec.name, i, c), []).append(sq[c])
                        if thetas_true is not None:
                            try:
                                th_e = float(doa_map(float(pe[0]), config.doa_aperture))
                                th_sq = (th_e - th_t) ** 2
                                theta_errs.setdefault((spec.name, i), []).append(th_sq)
                            except ValueError:
                                th_e = th_sq = None
                        if config.recovery_threshold is not None:
                            hit = 1.0 if float(np.linalg.norm(d)) <= config.recovery_threshold else 0.0
                    elif config.recovery_threshold is not None:
                        hit = 0.0
                    if config.recovery_threshold is not None:
                        hits.setdefault((spec.name, i), []).append(hit)
                    records.append(TrialRecord(
                        trial=t, seed=seed_t, sweep_value=cell.sweep_value,
                        solver=spec.name, component=i + 1, status=status,
                        params_true=tuple(float(v) for v in truth[i]),
                        params_est=params_est, sq_err=sq,
                        amp_true=complex(amps[i]), amp_est=amp_est,
                        residual_norm=float(np.linalg.norm(state.residual)) if state is not None else float("nan"),
                        iterations=state.iterations if state is not None else 0,
                        spurious_ratio=ratio, hit=hit,
                        theta_true=th_t, theta_est=th_e, theta_sq_err=th_sq,
                        code=code,
                    ))

        crb_mean = np.mean(crb_samples, axis=0) if crb_samples else None
        for spec in config.solvers:
            for i in range(k):
                for c in range(arity):
                    vals = errs.get((spec.name, i, c), [])
                    mse = float(np.mean(vals)) if vals else float("nan")
                    crb_db = ""
                    if crb_mean is not None:
                        crb_db = _to_db(float(crb_mean[i, c]))
                    summary.append({
                        "sweep_value": cell.sweep_value, "solver": spec.name,
                        "metric": f"{names[c]}{i + 1}", "value": mse,
                        "mse_db": _to_db(mse) if vals else "",
                        "crb_db": crb_db, "n_trials": len(vals),
                    })
                if thetas_true is not None:
                    vals = theta_errs.get((spec.name, i), [])
                    mse = float(np.mean(vals)) if vals else float("nan")
                    crb_db = ""
                    if crb_mean is not None:
                        scale = (180.0 / np.pi) ** 2 / (
                            config.doa_aperture ** 2 * np.cos(np.radians(thetas_true[i])) ** 2)
                        crb_db = _to_db(float(crb_mean[i, 0]) * scale)
                    summary.append({
                        "sweep_value": cell.sweep_value, "solver": spec.name,
                        "metric": f"theta{i + 1}", "value": mse,
                        "mse_db": _to_db(mse) if vals else "",
                        "crb_db": crb_db, "n_trials": len(vals),
                    })
                if config.recovery_threshold is not None:
                    vals = hits.get((spec.name, i), [])
                    summary.append({
                        "sweep_value": cell.sweep_value, "solver": spec.name,
                        "metric": f"hit{i + 1}",
                        "value": float(np.mean(vals)) if vals else float("nan"),
                        "mse_db": "", "crb_db": "", "n_trials": len(vals),
                    })
            rn = res_norms[spec.name]
            summary.append({
                "sweep_value": cell.sweep_value, "solver": spec.name,
                "metric": "residual_norm",
                "value": float(np.mean(rn)) if rn else float("nan"),
                "mse_db": "", "crb_db": "", "n_trials": len(rn),
            })
            rr = ratios[spec.name]
            if rr:
                summary.append({
                    "sweep_value": cell.sweep_value, "solver": spec.name,
                    "metric": "spurious_ratio", "value": float(np.mean(rr)),
                    "mse_db": "", "crb_db": "", "n_trials": len(rr),
                })

    result = ExperimentResult(config=config, records=records, summary=summary)
    if out_dir is not None:
        write_result(result, out_dir)
    return result


def _to_db(v: float) -> float | str:
    if v is None or not np.isfinite(v) or v < 0:
        return ""
    if v == 0.0:
        return float("-inf")
    return float(10.0 * np.log10(v))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_result(result: ExperimentResult, out_dir) -> tuple[Path, Path]:
    """Write <name>_trials.csv and <name>_summary.csv; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    arity = cfg.cells[0].scene.arity
    names = cfg.cells[0].scene.param_names
    doa = cfg.doa_aperture is not None

    trials_path = out / f"{cfg.name}_trials.csv"
    header = ["trial", "seed", "sweep_value", "solver", "component", "status"]
    for c in range(arity):
        header += [f"{names[c]}_true", f"{names[c]}_est", f"{names[c]}_sqerr"]
    if doa:
        header += ["theta_true", "theta_est", "theta_sqerr"]
    header += ["amp_true_re", "amp_true_im", "amp_est_re", "amp_est_im",
               "residual_norm", "iterations", "spurious_ratio", "hit", "code"]
    with open(trials_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in result.records:
            row = [r.trial, r.seed, _fmt(r.sweep_value), r.solver, r.component, r.status]
            for c in range(arity):
                row += [_fmt(r.params_true[c]),
                        _fmt(r.params_est[c] if r.params_est else None),
                        _fmt(r.sq_err[c] if r.sq_err else None)]
            if doa:
                row += [_fmt(r.theta_true), _fmt(r.theta_est), _fmt(r.theta_sq_err)]
            row += [_fmt(r.amp_true.real), _fmt(r.amp_true.imag),
                    _fmt(r.amp_est.real if r.amp_est is not None else None),
                    _fmt(r.amp_est.imag if r.amp_est is not None else None),
                    _fmt(r.residual_norm), r.iterations, _fmt(r.spurious_ratio),
                    _fmt(r.hit), "-".join(str(c) for c in r.code) if r.code else ""]
            w.writerow(row)

    summary_path = out / f"{cfg.name}_summary.csv"
    with open(summary_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sweep_value", "solver", "metric", "value", "mse_db", "crb_db", "n_trials"])
        for row in result.summary:
            w.writerow([_fmt(row["sweep_value"]), row["solver"], row["metric"],
                        _fmt(row["value"]), _fmt(row["mse_db"]), _fmt(row["crb_db"]),
                        row["n_trials"]])
    return trials_path, summary_path


def solver_with(spec: SolverSpec, **changes) -> SolverSpec:
    """dataclasses.replace that tolerates None (no-op) values."""
    real = {k: v for k, v in changes.items() if v is not None}
    return dataclasses.replace(spec, **real) if real else spec
