"""Greedy sparse solvers over parametric dictionaries.

``amp_ctls`` is matching pursuit with per-iteration grid refinement: after
each atom selection the whole support (old members at their already-refined
coordinates, the new one at its grid coordinate) is re-refined jointly, so
early coarse picks get corrected as the support grows. ``omp`` is the
fixed-grid baseline: same selection rule, plain least squares on the
selected atoms, no refinement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dictionary import ParametricDictionary, as_grid
from .ije import IjeConfig, ije_refine
from .numerics import SingularSystemError, as_vector, least_squares_solve

__all__ = ["StopRule", "SolverState", "correlate", "amp_ctls", "omp"]

_MODES = ("sparsity", "residual", "relative_residual")


@dataclass(frozen=True)
class StopRule:
    """Outer-loop stop criterion.

    sparsity K            stop once the support holds K atoms
    residual delta        stop once ||r|| < delta
    relative_residual d   stop once ||r_k|| < d * ||r_{k-1}||
    """

    mode: str
    value: float

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        if self.mode == "sparsity":
            if self.value != int(self.value) or self.value < 1:
                raise ValueError("sparsity level must be a positive integer")
        elif not self.value > 0:
            raise ValueError("threshold must be positive")
        elif self.mode == "relative_residual" and not self.value < 1:
            raise ValueError("relative threshold must be below 1")

    @classmethod
    def sparsity(cls, k: int) -> "StopRule":
        return cls("sparsity", int(k))

    @classmethod
    def residual(cls, delta: float) -> "StopRule":
        return cls("residual", float(delta))

    @classmethod
    def relative(cls, delta: float) -> "StopRule":
        return cls("relative_residual", float(delta))


@dataclass
class SolverState:
    """Terminal state of a greedy solve.

    support holds original grid indices in selection order; grid_estimates
    row i is the (possibly refined) coordinate vector of support[i], aligned
    with x_estimates. iterations is the number of outer iterations run.
    aborted is None normally, or a short reason string when the solver had
    to stop early (rank-deficient fit, support cap).
    """

    support: list[int]
    grid_estimates: np.ndarray
    x_estimates: np.ndarray
    residual: np.ndarray
    iterations: int
    aborted: str | None = None

    def dense_x(self, n_grid: int) -> np.ndarray:
        """Coefficients scattered over the full grid; zero off the support."""
        x = np.zeros(n_grid, dtype=complex)
        x[self.support] = self.x_estimates
        return x


def correlate(residual, dictionary: ParametricDictionary, grid) -> np.ndarray:
    """Per-atom correlation magnitudes |<phi_i, r>| / ||phi_i||."""
    residual = as_vector(residual, "residual")
    atoms = dictionary.atoms(grid)
    norms = np.linalg.norm(atoms, axis=0)
    norms = np.where(norms > 0, norms, 1.0)
    return np.abs(atoms.conj().T @ residual) / norms


def _select(correlations: np.ndarray, taken: set[int]) -> int | None:
    # highest correlation not already in the support; ties -> lowest index
    order = np.argsort(-correlations, kind="stable")
    for idx in order:
        if int(idx) not in taken:
            return int(idx)
    return None


def _stop_after(stop: StopRule, k: int, norm: float, prev_norm: float) -> bool:
    if stop.mode == "sparsity":
        return k >= int(stop.value)
    if stop.mode == "residual":
        return norm < stop.value
    return norm < stop.value * prev_norm


def amp_ctls(
    y,
    dictionary: ParametricDictionary,
    grid0,
    stop: StopRule,
    ije_config: IjeConfig | None = None,
) -> SolverState:
    """Matching pursuit with joint grid refinement of the running support.

    Per outer iteration: correlate the residual against atoms at the current
    coordinates (refined for support members, original for the rest), add
    the best unselected atom, refine the whole support, recompute the
    residual from the refined fit, then test the stop rule.
    """
    y = as_vector(y, "y")
    ije_config = ije_config or IjeConfig()
    coords = as_grid(grid0, dictionary.arity).copy()
    n_grid = coords.shape[0]
    max_support = min(dictionary.M, n_grid)

    support: list[int] = []
    taken: set[int] = set()
    x_est = np.zeros(0, dtype=complex)
    residual = y.copy()
    prev_norm = float(np.linalg.norm(y))
    aborted = None

    while True:
        if len(support) >= max_support:
            if not (stop.mode == "sparsity" and len(support) >= int(stop.value)):
                aborted = "support_limit"
            break
        picked = _select(correlate(residual, dictionary, coords), taken)
        if picked is None:
            aborted = "no_candidates"
            break
        support.append(picked)
        taken.add(picked)
        try:
            refined = ije_refine(y, dictionary, coords[support], ije_config)
        except SingularSystemError:
            support.pop()
            taken.discard(picked)
            aborted = "rank_deficient_support"
            break
        coords[support] = refined.grid
        x_est = refined.x
        residual = refined.residual
        norm = float(np.linalg.norm(residual))
        if _stop_after(stop, len(support), norm, prev_norm):
            break
        prev_norm = norm

    return SolverState(
        support=support,
        grid_estimates=coords[support].copy(),
        x_estimates=x_est,
        residual=residual,
        iterations=len(support),
        aborted=aborted,
    )


def omp(y, dictionary: ParametricDictionary, grid, stop: StopRule) -> SolverState:
    """Orthogonal matching pursuit on a fixed grid."""
    y = as_vector(y, "y")
    coords = as_grid(grid, dictionary.arity)
    atoms = dictionary.atoms(coords)
    norms = np.linalg.norm(atoms, axis=0)
    norms = np.where(norms > 0, norms, 1.0)
    n_grid = coords.shape[0]
    max_support = min(dictionary.M, n_grid)

    support: list[int] = []
    taken: set[int] = set()
    x_est = np.zeros(0, dtype=complex)
    residual = y.copy()
    prev_norm = float(np.linalg.norm(y))
    aborted = None

    while True:
        if len(support) >= max_support:
            if not (stop.mode == "sparsity" and len(support) >= int(stop.value)):
                aborted = "support_limit"
            break
        cors = np.abs(atoms.conj().T @ residual) / norms
        picked = _select(cors, taken)
        if picked is None:
            aborted = "no_candidates"
            break
        support.append(picked)
        taken.add(picked)
        try:
            x_est = least_squares_solve(atoms[:, support], y)
        except SingularSystemError:
            support.pop()
            taken.discard(picked)
            aborted = "rank_deficient_support"
            break
        residual = y - atoms[:, support] @ x_est
        norm = float(np.linalg.norm(residual))
        if _stop_after(stop, len(support), norm, prev_norm):
            break
        prev_norm = norm

    return SolverState(
        support=support,
        grid_estimates=coords[support].copy(),
        x_estimates=x_est,
        residual=residual,
        iterations=len(support),
        aborted=aborted,
    )
