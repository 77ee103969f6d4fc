"""Alternating refinement of grid coordinates and coefficients.

One refinement loop does three things: solve the mismatch problem at the
current grid estimate (ctls.ctls_newton), move the grid by the real part of
the mismatch estimate, then re-fit the coefficients by least squares at the
moved grid. The loop keeps the residual-norm history and stops when the
relative residual decrease falls below ``rel_residual_tol``, when
``max_iters`` loops have run, or when a loop fails to decrease the residual
(the offending update is rolled back, so the recorded trace is non-increasing
by construction).

Grid coordinates are refined unbounded; wrap to [0, 1) only when reporting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ctls import CtlsSettings, ctls_newton, make_problem
from .dictionary import ParametricDictionary, as_grid
from .numerics import SingularSystemError, as_vector, least_squares_solve

__all__ = ["IjeConfig", "IjeResult", "ije_refine"]


@dataclass
class IjeConfig:
    max_iters: int = 14
    rel_residual_tol: float = 1e-6
    grid_update_mode: str = "real_part"
    ctls: CtlsSettings = field(default_factory=CtlsSettings)

    def __post_init__(self):
        if self.grid_update_mode != "real_part":
            raise ValueError("only the real_part grid update is supported")
        if self.max_iters < 0 or not self.rel_residual_tol >= 0:
            raise ValueError("max_iters must be >= 0 and rel_residual_tol >= 0")


@dataclass
class IjeResult:
    """Refined grid/coefficients and the loop history.

    residual_norm_trace[0] is the norm before any refinement; one entry is
    appended per accepted loop, so its length is loops_run + 1 and it never
    exceeds max_iters + 1. flag is None on clean termination, or one of
    "residual_increase_rollback" / "rank_deficient_refit".
    """

    grid: np.ndarray
    x: np.ndarray
    residual: np.ndarray
    residual_norm_trace: list[float]
    loops_run: int
    grid_trace: list[np.ndarray]
    flag: str | None = None


def ije_refine(y, dictionary: ParametricDictionary, grid0, config: IjeConfig | None = None) -> IjeResult:
    """Refine the grid points in grid0 against y. See the module docstring.

    Raises SingularSystemError if the atoms at grid0 are already rank
    deficient (there is no valid state to return); mid-loop rank deficiency
    is caught and reported through the flag instead.
    """
    config = config or IjeConfig()
    y = as_vector(y, "y")
    grid = as_grid(grid0, dictionary.arity).copy()
    n = grid.shape[0]

    atoms = dictionary.atoms(grid)
    x = least_squares_solve(atoms, y)
    residual = y - atoms @ x
    trace = [float(np.linalg.norm(residual))]
    grid_trace = [grid.copy()]
    loops_run = 0
    flag = None

    for _ in range(config.max_iters):
        bundle = dictionary.bundle(grid)
        problem = make_problem(y, bundle, config.ctls)
        sol = ctls_newton(
            problem,
            max_iters=config.ctls.newton_max_iters,
            tol=config.ctls.newton_tol,
        )
        # delta_g is coordinate-major: all axis-0 moves, then all axis-1 moves
        grid_next = grid + sol.delta_g.reshape(dictionary.arity, n).T
        try:
            atoms_next = dictionary.atoms(grid_next)
            x_next = least_squares_solve(atoms_next, y)
        except SingularSystemError:
            flag = "rank_deficient_refit"
            break
        residual_next = y - atoms_next @ x_next
        norm_next = float(np.linalg.norm(residual_next))
        prev = trace[-1]
        if norm_next > prev:
            flag = "residual_increase_rollback"
            break
        grid, x, residual = grid_next, x_next, residual_next
        loops_run += 1
        trace.append(norm_next)
        grid_trace.append(grid.copy())
        if prev <= 0.0 or (prev - norm_next) / prev < config.rel_residual_tol:
            break

    return IjeResult(
        grid=grid,
        x=x,
        residual=residual,
        residual_norm_trace=trace,
        loops_run=loops_run,
        grid_trace=grid_trace,
        flag=flag,
    )
