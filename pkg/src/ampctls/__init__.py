"""Sparse recovery with adaptive grid refinement for parametric dictionaries.

Greedy pursuit that, after each atom selection, jointly refines the grid
coordinates of the whole support by solving a constrained total
least-squares mismatch problem, then re-fits the coefficients. Includes
harmonic, stepped-frequency radar, and synthetic linear dictionary models,
a plain orthogonal matching pursuit baseline, oracle error bounds, and a
Monte-Carlo benchmark harness with CSV output.
"""

from . import bench
from .ctls import (
    CtlsProblem,
    CtlsSettings,
    CtlsSolution,
    assemble_H,
    assemble_Wx,
    ctls_newton,
    ctls_penalty,
    make_problem,
    real_constrained_u,
    sigma_w_floor,
)
from .dictionary import (
    AtomBundle,
    HarmonicDictionary,
    LinearDictionary,
    ParametricDictionary,
    RsfDictionary,
    harmonic_atoms,
    rsf_atoms,
    uniform_grid,
    wrap_unit,
)
from .ije import IjeConfig, IjeResult, ije_refine
from .numerics import (
    FullRowRankError,
    NotPositiveDefiniteError,
    SingularSystemError,
    kron,
    least_squares_solve,
    right_pseudoinverse_apply,
    whitening_factor,
)
from .solvers import SolverState, StopRule, amp_ctls, correlate, omp

__version__ = "0.1.0"

__all__ = [
    "bench",
    "CtlsProblem",
    "CtlsSettings",
    "CtlsSolution",
    "assemble_H",
    "assemble_Wx",
    "ctls_newton",
    "ctls_penalty",
    "make_problem",
    "real_constrained_u",
    "sigma_w_floor",
    "AtomBundle",
    "HarmonicDictionary",
    "LinearDictionary",
    "ParametricDictionary",
    "RsfDictionary",
    "harmonic_atoms",
    "rsf_atoms",
    "uniform_grid",
    "wrap_unit",
    "IjeConfig",
    "IjeResult",
    "ije_refine",
    "FullRowRankError",
    "NotPositiveDefiniteError",
    "SingularSystemError",
    "kron",
    "least_squares_solve",
    "right_pseudoinverse_apply",
    "whitening_factor",
    "SolverState",
    "StopRule",
    "amp_ctls",
    "correlate",
    "omp",
    "__version__",
]
