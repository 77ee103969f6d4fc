"""Parametric dictionaries: atoms plus their derivatives in the grid parameters.

A dictionary maps grid points (one coordinate vector per atom, ``arity``
coordinates each) to an ``(M, n)`` atom matrix, and can additionally supply
the derivative of each atom with respect to each of its own coordinates.
Derivatives come back as an ``AtomBundle`` holding one derivative column per
(coordinate, grid point) pair; the derivative of atom i with respect to a
coordinate of grid point k is zero for i != k, so only the owned column is
stored and the block structure is materialized on demand.

Models:

``HarmonicDictionary``
    atoms[m, i] = exp(+j 2 pi g_i m), m = 0..M-1 (complex sinusoids,
    frequency in cycles per sample).

``RsfDictionary``
    stepped-frequency radar atoms over normalized delay p and Doppler q with
    a per-burst frequency permutation ``code``:
    atoms[m, i] = exp(-j 2 pi (code[m] p_i + m (1 + code[m] ratio) q_i)).

``LinearDictionary``
    synthetic model that is exactly affine in the grid coordinates; the
    refinement loop's descent guarantee is exact on it, which makes it the
    reference model for monotonicity tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AtomBundle",
    "ParametricDictionary",
    "HarmonicDictionary",
    "RsfDictionary",
    "LinearDictionary",
    "uniform_grid",
    "harmonic_atoms",
    "rsf_atoms",
    "wrap_unit",
]


def wrap_unit(g):
    """Wrap coordinates to [0, 1). Refinement itself runs unbounded; wrapping
    is applied when coordinates are reported or compared."""
    return np.mod(np.asarray(g, dtype=float), 1.0)


def as_grid(grid, arity: int) -> np.ndarray:
    """Normalize a grid argument to shape (n, arity) float."""
    g = np.asarray(grid, dtype=float)
    if arity == 1 and g.ndim == 1:
        g = g[:, None]
    if g.ndim == 1 and arity > 1:
        g = g[None, :]
    if g.ndim != 2 or g.shape[1] != arity:
        raise ValueError(f"grid must have shape (n, {arity}), got {np.shape(grid)}")
    if not np.all(np.isfinite(g)):
        raise ValueError("grid contains non-finite coordinates")
    return g


def uniform_grid(arity: int, counts):
    """Uniform unit-cell grid.

    arity 1: ``uniform_grid(1, 8)`` -> array([0, 1/8, ..., 7/8]).
    arity 2: counts (C, Dq); point index c + d*C maps to (c/C, d/Dq), first
    axis fastest. Counts must be positive.
    """
    if arity == 1:
        n = int(counts if np.isscalar(counts) else counts[0])
        if n <= 0:
            raise ValueError("count must be positive")
        return np.arange(n, dtype=float) / n
    if arity == 2:
        c, d = (int(counts), int(counts)) if np.isscalar(counts) else map(int, counts)
        if c <= 0 or d <= 0:
            raise ValueError("counts must be positive")
        p = np.tile(np.arange(c, dtype=float) / c, d)
        q = np.repeat(np.arange(d, dtype=float) / d, c)
        return np.column_stack([p, q])
    raise ValueError(f"unsupported arity {arity}")


@dataclass
class AtomBundle:
    """Atoms and per-coordinate derivative columns at a set of grid points.

    Attributes
    ----------
    grid : (n, arity) ndarray
    atoms : (M, n) ndarray, complex
    deriv_cols : (arity*n, M) ndarray, complex
        Row c*n + i holds d(atoms[:, i]) / d(coordinate c of point i); the
        full derivative block for that pair is zero outside column i.
    """

    grid: np.ndarray
    atoms: np.ndarray
    deriv_cols: np.ndarray

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[1]

    @property
    def arity(self) -> int:
        return self.grid.shape[1]

    def owner(self, j: int) -> int:
        # grid point owning mismatch coordinate j (layout is coordinate-major)
        return j % self.n_atoms

    def deriv_blocks(self) -> np.ndarray:
        """Dense (arity*n, M, n) derivative blocks. Quadratic in n; meant for
        support-sized bundles and tests, not full candidate grids."""
        p, m = self.deriv_cols.shape
        n = self.n_atoms
        blocks = np.zeros((p, m, n), dtype=complex)
        for j in range(p):
            blocks[j, :, j % n] = self.deriv_cols[j]
        return blocks

    def stacked_derivs(self) -> np.ndarray:
        """Horizontal stack [R_1 ... R_P] of shape (M, P*n)."""
        blocks = self.deriv_blocks()
        return np.concatenate(list(blocks), axis=1)


class ParametricDictionary:
    """Base interface: sample count M, coordinate arity, atom synthesis."""

    M: int
    arity: int
    param_names: tuple[str, ...]

    def atoms(self, grid) -> np.ndarray:
        raise NotImplementedError

    def bundle(self, grid) -> AtomBundle:
        raise NotImplementedError


class HarmonicDictionary(ParametricDictionary):
    """Complex sinusoid atoms exp(j 2 pi g m) on sample index m = 0..M-1."""

    arity = 1
    param_names = ("f",)

    def __init__(self, m_samples: int):
        if m_samples < 1:
            raise ValueError("M must be >= 1")
        self.M = int(m_samples)
        self._m = np.arange(self.M)

    def atoms(self, grid) -> np.ndarray:
        g = as_grid(grid, 1)[:, 0]
        return np.exp(2j * np.pi * np.outer(self._m, g))

    def bundle(self, grid) -> AtomBundle:
        g = as_grid(grid, 1)
        a = self.atoms(g)
        cols = (a * (2j * np.pi * self._m)[:, None]).T  # (n, M)
        return AtomBundle(grid=g, atoms=a, deriv_cols=cols)


class RsfDictionary(ParametricDictionary):
    """Stepped-frequency radar atoms with a random carrier permutation.

    Parameters
    ----------
    m_samples : int
        Number of bursts M.
    code : (M,) array_like of int
        Permutation of 0..M-1 assigning a carrier step to each burst.
    ratio : float
        Carrier step over base carrier (delta f / f0). Couples the Doppler
        phase to the carrier hop; small in practice.
    """

    arity = 2
    param_names = ("p", "q")

    def __init__(self, m_samples: int, code, ratio: float = 1e-3):
        self.M = int(m_samples)
        code = np.asarray(code, dtype=int)
        if sorted(code.tolist()) != list(range(self.M)):
            raise ValueError("code must be a permutation of 0..M-1")
        self.code = code
        self.ratio = float(ratio)
        self._m = np.arange(self.M)

    def atoms(self, grid) -> np.ndarray:
        g = as_grid(grid, 2)
        p, q = g[:, 0], g[:, 1]
        phase = np.outer(self.code, p) + np.outer(self._m * (1.0 + self.code * self.ratio), q)
        return np.exp(-2j * np.pi * phase)

    def bundle(self, grid) -> AtomBundle:
        g = as_grid(grid, 2)
        a = self.atoms(g)
        dp = a * (-2j * np.pi * self.code)[:, None]
        dq = a * (-2j * np.pi * self._m * (1.0 + self.code * self.ratio))[:, None]
        return AtomBundle(grid=g, atoms=a, deriv_cols=np.concatenate([dp.T, dq.T]))


class LinearDictionary(ParametricDictionary):
    """Exactly affine synthetic model: atoms(g) = atoms0 + sum_j R_j (g - g0)_j.

    Constructed from fixed derivative columns, so the model's derivative
    bundle is constant and the first-order expansion used by the mismatch
    solver is exact. Only grids with the construction's point count are
    accepted (this model exists to exercise refinement, not selection).
    """

    param_names = ("g",)

    def __init__(self, atoms0, deriv_cols, grid0):
        self._atoms0 = np.asarray(atoms0, dtype=complex)
        self._cols = np.asarray(deriv_cols, dtype=complex)
        m, n = self._atoms0.shape
        p = self._cols.shape[0]
        if self._cols.shape[1] != m or p % n != 0:
            raise ValueError("deriv_cols must be (arity*n, M)")
        self.M = m
        self.arity = p // n
        self._n = n
        self._grid0 = as_grid(grid0, self.arity)
        if self._grid0.shape[0] != n:
            raise ValueError("grid0 point count must match atoms0 columns")

    def atoms(self, grid) -> np.ndarray:
        g = as_grid(grid, self.arity)
        if g.shape[0] != self._n:
            raise ValueError(f"this model is fixed at {self._n} grid points")
        delta = (g - self._grid0).T.ravel()  # coordinate-major, matches deriv layout
        a = self._atoms0.copy()
        for j, d in enumerate(delta):
            a[:, j % self._n] += self._cols[j] * d
        return a

    def bundle(self, grid) -> AtomBundle:
        g = as_grid(grid, self.arity)
        return AtomBundle(grid=g, atoms=self.atoms(g), deriv_cols=self._cols.copy())


def harmonic_atoms(grid, m_samples: int) -> AtomBundle:
    """Atoms and derivatives of the harmonic model at the given frequencies."""
    return HarmonicDictionary(m_samples).bundle(grid)


def rsf_atoms(grid, m_samples: int, code, ratio: float = 1e-3) -> AtomBundle:
    """Atoms and derivatives of the stepped-frequency radar model."""
    return RsfDictionary(m_samples, code, ratio).bundle(grid)
