"""Dictionary models: atoms, analytic derivatives, grids.

Covers
  - uniform grids: 1-D spacing, 2-D enumeration order (first axis fastest)
  - harmonic atoms: all-ones at f=0, Nyquist alternation at f=0.5, norm = sqrt(M)
  - RSF atoms: all-ones at p=q=0, plain-sinusoid reduction at ratio=0/p=0,
    permutation validation
  - analytic derivatives vs central finite differences for both models
  - derivative block structure (single owned nonzero column)
  - LinearDictionary is exactly affine with a constant derivative bundle
  - wrap_unit reporting convention
"""

import numpy as np
import numpy.testing as npt
import pytest

from ampctls.dictionary import (
    HarmonicDictionary,
    LinearDictionary,
    RsfDictionary,
    harmonic_atoms,
    rsf_atoms,
    uniform_grid,
    wrap_unit,
)


def test_uniform_grid_1d():
    npt.assert_allclose(uniform_grid(1, 4), [0.0, 0.25, 0.5, 0.75])
    with pytest.raises(ValueError):
        uniform_grid(1, 0)


def test_uniform_grid_2d_order():
    g = uniform_grid(2, (2, 3))
    assert g.shape == (6, 2)
    # index c + d*C -> (c/C, d/D): first coordinate cycles fastest
    for d in range(3):
        for c in range(2):
            npt.assert_allclose(g[c + d * 2], [c / 2, d / 3])


def test_harmonic_trivial_atoms():
    b = harmonic_atoms([0.0], 4)
    npt.assert_allclose(b.atoms[:, 0], np.ones(4))
    b = harmonic_atoms([0.5], 2)
    npt.assert_allclose(b.atoms[:, 0], [1.0, -1.0], atol=1e-15)


def test_atom_norms_sqrt_m():
    rng = np.random.default_rng(0)
    hb = harmonic_atoms(rng.uniform(size=5), 32)
    npt.assert_allclose(np.linalg.norm(hb.atoms, axis=0), np.sqrt(32))
    code = rng.permutation(16)
    rb = rsf_atoms(rng.uniform(size=(4, 2)), 16, code)
    npt.assert_allclose(np.linalg.norm(rb.atoms, axis=0), 4.0)


def test_rsf_trivial_atoms():
    code = np.arange(8)[::-1]
    b = rsf_atoms([[0.0, 0.0]], 8, code)
    npt.assert_allclose(b.atoms[:, 0], np.ones(8))
    # ratio = 0, p = 0: reduces to exp(-j 2 pi m q) regardless of the code
    q = 0.3
    b = rsf_atoms([[0.0, q]], 8, code, ratio=0.0)
    npt.assert_allclose(b.atoms[:, 0], np.exp(-2j * np.pi * np.arange(8) * q), atol=1e-14)


def test_rsf_rejects_bad_code():
    with pytest.raises(ValueError):
        RsfDictionary(4, [0, 1, 1, 3])
    with pytest.raises(ValueError):
        RsfDictionary(4, [0, 1, 2])


def _fd_check(dic, grid, h=1e-7):
    """Max relative error of analytic derivative columns vs central differences."""
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    bundle = dic.bundle(grid)
    n = bundle.n_atoms
    worst = 0.0
    for j in range(bundle.deriv_cols.shape[0]):
        c, i = divmod(j, n)
        gp = grid.copy()
        gm = grid.copy()
        gp[i, c] += h
        gm[i, c] -= h
        fd = (dic.atoms(gp)[:, i] - dic.atoms(gm)[:, i]) / (2 * h)
        err = np.linalg.norm(fd - bundle.deriv_cols[j]) / np.linalg.norm(fd)
        worst = max(worst, err)
    return worst


def test_harmonic_derivative_fd():
    rng = np.random.default_rng(42)
    dic = HarmonicDictionary(32)
    worst = max(_fd_check(dic, rng.uniform(size=(3, 1))) for _ in range(10))
    assert worst <= 1e-5


def test_rsf_derivative_fd_scene_point():
    code = np.random.default_rng(1).permutation(32)
    dic = RsfDictionary(32, code)
    assert _fd_check(dic, [[10.1 / 32, 19.4 / 32]]) <= 1e-5


def test_rsf_derivative_fd_random_points():
    rng = np.random.default_rng(9)
    dic = RsfDictionary(16, rng.permutation(16), ratio=1e-3)
    worst = max(_fd_check(dic, rng.uniform(size=(2, 2))) for _ in range(10))
    assert worst <= 1e-5


def test_derivative_blocks_structure():
    rng = np.random.default_rng(2)
    dic = RsfDictionary(8, rng.permutation(8))
    bundle = dic.bundle(rng.uniform(size=(3, 2)))
    blocks = bundle.deriv_blocks()
    assert blocks.shape == (6, 8, 3)
    for j in range(6):
        owner = j % 3
        npt.assert_allclose(blocks[j, :, owner], bundle.deriv_cols[j])
        others = np.delete(blocks[j], owner, axis=1)
        assert np.all(others == 0)


def test_linear_dictionary_exactly_affine():
    rng = np.random.default_rng(3)
    m, n, arity = 10, 3, 2
    atoms0 = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    cols = rng.standard_normal((arity * n, m)) + 1j * rng.standard_normal((arity * n, m))
    g0 = rng.uniform(size=(n, arity))
    dic = LinearDictionary(atoms0, cols, g0)
    g = g0 + rng.uniform(-0.1, 0.1, size=(n, arity))
    a = dic.atoms(g)
    expect = atoms0.copy()
    delta = (g - g0).T.ravel()
    for j in range(arity * n):
        expect[:, j % n] += cols[j] * delta[j]
    npt.assert_allclose(a, expect, rtol=0, atol=1e-14)
    # derivative bundle does not depend on the evaluation point
    npt.assert_allclose(dic.bundle(g).deriv_cols, cols)
    with pytest.raises(ValueError):
        dic.atoms(rng.uniform(size=(n + 1, arity)))


def test_wrap_unit():
    npt.assert_allclose(wrap_unit([-0.25, 0.25, 1.25]), [0.75, 0.25, 0.25])
