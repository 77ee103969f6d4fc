"""Estimation-variance floor for scene parameters, and the angle mapping.

The bound comes from the Fisher information of the deterministic-signal
complex Gaussian model: with noise of per-sample power sigma^2 and noise-free
model s(theta) over the real parameter vector theta (continuous coordinates
of every component plus real and imaginary amplitude parts),

    FIM = (2 / sigma^2) Re(J^H J),   J = d s / d theta,

and the per-parameter bound is the diagonal of FIM^-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dictionary import HarmonicDictionary, RsfDictionary
from ..numerics import SingularSystemError
from .scenes import SceneSpec

__all__ = ["CrbTable", "crb", "single_tone_freq_crb", "doa_map"]


@dataclass
class CrbTable:
    """Variance bounds per component: params[k, c] bounds coordinate c of
    component k; amp_re/amp_im bound the amplitude parts."""

    param_names: tuple[str, ...]
    params: np.ndarray
    amp_re: np.ndarray
    amp_im: np.ndarray


def crb(scene: SceneSpec, code=None) -> CrbTable:
    """Numerical variance bound for every real parameter of the scene.

    For the rsf model the bound depends on the carrier permutation; pass the
    realized code, or pin scene.rsf_code_seed. sigma must be positive.
    """
    if scene.sigma <= 0:
        raise ValueError("CRB needs sigma > 0")
    if scene.model == "harmonic":
        dictionary = HarmonicDictionary(scene.m_samples)
    else:
        if code is None:
            if scene.rsf_code_seed is None:
                raise ValueError("rsf CRB needs an explicit code or scene.rsf_code_seed")
            code = np.random.default_rng(scene.rsf_code_seed).permutation(scene.m_samples)
        dictionary = RsfDictionary(scene.m_samples, code, scene.rsf_ratio)

    bundle = dictionary.bundle(scene.params)
    amps = scene.amplitudes
    k = len(scene.components)
    arity = scene.arity
    cols = []
    for i in range(k):
        for c in range(arity):
            cols.append(amps[i] * bundle.deriv_cols[c * k + i])
        cols.append(bundle.atoms[:, i])
        cols.append(1j * bundle.atoms[:, i])
    jac = np.column_stack(cols)
    fim = (2.0 / scene.sigma ** 2) * np.real(jac.conj().T @ jac)
    try:
        cov = np.linalg.inv(fim)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            "Fisher information is singular (coinciding or degenerate components)"
        ) from exc
    diag = np.diag(cov)
    per = arity + 2
    params = np.empty((k, arity))
    amp_re = np.empty(k)
    amp_im = np.empty(k)
    for i in range(k):
        base = i * per
        params[i] = diag[base:base + arity]
        amp_re[i] = diag[base + arity]
        amp_im[i] = diag[base + arity + 1]
    return CrbTable(param_names=scene.param_names, params=params, amp_re=amp_re, amp_im=amp_im)


def single_tone_freq_crb(m_samples: int, snr_linear: float) -> float:
    """Closed-form frequency-variance bound for one complex sinusoid,
    6 / ((2 pi)^2 SNR M (M^2 - 1)), frequency in cycles per sample."""
    if snr_linear <= 0 or m_samples < 2:
        raise ValueError("need snr > 0 and M >= 2")
    return 6.0 / ((2.0 * np.pi) ** 2 * snr_linear * m_samples * (m_samples ** 2 - 1))


def doa_map(f_hat, d: float = 0.5):
    """Map a wrapped spatial frequency to an arrival angle in degrees.

    f_tilde = f_hat - 0.5 (sign(f_hat - 0.5) + 1) folds [0, 1) onto
    [-0.5, 0.5]; the angle is asin(f_tilde / d) for element spacing d in
    wavelengths. Raises on |f_tilde / d| > 1 (not a visible angle).
    """
    f = np.asarray(f_hat, dtype=float)
    f_tilde = f - 0.5 * (np.sign(f - 0.5) + 1.0)
    ratio = f_tilde / d
    if np.any(np.abs(ratio) > 1.0):
        raise ValueError("frequency outside the visible region for this spacing")
    out = np.degrees(np.arcsin(ratio))
    return float(out) if np.isscalar(f_hat) else out
