"""Scene descriptions and measurement synthesis.

A scene is a list of complex-amplitude components at continuous parameter
values, a model tag, and a noise level. Noise is circular complex Gaussian
with E|w_m|^2 = sigma^2 (variance sigma^2/2 per real/imag part), so
snr_db for a component of amplitude a is 10 log10(|a|^2 / sigma^2).

For the permuted-carrier radar model the per-realization carrier permutation
is drawn from the seed (code first, then noise, so the two streams stay
aligned for a given seed) unless the scene pins one via code_seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dictionary import HarmonicDictionary, ParametricDictionary, RsfDictionary

__all__ = ["Component", "SceneSpec", "sigma_for_snr", "realize", "synthesize"]

MODELS = ("harmonic", "rsf")


@dataclass(frozen=True)
class Component:
    amp: complex
    params: tuple[float, ...]


@dataclass
class SceneSpec:
    model: str
    m_samples: int
    components: list[Component]
    sigma: float
    rsf_ratio: float = 1e-3
    rsf_code_seed: int | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.m_samples < 1:
            raise ValueError("m_samples must be >= 1")
        if not self.components:
            raise ValueError("scene needs at least one component")
        arity = self.arity
        for c in self.components:
            if len(c.params) != arity:
                raise ValueError(f"{self.model} components need {arity} parameter(s)")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")

    @property
    def arity(self) -> int:
        return 1 if self.model == "harmonic" else 2

    @property
    def param_names(self) -> tuple[str, ...]:
        return ("f",) if self.model == "harmonic" else ("p", "q")

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([c.amp for c in self.components], dtype=complex)

    @property
    def params(self) -> np.ndarray:
        return np.array([c.params for c in self.components], dtype=float)


def sigma_for_snr(components, snr_db: float) -> float:
    """Noise std giving the requested SNR for the weakest component."""
    amin = min(abs(complex(c.amp)) for c in components)
    if amin == 0:
        raise ValueError("zero-amplitude component cannot set the SNR")
    return amin * 10.0 ** (-snr_db / 20.0)


def realize(scene: SceneSpec, seed) -> tuple[ParametricDictionary, np.ndarray, np.ndarray]:
    """Instantiate one measurement: (dictionary, y, clean).

    Deterministic in (scene, seed). For the rsf model the carrier code is
    drawn before the noise; a pinned code_seed moves the code draw to its
    own stream without disturbing the noise draw.
    """
    rng = np.random.default_rng(seed)
    if scene.model == "harmonic":
        dictionary: ParametricDictionary = HarmonicDictionary(scene.m_samples)
    else:
        if scene.rsf_code_seed is not None:
            code = np.random.default_rng(scene.rsf_code_seed).permutation(scene.m_samples)
        else:
            code = rng.permutation(scene.m_samples)
        dictionary = RsfDictionary(scene.m_samples, code, scene.rsf_ratio)
    clean = dictionary.atoms(scene.params) @ scene.amplitudes
    m = scene.m_samples
    noise = (scene.sigma / np.sqrt(2.0)) * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    return dictionary, clean + noise, clean


def synthesize(scene: SceneSpec, seed) -> np.ndarray:
    """Measurement vector y for the scene under the given seed."""
    return realize(scene, seed)[1]
