"""Measurement corruption and the MAP fidelity terms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

POISSON = "poisson"
GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class NoiseModel:
    """``level`` is the peak scale for Poisson and the target SNR (dB) for Gaussian."""

    kind: str
    level: float = float("inf")

    def __post_init__(self):
        if self.kind not in (POISSON, GAUSSIAN):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == POISSON and not self.level > 0:
            raise ValueError("Poisson peak level must be positive")
        if self.kind == GAUSSIAN and np.isnan(self.level):
            raise ValueError("Gaussian SNR must not be NaN")


@dataclass
class PhaselessData:
    f: np.ndarray
    model: NoiseModel
    seed: int | None = None

    @property
    def kind(self) -> str:
        return self.model.kind

    @property
    def m(self) -> int:
        return self.f.size


def corrupt_poisson(h, seed: int, level: float = 1.0) -> PhaselessData:
    """Sample ``f ~ Poisson(h)`` entrywise.

    numpy's sampler uses inversion below mean 10 and PTRS rejection above.
    ``level`` only tags the data; peak scaling happens on the image.
    """
    h = np.asarray(h, dtype=np.float64)
    if np.any(h < 0) or not np.all(np.isfinite(h)):
        raise ValueError("Poisson intensities must be finite and nonnegative")
    rng = np.random.default_rng(seed)
    f = rng.poisson(h).astype(np.float64)
    return PhaselessData(f, NoiseModel(POISSON, level), seed)


def corrupt_gaussian(h, target_snr_db: float, seed: int) -> PhaselessData:
    """Add white Gaussian noise rescaled so that ``20 log10(|h|/|e|)`` hits the target."""
    h = np.asarray(h, dtype=np.float64)
    hn = np.linalg.norm(h)
    if hn == 0:
        raise ValueError("cannot set a relative noise level for zero intensities")
    model = NoiseModel(GAUSSIAN, float(target_snr_db))
    if np.isposinf(target_snr_db):
        return PhaselessData(h.copy(), model, seed)
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(h.shape)
    e *= hn * 10.0 ** (-target_snr_db / 20.0) / np.linalg.norm(e)
    return PhaselessData(h + e, model, seed)


def fidelity(h, data: PhaselessData) -> float:
    """MAP data term ``B(h, f)``."""
    h = np.asarray(h, dtype=np.float64).ravel()
    f = np.asarray(data.f, dtype=np.float64).ravel()
    if h.shape != f.shape:
        raise ValueError(f"h has {h.size} entries, f has {f.size}")
    if data.kind == GAUSSIAN:
        return 0.5 * float(np.sum((h - f) ** 2))
    pos = f > 0
    if np.any(h[pos] <= 0):
        raise ValueError("Poisson fidelity needs h > 0 wherever f > 0")
    flog = np.zeros_like(h)
    flog[pos] = f[pos] * np.log(h[pos])
    return 0.5 * float(np.sum(h - flog))
