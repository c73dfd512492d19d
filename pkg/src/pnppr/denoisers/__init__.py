"""Gaussian denoisers behind a common ``denoise(spec, v0)`` entry point."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .bm3d import bm3d_lite_denoise
from .nlm import nlm_denoise
from .tgv import tgv2_denoise
from .tv import tv_denoise

KINDS = ("identity", "tv", "tgv2", "nlm", "bm3dlite")

DEFAULT_PARAMS = {
    "identity": {},
    "tv": {"gamma": None, "iters": 100},
    "tgv2": {"ratio": 2.0, "gamma": 1.0, "iters": 100},
    "nlm": {"patch_radius": 2, "search_radius": 5},
    "bm3dlite": {"block": 8, "group": 16, "search": 8, "threshold_mult": 2.7, "step": 3},
}


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class DenoiserSpec:
    kind: str = "identity"
    sigma: float = 0.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in KINDS:
            raise ConfigurationError(f"unsupported denoiser {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if not self.sigma >= 0:
            raise ConfigurationError("sigma must be nonnegative")
        unknown = set(self.params) - set(DEFAULT_PARAMS[kind])
        if unknown:
            raise ConfigurationError(f"unknown {kind} parameters: {sorted(unknown)}")

    def with_sigma(self, sigma: float) -> "DenoiserSpec":
        return replace(self, sigma=float(sigma))

    def resolved(self) -> dict:
        return {**DEFAULT_PARAMS[self.kind], **self.params}


def tv_gamma(v0: np.ndarray, sigma: float) -> float:
    """Default ADMM penalty: proportional to ``sigma`` over the typical gradient size."""
    gx = np.abs(np.diff(v0, axis=1))
    gy = np.abs(np.diff(v0, axis=0))
    scale = np.sqrt(np.mean(gx ** 2) + np.mean(gy ** 2))
    return sigma / scale if scale > 0 else 1.0


def denoise(spec: DenoiserSpec, v0: np.ndarray) -> np.ndarray:
    v0 = np.asarray(v0)
    if spec.kind == "identity" or spec.sigma == 0:
        return v0.copy()
    p = spec.resolved()
    if spec.kind == "tv":
        gamma = p["gamma"] if p["gamma"] is not None else tv_gamma(v0, spec.sigma)
        return tv_denoise(v0, spec.sigma, gamma=gamma, iters=p["iters"])
    if spec.kind == "tgv2":
        return tgv2_denoise(v0, spec.sigma, **p)
    if spec.kind == "nlm":
        return nlm_denoise(v0, spec.sigma, **p)
    return bm3d_lite_denoise(v0, spec.sigma, **p)


__all__ = [
    "ConfigurationError", "DenoiserSpec", "denoise", "tv_denoise", "tgv2_denoise",
    "nlm_denoise", "bm3d_lite_denoise",
]
