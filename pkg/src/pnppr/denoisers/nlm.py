"""Nonlocal means for real or complex images."""

from __future__ import annotations

import numpy as np

from .. import kernels

H_FACTOR = 0.55


def bandwidth(sigma: float, patch_radius: int) -> float:
    """Filter bandwidth tied to the denoising strength."""
    return H_FACTOR * sigma * (2 * patch_radius + 1)


def nlm_denoise(v0, sigma: float, patch_radius: int = 2, search_radius: int = 5,
                h: float | None = None, backend=None) -> np.ndarray:
    """Weighted average of the pixels in a search window.

    Weights are ``exp(-d^2/h^2)`` where ``d^2`` is the mean squared
    modulus of the difference between the two ``(2*patch_radius+1)^2``
    patches (reflect padding at the border). Each output pixel is a convex
    combination of input pixels, and the filter acts on complex values
    with real weights.
    """
    v0 = np.asarray(v0)
    h = bandwidth(sigma, patch_radius) if h is None else h
    if h < 1e-12:
        return v0.copy()
    n1, n2 = v0.shape
    if patch_radius < 0 or search_radius < 0:
        raise ValueError("radii must be nonnegative")
    if patch_radius >= min(n1, n2):
        raise ValueError("patch radius does not fit in the image")
    k = kernels if backend is None else backend
    pad = np.pad(v0.astype(np.complex128), patch_radius, mode="reflect")
    out_re, out_im = k.nlm(np.ascontiguousarray(pad.real), np.ascontiguousarray(pad.imag),
                           n1, n2, patch_radius, search_radius, float(h))
    if np.iscomplexobj(v0):
        return out_re + 1j * out_im
    return out_re
