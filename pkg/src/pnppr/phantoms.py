"""Deterministic test images standing in for natural photographs."""

from __future__ import annotations

import numpy as np

NAMES = ("shapes", "ramps", "texture", "complex", "two-level")


def shapes(n: int) -> np.ndarray:
    """Piecewise-constant disks and rectangles on a dark background, in [0, 1]."""
    yy, xx = np.mgrid[:n, :n] / n
    img = np.full((n, n), 0.1)
    img[(yy - 0.35) ** 2 + (xx - 0.3) ** 2 < 0.2 ** 2] = 0.8
    img[(yy > 0.55) & (yy < 0.85) & (xx > 0.5) & (xx < 0.9)] = 0.5
    img[(yy - 0.7) ** 2 + (xx - 0.25) ** 2 < 0.1 ** 2] = 1.0
    img[(yy > 0.15) & (yy < 0.3) & (xx > 0.6) & (xx < 0.85)] = 0.3
    return img


def ramps(n: int) -> np.ndarray:
    """Piecewise-affine: four quadrants with different slopes and offsets."""
    yy, xx = np.mgrid[:n, :n] / n
    img = np.empty((n, n))
    top, left = yy < 0.5, xx < 0.5
    img[top & left] = 0.2 + 0.6 * xx[top & left]
    img[top & ~left] = 0.9 - 0.8 * yy[top & ~left]
    img[~top & left] = 0.3 + 0.5 * (xx + yy)[~top & left] - 0.25
    img[~top & ~left] = 0.6
    return img


def texture(n: int, tile: int = 8) -> np.ndarray:
    """Repeated ``tile x tile`` motif with a few larger-scale bands."""
    t = np.arange(tile)
    motif = 0.25 + 0.5 * ((t[:, None] < tile // 2) ^ (t[None, :] < tile // 2))
    motif = motif + 0.2 * (t[:, None] == t[None, :])
    reps = -(-n // tile)
    img = np.tile(motif, (reps, reps))[:n, :n]
    yy = np.arange(n)[:, None] / n
    return img * (0.7 + 0.3 * (yy < 0.5))


def complex_composite(n: int) -> np.ndarray:
    """Magnitude from ``shapes`` with a smooth phase plus a textured phase patch."""
    mag = shapes(n)
    yy, xx = np.mgrid[:n, :n] / n
    phase = 0.8 * np.sin(2 * np.pi * xx) * np.cos(np.pi * yy)
    patch = (yy > 0.55) & (xx > 0.5)
    phase = phase + 0.6 * patch * texture(n)
    return mag * np.exp(1j * phase)


def two_level(n: int, width: int | None = None) -> np.ndarray:
    """Zero background with a vertical strip of ones (``width`` columns)."""
    width = n // 4 if width is None else width
    img = np.zeros((n, n))
    s = (n - width) // 2
    img[:, s:s + width] = 1.0
    return img


def make_phantom(name: str, n: int) -> np.ndarray:
    builders = {
        "shapes": shapes, "ramps": ramps, "texture": texture,
        "complex": complex_composite, "two-level": two_level,
    }
    if name not in builders:
        raise ValueError(f"unknown phantom {name!r}; choose from {', '.join(NAMES)}")
    return np.asarray(builders[name](int(n)), dtype=np.complex128)
