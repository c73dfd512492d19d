"""Entrywise proximal maps of the magnitude fidelity.

Both maps keep the phase of ``z0`` and only move the modulus, since the
objectives depend on ``z`` through ``|z|`` and a quadratic anchor.
"""

from __future__ import annotations

import numpy as np


def unit_phase(z0: np.ndarray) -> np.ndarray:
    """``z0/|z0|`` with the convention ``sign(0) = 1``."""
    a = np.abs(z0)
    out = np.ones_like(z0, dtype=np.complex128)
    nz = a > 0
    out[nz] = z0[nz] / a[nz]
    return out


def poisson_modulus(a, f, eta: float) -> np.ndarray:
    """Positive root of ``(1+eta) x^2 - eta a x - f = 0``."""
    a = np.asarray(a, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    return (eta * a + np.sqrt(eta ** 2 * a ** 2 + 4.0 * (1.0 + eta) * f)) / (2.0 * (1.0 + eta))


def prox_poisson(z0, f, eta: float) -> np.ndarray:
    """Minimise ``1/2 (|z|^2 - 2 f log|z|) + eta/2 |z - z0|^2`` entrywise."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    z0 = np.asarray(z0, dtype=np.complex128)
    f = np.asarray(f, dtype=np.float64).reshape(z0.shape)
    if np.any(f < 0):
        raise ValueError("Poisson counts must be nonnegative")
    return poisson_modulus(np.abs(z0), f, eta) * unit_phase(z0)


def _gaussian_phi(x, a, f, eta):
    return 0.5 * (x * x - f) ** 2 + 0.5 * eta * (x - a) ** 2


def gaussian_modulus(a, f, eta: float) -> np.ndarray:
    """Global minimiser over ``x >= 0`` of ``1/2 (x^2-f)^2 + eta/2 (x-a)^2``.

    The stationarity condition is the depressed cubic
    ``x^3 + p x + q = 0`` with ``p = eta/2 - f`` and ``q = -eta a / 2``.
    Cardano's form is used when its discriminant is nonnegative and the
    trigonometric form (largest root) otherwise.
    """
    a = np.asarray(a, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    a, f = np.broadcast_arrays(a, f)
    p = eta / 2.0 - f
    half_q = eta * a / 4.0  # equals -q/2
    disc = p ** 3 / 27.0 + half_q ** 2
    x = np.empty(a.shape, dtype=np.float64)

    card = disc >= 0
    if np.any(card):
        s1 = np.cbrt(half_q[card] + np.sqrt(disc[card]))
        # second cube root from s1 * s2 = -p/3, avoids cancellation
        with np.errstate(divide="ignore", invalid="ignore"):
            s2 = np.where(s1 != 0, -p[card] / (3.0 * s1), 0.0)
        x[card] = s1 + s2

    trig = ~card
    if np.any(trig):
        mp = -p[trig]  # > 0 on this branch
        theta = half_q[trig] / np.sqrt(mp ** 3 / 27.0)
        theta = np.clip(theta, -1.0, 1.0)
        x[trig] = 2.0 * np.sqrt(mp / 3.0) * np.cos(np.arccos(theta) / 3.0)

    x = np.maximum(x, 0.0)
    better_zero = _gaussian_phi(0.0, a, f, eta) < _gaussian_phi(x, a, f, eta)
    return np.where(better_zero, 0.0, x)


def prox_gaussian(z0, f, eta: float) -> np.ndarray:
    """Minimise ``1/2 (|z|^2 - f)^2 + eta/2 |z - z0|^2`` entrywise."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    z0 = np.asarray(z0, dtype=np.complex128)
    f = np.asarray(f, dtype=np.float64).reshape(z0.shape)
    return gaussian_modulus(np.abs(z0), f, eta) * unit_phase(z0)


def magnitude_prox(kind: str, z0, f, eta: float) -> np.ndarray:
    if kind == "poisson":
        return prox_poisson(z0, f, eta)
    if kind == "gaussian":
        return prox_gaussian(z0, f, eta)
    raise ValueError(f"unknown noise kind {kind!r}")
