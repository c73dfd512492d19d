"""Inner ADMM for the generalized least-squares step.

Solves ``min_u B(|Au|^2, f) + I_K(u) + r/2 |u - g|^2`` by splitting
``z = Au`` with penalty ``eta`` and multiplier ``lam``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .noise import PhaselessData
from .prox import magnitude_prox

COMPLEX_PLANE = "complex"
REAL_PLANE = "real"


@dataclass
class GlsState:
    u: np.ndarray
    z: np.ndarray
    lam: np.ndarray
    iteration: int = 0

    def copy(self) -> "GlsState":
        return GlsState(self.u.copy(), self.z.copy(), self.lam.copy(), self.iteration)


def project(u: np.ndarray, constraint: str) -> np.ndarray:
    if constraint == REAL_PLANE:
        return u.real.astype(np.complex128)
    if constraint == COMPLEX_PLANE:
        return u
    raise ValueError(f"unknown constraint set {constraint!r}")


def u_update(op, z, lam, g, r: float, eta: float, constraint: str = COMPLEX_PLANE,
             diag: np.ndarray | None = None) -> np.ndarray:
    """Pointwise solve of ``(eta A*A + r I) u = eta A*(z + lam/eta) + r g``."""
    diag = op.ata_diagonal() if diag is None else diag
    denom = eta * diag + r
    if np.any(denom == 0):
        raise ZeroDivisionError("eta*A*A + r*I is singular (r must be positive)")
    if eta == 0:
        rhs = r * g
    else:
        rhs = op.adjoint(eta * z + lam) + r * g
    return project(rhs / denom, constraint)


def init_state(op, g: np.ndarray) -> GlsState:
    g = np.asarray(g, dtype=np.complex128)
    z = op.forward(g)
    return GlsState(g.copy(), z, np.zeros_like(z))


def gls_sweep(state: GlsState, op, data: PhaselessData, g, r: float, eta: float,
              constraint: str = COMPLEX_PLANE, diag=None) -> GlsState:
    """One u / z / multiplier pass, updating ``state`` in place."""
    u = u_update(op, state.z, state.lam, g, r, eta, constraint, diag)
    au = op.forward(u)
    z0 = au - state.lam / eta
    z = magnitude_prox(data.kind, z0, data.f.reshape(z0.shape), eta)
    state.lam = state.lam + eta * (z - au)
    state.u, state.z = u, z
    state.iteration += 1
    return state


def gls_solve(op, data: PhaselessData, g, r: float, eta: float,
              constraint: str = COMPLEX_PLANE, inner_iters: int = 5,
              warm: GlsState | None = None) -> GlsState:
    """Run ``inner_iters`` sweeps from ``warm`` (or ``z = Ag``, zero multiplier)."""
    if not (r > 0 and eta > 0):
        raise ValueError("r and eta must be positive")
    g = np.asarray(g, dtype=np.complex128)
    state = init_state(op, g) if warm is None else warm
    diag = op.ata_diagonal()
    for _ in range(inner_iters):
        gls_sweep(state, op, data, g, r, eta, constraint, diag)
    return state
