"""Second-order TGV denoising by a first-order primal-dual scheme.

Minimises over ``(v, w)``::

    sigma * (|grad v - w|_{2,1} + ratio * |E w|_{2,1}) + 1/2 |v - v0|^2

where ``E`` is the symmetrised gradient. Differences are taken only
between pixels that exist (no wrap, no padding), so every affine image
has zero TGV and is returned unchanged.
"""

from __future__ import annotations

import numpy as np


def _d(a: np.ndarray, axis: int) -> np.ndarray:
    return np.diff(a, axis=axis)


def _dt(q: np.ndarray, axis: int) -> np.ndarray:
    """Adjoint of ``np.diff`` along ``axis``."""
    shape = list(q.shape)
    shape[axis] += 1
    out = np.zeros(shape, dtype=q.dtype)
    lo = [slice(None)] * q.ndim
    hi = [slice(None)] * q.ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    out[tuple(lo)] -= q
    out[tuple(hi)] += q
    return out


def _pointwise_scale(parts, weights, shape, bound):
    """Project a field whose components have ragged shapes onto ``|.| <= bound``.

    Components are aligned at the top-left corner of the full ``shape`` grid.
    """
    mag2 = np.zeros(shape)
    for c, wgt in zip(parts, weights):
        mag2[: c.shape[0], : c.shape[1]] += wgt * np.abs(c) ** 2
    scale = 1.0 / np.maximum(1.0, np.sqrt(mag2) / bound)
    return [c * scale[: c.shape[0], : c.shape[1]] for c in parts]


def sym_grad(wx, wy):
    exx = _d(wx, 1)
    eyy = _d(wy, 0)
    exy = 0.5 * (_d(wx, 0) + _d(wy, 1))
    return exx, eyy, exy


def sym_grad_adjoint(qxx, qyy, qxy):
    # inner product counts the off-diagonal entry twice
    ax = _dt(qxx, 1) + _dt(qxy, 0)
    ay = _dt(qyy, 0) + _dt(qxy, 1)
    return ax, ay


def tgv_value(v, wx, wy, ratio: float) -> float:
    gx, gy = _d(v, 1), _d(v, 0)
    rx, ry = gx - wx, gy - wy
    shape = v.shape
    m1 = np.zeros(shape)
    m1[: rx.shape[0], : rx.shape[1]] += np.abs(rx) ** 2
    m1[: ry.shape[0], : ry.shape[1]] += np.abs(ry) ** 2
    exx, eyy, exy = sym_grad(wx, wy)
    m2 = np.zeros(shape)
    m2[: exx.shape[0], : exx.shape[1]] += np.abs(exx) ** 2
    m2[: eyy.shape[0], : eyy.shape[1]] += np.abs(eyy) ** 2
    m2[: exy.shape[0], : exy.shape[1]] += 2 * np.abs(exy) ** 2
    return float(np.sum(np.sqrt(m1)) + ratio * np.sum(np.sqrt(m2)))


def tgv2_denoise(v0, sigma: float, ratio: float = 2.0, gamma: float = 1.0,
                 iters: int = 100) -> np.ndarray:
    """TGV^2 denoising; ``ratio`` weights the second-order term against the first.

    ``gamma`` sets the primal/dual step balance (``tau = gamma/L``,
    ``s = 1/(gamma L)`` with ``L^2 = 12``).
    """
    v0 = np.asarray(v0)
    if sigma == 0:
        return v0.copy()
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    dtype = np.complex128 if np.iscomplexobj(v0) else np.float64
    v0 = v0.astype(dtype)
    shape = v0.shape
    if min(shape) < 3:
        raise ValueError("TGV needs images of at least 3x3 pixels")
    lip = np.sqrt(12.0)
    tau, s = gamma / lip, 1.0 / (gamma * lip)
    a1, a0 = sigma, sigma * ratio

    v = v0.copy()
    wx, wy = _d(v, 1), _d(v, 0)
    vb, wxb, wyb = v.copy(), wx.copy(), wy.copy()
    px, py = np.zeros_like(wx), np.zeros_like(wy)
    qxx, qyy, qxy = (np.zeros_like(e) for e in sym_grad(wx, wy))

    for _ in range(iters):
        px, py = _pointwise_scale(
            [px + s * (_d(vb, 1) - wxb), py + s * (_d(vb, 0) - wyb)], [1, 1], shape, a1)
        exx, eyy, exy = sym_grad(wxb, wyb)
        qxx, qyy, qxy = _pointwise_scale(
            [qxx + s * exx, qyy + s * eyy, qxy + s * exy], [1, 1, 2], shape, a0)

        v_new = (v - tau * (_dt(px, 1) + _dt(py, 0)) + tau * v0) / (1.0 + tau)
        ex, ey = sym_grad_adjoint(qxx, qyy, qxy)
        wx_new = wx + tau * (px - ex)
        wy_new = wy + tau * (py - ey)

        vb, wxb, wyb = 2 * v_new - v, 2 * wx_new - wx, 2 * wy_new - wy
        v, wx, wy = v_new, wx_new, wy_new
    return v
