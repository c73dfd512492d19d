"""Single-stage block-matching 3-D filter with hard thresholding.

Similar blocks are stacked, transformed with an orthonormal 2-D DCT per
block and an orthonormal Haar transform across the stack, hard
thresholded, inverted, and aggregated back with weights
``1/(1 + retained coefficients)``. The DC coefficient of each stack is
never thresholded.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dctn, idctn

from .. import kernels


def haar_matrix(n: int) -> np.ndarray:
    """Orthonormal Haar matrix for ``n`` a power of two (rows are basis vectors)."""
    if n & (n - 1):
        raise ValueError("Haar length must be a power of two")
    h = np.ones((1, 1))
    while h.shape[0] < n:
        k = h.shape[0]
        top = np.kron(h, [1.0, 1.0])
        bot = np.kron(np.eye(k), [1.0, -1.0])
        h = np.vstack([top, bot]) / np.sqrt(2.0)
    return h


def _grid(n: int, bs: int, step: int) -> np.ndarray:
    g = list(range(0, n - bs + 1, step))
    if g[-1] != n - bs:
        g.append(n - bs)
    return np.asarray(g, dtype=np.int64)


def _floor_pow2(n: np.ndarray) -> np.ndarray:
    return 2 ** np.floor(np.log2(np.maximum(n, 1))).astype(np.int64)


def bm3d_lite_denoise(v0, sigma: float, block: int = 8, group: int = 16,
                      search: int = 8, threshold_mult: float = 2.7, step: int = 3,
                      backend=None) -> np.ndarray:
    v0 = np.asarray(v0)
    cplx = np.iscomplexobj(v0)
    n1, n2 = v0.shape
    if block > min(n1, n2):
        raise ValueError(f"block size {block} exceeds image {v0.shape}")
    if group < 1 or group & (group - 1):
        raise ValueError("group size must be a power of two")
    if sigma == 0:
        return v0.copy()
    img = v0.astype(np.complex128)
    re = np.ascontiguousarray(img.real)
    im = np.ascontiguousarray(img.imag)

    gr, gc = np.meshgrid(_grid(n1, block, step), _grid(n2, block, step), indexing="ij")
    ref_rows, ref_cols = gr.ravel(), gc.ravel()
    k = kernels if backend is None else backend
    rows, cols, counts = k.block_match(re, im, block, search, ref_rows, ref_cols, group)
    sizes = _floor_pow2(counts)
    thr = threshold_mult * sigma
    ar = np.arange(block)

    num = np.zeros(n1 * n2, dtype=np.complex128)
    den = np.zeros(n1 * n2)
    for g in np.unique(sizes):
        sel = np.nonzero(sizes == g)[0]
        r = rows[sel, :g]
        c = cols[sel, :g]
        pr = r[:, :, None, None] + ar[None, None, :, None]
        pc = c[:, :, None, None] + ar[None, None, None, :]
        stacks = img[pr, pc]  # (nsel, g, B, B)
        hm = haar_matrix(g)
        coef = dctn(stacks, axes=(2, 3), norm="ortho")
        coef = np.einsum("ij,njab->niab", hm, coef)
        keep = np.abs(coef) >= thr
        keep[:, 0, 0, 0] = True
        coef = np.where(keep, coef, 0)
        nkeep = keep.reshape(len(sel), -1).sum(axis=1)
        est = np.einsum("ji,njab->niab", hm, coef)
        est = idctn(est, axes=(2, 3), norm="ortho")
        wgt = 1.0 / (1.0 + nkeep)
        flat = (pr * n2 + pc).ravel()
        wfull = np.broadcast_to(wgt[:, None, None, None], est.shape).ravel()
        num += np.bincount(flat, weights=(wfull * est.real.ravel()), minlength=n1 * n2)
        num += 1j * np.bincount(flat, weights=(wfull * est.imag.ravel()), minlength=n1 * n2)
        den += np.bincount(flat, weights=wfull, minlength=n1 * n2)
    out = (num / den).reshape(n1, n2)
    return out if cplx else out.real
