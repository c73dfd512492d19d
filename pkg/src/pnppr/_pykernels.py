"""NumPy implementations of the patch kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used
when the extension is unavailable or ``PNPPR_PURE_PYTHON`` is set.
"""

import numpy as np


def _box_sum(a: np.ndarray, k: int) -> np.ndarray:
    """Sums over all ``k x k`` windows (valid mode)."""
    c = np.zeros((a.shape[0] + 1, a.shape[1] + 1))
    c[1:, 1:] = np.cumsum(np.cumsum(a, axis=0), axis=1)
    return c[k:, k:] - c[:-k, k:] - c[k:, :-k] + c[:-k, :-k]


def nlm(pre, pim, n1, n2, pr, sr, h):
    """Nonlocal means on a reflect-padded image (pad width ``pr``).

    Returns the filtered real and imaginary parts, each ``(n1, n2)``.
    """
    pre = np.asarray(pre, dtype=np.float64)
    pim = np.asarray(pim, dtype=np.float64)
    k = 2 * pr + 1
    npatch = float(k * k)
    wsum = np.zeros((n1, n2))
    acc_re = np.zeros((n1, n2))
    acc_im = np.zeros((n1, n2))
    vre = pre[pr:pr + n1, pr:pr + n2]
    vim = pim[pr:pr + n1, pr:pr + n2]
    inv_h2 = 1.0 / (h * h)
    for dy in range(-sr, sr + 1):
        i0, i1 = max(0, -dy), min(n1, n1 - dy)
        if i0 >= i1:
            continue
        for dx in range(-sr, sr + 1):
            j0, j1 = max(0, -dx), min(n2, n2 - dx)
            if j0 >= j1:
                continue
            a_re = pre[i0:i1 + 2 * pr, j0:j1 + 2 * pr]
            b_re = pre[i0 + dy:i1 + dy + 2 * pr, j0 + dx:j1 + dx + 2 * pr]
            a_im = pim[i0:i1 + 2 * pr, j0:j1 + 2 * pr]
            b_im = pim[i0 + dy:i1 + dy + 2 * pr, j0 + dx:j1 + dx + 2 * pr]
            diff2 = (a_re - b_re) ** 2 + (a_im - b_im) ** 2
            d2 = _box_sum(diff2, k) / npatch
            w = np.exp(-d2 * inv_h2)
            wsum[i0:i1, j0:j1] += w
            acc_re[i0:i1, j0:j1] += w * vre[i0 + dy:i1 + dy, j0 + dx:j1 + dx]
            acc_im[i0:i1, j0:j1] += w * vim[i0 + dy:i1 + dy, j0 + dx:j1 + dx]
    return acc_re / wsum, acc_im / wsum


def block_match(re, im, bs, sr, ref_rows, ref_cols, group):
    """Select up to ``group`` most similar blocks for each reference block.

    Candidates lie within ``sr`` pixels of the reference; the reference
    itself always comes first, the rest are ordered by mean squared
    distance with ties broken by raster index. Returns ``(rows, cols,
    counts)`` where ``rows``/``cols`` are ``(nref, group)`` arrays padded
    with -1 past ``counts``.
    """
    re = np.asarray(re, dtype=np.float64)
    im = np.asarray(im, dtype=np.float64)
    n1, n2 = re.shape
    ref_rows = np.asarray(ref_rows, dtype=np.int64)
    ref_cols = np.asarray(ref_cols, dtype=np.int64)
    nref = ref_rows.size
    ar = np.arange(bs)
    rr = ref_rows[:, None, None] + ar[None, :, None]
    cc = ref_cols[:, None, None] + ar[None, None, :]
    ref_re, ref_im = re[rr, cc], im[rr, cc]

    offsets = [(dy, dx) for dy in range(-sr, sr + 1) for dx in range(-sr, sr + 1)]
    dist = np.full((len(offsets), nref), np.inf)
    for o, (dy, dx) in enumerate(offsets):
        kr, kc = ref_rows + dy, ref_cols + dx
        ok = (kr >= 0) & (kr <= n1 - bs) & (kc >= 0) & (kc <= n2 - bs)
        if not ok.any():
            continue
        r2 = rr[ok] + dy
        c2 = cc[ok] + dx
        d = ((ref_re[ok] - re[r2, c2]) ** 2 + (ref_im[ok] - im[r2, c2]) ** 2)
        dist[o, ok] = d.reshape(d.shape[0], -1).sum(axis=1) / (bs * bs)
    center = offsets.index((0, 0))
    dist[center] = -1.0

    order = np.argsort(dist, axis=0, kind="stable")[:group]
    valid = np.isfinite(np.take_along_axis(dist, order, axis=0))
    counts = valid.sum(axis=0)
    off = np.asarray(offsets)
    rows = np.where(valid, ref_rows[None] + off[order, 0], -1).T
    cols = np.where(valid, ref_cols[None] + off[order, 1], -1).T
    return (np.ascontiguousarray(rows, dtype=np.int64),
            np.ascontiguousarray(cols, dtype=np.int64),
            counts.astype(np.int64))
