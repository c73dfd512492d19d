# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled patch kernels; mirrors ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def nlm(const double[:, ::1] pre, const double[:, ::1] pim, Py_ssize_t n1,
        Py_ssize_t n2, Py_ssize_t pr, Py_ssize_t sr, double h):
    # loop over search offsets; patch distances come from an integral image
    cdef Py_ssize_t dy, dx, i0, i1, j0, j1, rows, cols, i, j, k = 2 * pr + 1
    cdef double d, dre, dim, run, w
    cdef double inv = 1.0 / (k * k * h * h)
    cdef double[:, ::1] c = np.zeros((n1 + 2 * pr + 1, n2 + 2 * pr + 1))
    wsum_a = np.zeros((n1, n2))
    acc_re_a = np.zeros((n1, n2))
    acc_im_a = np.zeros((n1, n2))
    cdef double[:, ::1] wsum = wsum_a
    cdef double[:, ::1] are = acc_re_a
    cdef double[:, ::1] aim = acc_im_a
    with nogil:
        for dy in range(-sr, sr + 1):
            i0 = -dy if dy < 0 else 0
            i1 = n1 - dy if dy > 0 else n1
            if i0 >= i1:
                continue
            for dx in range(-sr, sr + 1):
                j0 = -dx if dx < 0 else 0
                j1 = n2 - dx if dx > 0 else n2
                if j0 >= j1:
                    continue
                rows = i1 - i0 + 2 * pr
                cols = j1 - j0 + 2 * pr
                for i in range(rows):
                    run = 0.0
                    for j in range(cols):
                        dre = pre[i0 + i, j0 + j] - pre[i0 + dy + i, j0 + dx + j]
                        dim = pim[i0 + i, j0 + j] - pim[i0 + dy + i, j0 + dx + j]
                        run = run + dre * dre + dim * dim
                        c[i + 1, j + 1] = c[i, j + 1] + run
                for i in range(i1 - i0):
                    for j in range(j1 - j0):
                        d = c[i + k, j + k] - c[i, j + k] - c[i + k, j] + c[i, j]
                        w = exp(-d * inv)
                        wsum[i0 + i, j0 + j] += w
                        are[i0 + i, j0 + j] += w * pre[i0 + i + dy + pr, j0 + j + dx + pr]
                        aim[i0 + i, j0 + j] += w * pim[i0 + i + dy + pr, j0 + j + dx + pr]
        for i in range(n1):
            for j in range(n2):
                are[i, j] = are[i, j] / wsum[i, j]
                aim[i, j] = aim[i, j] / wsum[i, j]
    return acc_re_a, acc_im_a


def block_match(const double[:, ::1] re, const double[:, ::1] im, Py_ssize_t bs,
                Py_ssize_t sr, const cnp.int64_t[::1] ref_rows,
                const cnp.int64_t[::1] ref_cols, Py_ssize_t group):
    cdef Py_ssize_t n1 = re.shape[0], n2 = re.shape[1]
    cdef Py_ssize_t nref = ref_rows.shape[0]
    cdef Py_ssize_t t, i, j, k, l, a, b, c, pos, cnt
    cdef double d, dre, dim, scale = 1.0 / (bs * bs)
    rows_np = np.full((nref, group), -1, dtype=np.int64)
    cols_np = np.full((nref, group), -1, dtype=np.int64)
    counts_np = np.zeros(nref, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] rows = rows_np
    cdef cnp.int64_t[:, ::1] cols = cols_np
    cdef cnp.int64_t[::1] counts = counts_np
    # best-so-far list kept sorted by (distance, raster index)
    best_d_np = np.empty(group, dtype=np.float64)
    cdef double[::1] best_d = best_d_np
    with nogil:
        for t in range(nref):
            i = ref_rows[t]
            j = ref_cols[t]
            rows[t, 0] = i
            cols[t, 0] = j
            best_d[0] = -1.0
            cnt = 1
            for k in range(i - sr, i + sr + 1):
                if k < 0 or k > n1 - bs:
                    continue
                for l in range(j - sr, j + sr + 1):
                    if l < 0 or l > n2 - bs or (k == i and l == j):
                        continue
                    d = 0.0
                    for a in range(bs):
                        for b in range(bs):
                            dre = re[i + a, j + b] - re[k + a, l + b]
                            dim = im[i + a, j + b] - im[k + a, l + b]
                            d = d + dre * dre + dim * dim
                    d = d * scale
                    if cnt == group and d >= best_d[cnt - 1]:
                        continue
                    # candidates arrive in raster order, so equal distances stay behind
                    pos = cnt if cnt < group else group - 1
                    while pos > 0 and best_d[pos - 1] > d:
                        if pos < group:
                            best_d[pos] = best_d[pos - 1]
                            rows[t, pos] = rows[t, pos - 1]
                            cols[t, pos] = cols[t, pos - 1]
                        pos = pos - 1
                    best_d[pos] = d
                    rows[t, pos] = k
                    cols[t, pos] = l
                    if cnt < group:
                        cnt = cnt + 1
            counts[t] = cnt
    return rows_np, cols_np, counts_np
