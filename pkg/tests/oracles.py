"""Independent brute-force references used by several test modules."""

import numpy as np

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_min(fun, lo, hi, iters=200):
    """Vectorised golden-section search for unimodal ``fun`` on ``[lo, hi]``."""
    a = np.asarray(lo, dtype=float).copy()
    b = np.asarray(hi, dtype=float).copy()
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = b - INV_PHI * (b - a)
        d_new = a + INV_PHI * (b - a)
        c, d = c_new, d_new
        fc, fd = fun(c), fun(d)
    return 0.5 * (a + b)


def poisson_objective(x, a, f, eta):
    with np.errstate(divide="ignore"):
        logx = np.where(f > 0, np.log(np.maximum(x, 1e-300)), 0.0)
    return 0.5 * (x * x - 2.0 * f * logx) + 0.5 * eta * (x - a) ** 2


def gaussian_objective(x, a, f, eta):
    return 0.5 * (x * x - f) ** 2 + 0.5 * eta * (x - a) ** 2


def brute_poisson_modulus(a, f, eta):
    hi = 2.0 * np.maximum(a, np.sqrt(f)) + 1.0
    return golden_min(lambda x: poisson_objective(x, a, f, eta), np.zeros_like(a), hi)


def brute_gaussian_modulus(a, f, eta):
    # one positive stationary point for a >= 0, so the objective is unimodal on x >= 0
    hi = 2.0 * np.maximum(a, np.sqrt(f)) + 1.0
    return golden_min(lambda x: gaussian_objective(x, a, f, eta), np.zeros_like(a), hi)


def prox_triples(rng, n):
    """Random ``(a, f, eta)`` covering both cubic branches and f vs eta/2 regimes."""
    q = n // 5
    eta = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), n))
    a = rng.uniform(0, 5, n)
    f = rng.uniform(0, 25, n)
    f[:q] = a[:q] ** 2  # data consistent with z0
    f[q:2 * q] = rng.uniform(0, 1, q) * eta[q:2 * q] / 2  # f < eta/2
    # f > eta/2 with a small modulus lands on the trigonometric branch
    f[2 * q:3 * q] = eta[2 * q:3 * q] / 2 + rng.uniform(0.5, 20, q)
    a[2 * q:3 * q] = rng.uniform(0, 0.2, q)
    f[3 * q:3 * q + 50] = 0.0
    a[3 * q + 50:3 * q + 100] = 0.0
    return a, f, eta


def nlm_brute(v, pr, sr, h):
    """Direct quadruple loop over pixels and search offsets."""
    v = np.asarray(v, dtype=complex)
    n1, n2 = v.shape
    pad = np.pad(v, pr, mode="reflect")
    out = np.zeros_like(v)
    k = 2 * pr + 1
    for i in range(n1):
        for j in range(n2):
            p = pad[i:i + k, j:j + k]
            num, den = 0.0, 0.0
            for di in range(-sr, sr + 1):
                for dj in range(-sr, sr + 1):
                    ii, jj = i + di, j + dj
                    if not (0 <= ii < n1 and 0 <= jj < n2):
                        continue
                    q = pad[ii:ii + k, jj:jj + k]
                    d2 = np.mean(np.abs(p - q) ** 2)
                    w = np.exp(-d2 / h ** 2)
                    num = num + w * v[ii, jj]
                    den += w
            out[i, j] = num / den
    return out


def tv_dual_reference(v0, sigma, iters=20000):
    """ROF by projected gradient on the dual (periodic differences)."""
    from pnppr.denoisers.tv import div, grad
    v0 = np.asarray(v0, dtype=float)
    p = np.zeros((2, *v0.shape))
    tau = 1.0 / (8.0 * sigma)
    for _ in range(iters):
        v = v0 + sigma * div(p)
        p = p + tau * grad(v)
        mag = np.maximum(1.0, np.sqrt(p[0] ** 2 + p[1] ** 2))
        p = p / mag
    return v0 + sigma * div(p)
