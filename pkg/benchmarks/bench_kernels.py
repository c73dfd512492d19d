"""Time the compiled patch kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--size 64] [--repeat 3]
"""

import argparse
import time

import numpy as np

from pnppr import _pykernels
from pnppr.denoisers.bm3d import bm3d_lite_denoise
from pnppr.denoisers.nlm import nlm_denoise
from pnppr.phantoms import texture

try:
    from pnppr import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=64)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(0)
    n = args.size
    v = texture(n) + 0.1 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    cases = {
        "nlm": lambda b: nlm_denoise(v, 0.1, backend=b),
        "bm3dlite": lambda b: bm3d_lite_denoise(v, 0.1, backend=b),
    }
    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled extension not built; timing the NumPy fallback only")

    print(f"{'kernel':10s} {'backend':8s} {'seconds':>9s} {'speedup':>8s}")
    for name, run in cases.items():
        base = None
        for label, mod in backends:
            t = best_of(lambda: run(mod), args.repeat)
            base = base or t
            print(f"{name:10s} {label:8s} {t:9.4f} {base / t:7.1f}x")


if __name__ == "__main__":
    main()
