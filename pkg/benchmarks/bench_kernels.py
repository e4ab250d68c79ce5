"""Time the compiled kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--number 2000]

Each line reports the best-of-``repeat`` mean time per call for both
backends and the speedup.  End-to-end solver timings are shown for each
backend by running a short conjugate workload in a subprocess with
``HADAMARD_DUALITY_PURE_PYTHON`` set or unset.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from hadamard_duality import _pykernels
from hadamard_duality.manifolds import SPD, Hyperboloid

try:
    from hadamard_duality import _ckernels
except ImportError:
    _ckernels = None

WORKLOAD = """
import time
import numpy as np
from hadamard_duality import (BACKEND, SPD, BundleElement, CotangentVector, Distance,
                              Hyperboloid, Point, SolverConfig, SquaredDistance, conjugate)
cfg = SolverConfig(seed=0)
rng = np.random.default_rng(0)
t0 = time.perf_counter()
for m in (Hyperboloid(2), SPD(2), SPD(3)):
    p = Point(m, m.random_point(rng, None, 1.0))
    for F in (Distance(p), SquaredDistance(p)):
        for _ in range(5):
            X = m.random_tangent(rng, p.coords, 1.5)
            conjugate(F, BundleElement(p, CotangentVector(p, m.flat(p.coords, X), check=False)), cfg)
print(BACKEND, time.perf_counter() - t0)
"""


def cases():
    rng = np.random.default_rng(0)
    h = Hyperboloid(3)
    p, q = h.random_point(rng, None, 2.0), h.random_point(rng, None, 2.0)
    X = h.log(p, q)
    out = [("hyp_dist", (p, q, 1.0)), ("hyp_log", (p, q, 1.0)), ("hyp_exp", (p, X))]
    for n in (2, 3, 5):
        s = SPD(n)
        A, B = s.random_point(rng, None, 1.5), s.random_point(rng, None, 1.5)
        Ah, Aih = _pykernels.spd_sqrt_pair(A, 1e-300)
        Y = _pykernels.spd_log_f(Ah, Aih, B, 1e-300)
        out += [(f"spd_sqrt_pair[n={n}]", (A, 1e-300)),
                (f"spd_log_f[n={n}]", (Ah, Aih, B, 1e-300)),
                (f"spd_exp_f[n={n}]", (Ah, Aih, Y)),
                (f"spd_dist_f[n={n}]", (Aih, B, 1e-300))]
    return out


def per_call(fn, args, repeat, number):
    return min(timeit.repeat(lambda: fn(*args), repeat=repeat, number=number)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=2000)
    ap.add_argument("--skip-workload", action="store_true")
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels are not built; only the fallback can be timed")
    print(f"{'kernel':<22}{'python (us)':>13}{'cython (us)':>13}{'speedup':>9}")
    for name, a in cases():
        base = name.split("[")[0]
        t_py = per_call(getattr(_pykernels, base), a, args.repeat, args.number)
        if _ckernels is None:
            print(f"{name:<22}{t_py * 1e6:>13.2f}{'-':>13}{'-':>9}")
            continue
        t_c = per_call(getattr(_ckernels, base), a, args.repeat, args.number)
        print(f"{name:<22}{t_py * 1e6:>13.2f}{t_c * 1e6:>13.2f}{t_py / t_c:>8.1f}x")
    if args.skip_workload:
        return
    print("\nconjugate workload (30 solves)")
    for pure in ("1", "0"):
        env = {**os.environ, "HADAMARD_DUALITY_PURE_PYTHON": pure}
        res = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True)
        backend, secs = res.stdout.split()
        print(f"  {backend:<8}{float(secs):8.2f} s")


if __name__ == "__main__":
    main()
