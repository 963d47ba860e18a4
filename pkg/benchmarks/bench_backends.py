"""Time the compiled kernels against the numpy reference kernels.

    python3 benchmarks/bench_backends.py [--repeat 5]
"""
import argparse
import math
import timeit

import numpy as np

from kpower import _backend


def cases():
    alpha = np.linspace(-math.pi / 2, math.pi / 2, 1_000_001)
    intensity = np.linspace(0.0, 1.0, 2001)
    return {
        "fringe_array  N=100 r=6, 1e6 phases": lambda m: m.fringe_array(alpha, 100, 6.0),
        "half_width    N=2..200:2 x K=1..100": lambda m: [
            m.half_width(n, 0.0, float(k), 1e-12) for n in range(2, 201, 20) for k in range(1, 101)
        ],
        "product_est.  2001 pts x 200 trials, K=10": lambda m: m.product_estimates(intensity, 1e5, 10, 200, 1, 0),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if "cython" not in _backend.BACKENDS:
        print("compiled extension not built; only the python backend is available")
    print(f"{'kernel':44s} " + " ".join(f"{name:>10s}" for name in sorted(_backend.BACKENDS)) + "   speedup")
    for label, fn in cases().items():
        best = {}
        for name, mod in sorted(_backend.BACKENDS.items()):
            best[name] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        speed = best["python"] / best["cython"] if "cython" in best else float("nan")
        print(f"{label:44s} " + " ".join(f"{best[n]:9.4f}s" for n in sorted(best)) + f"   {speed:6.1f}x")


if __name__ == "__main__":
    main()
