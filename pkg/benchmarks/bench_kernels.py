"""Time the compiled kernels against the pure-Python fallback.

Run ``python3 benchmarks/bench_kernels.py [--repeat N]`` from the repo root.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from tsaudit import kernels


def cases(rng: np.random.Generator) -> dict:
    y = rng.random(2000)
    x = np.concatenate([rng.standard_normal(250) + s for s in (0.0, 1.5, -1.0, 0.5)])
    acf = 0.9 ** np.arange(2000)
    return {
        "pava n=2000": lambda: kernels.pava(y),
        "meanshift_dp T=1000 m=5": lambda: kernels.meanshift_dp(x, 5, 50),
        "self_consistent_window phi=0.9": lambda: kernels.self_consistent_window(acf),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    try:
        kernels.use_backend("cython")
        backends = ("cython", "python")
    except ImportError:
        print("compiled extension not built; timing the fallback only")
        backends = ("python",)
    timings: dict[str, dict[str, float]] = {}
    for backend in backends:
        kernels.use_backend(backend)
        for name, fn in cases(np.random.default_rng(0)).items():
            fn()  # warm-up
            best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            timings.setdefault(name, {})[backend] = best
    print(f"{'kernel':34s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, t in timings.items():
        row = f"{name:34s}" + "".join(f"{t[b] * 1e3:10.3f}ms" for b in backends)
        if len(backends) == 2:
            row += f"{t['python'] / t['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
