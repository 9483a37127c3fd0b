"""Compare the compiled and pure-Python trajectory kernels.

Usage: python3 benchmarks/kernel_bench.py [n_steps]
"""

import sys
import time

import numpy as np

from avgmix.kernels import get_backend


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2_000_000
    rng = np.random.default_rng(0)
    rows = rng.dirichlet(np.ones(6), size=6)
    cum = np.cumsum(rows, axis=1)
    cum[:, -1] = 1.0
    u = rng.random(n)
    out = np.empty(n, dtype=np.int32)
    results = {}
    for name in ("compiled", "python"):
        try:
            fn = get_backend(name)
        except ImportError:
            print(f"{name:>8}: unavailable")
            continue
        steps = n if name == "compiled" else min(n, 200_000)
        t0 = time.perf_counter()
        final = fn(cum, 0, u[:steps], out[:steps])
        dt = time.perf_counter() - t0
        results[name] = out[:steps].copy()
        print(f"{name:>8}: {steps / dt / 1e6:8.2f} M steps/s ({steps} steps, final={final})")
    if len(results) == 2:
        m = min(len(v) for v in results.values())
        same = np.array_equal(results["compiled"][:m], results["python"][:m])
        print("outputs identical on the common prefix:", same)


if __name__ == "__main__":
    main()
