"""Time the compiled and numpy propagator kernels against each other.

    python3 benchmarks/bench_kernels.py --n-max 40 --batch 64 --repeat 20
"""

import argparse
import time

import numpy as np

from jcpath.dynamics import SystemParams, _branch_views, _controlled_coefficients
from jcpath.kernels import backend_module


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench(n_max, batch, repeat, seed=0):
    params = SystemParams(7.3, 7.0, 7.6, 0.4, 0.7, n_max)
    coeffs = _controlled_coefficients(params, 1.7)
    d = n_max + 1
    rng = np.random.default_rng(seed)
    psi0 = rng.normal(size=(2 * 2 * d * d, batch)) + 1j * rng.normal(size=(2 * 2 * d * d, batch))
    diag = np.exp(1j * rng.uniform(0, 2 * np.pi, 2 * 2 * d * d))
    results = {}
    outputs = {}
    for name in ("python", "cython"):
        try:
            mod = backend_module(name)
        except ImportError:
            print(f"{name}: not built, skipped")
            continue
        psi = psi0.copy()

        def branch():
            view = psi.reshape(2, 2, d, d, batch)
            for v, (blocks, g0, edge, spectator) in zip(_branch_views(view), coeffs):
                mod.apply_branch(v, blocks, g0, edge, spectator)

        def diagonal():
            mod.apply_diagonal(psi, diag)

        results[name] = (_time(branch, repeat), _time(diagonal, repeat))
        check = psi0.copy()
        view = check.reshape(2, 2, d, d, batch)
        for v, (blocks, g0, edge, spectator) in zip(_branch_views(view), coeffs):
            mod.apply_branch(v, blocks, g0, edge, spectator)
        outputs[name] = check
    if len(outputs) == 2:
        diff = np.max(np.abs(outputs["python"] - outputs["cython"]))
        print(f"max |python - cython| = {diff:.2e}")
    for name, (tb, td) in results.items():
        print(f"{name:7s} apply_branch {tb * 1e3:9.3f} ms   apply_diagonal {td * 1e3:9.3f} ms")
    if len(results) == 2:
        print(f"speedup apply_branch x{results['python'][0] / results['cython'][0]:.2f}, "
              f"apply_diagonal x{results['python'][1] / results['cython'][1]:.2f}")
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n-max", type=int, default=40)
    parser.add_argument("--batch", type=int, default=64)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    print(f"n_max = {args.n_max}, batch = {args.batch}, dim = {4 * (args.n_max + 1) ** 2}")
    bench(args.n_max, args.batch, args.repeat)


if __name__ == "__main__":
    main()
