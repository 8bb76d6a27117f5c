"""Compiled vs numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-``repeat`` wall time for each kernel on a few sizes, the
speed-up of the compiled backend, and checks that both agree.
"""
import argparse
import timeit

import numpy as np

from strongcoord import _pykernels

try:
    from strongcoord import _ckernels
except ImportError:
    _ckernels = None


def lattice_case(rng, na, nb, span):
    ka = np.sort(rng.choice(span, size=na, replace=False)).astype(np.int64)
    kb = np.sort(rng.choice(span, size=nb, replace=False)).astype(np.int64)
    return ka, rng.dirichlet(np.ones(na)), kb, rng.dirichlet(np.ones(nb))


def draw_case(rng, rows, cols, samples):
    cdf = np.cumsum(rng.dirichlet(np.ones(cols), size=rows), axis=1)
    return cdf, rng.integers(0, rows, size=samples), rng.random(samples)


def best(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    cases = [
        ("lattice_convolve", f"{na}x{nb}", lattice_case(rng, na, nb, 2**40))
        for na, nb in ((1_000, 10), (20_000, 50), (2_000, 2_000))
    ] + [
        ("categorical_draw", f"{r}x{c}, {s} draws", draw_case(rng, r, c, s))
        for r, c, s in ((4, 2, 1_000_000), (64, 16, 1_000_000), (16, 256, 200_000))
    ]
    print(f"{'kernel':<18} {'case':<22} {'numpy s':>10} {'cython s':>10} {'speed-up':>9}")
    for name, label, case in cases:
        py = getattr(_pykernels, name)
        t_py = best(py, case, args.repeat)
        if _ckernels is None:
            print(f"{name:<18} {label:<22} {t_py:>10.4f} {'n/a':>10} {'n/a':>9}")
            continue
        cy = getattr(_ckernels, name)
        a, b = py(*case), cy(*case)
        same = all(np.allclose(x, y, rtol=1e-12, atol=0) for x, y in zip(a, b)) if isinstance(a, tuple) else np.array_equal(a, b)
        if not same:
            raise SystemExit(f"{name} {label}: backends disagree")
        t_cy = best(cy, case, args.repeat)
        print(f"{name:<18} {label:<22} {t_py:>10.4f} {t_cy:>10.4f} {t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
