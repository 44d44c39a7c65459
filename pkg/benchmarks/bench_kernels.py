"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from parity_bell import _pykernels

try:
    from parity_bell import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    q = np.linspace(0.0, 80.0, 4000)
    n = 1400
    lam_e, lam_o = rng.random(n), rng.random(n)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    k = rng.normal(size=(3, 3))
    starts = rng.normal(size=(64, 4, 3))
    starts /= np.linalg.norm(starts, axis=2, keepdims=True)
    return {
        "hermite_table (2800 levels x 4000 nodes)": lambda m: m.hermite_table(2800, q),
        "pair_sum (1400 x 1400)": lambda m: m.pair_sum(lam_e, lam_o, a, b),
        "chsh_ascent (64 starts)": lambda m: m.chsh_ascent(k, starts),
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    if _ckernels is None:
        print("compiled extension not built; run `python3 setup.py build_ext --inplace`")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<42} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8}")
    for name, fn in cases(rng).items():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:<42} {t_py:>11.4f} {'-':>11} {'-':>8}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
        print(f"{name:<42} {t_py:>11.4f} {t_c:>11.4f} {t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
