"""Time the compiled kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so ``QSEP_BACKEND`` has no effect here.
"""

import argparse
import timeit

import numpy as np

from qsep import _kernels_py
from qsep.bipartitions import bipartition_classes, matricize
from qsep.quadratic import family_table

try:
    from qsep import _kernels as _compiled
except ImportError:
    _compiled = None

PROFILES = [(2, 2, 2), (2, 3, 4), (3, 3, 3), (3, 4, 5), (2, 2, 2, 2, 2)]


def cases(dims, rng):
    n = int(np.prod(dims))
    a1 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    a2 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    t = family_table(dims)
    mats = [matricize(a1.reshape(dims), c) for c in bipartition_classes(len(dims))]
    coeffs = _kernels_py.family_coefficients(a1, a2, t.u, t.v, t.mu, t.nu)
    return {
        "family_coefficients": lambda k: k.family_coefficients(a1, a2, t.u, t.v, t.mu, t.nu),
        "minor_norm_sq": lambda k: k.minor_norm_sq(a1, t.u, t.v, t.mu, t.nu),
        "biquadratic": lambda k: [k.biquadratic(m) for m in mats],
        "pair_cross_norm_sq": lambda k: k.pair_cross_norm_sq(coeffs[1], coeffs[0]),
    }, len(t)


def best(fn, kernels, repeat):
    number = 1
    while timeit.timeit(lambda: fn(kernels), number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(lambda: fn(kernels), number=number, repeat=repeat)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _compiled is None:
        print("compiled extension not built; only the NumPy fallback is available")
    rng = np.random.default_rng(0)
    print(f"{'profile':<14}{'families':>9}  {'kernel':<20}{'numpy us':>11}{'cython us':>11}{'speedup':>9}")
    for dims in PROFILES:
        table, n_fam = cases(dims, rng)
        for name, fn in table.items():
            t_py = best(fn, _kernels_py, args.repeat) * 1e6
            if _compiled is None:
                print(f"{'x'.join(map(str, dims)):<14}{n_fam:>9}  {name:<20}{t_py:>11.1f}{'-':>11}{'-':>9}")
                continue
            t_cy = best(fn, _compiled, args.repeat) * 1e6
            print(f"{'x'.join(map(str, dims)):<14}{n_fam:>9}  {name:<20}{t_py:>11.1f}{t_cy:>11.1f}{t_py / t_cy:>8.2f}x", flush=True)


if __name__ == "__main__":
    main()
