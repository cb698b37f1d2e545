"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each kernel is called once before timing so JIT compilation is excluded.
Results of the two paths are compared as a sanity check.
"""

import argparse
import json
import timeit

import numpy as np

from fredholm_bvp import _jit, kernels


def cases(rng):
    for n, m in [(256, 2), (1024, 4), (4096, 4)]:
        a_half = rng.normal(size=(2 * n + 1, m, m)) + 0j
        yield (f"rk4 N={n} m={m}", kernels.rk4_fundamental_numba,
               kernels.rk4_fundamental_numpy, (a_half, 1.0 / n))
    for n in (1024, 16384, 262144):
        yield (f"caputo weights N={n}", kernels.caputo_weights_numba,
               kernels.caputo_weights_numpy, (n, 0.5))
    for n in (513, 2049, 4097):
        g = np.sin(np.linspace(0, 3, n))
        yield (f"gagliardo N={n - 1}", kernels.gagliardo_sum_numba,
               kernels.gagliardo_sum_numpy, (g, 3.0 / (n - 1), 2.0, 2.0))


def best_time(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05 and number < 10**5:
        number *= 4
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json", default=None)
    args = parser.parse_args(argv)
    if not _jit.HAVE_NUMBA:
        parser.error("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    rows = []
    print(f"{'kernel':28s} {'numba':>12s} {'numpy':>12s} {'speedup':>8s}  max diff")
    for name, fast, slow, call_args in cases(rng):
        diff = float(np.max(np.abs(np.asarray(fast(*call_args)) - np.asarray(slow(*call_args)))))
        t_fast = best_time(fast, call_args, args.repeat)
        t_slow = best_time(slow, call_args, args.repeat)
        rows.append({"kernel": name, "numba_s": t_fast, "numpy_s": t_slow, "max_diff": diff})
        print(f"{name:28s} {t_fast * 1e3:10.3f}ms {t_slow * 1e3:10.3f}ms "
              f"{t_slow / t_fast:7.1f}x  {diff:.1e}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
