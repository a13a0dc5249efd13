"""Timing comparison of the compiled and pure-NumPy kernel backends.

Usage: python benchmarks/bench_kernels.py [--size 2000000] [--repeat 5]

Each kernel is timed on identical inputs under both backends (best of
--repeat runs) and the results are cross-checked before the table is
printed, so a speedup never comes from computing something different.
"""

import argparse
import time

import numpy as np

from horolab import kernels

PURE = kernels.get_module("pure")
EXT = kernels.get_module("ext")


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_reduce(size, repeat, rng):
    x = rng.uniform(-30.0, 30.0, size)
    y = np.exp(rng.uniform(np.log(1e-3), np.log(30.0), size))
    tp, (xp, yp, _) = best_of(lambda: PURE.reduce_points(x, y), repeat)
    te, (xe, ye, _) = best_of(lambda: EXT.reduce_points(x, y), repeat)
    assert np.array_equal(xp, xe) and np.array_equal(yp, ye)
    return "reduce_points", tp, te


def bench_quad_phases(size, repeat, rng):
    bhi, blo = 0.7071067811865476, -4.833646656726457e-17
    tp, pp = best_of(lambda: PURE.phases_quad(bhi, blo, 1, size + 1), repeat)
    te, pe = best_of(lambda: EXT.phases_quad(bhi, blo, 1, size + 1), repeat)
    assert np.array_equal(pp, pe)
    return "phases_quad", tp, te


def bench_power_phases(size, repeat, rng):
    tp, _ = best_of(lambda: PURE.phases_power(0.37, 0.55, 1, size + 1), repeat)
    te, _ = best_of(lambda: EXT.phases_power(0.37, 0.55, 1, size + 1), repeat)
    return "phases_power", tp, te


def bench_horo_images(size, repeat, rng):
    t = PURE.times_quad(1.4142135623730951, 1, size + 1)
    tp, (rp, ip) = best_of(lambda: PURE.horo_images(0.44, 1.0, t), repeat)
    te, (re, ie) = best_of(lambda: EXT.horo_images(0.44, 1.0, t), repeat)
    assert np.array_equal(rp, re) and np.array_equal(ip, ie)
    return "horo_images", tp, te


def bench_tree_sum(size, repeat, rng):
    v = rng.standard_normal(size)
    tp, sp = best_of(lambda: kernels.tree_sum(v, module=PURE), repeat)
    te, se = best_of(lambda: kernels.tree_sum(v, module=EXT), repeat)
    assert sp == se
    return "tree_sum", tp, te


def bench_osc_sum(size, repeat, rng):
    def phase(mod):
        return lambda b0, b1: mod.phases_quad(
            0.7071067811865476, -4.833646656726457e-17, b0, b1)

    tp, _ = best_of(
        lambda: kernels.osc_sum(phase(PURE), 1, size + 1, module=PURE), repeat)
    te, _ = best_of(
        lambda: kernels.osc_sum(phase(EXT), 1, size + 1, module=EXT), repeat)
    return "osc_sum (phases+cis)", tp, te


BENCHES = (bench_reduce, bench_quad_phases, bench_power_phases,
           bench_horo_images, bench_tree_sum, bench_osc_sum)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=2_000_000,
                    help="elements per kernel call")
    ap.add_argument("--repeat", type=int, default=5, help="best-of count")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"size={args.size}  repeat={args.repeat}  "
          f"active backend={kernels.backend()}")
    print(f"{'kernel':<22}{'pure [ms]':>12}{'ext [ms]':>12}{'speedup':>10}")
    for bench in BENCHES:
        name, tp, te = bench(args.size, args.repeat, rng)
        print(f"{name:<22}{tp * 1e3:>12.2f}{te * 1e3:>12.2f}"
              f"{tp / te:>10.2f}x")


if __name__ == "__main__":
    main()
