"""Compiled vs numpy stepper: time per ESDIRK step and per full reset run.

    python3 benchmarks/bench_kernels.py [--sizes 16,128,1024] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from dicke_reset import SystemParams, figure_protocols, integrate
from dicke_reset.kernels import BACKENDS, get_stepper


def step_time(backend, n, repeat):
    stepper = get_stepper(backend)(n, 1.0, 1.0)
    p = np.full(n + 1, 1.0 / (n + 1))
    acc = np.zeros(3)
    p_out, acc_out = np.empty(n + 1), np.empty(3)
    omegas = np.linspace(0.5, 1.0, 6)

    def once():
        stepper.step(p, acc, 1e-3, omegas, 1e-8, 1e-12, p_out, acc_out)

    number = max(1, 20000 // (n + 1))
    return min(timeit.repeat(once, number=number, repeat=repeat)) / number


def run_time(backend, n, repeat):
    params = SystemParams(n)
    prot = figure_protocols(params)["linear"]
    return min(timeit.repeat(lambda: integrate(params, prot, backend=backend),
                             number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="4,16,128,1024")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    backends = sorted(BACKENDS)
    print(f"backends available: {', '.join(backends)}")
    print(f"{'N':>6} {'backend':>8} {'step [us]':>12} {'run [ms]':>10}")
    for n in sizes:
        for b in backends:
            print(f"{n:>6} {b:>8} {1e6 * step_time(b, n, args.repeat):>12.2f} "
                  f"{1e3 * run_time(b, n, args.repeat):>10.2f}")
    if len(backends) == 2:
        for n in sizes:
            ratio = run_time("python", n, args.repeat) / run_time("cython", n, args.repeat)
            print(f"N={n}: compiled run is {ratio:.1f}x faster")


if __name__ == "__main__":
    main()
