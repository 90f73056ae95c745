"""Compare the numba and numpy kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--plates 6] [--nodes 20000] [--repeat 5]

Two measurements:

* each kernel called directly from both tables on the same random inputs
  (numba timed after one warm-up call, so compilation is excluded);
* a full ``energy_per_area`` on a magnetodielectric stack, run once per
  backend in a fresh interpreter with ``DELTAPLATES_DISABLE_JIT`` set
  accordingly.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from deltaplates import Mode, Plate, Stack, kernels
from deltaplates.scattering import stack_arrays

_E2E = """
import time
from deltaplates import Plate, Stack, energy_per_area
stack = Stack([Plate.magnetodielectric(0.7 * i, 1.0 + 0.3 * i, 0.5) for i in range({n})])
energy_per_area(stack)
t0 = time.perf_counter()
for _ in range({repeat}):
    res = energy_per_area(stack)
print(f"{{(time.perf_counter() - t0) / {repeat}:.6f}} {{res.value!r}}")
"""


def random_inputs(n_plates, n_nodes, seed=0):
    """Amplitudes of a random magnetodielectric stack on random (ζ, κ) nodes."""
    rng = np.random.default_rng(seed)
    gaps = rng.uniform(0.2, 2.0, n_plates - 1)
    positions = np.concatenate(([0.0], np.cumsum(gaps)))
    stack = Stack([Plate.magnetodielectric(z, *rng.uniform(0.0, 10.0, 2)) for z in positions])
    kappa = rng.uniform(0.05, 10.0, n_nodes)
    zeta = kappa * rng.uniform(0.0, 1.0, n_nodes)
    r, t = stack_arrays(stack, Mode.H, zeta, kappa)
    return r, t, gaps, kappa


def bench_kernels(n_plates, n_nodes, repeat):
    args = kernels._prep(*random_inputs(n_plates, n_nodes))
    rows = []
    for name, np_fn in kernels.NUMPY_KERNELS.items():
        nb_fn = kernels.NUMBA_KERNELS.get(name)
        t_np = min(timeit.repeat(lambda: np_fn(*args), number=1, repeat=repeat))
        if nb_fn is None:
            rows.append((name, t_np, float("nan"), float("nan")))
            continue
        nb_fn(*args)
        t_nb = min(timeit.repeat(lambda: nb_fn(*args), number=1, repeat=repeat))
        diff = float(np.max(np.abs(np_fn(*args) - nb_fn(*args))))
        rows.append((name, t_np, t_nb, diff))
    return rows


def bench_end_to_end(n_plates, repeat):
    out = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, DELTAPLATES_DISABLE_JIT=flag)
        proc = subprocess.run(
            [sys.executable, "-c", _E2E.format(n=n_plates, repeat=repeat)],
            env=env, capture_output=True, text=True, check=True,
        )
        seconds, value = proc.stdout.split()
        out[label] = (float(seconds), float(value))
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--plates", type=int, default=6)
    parser.add_argument("--nodes", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    print(f"kernels: N={args.plates} plates, M={args.nodes} nodes, best of {args.repeat}")
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max |diff|':>12}")
    for name, t_np, t_nb, diff in bench_kernels(args.plates, args.nodes, args.repeat):
        print(f"{name:<22}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.1f}{diff:>12.1e}")

    print(f"\nenergy_per_area, {args.plates} magnetodielectric plates (General2D path)")
    e2e = bench_end_to_end(args.plates, max(1, args.repeat // 2))
    for label, (seconds, value) in e2e.items():
        print(f"  {label:<6} {seconds:8.3f} s   E/A = {value:.12e}")
    print(f"  speedup {e2e['numpy'][0] / e2e['numba'][0]:.2f}x")


if __name__ == "__main__":
    main()
