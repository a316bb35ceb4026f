"""Time the numba and numpy RK4 kernels on the fig2 generator.

    python benchmarks/bench_kernels.py [--M 60] [--steps 500]
"""
import argparse
import time

import numpy as np

from dressedopto import _kernels
from dressedopto.dressed import dress
from dressedopto.hamiltonian import SystemParams
from dressedopto.lindblad import BathParams, DriveParams, Generator


def time_kernels(kernels, gen, steps, repeats=3):
    rho = gen.ground_state()
    gen.propagate(rho, 0.0, 0.02, 2, kernels=kernels)  # warm-up / jit compile
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = gen.propagate(rho, 0.0, 0.02, steps, kernels=kernels)
        best = min(best, time.perf_counter() - t0)
    return best / steps, out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--M", type=int, default=60)
    ap.add_argument("--steps", type=int, default=500)
    args = ap.parse_args()

    _, table, ops = dress(SystemParams(), args.M)
    gen = Generator(table, ops, BathParams(), DriveParams())
    per_np, rho_np = time_kernels(_kernels.numpy_kernels, gen, args.steps)
    print(f"numpy  {per_np * 1e6:9.1f} us/step")
    if not _kernels.NUMBA_AVAILABLE:
        print("numba  not installed")
        return
    per_nb, rho_nb = time_kernels(_kernels.numba_kernels(), gen, args.steps)
    print(f"numba  {per_nb * 1e6:9.1f} us/step  (x{per_np / per_nb:.2f})")
    print(f"max |rho_numba - rho_numpy| = {np.abs(rho_nb - rho_np).max():.2e}")


if __name__ == "__main__":
    main()
