"""Benchmark the compiled rate kernel against the numpy fallback.

Two workloads bracket the use cases: a 201-mode friction model on a
2000-step grid (the heaviest shipped computation) and a 5-mode discrete
model on the same grid.  The compiled kernel walks the triangular
(t, tau) region with O(n_modes * M) memory and wins when modes are few;
the numpy fallback materializes the full M x M phase matrix through
BLAS and catches up when modes are many.

Usage: python3 benchmarks/bench_kernels.py [--steps N] [--repeats R]
"""
import argparse
import time

import numpy as np

from cavfgr import Direction, GOASpec, ThermalEnv, TimeGrid, goa_to_normal_modes
from cavfgr._kernels import get_backend
from cavfgr.correlators import rate_tables
from cavfgr.model import DisplacedHarmonicModel


def friction_model():
    spec = GOASpec(Omega=0.5, y0=1.0, eta=5.0, omega_c=1.0, n_secondary=200,
                   omega_DA=0.0, gamma=1.0, s=1.0)
    return goa_to_normal_modes(spec)


def sparse_model():
    rng = np.random.default_rng(7)
    n = 5
    return DisplacedHarmonicModel(
        mode_freqs=np.sort(rng.uniform(0.5, 2.0, n)),
        da_shifts=rng.uniform(-1.0, 1.0, n),
        dg_shifts=rng.uniform(-1.0, 1.0, n),
        omega_DA=0.3,
        gamma=1.0,
    )


def build_workload(model, n_steps):
    env = ThermalEnv(beta=1.0)
    grid = TimeGrid(t_max=20.0, dt=20.0 / n_steps)
    nodes = grid.nodes()
    base_re, base_im, p, q = rate_tables(model, env, Direction.FORWARD,
                                         nodes, 700.0)
    omega_p = 0.961
    colfac = np.vstack([
        np.ones(nodes.size, dtype=np.complex128),
        np.exp(1j * omega_p * nodes),
        np.exp(-1j * omega_p * nodes),
    ])
    return nodes, model.mode_freqs, p, q, base_re, base_im, colfac, grid.dt


def time_backends(args_tuple, repeats):
    results = {}
    for name in ("numpy", "compiled"):
        try:
            mod, resolved = get_backend(name)
        except (ValueError, ImportError) as exc:
            print(f"{name:>8}: unavailable ({exc})")
            continue
        best = np.inf
        out = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            out = mod.rate_rows(*args_tuple, 700.0)
            best = min(best, time.perf_counter() - t0)
        results[resolved] = (best, out)
        print(f"{resolved:>8}: {best * 1e3:9.2f} ms best of {repeats}")
    if len(results) == 2:
        ref = results["numpy"][1]
        fast = results["compiled"][1]
        scale = np.max(np.abs(ref))
        print(f"  max |compiled - numpy| / max|k|: "
              f"{np.max(np.abs(fast - ref)) / scale:.3e}")
        print(f"  compiled speedup: "
              f"{results['numpy'][0] / results['compiled'][0]:.2f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=2000,
                        help="number of grid steps (default 2000)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats, best is reported (default 3)")
    args = parser.parse_args()

    for label, model in (("friction (201 modes)", friction_model()),
                         ("sparse (5 modes)", sparse_model())):
        workload = build_workload(model, args.steps)
        print(f"{label}: {workload[0].size} grid nodes, "
              f"{workload[6].shape[0]} integrand columns")
        time_backends(workload, args.repeats)


if __name__ == "__main__":
    main()
