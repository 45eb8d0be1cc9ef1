"""Compare the compiled core with the numpy fallback.

Times one direct convolution, one fused RK4 step and a short simulation on
the empirical-speed grid (8001 cells, normal kernel with 237 weights), and
reports the largest difference between the two backends.

    python3 benchmarks/bench_core.py [--repeat N] [--horizon T]
"""

import argparse
import platform
import time

import numpy as np

from nlspread import _backend, _fallback
from nlspread.kernels import Normal, discretize
from nlspread.model import ModelParams
from nlspread.simulation import CompactBump, Grid, SimulationConfig, simulate

try:
    from nlspread import _core
except ImportError:
    _core = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def run_simulation(core, cfg):
    saved = _backend.core
    _backend.core = core
    try:
        t0 = time.perf_counter()
        res = simulate(cfg)
        return time.perf_counter() - t0, res.final
    finally:
        _backend.core = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--horizon", type=float, default=20.0)
    args = ap.parse_args()
    if _core is None:
        print("compiled core not built; nothing to compare")
        return

    dx = 0.085
    k = discretize(Normal(0.0, 1.0), dx)
    grid = Grid.centered(340.0, dx)
    x = grid.x
    f = np.where(np.abs(x) < 150, np.exp(-np.abs(x) / 30), 0.0)
    params = ModelParams.saturating(0.2, 0.2, 0.6, 0.6)
    step_args = (k.weights, k.offset_cells, False, k.weights, k.offset_cells, False,
                 dx, 0.05, 0.2, 0.2, 0.6, params.h.bend, 0.6, params.g.bend)

    print(f"{platform.processor() or platform.machine()}, numpy {np.__version__}")
    print(f"grid {grid.n} cells, kernel {k.weights.size} weights")
    print(f"{'operation':<24}{'compiled':>12}{'fallback':>12}{'speedup':>9}{'max |diff|':>13}")

    for name, fn in (
        ("convolution", lambda m: m.direct_convolve(k.weights, f, k.offset_cells, dx)),
        ("rk4 step", lambda m: m.rk4_saturating(f, 0.5 * f, *step_args)),
    ):
        tc = best_of(lambda: fn(_core), args.repeat)
        tf = best_of(lambda: fn(_fallback), args.repeat)
        a, b = fn(_core), fn(_fallback)
        diff = max(float(np.max(np.abs(np.subtract(p, q)))) for p, q in zip(np.atleast_2d(a), np.atleast_2d(b)))
        print(f"{name:<24}{tc * 1e3:>10.3f}ms{tf * 1e3:>10.3f}ms{tf / tc:>8.2f}x{diff:>13.2e}")

    cfg = SimulationConfig(params, k, k, grid, CompactBump(0.0, 5.0, 1.0), horizon=args.horizon,
                           snapshot_every=args.horizon, trace_every=0.5)
    tc, sc = run_simulation(_core, cfg)
    tf, sf = run_simulation(_fallback, cfg)
    diff = max(float(np.max(np.abs(sc.u - sf.u))), float(np.max(np.abs(sc.v - sf.v))))
    label = f"simulate T={args.horizon:g}"
    print(f"{label:<24}{tc:>11.2f}s{tf:>11.2f}s{tf / tc:>8.2f}x{diff:>13.2e}")


if __name__ == "__main__":
    main()
