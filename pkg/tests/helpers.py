"""Shared builders for simulation-based tests."""

import numpy as np

from nlspread.kernels import Dirac, Normal, discretize
from nlspread.model import ModelParams
from nlspread.simulation import (
    CompactBump,
    Convolver,
    CustomData,
    FieldState,
    Grid,
    SimulationConfig,
    simulate,
    step,
)


def symmetric_params(slope=0.6):
    return ModelParams.saturating(0.2, 0.2, slope, slope)


def small_config(halfwidth=40.0, dx=0.1, horizon=10.0, k1=None, k2=None, params=None, initial=None, **kw):
    params = params or symmetric_params()
    k1 = discretize(k1 or Normal(0.0, 1.0), dx)
    k2 = discretize(k2 or Normal(0.0, 1.0), dx)
    grid = Grid.centered(halfwidth, dx)
    initial = initial or CompactBump(0.0, 5.0, 1.0)
    kw.setdefault("snapshot_every", 1.0)
    kw.setdefault("trace_every", 0.5)
    return SimulationConfig(params, k1, k2, grid, initial, horizon=horizon, **kw)


def integrate(cfg, dt, t_end):
    conv1 = Convolver(cfg.kernel_u, cfg.grid)
    conv2 = Convolver(cfg.kernel_v, cfg.grid)
    u, v = cfg.initial.evaluate(cfg.grid)
    state = FieldState(0.0, u, v)
    for _ in range(int(round(t_end / dt))):
        state = step(state, dt, cfg.params, conv1, conv2)
    return state


def rk4_error_ratio(t_end=10.0, dt=0.1):
    """Ratio of errors at ``dt`` and ``dt/2`` against a ``dt/8`` reference."""
    cfg = small_config(halfwidth=30.0, dx=0.1)
    ref = integrate(cfg, dt / 8, t_end)
    errs = []
    for h in (dt, dt / 2):
        s = integrate(cfg, h, t_end)
        errs.append(max(np.max(np.abs(s.u - ref.u)), np.max(np.abs(s.v - ref.v))))
    return errs[0] / errs[1], errs


def dirac_pointwise_error(t_end=20.0, dt=0.05):
    """Largest gap between simulated ``v`` and the pointwise ODE driven by simulated ``u``."""
    from nlspread.oracles import pointwise_v

    cfg = small_config(halfwidth=60.0, dx=0.1, horizon=t_end, k2=Dirac(), dt=dt)
    idx = [cfg.grid.index_of(x) for x in (-12.0, -4.0, 0.0, 3.0, 9.0)]
    cfg.probes = tuple(idx)
    res = simulate(cfg)
    worst = 0.0
    for j in range(len(idx)):
        v = pointwise_v(cfg.params, res.probe_times, res.probe_u[:, j], float(res.probe_v[0, j]))
        worst = max(worst, float(np.max(np.abs(v - res.probe_v[:, j]))))
    return worst


def random_ordered_pair(rng, grid):
    """Two smooth random initial data with the first above the second."""
    x = grid.x
    centres = rng.uniform(-8, 8, 3)
    widths = rng.uniform(1.0, 4.0, 3)
    heights = rng.uniform(0.2, 1.0, 3)
    bumps = [h * np.exp(-((x - c) / w) ** 2) for c, w, h in zip(centres, widths, heights)]
    u_hi = np.clip(sum(bumps), 0.0, 1.0)
    v_hi = np.clip(bumps[0] + 0.5 * bumps[1], 0.0, 1.0)
    scale = rng.uniform(0.1, 0.9)
    u_lo = u_hi * scale * np.clip(rng.uniform(0.5, 1.0, x.size), 0, 1)
    v_lo = v_hi * scale
    return CustomData(u_hi, v_hi), CustomData(u_lo, v_lo)
