"""Turn a ``ScenarioConfig`` into a simulation run with its analytic targets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .dispersion import Dispersion, SpeedProfile, locate_speeds
from .errors import BoundaryContamination
from .fronts import SpeedFit, relative_error
from .kernels import Tabulated, discretize
from .simulation import (
    CONTAMINATION_LEVEL,
    CompactBump,
    ExponentialTail,
    Grid,
    SimulationConfig,
    SimulationResult,
    simulate,
)

OUTSIDE_HYPOTHESES = "outside-theorem-hypotheses"
BOUNDARY_MARGIN = 50.0
RADII_MARGIN = 10


@dataclass
class Plan:
    scenario: ScenarioConfig
    sim: SimulationConfig
    profile: SpeedProfile
    target_left: float
    target_right: float
    tags: tuple = ()


@dataclass
class Report:
    plan: Plan
    result: SimulationResult
    fit: SpeedFit
    tags: tuple = field(default_factory=tuple)

    def summary_row(self) -> dict:
        f, p = self.fit, self.plan
        return {
            "c_left_fit": f.c_left,
            "c_right_fit": f.c_right,
            "r2_left": f.r2_left,
            "r2_right": f.r2_right,
            "c_l_star": p.target_left,
            "c_r_star": p.target_right,
            "rel_err_left": relative_error(f.c_left, p.target_left),
            "rel_err_right": relative_error(f.c_right, p.target_right),
        }


def _decreasing_on_right(k: Tabulated) -> bool:
    if not k.is_symmetric:
        return False
    mid = k.weights.size // 2
    return bool(np.all(np.diff(k.weights[mid:]) <= 0))


def kernel_radius(*kernels: Tabulated) -> float:
    """Largest distance from the origin to a node carrying kernel weight."""
    return max(max(abs(k.x0), abs(k.x0 + k.dx * (k.weights.size - 1))) for k in kernels)


def auto_halfwidth(speeds, rates, horizon: float, radius: float) -> float:
    """Default half-width ``1.5*max|c|*T + 50``, widened when that is too tight.

    The fronts must end ten kernel radii inside the domain, and ahead of a
    front the solution decays like ``exp(-rate * distance)``, so the leading
    edge needs ``log(1/CONTAMINATION_LEVEL) / rate`` more room before the
    boundary check fires.
    """
    c = max(abs(s) for s in speeds)
    default = 1.5 * c * horizon + BOUNDARY_MARGIN
    edge = math.log(1.0 / CONTAMINATION_LEVEL) / min(abs(r) for r in rates)
    needed = 1.2 * c * horizon + edge + RADII_MARGIN * radius
    return max(default, needed)


def plan(cfg: ScenarioConfig) -> Plan:
    """Discretize kernels, size the grid and pick the speeds the fronts should approach.

    Speeds come from the discretized kernels, so the targets describe the
    operator the simulator actually integrates.
    """
    params = cfg.params()
    k1, k2 = cfg.kernels()
    t1, t2 = discretize(k1, cfg.dx), discretize(k2, cfg.dx)
    profile = locate_speeds(params, t1, t2)
    tags = []
    if cfg.initial_kind == "bump":
        initial = CompactBump(cfg.center, cfg.bump_halfwidth, cfg.height)
        left, right = profile.c_l_star, profile.c_r_star
    else:
        rate = cfg.rate if cfg.rate is not None else cfg.rate_fraction * profile.lambda_r_star
        initial = ExponentialTail(rate, cfg.amplitude, cfg.plateau, cfg.center)
        system = Dispersion.from_params(params, t1, t2)
        # a tail steeper than the critical rate spreads at the minimal speed
        right = system.c(min(rate, profile.lambda_r_star))
        left = system.c(max(-rate, profile.lambda_l_star))
        if not (_decreasing_on_right(t1) and _decreasing_on_right(t2)):
            tags.append(OUTSIDE_HYPOTHESES)
    half = cfg.halfwidth
    if half is None:
        speeds = (left, right, profile.c_l_star, profile.c_r_star)
        rates = (profile.lambda_l_star, profile.lambda_r_star)
        if cfg.initial_kind != "bump":
            rates += (initial.rate,)
        half = auto_halfwidth(speeds, rates, cfg.horizon, kernel_radius(t1, t2))
    grid = Grid.centered(half, cfg.dx, cfg.center)
    sim = SimulationConfig(
        params, t1, t2, grid, initial,
        horizon=cfg.horizon, dt=cfg.dt, snapshot_every=cfg.snapshot_stride,
        trace_every=cfg.trace_stride, nu=cfg.nu, method=cfg.method,
    )
    return Plan(cfg, sim, profile, left, right, tuple(tags))


def _margin_ok(plan: Plan, result: SimulationResult) -> bool:
    """Fronts must end at least ten kernel radii inside the domain."""
    g = plan.sim.grid
    radius = kernel_radius(plan.sim.kernel_u, plan.sim.kernel_v)
    t, xl, xr = result.trace.arrays()
    lo, hi = g.x0, g.x0 + g.dx * (g.n - 1)
    fin = np.isfinite(xl) & np.isfinite(xr)
    if not fin.any():
        return True
    margin = RADII_MARGIN * radius
    return bool(xl[fin].min() - lo >= margin and hi - xr[fin].max() >= margin)


def run(cfg: ScenarioConfig) -> Report:
    p = plan(cfg)
    result = simulate(p.sim)
    if not _margin_ok(p, result):
        raise BoundaryContamination("a front came within ten kernel radii of the boundary")
    fit = result.trace.fit(cfg.fit_window)
    return Report(p, result, fit, p.tags)
