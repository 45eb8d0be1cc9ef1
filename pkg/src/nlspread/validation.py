"""Oracle suite run by ``nlspread validate``."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .dispersion import Dispersion
from .oracles import NOT_APPLICABLE, check_comparison, check_monotone, domination_gap, minimal_gamma, speed_branches
from .scenario import plan
from .simulation import BOX_TOL, Convolver, CustomData, ExponentialTail, simulate

SPECTRAL_TOL = 1e-10
DOMINATION_TOL = 1e-8


@dataclass(frozen=True)
class Check:
    name: str
    status: str  # PASS, FAIL or SKIP
    detail: str

    def line(self):
        return f"{self.status} {self.name}: {self.detail}"


def run_checks(cfg) -> list:
    p = plan(cfg)
    sim = p.sim
    checks = []
    result = simulate(sim)

    # direct and spectral convolution on the initial and final fields
    worst = 0.0
    for kernel in (sim.kernel_u, sim.kernel_v):
        direct = Convolver(kernel, sim.grid, "direct")
        spectral = Convolver(kernel, sim.grid, "spectral")
        for f in (result.u[0], result.v[-1]):
            worst = max(worst, float(np.max(np.abs(direct(f) - spectral(f)))))
    checks.append(Check("direct-vs-spectral", "PASS" if worst < SPECTRAL_TOL else "FAIL",
                        f"max |diff| = {worst:.3e} (limit {SPECTRAL_TOL:g})"))

    lo = min(result.u.min(), result.v.min())
    hi = max(result.u.max(), result.v.max())
    ok = lo >= -BOX_TOL and hi <= 1 + BOX_TOL
    checks.append(Check("box-invariance", "PASS" if ok else "FAIL", f"range [{lo:.3e}, {hi:.3e}]"))

    # comparison against the same run started from half the data
    u0, v0 = sim.initial.evaluate(sim.grid)
    lower = simulate(dataclasses.replace(sim, initial=CustomData(0.5 * u0, 0.5 * v0)))
    ok = check_comparison(result, lower)
    checks.append(Check("comparison-principle", "PASS" if ok else "FAIL",
                        "run from (u0, v0) dominates run from (u0, v0)/2"))

    # monotone symmetric profile
    verdicts = [check_monotone(result.snapshot(k), (sim.kernel_u, sim.kernel_v)) for k in range(len(result.times))]
    if any(v is NOT_APPLICABLE for v in verdicts):
        checks.append(Check("monotone-symmetry", "SKIP", "asymmetric kernel"))
    else:
        ok = all(verdicts)
        checks.append(Check("monotone-symmetry", "PASS" if ok else "FAIL",
                            f"{sum(verdicts)}/{len(verdicts)} snapshots symmetric and monotone"))

    # upper envelope built on the spreading-speed branches
    system = Dispersion.from_params(sim.params, sim.kernel_u, sim.kernel_v)
    lam_l, lam_r = p.profile.lambda_l_star, p.profile.lambda_r_star
    if isinstance(sim.initial, ExponentialTail):
        lam_l, lam_r = max(-sim.initial.rate, lam_l), min(sim.initial.rate, lam_r)
    branches = speed_branches(system, lam_l, lam_r)
    gamma = minimal_gamma(sim.grid.x, u0, v0, branches)
    gap = domination_gap(result, gamma, branches)
    checks.append(Check("upper-solution", "PASS" if gap <= DOMINATION_TOL else "FAIL",
                        f"max excess over envelope = {gap:.3e} (Gamma = {gamma:.4g})"))
    return checks
