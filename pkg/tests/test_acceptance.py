"""Acceptance criteria 1-8. Each test prints a single PASS/FAIL line."""

import csv
import dataclasses
import io
import time
from pathlib import Path

import numpy as np
import pytest

from helpers import dirac_pointwise_error, random_ordered_pair, rk4_error_ratio, small_config
from nlspread.cli import main
from nlspread.config import load
from nlspread.critical import kappa_index, omega, omega_root
from nlspread.dispersion import Dispersion, classify_by_speeds, classify_propagation, locate_speeds
from nlspread.kernels import Normal, Tabulated, Uniform
from nlspread.model import ModelParams
from nlspread.oracles import check_comparison, check_monotone, domination_gap, minimal_gamma, speed_branches
from nlspread.scenario import plan, run
from nlspread.simulation import Convolver, Grid, convolve, simulate

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
SIGMA_STAR_UNIFORM = 0.8390193772121573  # mpmath, tests/oracles/compute_frozen.py


def cli_row(capsys, *argv):
    assert main(list(argv)) == 0
    return next(csv.DictReader(io.StringIO(capsys.readouterr().out)))


def critical_values(capsys, name):
    t0 = time.perf_counter()
    kappa = float(cli_row(capsys, "kappa", "--config", str(SCENARIOS / name))["kappa"])
    sigma = float(cli_row(capsys, "sigma-star", "--config", str(SCENARIOS / name))["sigma_star"])
    return kappa, sigma, time.perf_counter() - t0


def test_criterion_1_uniform_application(capsys, verdict):
    kappa, sigma, secs = critical_values(capsys, "uniform.cfg")
    ok = abs(kappa - 1.1952) <= 5e-4 and abs(sigma - 0.8423) <= 1e-3 and secs < 5
    verdict(1, ok, f"kappa={kappa:.6f} (1.1952+-5e-4) sigma*={sigma:.6f} (0.8423+-1e-3) in {secs:.2f}s")


def test_criterion_2_normal_application(capsys, verdict):
    kappa, sigma, secs = critical_values(capsys, "normal.cfg")
    ok = abs(kappa - 1.4432) <= 5e-4 and abs(sigma - 2.2098) <= 1e-3 and secs < 5
    verdict(2, ok, f"kappa={kappa:.6f} (1.4432+-5e-4) sigma*={sigma:.6f} (2.2098+-1e-3) in {secs:.2f}s")


def test_criterion_3_omega_root(verdict):
    z = omega_root(2.0)
    resid = abs(omega(z) - omega(-2 * z))
    p = ModelParams.from_product(0.2, 0.2, 0.06)
    ks = [kappa_index(p, Uniform(-1.0, r)) for r in (1.2, 1.5, 2.0, 3.0, 5.0)]
    increasing = all(a < b for a, b in zip(ks, ks[1:]))
    ok = resid < 1e-10 and 0.5 < z < 1.0 and increasing
    verdict(3, ok, f"z_2={z:.12f} residual={resid:.1e} kappa(r)={[round(k, 6) for k in ks]}")


# -- criterion 4 ------------------------------------------------------------------

def _mgf(kind, p, lam):
    if kind == "normal":
        return np.exp(p[0] * lam + 0.5 * p[1] * lam**2)
    lo, hi = p
    return (np.exp(hi * lam) - np.exp(lo * lam)) / ((hi - lo) * lam)


def _kernel(kind, p):
    return Normal(*p) if kind == "normal" else Uniform(*p)


def _random_kernel(rng, symmetric):
    if rng.random() < 0.5:
        return "normal", (0.0 if symmetric else rng.uniform(-1, 1), rng.uniform(0.3, 3.0))
    h = rng.uniform(0.2, 3.0)
    return "uniform", ((-h, h) if symmetric else (-rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0)))


def grid_extrema(k1, k2, alpha, beta, gh, step=1e-4, top=6.0):
    """Brute-force ``min c`` on (0, top] and ``max c`` on [-top, 0) at resolution ``step``."""
    lam = np.arange(1, int(round(top / step)) + 1) * step
    out = []
    for side in (1.0, -1.0):
        x = side * lam
        A = _mgf(*k1, x) - 1 - alpha
        B = _mgf(*k2, x) - 1 - beta
        c = 0.5 * (A + B + np.sqrt((A - B) ** 2 + 4 * gh)) / x
        j = int(np.argmin(c) if side > 0 else np.argmax(c))
        out.append((c[j], 0 < j < lam.size - 1))
    (c_r, in_r), (c_l, in_l) = out
    return c_l, c_r, in_l and in_r


def test_criterion_4_optimizer_vs_brute_force(verdict):
    rng = np.random.default_rng(2024)
    worst, disagreements, edge, classes = 0.0, 0, 0, set()
    for _ in range(50):
        k1 = _random_kernel(rng, symmetric=False)
        k2 = _random_kernel(rng, symmetric=rng.random() < 0.7)
        alpha, beta = rng.uniform(0.05, 0.5, 2)
        gh = alpha * beta * rng.uniform(1.2, 8.0)
        p = ModelParams.from_product(alpha, beta, gh)
        K1, K2 = _kernel(*k1), _kernel(*k2)
        prof = locate_speeds(p, K1, K2)
        c_l, c_r, interior = grid_extrema(k1, k2, alpha, beta, gh)
        edge += not interior
        worst = max(worst, abs(prof.c_l_star - c_l), abs(prof.c_r_star - c_r))
        by_lambda = classify_propagation(Dispersion.from_params(p, K1, K2).lambda_set())
        disagreements += prof.classification is not by_lambda
        disagreements += prof.classification not in classify_by_speeds(c_l, c_r)
        classes.add(str(prof.classification))
    ok = worst < 1e-4 and disagreements == 0 and edge == 0
    verdict(4, ok, f"50 configs, max |speed - grid| = {worst:.2e}, {disagreements} class disagreements, "
                   f"classes seen {sorted(classes)}")


# -- criteria 5-7: simulations ----------------------------------------------------

def test_criterion_5_compact_data_speed(verdict):
    t0 = time.perf_counter()
    cfg = load(SCENARIOS / "symmetric.cfg", ["grid.dx=0.085", "grid.halfwidth=340"])
    rep = run(cfg)
    secs = time.perf_counter() - t0
    row = rep.summary_row()
    n = rep.plan.sim.grid.n
    ok = (row["rel_err_right"] < 0.05 and row["rel_err_left"] < 0.05
          and min(row["r2_left"], row["r2_right"]) > 0.999 and secs < 60)
    verdict(5, ok, f"n={n} c_fit=({row['c_left_fit']:.5f}, {row['c_right_fit']:.5f}) "
                   f"c*=({row['c_l_star']:.5f}, {row['c_r_star']:.5f}) "
                   f"rel_err=({row['rel_err_left']:.4f}, {row['rel_err_right']:.4f}) "
                   f"r2_min={min(row['r2_left'], row['r2_right']):.7f} in {secs:.1f}s")


def test_criterion_6_exponential_tails(verdict):
    t0 = time.perf_counter()
    fits, errs = [], []
    for frac in (0.4, 0.6, 0.8):
        cfg = load(SCENARIOS / "symmetric.cfg",
                   ["initial.kind=exponential", f"initial.rate_fraction={frac}"])
        rep = run(cfg)
        row = rep.summary_row()
        fits.append(row["c_right_fit"])
        errs.append(max(row["rel_err_left"], row["rel_err_right"]))
    secs = time.perf_counter() - t0
    decreasing = fits[0] > fits[1] > fits[2]
    ok = max(errs) < 0.05 and decreasing and secs < 180
    verdict(6, ok, f"c_fit={[round(f, 5) for f in fits]} max rel_err={max(errs):.2e} "
                   f"decreasing={decreasing} in {secs:.1f}s")


def test_criterion_7_direction_selection(verdict):
    base = load(SCENARIOS / "uniform.cfg")
    low = run(base.with_value("kernel.v.sigma", 0.5 * SIGMA_STAR_UNIFORM))
    high = run(base.with_value("kernel.v.sigma", 2.0 * SIGMA_STAR_UNIFORM))
    dx = low.plan.sim.grid.dx
    t, xl, _ = low.result.trace.arrays()
    burn = t >= 0.5 * t[-1]
    # interpolated crossings may wobble by rounding, never by a cell
    left_nondecreasing = bool(np.all(np.diff(xl[burn]) >= -1e-9 * dx))
    t, xl2, xr2 = high.result.trace.arrays()
    outward = bool(xl2[-1] < xl2[burn][0] and xr2[-1] > xr2[burn][0])
    cls_low, cls_high = str(low.plan.profile.classification), str(high.plan.profile.classification)
    ok = cls_low == "RightOnly" and left_nondecreasing and cls_high == "Bidirectional" and outward
    verdict(7, ok, f"0.5 sigma*: {cls_low}, left front nondecreasing={left_nondecreasing} "
                   f"(fit {low.fit.c_left:.4f}); 2 sigma*: {cls_high}, both outward={outward} "
                   f"(fit {high.fit.c_left:.4f}, {high.fit.c_right:.4f})")


# -- criterion 8: oracle suite ------------------------------------------------------

def test_criterion_8_oracle_suite(verdict):
    t0 = time.perf_counter()
    results = {}

    sym = plan(load(SCENARIOS / "symmetric.cfg", ["time.horizon=100", "time.snapshot_stride=1"]))
    res = simulate(sym.sim)
    system = Dispersion.from_params(sym.sim.params, sym.sim.kernel_u, sym.sim.kernel_v)
    branches = speed_branches(system, sym.profile.lambda_l_star, sym.profile.lambda_r_star)
    gamma = minimal_gamma(res.x, res.u[0], res.v[0], branches)
    gap = domination_gap(res, gamma, branches)
    results["upper-solution"] = (gap <= 1e-8, f"excess {gap:.1e}")

    kernels = (sym.sim.kernel_u, sym.sim.kernel_v)
    mono = [check_monotone(res.snapshot(k), kernels) for k in range(len(res.times))]
    results["monotone"] = (all(mono), f"{sum(mono)}/{len(mono)} snapshots")

    rng = np.random.default_rng(8)
    base = small_config(halfwidth=60.0, horizon=20.0, k1=Normal(0.4, 1.0), k2=Uniform(-1.0, 1.5))
    ordered = 0
    for _ in range(10):
        a, b = random_ordered_pair(rng, base.grid)
        ordered += check_comparison(simulate(dataclasses.replace(base, initial=a)),
                                    simulate(dataclasses.replace(base, initial=b)))
    results["comparison"] = (ordered == 10, f"{ordered}/10 pairs")

    worst = 0.0
    for _ in range(10):
        w = rng.random(rng.integers(2, 300))
        k = Tabulated(0.05, -0.05 * rng.integers(0, w.size), w)
        f = rng.random(rng.integers(400, 3000))
        worst = max(worst, float(np.max(np.abs(convolve(k, f, 0.05) - convolve(k, f, 0.05, "spectral")))))
    grid = sym.sim.grid
    for kern in kernels:
        d, s = Convolver(kern, grid), Convolver(kern, grid, "spectral")
        worst = max(worst, float(np.max(np.abs(d(res.u[-1]) - s(res.u[-1])))))
    results["direct-vs-spectral"] = (worst < 1e-10, f"{worst:.1e}")

    ratio, _errs = rk4_error_ratio()
    results["rk4-order"] = (abs(ratio - 16) <= 0.3 * 16, f"ratio {ratio:.2f}")

    derr = dirac_pointwise_error()
    results["dirac-ode"] = (derr < 1e-6, f"{derr:.1e}")

    secs = time.perf_counter() - t0
    ok = all(v[0] for v in results.values()) and secs < 600
    detail = "; ".join(f"{k} {'ok' if v[0] else 'BAD'} ({v[1]})" for k, v in results.items())
    verdict(8, ok, f"{detail}; {secs:.1f}s")
