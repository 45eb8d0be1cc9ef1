import dataclasses
import math

import numpy as np
import pytest

from helpers import random_ordered_pair, small_config
from nlspread.dispersion import Dispersion, locate_speeds
from nlspread.errors import ConfigMismatch, DomainError, InitialDominationFailure
from nlspread.kernels import Normal, Uniform
from nlspread.model import ModelParams
from nlspread.oracles import (
    NOT_APPLICABLE,
    check_comparison,
    check_monotone,
    domination_gap,
    minimal_gamma,
    profile_branches,
    speed_branches,
    upper_solution,
)
from nlspread.simulation import CompactBump, CustomData, simulate


def sym_profile():
    p = ModelParams.saturating(0.2, 0.2, 0.6, 0.6)
    k = Normal(0.0, 1.0)
    system = Dispersion.from_params(p, k, k)
    prof = locate_speeds(p, k, k)
    return system, prof, (system.b(prof.lambda_l_star), system.b(prof.lambda_r_star))


def test_upper_solution_is_one_inside_the_fronts():
    _system, prof, b_vals = sym_profile()
    gamma = max(1.0, 1 / b_vals[0], 1 / b_vals[1])
    ub, vb = upper_solution(10.0, np.array([0.0, 2.0, -2.0]), gamma, prof, b_vals)
    assert np.all(ub == 1.0) and np.all(vb == 1.0)


def test_upper_solution_branch_junction():
    _system, prof, b_vals = sym_profile()
    gamma = 3.0
    t = 7.0
    x = prof.c_r_star * t + math.log(gamma) / prof.lambda_r_star
    ub, _vb = upper_solution(t, np.array([x]), gamma, prof, b_vals)
    assert ub[0] == pytest.approx(1.0, abs=1e-14)


def test_upper_solution_rejects_small_gamma():
    _system, prof, b_vals = sym_profile()
    with pytest.raises(DomainError):
        upper_solution(0.0, np.zeros(1), 0.5, prof, b_vals)


def test_upper_solution_checks_initial_domination():
    _system, prof, b_vals = sym_profile()
    x = np.linspace(-10, 10, 201)
    with pytest.raises(InitialDominationFailure):
        upper_solution(0.0, x, 1.0 / min(b_vals) + 1e-9, prof, b_vals, np.ones_like(x), np.ones_like(x))


def test_envelope_dominates_simulation():
    cfg = small_config(halfwidth=60.0, horizon=30.0)
    res = simulate(cfg)
    system = Dispersion.from_params(cfg.params, cfg.kernel_u, cfg.kernel_v)
    prof = locate_speeds(cfg.params, cfg.kernel_u, cfg.kernel_v)
    branches = speed_branches(system, prof.lambda_l_star, prof.lambda_r_star)
    u0, v0 = res.u[0], res.v[0]
    gamma = minimal_gamma(res.x, u0, v0, branches)
    assert domination_gap(res, gamma, branches) <= 1e-8
    # same branches through the profile helper
    b_vals = (branches[0].b, branches[1].b)
    assert profile_branches(prof, b_vals) == branches


def test_comparison_identical_runs():
    res = simulate(small_config(horizon=5.0))
    assert check_comparison(res, res)


def test_comparison_half_data():
    cfg = small_config(halfwidth=100.0, horizon=50.0, snapshot_every=5.0)
    hi = simulate(cfg)
    lo = simulate(dataclasses.replace(cfg, initial=CompactBump(0.0, 5.0, 0.5)))
    assert check_comparison(hi, lo)


def test_comparison_random_pairs():
    rng = np.random.default_rng(11)
    base = small_config(halfwidth=40.0, horizon=10.0, k1=Normal(0.3, 1.0), k2=Uniform(-1.0, 1.5))
    for _ in range(3):
        a, b = random_ordered_pair(rng, base.grid)
        ra = simulate(dataclasses.replace(base, initial=a))
        rb = simulate(dataclasses.replace(base, initial=b))
        assert check_comparison(ra, rb)


def test_comparison_rejects_unordered_data():
    cfg = small_config(horizon=2.0)
    a = simulate(cfg)
    b = simulate(dataclasses.replace(cfg, initial=CompactBump(3.0, 5.0, 1.0)))
    with pytest.raises(DomainError):
        check_comparison(a, b)


def test_comparison_rejects_different_setups():
    a = simulate(small_config(horizon=2.0))
    b = simulate(small_config(horizon=2.0, k1=Normal(0.0, 2.0)))
    with pytest.raises(ConfigMismatch):
        check_comparison(a, b)


def test_monotone_initial_bump():
    cfg = small_config()
    res = simulate(dataclasses.replace(cfg, horizon=1.0))
    assert check_monotone(res.snapshot(0), (cfg.kernel_u, cfg.kernel_v)) is True


def test_monotone_after_100_steps():
    cfg = small_config(horizon=5.0)
    res = simulate(cfg)
    assert check_monotone(res.snapshot(len(res.times) - 1), (cfg.kernel_u, cfg.kernel_v)) is True


def test_monotone_detects_asymmetry():
    cfg = small_config(horizon=1.0)
    u = np.exp(-((cfg.grid.x - 1.0) ** 2))
    res = simulate(dataclasses.replace(cfg, initial=CustomData(u, u)))
    assert check_monotone(res.snapshot(0)) is False


def test_monotone_not_applicable_for_asymmetric_kernel():
    cfg = small_config(k1=Normal(0.5, 1.0), horizon=1.0)
    res = simulate(cfg)
    assert check_monotone(res.snapshot(0), (cfg.kernel_u, cfg.kernel_v)) is NOT_APPLICABLE
    with pytest.raises(TypeError):
        bool(NOT_APPLICABLE)
