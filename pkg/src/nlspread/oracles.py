"""Proof-derived checks on simulated solutions.

The upper solution is a minimum of exponential branches, each of which
solves the linearized system exactly, capped at 1. Envelopes are formed in
log space so far tails neither overflow nor underflow into NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .dispersion import Dispersion, SpeedProfile
from .errors import ConfigMismatch, DomainError, InitialDominationFailure
from .model import ModelParams

COMPARISON_TOL = 1e-8
MONOTONE_TOL = 1e-8


class _NotApplicable:
    """Marker for checks whose preconditions do not hold."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NOT_APPLICABLE"

    def __bool__(self):
        raise TypeError("NOT_APPLICABLE has no truth value; compare with `is`")


NOT_APPLICABLE = _NotApplicable()


@dataclass(frozen=True)
class Branch:
    """``b * exp(lam * (-x + c t))``; ``b`` is the v-to-u amplitude ratio."""

    lam: float
    c: float
    b: float


def profile_branches(profile: SpeedProfile, b_vals) -> tuple:
    b_l, b_r = b_vals
    return (
        Branch(profile.lambda_l_star, profile.c_l_star, b_l),
        Branch(profile.lambda_r_star, profile.c_r_star, b_r),
    )


def speed_branches(system: Dispersion, lam_l: float, lam_r: float) -> tuple:
    """Branches at arbitrary decay rates, used for exponentially decaying data."""
    return (
        Branch(lam_l, system.c(lam_l), system.b(lam_l)),
        Branch(lam_r, system.c(lam_r), system.b(lam_r)),
    )


def envelope_log(t, x, log_gamma, branches):
    """``log`` of ``(ubar, vbar)`` at times ``t`` (scalar) and points ``x``."""
    x = np.asarray(x, dtype=float)
    lu = np.zeros_like(x)
    lv = np.zeros_like(x)
    for br in branches:
        e = log_gamma + br.lam * (-x + br.c * t)
        lu = np.minimum(lu, e)
        lv = np.minimum(lv, e + math.log(br.b))
    return lu, lv


def minimal_gamma(x, u0, v0, branches) -> float:
    """Smallest admissible ``Gamma``: at least 1, ``1/b`` and whatever dominates the data."""
    need = [0.0] + [-math.log(br.b) for br in branches]
    with np.errstate(divide="ignore"):
        lu0, lv0 = np.log(u0), np.log(v0)
    for br in branches:
        e = br.lam * (-np.asarray(x, dtype=float))
        for lf, shift in ((lu0, 0.0), (lv0, math.log(br.b))):
            mask = np.isfinite(lf)
            if mask.any():
                need.append(float(np.max(lf[mask] - e[mask] - shift)))
    return math.exp(max(need))


def upper_solution(t, x, gamma: float, profile: SpeedProfile, b_vals, u0=None, v0=None):
    """Upper envelope ``(ubar, vbar)`` built on the spreading-speed branches.

    When ``u0, v0`` are given the envelope at ``t = 0`` must dominate them,
    otherwise ``InitialDominationFailure`` is raised.
    """
    branches = profile_branches(profile, b_vals)
    return envelope(t, x, gamma, branches, u0, v0)


def envelope(t, x, gamma, branches, u0=None, v0=None):
    floor = max([1.0] + [1.0 / br.b for br in branches])
    if gamma < floor * (1 - 1e-12):
        raise DomainError(f"Gamma={gamma:.6g} is below the required minimum {floor:.6g}")
    log_gamma = math.log(gamma)
    if u0 is not None:
        lu, lv = envelope_log(0.0, x, log_gamma, branches)
        slack = 1e-12
        if np.any(u0 > np.exp(lu) * (1 + slack)) or np.any(v0 > np.exp(lv) * (1 + slack)):
            raise InitialDominationFailure("upper envelope does not dominate the initial data")
    lu, lv = envelope_log(t, x, log_gamma, branches)
    return np.exp(lu), np.exp(lv)


def domination_gap(result, gamma, branches) -> float:
    """Largest excess of ``(u, v)`` over the envelope across all snapshots."""
    x = result.x
    worst = -math.inf
    for k, t in enumerate(result.times):
        ub, vb = envelope(t, x, gamma, branches)
        worst = max(worst, float(np.max(result.u[k] - ub)), float(np.max(result.v[k] - vb)))
    return worst


def _same_setup(a, b):
    ca, cb = a.config, b.config
    if ca.grid != cb.grid:
        raise ConfigMismatch("runs use different grids")
    if ca.params != cb.params:
        raise ConfigMismatch("runs use different model parameters")
    for ka, kb in ((ca.kernel_u, cb.kernel_u), (ca.kernel_v, cb.kernel_v)):
        if ka.x0 != kb.x0 or not np.array_equal(ka.weights, kb.weights):
            raise ConfigMismatch("runs use different kernels")
    if not np.array_equal(a.times, b.times):
        raise ConfigMismatch("runs have different snapshot times")


def check_comparison(run_a, run_b, tol: float = COMPARISON_TOL) -> bool:
    """True iff ``run_a >= run_b - tol`` in both components at every snapshot."""
    _same_setup(run_a, run_b)
    if np.any(run_a.u[0] < run_b.u[0]) or np.any(run_a.v[0] < run_b.v[0]):
        raise DomainError("initial data are not ordered")
    return bool(np.all(run_a.u >= run_b.u - tol) and np.all(run_a.v >= run_b.v - tol))


def check_monotone(state, kernels=(), tol: float = MONOTONE_TOL):
    """Symmetry about the middle cell and decay on the right half.

    Returns ``NOT_APPLICABLE`` when any kernel is asymmetric, since the
    property is only guaranteed for symmetric dispersal.
    """
    if any(not k.is_symmetric for k in kernels):
        return NOT_APPLICABLE
    n = state.u.size
    if n % 2 == 0:
        raise DomainError("monotonicity check needs an odd grid centred on the bump")
    mid = n // 2
    for f in (state.u, state.v):
        if np.max(np.abs(f - f[::-1])) > tol:
            return False
        if np.any(np.diff(f[mid:]) > tol):
            return False
    return True


# -- ODE oracles -----------------------------------------------------------


def homogeneous_ode(params: ModelParams, u0: float, v0: float, t_end: float, rtol=1e-12, atol=1e-14):
    """Spatially constant solution, where convolution acts as the identity."""
    a, b, g, h = params.alpha, params.beta, params.g, params.h

    def f(_t, y):
        return [-a * y[0] + h(y[1]), -b * y[1] + g(y[0])]

    sol = solve_ivp(f, (0.0, t_end), [u0, v0], method="DOP853", rtol=rtol, atol=atol)
    return float(sol.y[0, -1]), float(sol.y[1, -1])


def pointwise_v(params: ModelParams, times, u_hist, v0: float, rtol=1e-11, atol=1e-14):
    """Integrate ``v' = -beta v + g(u(t))`` with ``u`` interpolated from its recorded history."""
    spline = CubicSpline(times, u_hist)
    b, g = params.beta, params.g

    def f(t, y):
        return [-b * y[0] + float(g(float(spline(t))))]

    sol = solve_ivp(f, (times[0], times[-1]), [v0], method="DOP853", t_eval=times,
                    rtol=rtol, atol=atol, max_step=float(times[1] - times[0]))
    return sol.y[0]
