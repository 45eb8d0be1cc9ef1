"""Asymmetry index and critical mobility of the second component.

For a kernel ``k1`` with nonnegative mean and a one-parameter family of
symmetric ``k2`` kernels indexed by a mobility ``sigma``, the index
``kappa > 1`` means leftward propagation can be blocked: there is a unique
``sigma*`` below which the lambda set is a nondegenerate interval on the
negative axis (``0 < c_l* < c_r*``) and above which it is empty.
"""

from __future__ import annotations

import math
from typing import Callable

from ._roots import bisect
from .dispersion import Dispersion, Propagation, classify_propagation
from .errors import BracketFailure, DomainError, InternalInconsistency, NoCriticalValue, UnprovenError
from .kernels import Kernel, Normal, Uniform, asymmetry_infimum
from .model import ModelParams

FAMILIES = ("normal", "uniform")


def omega(z):
    return (z - 1.0) * math.exp(z)


def omega_gap(z: float, r: float) -> float:
    """``omega(z) - omega(-r z)`` written with ``expm1`` to survive small ``z``."""
    return (z - 1.0) * math.expm1(z) + (r * z + 1.0) * math.expm1(-r * z) + (1.0 + r) * z


def omega_root(r: float) -> float:
    """Nonzero root ``z_r`` of ``omega(z) = omega(-r z)``; lies in ``(1 - 1/r, 1)``."""
    if not r > 1:
        raise DomainError(f"omega_root needs r > 1, got {r}")
    lo, hi = 1.0 - 1.0 / r, 1.0
    z = bisect(lambda t: omega_gap(t, r), lo, hi, xtol=1e-15)
    if not (lo < z < hi and z > 2.0 * math.log(r) / (1.0 + r)):
        raise InternalInconsistency(f"z_r={z} violates its known bounds")
    return z


def kappa_index(params: ModelParams, k1: Kernel) -> float:
    """Asymmetry index of ``k1`` relative to the reaction strength."""
    gh = params.gh
    a, b = params.alpha, params.beta
    mean = k1.mean
    if mean < 0 and abs(mean) > 1e-15:
        raise DomainError("kappa_index needs a kernel with nonnegative mean; reflect x -> -x first")
    if isinstance(k1, Normal):
        r2 = k1.mean_**2 / (2.0 * k1.var)
        return b * (a + 1.0 - math.exp(-r2)) / gh
    if isinstance(k1, Uniform):
        if k1.upper + k1.lower == 0:
            return a * b / gh
        r = -k1.upper / k1.lower
        z = omega_root(r)
        a_min = k1.mgf(z / k1.lower) - 1.0 - a
        return -b * a_min / gh
    return b * (a + 1.0 - asymmetry_infimum(k1)) / gh


def family_kernel(family: str, sigma: float) -> Kernel:
    """Symmetric ``k2`` with mobility ``sigma``: variance (normal) or half-width (uniform)."""
    if family == "normal":
        return Normal(0.0, sigma)
    if family == "uniform":
        return Uniform(-sigma, sigma)
    raise DomainError(f"unknown kernel family {family!r}; expected one of {FAMILIES}")


def product_gap(params: ModelParams, k1: Kernel, k2: Kernel) -> float:
    """``max A*B`` over the set where both are negative, minus ``g'(0)h'(0)``."""
    system = Dispersion.from_params(params, k1, k2)
    found = system.max_product()
    if found is None:
        return params.alpha * params.beta - params.gh
    return found[3] - system.gh


def sigma_star(
    params: ModelParams,
    k1: Kernel,
    family: str | Callable[[float], Kernel],
    unproven: bool = False,
    xtol: float = 1e-10,
) -> float:
    """Critical mobility at which the lambda set shrinks to a point."""
    if not isinstance(k1, (Normal, Uniform)) and not unproven:
        raise UnprovenError("sigma* for general kernels is conjectural; pass unproven=True")
    kappa = kappa_index(params, k1)
    if kappa <= 1.0:
        raise NoCriticalValue(f"kappa = {kappa:.6g} <= 1: both directions propagate for every sigma")
    make = family if callable(family) else (lambda s: family_kernel(family, s))

    def F(s):
        return product_gap(params, k1, make(s))

    lo, hi = 1e-3, 1.0
    f_lo = F(lo)
    if f_lo <= 0:
        raise BracketFailure(f"F(sigma={lo}) = {f_lo:.3g} is not positive")
    f_hi = F(hi)
    while f_hi > 0:
        lo, f_lo = hi, f_hi
        hi *= 2.0
        if hi > 1e4:
            raise BracketFailure("F(sigma) stays positive up to sigma = 1e4")
        f_hi = F(hi)
    s_star = bisect(F, lo, hi, xtol=xtol, flo=f_lo, fhi=f_hi)
    below = classify_propagation(Dispersion.from_params(params, k1, make(0.9 * s_star)).lambda_set())
    above = classify_propagation(Dispersion.from_params(params, k1, make(1.1 * s_star)).lambda_set())
    if below is not Propagation.RIGHT_ONLY or above is not Propagation.BIDIRECTIONAL:
        raise InternalInconsistency(f"classification around sigma* is {below} / {above}")
    return s_star
