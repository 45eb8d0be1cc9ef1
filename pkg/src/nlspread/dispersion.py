"""Linearized dispersion relation, spreading speeds and direction classification.

``Dispersion`` bundles everything the linearization at ``(0, 0)`` depends
on: the two death rates, the slopes ``g'(0)``, ``h'(0)`` and the kernels.
The speed functional is ``c(lam) = D(lam)/lam`` with

    A(lam) = M1(lam) - 1 - alpha,   B(lam) = M2(lam) - 1 - beta,
    D(lam) = (A + B + sqrt((A - B)^2 + 4 g'(0) h'(0))) / 2,

where ``M1``, ``M2`` are the kernel MGFs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ._roots import bisect, golden_max
from .errors import (
    BracketFailure,
    DomainError,
    InternalInconsistency,
    MGFOverflow,
)
from .kernels import Kernel, Tabulated
from .model import ModelParams

#: Lambda-set intervals narrower than this are reported as singletons.
SINGLETON_WIDTH = 1e-7
#: Sign tolerance used when cross-checking classification against speeds.
SPEED_SIGN_TOL = 1e-6

LAMBDA_MIN = 1e-8
LAMBDA_MAX = 50.0


class Propagation(str, enum.Enum):
    BIDIRECTIONAL = "Bidirectional"
    RIGHT_ONLY = "RightOnly"
    LEFT_ONLY = "LeftOnly"
    CRITICAL_RIGHT = "CriticalRight"
    CRITICAL_LEFT = "CriticalLeft"

    def __str__(self):
        return self.value


class Interval(NamedTuple):
    lo: float
    hi: float

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def midpoint(self):
        return 0.5 * (self.lo + self.hi)

    def is_singleton(self, tol=SINGLETON_WIDTH):
        return self.width < tol


@dataclass(frozen=True)
class SpeedProfile:
    lambda_l_star: float
    lambda_r_star: float
    c_l_star: float
    c_r_star: float
    lambda_interval: Optional[Interval]
    classification: Propagation

    def as_row(self) -> dict:
        return {
            "lambda_l": self.lambda_l_star,
            "lambda_r": self.lambda_r_star,
            "c_l": self.c_l_star,
            "c_r": self.c_r_star,
            "class": str(self.classification),
        }


def _require_k2(k: Kernel):
    if isinstance(k, Tabulated):
        k.check_two_sided()


@dataclass(frozen=True)
class Dispersion:
    """Linearized system at the trivial state, optionally with slopes reduced by ``eta``."""

    alpha: float
    beta: float
    g0: float
    h0: float
    k1: Kernel
    k2: Kernel
    eta: float = 0.0

    @classmethod
    def from_params(cls, params: ModelParams, k1: Kernel, k2: Kernel, eta: float = 0.0):
        return cls(params.alpha, params.beta, params.g0, params.h0, k1, k2, eta)

    @property
    def gh(self) -> float:
        return (self.g0 - self.eta) * (self.h0 - self.eta)

    def A(self, lam, order=0):
        val = self.k1.mgf(lam, order)
        return val - 1.0 - self.alpha if order == 0 else val

    def B(self, lam, order=0):
        val = self.k2.mgf(lam, order)
        return val - 1.0 - self.beta if order == 0 else val

    def D(self, lam):
        a, b = self.A(lam), self.B(lam)
        return 0.5 * (a + b + math.sqrt((a - b) ** 2 + 4.0 * self.gh))

    def dD(self, lam):
        """Exact derivative of ``D`` from the kernel MGF derivatives."""
        a, b = self.A(lam), self.B(lam)
        da, db = self.A(lam, 1), self.B(lam, 1)
        root = math.sqrt((a - b) ** 2 + 4.0 * self.gh)
        return 0.5 * (da + db + (a - b) * (da - db) / root)

    def c(self, lam):
        if lam == 0:
            raise DomainError("c(lambda) is undefined at lambda = 0")
        return self.D(lam) / lam

    def psi(self, lam):
        """``lam*D'(lam) - D(lam)``; same sign as ``lam * c'(lam)``."""
        return lam * self.dD(lam) - self.D(lam)

    def G(self, c, lam):
        return c * lam - self.A(lam)

    def H(self, c, lam):
        return c * lam - self.B(lam)

    def b(self, lam):
        a, bb = self.A(lam), self.B(lam)
        return (-a + bb + math.sqrt((a - bb) ** 2 + 4.0 * self.h0 * self.g0)) / (2.0 * self.h0)

    # -- extrema ---------------------------------------------------------

    def extremum(self, side: int) -> float:
        """Unique root of ``psi`` on the positive (``side=+1``) or negative axis."""

        def phi(t):
            try:
                return self.psi(side * t)
            except MGFOverflow as exc:
                raise BracketFailure(f"MGF overflow at lambda={side * t:g}") from exc

        t = 0.5
        ft = phi(t)
        if ft > 0:
            hi, fhi = t, ft
            while ft > 0:
                hi, fhi = t, ft
                t *= 0.5
                if t < LAMBDA_MIN:
                    raise BracketFailure("psi positive down to lambda = 1e-8")
                ft = phi(t)
            lo, flo = t, ft
        else:
            lo, flo = t, ft
            while ft <= 0:
                lo, flo = t, ft
                t *= 2.0
                if t > LAMBDA_MAX:
                    raise BracketFailure("psi nonpositive up to lambda = 50")
                ft = phi(t)
            hi, fhi = t, ft
        return side * bisect(phi, lo, hi, xtol=1e-15, flo=flo, fhi=fhi)

    # -- lambda set --------------------------------------------------------

    def _negative_set(self, fun):
        """Open interval where the convex ``fun`` (negative at 0) stays negative."""

        def safe(x):
            try:
                return fun(x)
            except MGFOverflow:
                return math.inf

        ends = []
        for side in (-1.0, 1.0):
            prev, t = 0.0, 0.25
            while t < 1e6 and safe(side * t) < 0:
                prev, t = t, 2.0 * t
            if t >= 1e6:
                ends.append(side * math.inf)
                continue
            root = bisect(lambda u: safe(side * u), prev, t, xtol=1e-15)
            ends.append(side * root)
        return ends[0], ends[1]

    def max_product(self):
        """Maximizer and maximum of ``A*B`` over the set where both are negative.

        Returns ``None`` when that set is unbounded on both sides (both
        kernels degenerate), in which case ``A*B = alpha*beta`` everywhere.
        """
        a_lo, a_hi = self._negative_set(self.A)
        b_lo, b_hi = self._negative_set(self.B)
        lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
        if math.isinf(lo) or math.isinf(hi):
            if math.isinf(lo) and math.isinf(hi):
                return None
            raise InternalInconsistency("negative set of A or B unbounded on one side only")
        lam, val = golden_max(lambda x: self.A(x) * self.B(x), lo, hi, xtol=1e-14)
        return lo, hi, lam, val

    def lambda_set(self) -> Optional[Interval]:
        found = self.max_product()
        if found is None:
            return None
        lo, hi, lam, val = found
        gap = val - self.gh
        if gap < -1e-14 * self.gh:
            return None
        if gap <= 1e-14 * self.gh:
            return Interval(lam, lam)

        def excess(x):
            return self.A(x) * self.B(x) - self.gh

        left = bisect(excess, lo, lam, xtol=1e-15)
        right = bisect(excess, lam, hi, xtol=1e-15)
        return Interval(left, right)


def eval_A(k1: Kernel, alpha: float, lam: float) -> float:
    return k1.mgf(lam) - 1.0 - alpha


def eval_B(k2: Kernel, beta: float, lam: float) -> float:
    return k2.mgf(lam) - 1.0 - beta


def eval_D(params, k1, k2, lam):
    return Dispersion.from_params(params, k1, k2).D(lam)


def eval_c(params, k1, k2, lam):
    return Dispersion.from_params(params, k1, k2).c(lam)


def b_coefficient(params, k1, k2, lam):
    return Dispersion.from_params(params, k1, k2).b(lam)


def lambda_set(params, k1, k2) -> Optional[Interval]:
    return Dispersion.from_params(params, k1, k2).lambda_set()


def classify_propagation(interval: Optional[Interval], tolerance=SINGLETON_WIDTH) -> Propagation:
    if interval is None:
        return Propagation.BIDIRECTIONAL
    positive = interval.midpoint > 0
    if interval.is_singleton(tolerance):
        return Propagation.CRITICAL_RIGHT if positive else Propagation.CRITICAL_LEFT
    return Propagation.LEFT_ONLY if positive else Propagation.RIGHT_ONLY


def classify_by_speeds(c_l: float, c_r: float, tol=SPEED_SIGN_TOL) -> set:
    """All classes compatible with the signs of ``(c_l, c_r)`` at tolerance ``tol``."""
    ok = set()
    if c_l < tol and c_r > -tol:
        ok.add(Propagation.BIDIRECTIONAL)
    if c_l > -tol:
        ok.add(Propagation.RIGHT_ONLY)
    if c_r < tol:
        ok.add(Propagation.LEFT_ONLY)
    if abs(c_r) <= tol:
        ok.add(Propagation.CRITICAL_RIGHT)
    if abs(c_l) <= tol:
        ok.add(Propagation.CRITICAL_LEFT)
    return ok


def _speeds(system: Dispersion):
    lam_r = system.extremum(+1)
    lam_l = system.extremum(-1)
    return lam_l, lam_r, system.c(lam_l), system.c(lam_r)


def locate_speeds(params: ModelParams, k1: Kernel, k2: Kernel) -> SpeedProfile:
    """Spreading speeds, their minimizers and the direction classification."""
    _require_k2(k1)
    _require_k2(k2)
    system = Dispersion.from_params(params, k1, k2)
    lam_l, lam_r, c_l, c_r = _speeds(system)
    if not c_l < c_r:
        raise InternalInconsistency(f"expected c_l* < c_r*, got {c_l} >= {c_r}")
    interval = system.lambda_set()
    cls = classify_propagation(interval)
    if cls not in classify_by_speeds(c_l, c_r):
        raise InternalInconsistency(
            f"lambda-set class {cls} contradicts speeds c_l*={c_l:.3e}, c_r*={c_r:.3e}"
        )
    # a speed within tolerance of zero means Lambda sits at its degenerate
    # point, which is then {lambda*} itself since D(lambda*) = 0 there
    if abs(c_l) <= SPEED_SIGN_TOL and cls in (Propagation.BIDIRECTIONAL, Propagation.RIGHT_ONLY):
        cls, interval = Propagation.CRITICAL_LEFT, Interval(lam_l, lam_l)
    elif abs(c_r) <= SPEED_SIGN_TOL and cls in (Propagation.BIDIRECTIONAL, Propagation.LEFT_ONLY):
        cls, interval = Propagation.CRITICAL_RIGHT, Interval(lam_r, lam_r)
    return SpeedProfile(lam_l, lam_r, c_l, c_r, interval, cls)


def perturbed_speeds(params: ModelParams, k1: Kernel, k2: Kernel, eta: float):
    """``(c_l*(eta), c_r*(eta))`` computed with slopes ``g'(0)-eta``, ``h'(0)-eta``."""
    if not 0 < eta < min(params.g0, params.h0):
        raise DomainError(f"eta must lie in (0, {min(params.g0, params.h0)}), got {eta}")
    system = Dispersion.from_params(params, k1, k2, eta)
    if not params.alpha * params.beta < system.gh:
        raise DomainError("eta too large: alpha*beta >= (g'(0)-eta)(h'(0)-eta)")
    base = _speeds(Dispersion.from_params(params, k1, k2))
    lam_l, lam_r, c_l, c_r = _speeds(system)
    if not base[2] < c_l < c_r < base[3]:
        raise InternalInconsistency("perturbed speeds are not nested inside the unperturbed ones")
    return c_l, c_r


def gh_interval(params: ModelParams, k1: Kernel, k2: Kernel, c: float, eta: float, side: str):
    """Roots ``(gamma, zeta)`` of ``G(c,.)H(c,.) = (g'(0)-eta)(h'(0)-eta)``.

    ``side='right'`` needs ``c`` in ``(c_r*(eta), c_r*)`` and returns
    ``0 < gamma < zeta``; ``side='left'`` needs ``c`` in ``(c_l*, c_l*(eta))``
    and returns ``zeta < gamma < 0``. On the open interval between the roots
    ``G > 0``, ``H > 0`` and ``G*H`` exceeds the threshold.
    """
    if side not in ("left", "right"):
        raise DomainError("side must be 'left' or 'right'")
    if not 0 < eta < min(params.g0, params.h0):
        raise DomainError("eta out of range")
    base = Dispersion.from_params(params, k1, k2)
    pert = Dispersion.from_params(params, k1, k2, eta)
    sgn = 1 if side == "right" else -1
    lam_eta = pert.extremum(sgn)
    c_eta = pert.c(lam_eta)
    c_star = base.c(base.extremum(sgn))
    band = (c_eta, c_star) if sgn > 0 else (c_star, c_eta)
    if not band[0] < c < band[1]:
        raise DomainError(f"c={c} outside the admissible band {band}")
    thr = pert.gh

    def excess(t):
        lam = sgn * t
        return pert.G(c, lam) * pert.H(c, lam) - thr

    def positivity(t):
        lam = sgn * t
        return min(pert.G(c, lam), pert.H(c, lam))

    t_star = abs(lam_eta)
    # beyond t_star, G or H eventually turns negative (both are concave)
    t_prev, t_out = t_star, 2.0 * t_star
    while positivity(t_out) > 0:
        t_prev, t_out = t_out, 2.0 * t_out
        if t_out > 1e4:
            raise BracketFailure("G and H stay positive")
    t_zero = bisect(positivity, t_prev, t_out, xtol=1e-15)
    t_gamma = bisect(excess, 0.0, t_star, xtol=1e-15)
    t_zeta = bisect(excess, t_star, t_zero, xtol=1e-15)
    for t in np.linspace(t_gamma, t_zeta, 102)[1:-1]:
        lam = sgn * t
        if not (pert.G(c, lam) > 0 and pert.H(c, lam) > 0 and excess(t) > 0):
            raise InternalInconsistency("G*H not above threshold between the roots")
    return sgn * t_gamma, sgn * t_zeta


def aux_lemma43(M: float, N: float, L: float, delta: float):
    """Maximum and positivity interval of ``f(y) = M y - N y^(1+d) - L y^(1-d)``.

    Returns ``(Fmax, R, S)``; ``R`` and ``S`` are ``None`` when
    ``M^2 <= 4 L N`` (then ``f <= 0`` on ``y > 0`` and ``Fmax = 0``).
    """
    if not (M > 0 and N > 0 and L > 0 and 0 < delta < 1):
        raise DomainError("need M, N, L > 0 and delta in (0, 1)")
    disc = M * M - 4.0 * L * N
    if disc <= 0:
        return 0.0, None, None
    sq = math.sqrt(disc)
    R = ((M - sq) / (2 * N)) ** (1 / delta)
    S = ((M + sq) / (2 * N)) ** (1 / delta)
    # f'(y) = 0 with z = y^delta: N(1+d) z^2 - M z + L(1-d) = 0; larger root is the max
    a2 = N * (1 + delta)
    z = (M + math.sqrt(M * M - 4 * a2 * L * (1 - delta))) / (2 * a2)
    y = z ** (1 / delta)
    fmax = M * y - N * y ** (1 + delta) - L * y ** (1 - delta)
    return max(fmax, 0.0), R, S


def lemma43_f(y, M, N, L, delta):
    return M * y - N * y ** (1 + delta) - L * y ** (1 - delta)
