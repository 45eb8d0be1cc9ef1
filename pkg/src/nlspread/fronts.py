"""Front tracking and empirical speed estimation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import DomainError, InsufficientSamples

MIN_SAMPLES = 20
DEFAULT_WINDOW = 0.5


@dataclass(frozen=True)
class SpeedFit:
    c_left: float
    c_right: float
    r2_left: float
    r2_right: float


@dataclass
class FrontTrace:
    """Outermost crossings of ``min(u, v) = nu`` recorded over time."""

    nu: float = 0.1
    t: list = field(default_factory=list)
    x_left: list = field(default_factory=list)
    x_right: list = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 < self.nu < 1.0:
            raise DomainError("front threshold nu must lie in (0, 1)")

    def record(self, t, grid, u, v):
        if self.t and t <= self.t[-1]:
            raise DomainError("front samples must be strictly increasing in time")
        m = np.minimum(u, v)
        il, ir = _backend.core.outer_crossings(np.ascontiguousarray(m), self.nu)
        self.t.append(float(t))
        self.x_left.append(grid.x0 + grid.dx * il)
        self.x_right.append(grid.x0 + grid.dx * ir)

    def arrays(self):
        return np.asarray(self.t), np.asarray(self.x_left), np.asarray(self.x_right)

    def __len__(self):
        return len(self.t)

    def fit(self, window: float = DEFAULT_WINDOW) -> SpeedFit:
        return estimate_speed(self, window)


def _line_fit(t, x):
    slope, intercept = np.polyfit(t, x, 1)
    resid = x - (slope * t + intercept)
    ss_tot = float(np.sum((x - x.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    # constant samples lie on a line exactly; ss_res is polyfit roundoff
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


def estimate_speed(trace: FrontTrace, window: float = DEFAULT_WINDOW) -> SpeedFit:
    """Least-squares slopes of both fronts over the final ``window`` of samples.

    The window is measured in time: samples with ``t >= (1 - window) * t_end``.
    A stationary front yields slope 0 and ``r2 = 1``.
    """
    if not 0.0 < window <= 1.0:
        raise DomainError("fit window must lie in (0, 1]")
    t, xl, xr = trace.arrays()
    if t.size == 0:
        raise InsufficientSamples("empty front trace")
    keep = t >= (1.0 - window) * t[-1] - 1e-12
    keep &= np.isfinite(xl) & np.isfinite(xr)
    if int(keep.sum()) < MIN_SAMPLES:
        raise InsufficientSamples(f"{int(keep.sum())} samples in window, need {MIN_SAMPLES}")
    cl, rl = _line_fit(t[keep], xl[keep])
    cr, rr = _line_fit(t[keep], xr[keep])
    return SpeedFit(cl, cr, rl, rr)


def speed_tolerance(target: float, dx: float, t_window: float, rel: float = 0.05) -> float:
    """``max(rel*|target|, 2*dx/t_window)``: the agreed empirical-speed band."""
    return max(rel * abs(target), 2.0 * dx / t_window)


def relative_error(fit: float, target: float) -> float:
    if target == 0:
        return math.inf if fit != 0 else 0.0
    return abs(fit - target) / abs(target)
