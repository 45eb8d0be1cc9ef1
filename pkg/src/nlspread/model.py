"""Reaction nonlinearities and model parameters with hypothesis checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, HypothesisViolation

_CHECK_POINTS = 1000
_TOL = 1e-10


class Nonlinearity:
    """A map ``[0, 1] -> [0, cap]`` with ``value(0) = 0`` and ``value(1) = cap``."""

    cap: float
    slope0: float

    def __call__(self, x):
        raise NotImplementedError

    def derivative(self, x):
        raise NotImplementedError

    @property
    def is_saturating(self) -> bool:
        return False


@dataclass(frozen=True)
class Saturating(Nonlinearity):
    """``slope0*x / (1 + (slope0/cap - 1)*x)``; concave when ``slope0 > cap``."""

    slope0: float
    cap: float

    def __post_init__(self):
        if not (self.slope0 > 0 and self.cap > 0):
            raise DomainError("slope0 and cap must be positive")

    @property
    def bend(self) -> float:
        return self.slope0 / self.cap - 1.0

    def __call__(self, x):
        return self.slope0 * x / (1.0 + self.bend * x)

    def derivative(self, x):
        return self.slope0 / (1.0 + self.bend * x) ** 2

    @property
    def is_saturating(self):
        return True


def Linear(cap: float) -> Saturating:
    """``x -> cap*x``; the saturating form with ``slope0 == cap``."""
    return Saturating(cap, cap)


class Custom(Nonlinearity):
    """Monotone cubic interpolant through user-supplied ``(x, y)`` points."""

    def __init__(self, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs[0] != 0.0 or xs[-1] != 1.0 or np.any(np.diff(xs) <= 0):
            raise DomainError("custom nonlinearity nodes must increase from 0 to 1")
        self._spline = PchipInterpolator(xs, ys)
        self._dspline = self._spline.derivative()
        self.xs, self.ys = xs, ys
        self.cap = float(ys[-1])
        self.slope0 = float(self._dspline(0.0))

    def __call__(self, x):
        out = self._spline(np.clip(x, 0.0, 1.0))
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, x):
        out = self._dspline(np.clip(x, 0.0, 1.0))
        return float(out) if np.ndim(out) == 0 else out

    def __eq__(self, other):
        return (
            isinstance(other, Custom)
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.ys, other.ys)
        )

    def __hash__(self):
        return hash((self.xs.tobytes(), self.ys.tobytes()))


def _slope_at_zero(f, h=1e-3, levels=4):
    # one-sided differences with Richardson extrapolation
    table = [(f(h / 2**i) - f(0.0)) / (h / 2**i) for i in range(levels)]
    for j in range(1, levels):
        table = [(2**j * table[i + 1] - table[i]) / (2**j - 1) for i in range(len(table) - 1)]
    return float(table[0])


@dataclass(frozen=True)
class ModelParams:
    """Death rates ``alpha`` (agent), ``beta`` (human) and couplings ``h``, ``g``.

    ``h`` feeds the agent equation and must satisfy ``h(1) = alpha``;
    ``g`` feeds the human equation and must satisfy ``g(1) = beta``.
    """

    alpha: float
    beta: float
    g: Nonlinearity
    h: Nonlinearity

    @property
    def g0(self) -> float:
        return self.g.slope0

    @property
    def h0(self) -> float:
        return self.h.slope0

    @property
    def gh(self) -> float:
        return self.g.slope0 * self.h.slope0

    @classmethod
    def saturating(cls, alpha, beta, g_slope, h_slope, check=True):
        p = cls(alpha, beta, Saturating(g_slope, beta), Saturating(h_slope, alpha))
        if check:
            p.check()
        return p

    @classmethod
    def from_product(cls, alpha, beta, gh, check=True):
        """Split ``g'(0) h'(0) = gh`` as ``g'(0) = t*beta``, ``h'(0) = t*alpha``."""
        if not gh > alpha * beta:
            raise HypothesisViolation("need alpha*beta < g'(0)h'(0)")
        t = math.sqrt(gh / (alpha * beta))
        return cls.saturating(alpha, beta, t * beta, t * alpha, check=check)

    def check(self):
        """Raise ``HypothesisViolation`` unless (H1), (H2) and the slope bound hold."""
        a, b, g, h = self.alpha, self.beta, self.g, self.h
        if not (a > 0 and b > 0):
            raise HypothesisViolation("alpha and beta must be positive")
        for name, f, cap in (("g", g, b), ("h", h, a)):
            if abs(f(0.0)) > _TOL:
                raise HypothesisViolation(f"{name}(0) must be 0")
            if abs(f(1.0) - cap) > _TOL:
                raise HypothesisViolation(f"{name}(1) must equal {cap}")
            if abs(_slope_at_zero(f) - f.slope0) > 1e-8 * max(1.0, f.slope0):
                raise HypothesisViolation(f"{name}'(0) does not match its declared slope")
        if not a * b < self.gh:
            raise HypothesisViolation("need alpha*beta < g'(0)h'(0)")
        s = np.linspace(0.0, 1.0, _CHECK_POINTS + 2)[1:-1]
        for name, f in (("g", g), ("h", h)):
            vals = np.asarray(f(s), dtype=float)
            if np.any(vals <= 0) or np.any(vals > f.slope0 * s * (1 + _TOL) + _TOL):
                raise HypothesisViolation(f"(H2): need 0 < {name}(x) <= {name}'(0) x")
            if np.any(np.asarray(f.derivative(s)) < -_TOL):
                raise HypothesisViolation(f"(H2): {name} must be nondecreasing")
        if np.any(np.asarray(h(np.asarray(g(s)) / b)) - a * s <= 0):
            raise HypothesisViolation("(H1): need h(g(s)/beta) > alpha s on (0, 1)")
        return self
