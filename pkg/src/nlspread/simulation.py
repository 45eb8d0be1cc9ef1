"""Method-of-lines simulation of the two-component nonlocal system.

Space is a uniform cell-centred grid; outside it the fields are taken to be
zero. Time stepping is classical fixed-step RK4. The convolution defaults to
direct summation: the zero state is linearly unstable, and the roundoff
floor of an FFT convolution (about 1e-17 everywhere) would grow ahead of the
front and ignite spurious invasion. Direct summation keeps exact zeros zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import fft as sfft

from . import _backend
from .errors import BoundaryContamination, BoxViolation, DomainError, GridMismatch
from .fronts import FrontTrace
from .kernels import Tabulated
from .model import ModelParams, Saturating

BOX_TOL = 1e-9
CONTAMINATION_LEVEL = 1e-6
CONTAMINATION_FRACTION = 0.05


@dataclass(frozen=True)
class Grid:
    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if not (self.dx > 0 and self.n > 0):
            raise DomainError("grid needs dx > 0 and n > 0")

    @classmethod
    def centered(cls, halfwidth: float, dx: float, center: float = 0.0) -> "Grid":
        """Odd-sized grid with a cell centred exactly on ``center``."""
        J = int(math.ceil(halfwidth / dx - 1e-9))
        return cls(center - J * dx, dx, 2 * J + 1)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def length(self) -> float:
        return self.n * self.dx

    def index_of(self, x: float) -> int:
        return int(round((x - self.x0) / self.dx))


@dataclass
class FieldState:
    t: float
    u: np.ndarray
    v: np.ndarray

    def copy(self) -> "FieldState":
        return FieldState(self.t, self.u.copy(), self.v.copy())


# -- initial data ---------------------------------------------------------


@dataclass(frozen=True)
class CompactBump:
    """``height * cos^2`` bump of half-width ``halfwidth`` around ``center``."""

    center: float = 0.0
    halfwidth: float = 5.0
    height: float = 1.0

    def evaluate(self, grid: Grid):
        r = np.abs(grid.x - self.center) / self.halfwidth
        u = np.where(r < 1.0, self.height * np.cos(0.5 * np.pi * np.minimum(r, 1.0)) ** 2, 0.0)
        return u, u.copy()


@dataclass(frozen=True)
class ExponentialTail:
    """Plateau of half-width ``plateau`` then ``amplitude * exp(-rate |x - center|)``."""

    rate: float
    amplitude: float = 1.0
    plateau: float = 0.0
    center: float = 0.0
    floor: float = 1e-300

    def __post_init__(self):
        if not self.rate > 0:
            raise DomainError("decay rate must be positive")
        if self.amplitude * math.exp(-self.rate * self.plateau) > 1.0 + 1e-15:
            raise DomainError("initial data must not exceed 1")

    def evaluate(self, grid: Grid):
        d = np.maximum(np.abs(grid.x - self.center), self.plateau)
        u = self.amplitude * np.exp(-self.rate * d)
        u = np.minimum(np.maximum(u, self.floor), 1.0)
        return u, u.copy()


@dataclass(frozen=True, eq=False)
class CustomData:
    u: np.ndarray
    v: np.ndarray

    def evaluate(self, grid: Grid):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.shape != (grid.n,) or v.shape != (grid.n,):
            raise GridMismatch("custom initial data does not match the grid size")
        if min(u.min(), v.min()) < 0 or max(u.max(), v.max()) > 1:
            raise DomainError("initial data must lie in [0, 1]")
        return u.copy(), v.copy()


# -- convolution ----------------------------------------------------------


class Convolver:
    """``f -> dx * sum_j k(x_i - x_j) f_j`` on a fixed grid with zero extension."""

    def __init__(self, kernel: Tabulated, grid: Grid, method: str = "direct"):
        if abs(kernel.dx - grid.dx) > 1e-12 * grid.dx:
            raise GridMismatch(f"kernel dx={kernel.dx} differs from grid dx={grid.dx}")
        if method not in ("direct", "spectral"):
            raise ValueError("method must be 'direct' or 'spectral'")
        self.kernel = kernel
        self.n = grid.n
        self.dx = grid.dx
        self.method = method
        self.shift = kernel.offset_cells
        self.weights = np.ascontiguousarray(kernel.weights, dtype=float)
        self.identity = kernel.weights.size == 1 and self.shift == 0
        self._spectrum = None

    def __call__(self, f: np.ndarray) -> np.ndarray:
        if self.identity:
            return f.copy()
        if self.method == "direct":
            return _backend.core.direct_convolve(self.weights, f, self.shift, self.dx)
        return self._spectral(f)

    def _spectral(self, f):
        n, M = self.n, self.weights.size
        size = sfft.next_fast_len(n + M - 1, real=True)
        if self._spectrum is None or self._spectrum[0] != size:
            self._spectrum = (size, sfft.rfft(self.weights, size))
        full = sfft.irfft(sfft.rfft(f, size) * self._spectrum[1], size)[: n + M - 1]
        out = np.zeros(n)
        lo, hi = max(0, self.shift), min(n, self.shift + n + M - 1)
        if lo < hi:
            out[lo:hi] = full[lo - self.shift : hi - self.shift]
        return self.dx * out


def convolve(kernel: Tabulated, f: np.ndarray, dx: float, method: str = "direct") -> np.ndarray:
    grid = Grid(0.0, dx, len(f))
    return Convolver(kernel, grid, method)(np.asarray(f, dtype=float))


# -- dynamics ---------------------------------------------------------------


def _apply(f, x):
    if isinstance(f, Saturating):
        return _backend.core.saturating(x, f.slope0, f.bend)
    return np.asarray(f(x), dtype=float)


def rhs(state: FieldState, params: ModelParams, conv1: Convolver, conv2: Convolver):
    u, v = state.u, state.v
    du = conv1(u) - u - params.alpha * u + _apply(params.h, v)
    dv = conv2(v) - v - params.beta * v + _apply(params.g, u)
    return du, dv


def stability_bound(params: ModelParams) -> float:
    return 0.5 / (2.0 + params.alpha + params.beta + params.g0 + params.h0)


def _check_box(u, v, t):
    lo = min(u.min(), v.min())
    hi = max(u.max(), v.max())
    if lo < -BOX_TOL or hi > 1.0 + BOX_TOL or not (np.isfinite(lo) and np.isfinite(hi)):
        raise BoxViolation(f"fields left [0, 1] at t={t:.6g}: range [{lo:.3e}, {hi:.3e}]")
    np.clip(u, 0.0, 1.0, out=u)
    np.clip(v, 0.0, 1.0, out=v)


def _fusable(params, conv1, conv2):
    return (
        isinstance(params.g, Saturating)
        and isinstance(params.h, Saturating)
        and conv1.method == "direct"
        and conv2.method == "direct"
    )


def step(state: FieldState, dt: float, params: ModelParams, conv1: Convolver, conv2: Convolver,
         check_stability: bool = True) -> FieldState:
    """One classical RK4 step; the result is clamped to the box within ``BOX_TOL``.

    Saturating couplings with direct convolution take the fused backend
    path; it agrees with the stage-by-stage path below to roundoff.
    """
    if check_stability and dt > stability_bound(params) * (1 + 1e-12):
        raise DomainError(f"dt={dt} exceeds the stability bound {stability_bound(params):.4g}")
    u, v = state.u, state.v
    if _fusable(params, conv1, conv2):
        g, h = params.g, params.h
        un, vn = _backend.core.rk4_saturating(
            u, v, conv1.weights, conv1.shift, conv1.identity,
            conv2.weights, conv2.shift, conv2.identity,
            conv1.dx, dt, params.alpha, params.beta, h.slope0, h.bend, g.slope0, g.bend,
        )
        t = state.t + dt
        _check_box(un, vn, t)
        return FieldState(t, un, vn)
    a1, b1 = rhs(state, params, conv1, conv2)
    a2, b2 = rhs(FieldState(0, u + 0.5 * dt * a1, v + 0.5 * dt * b1), params, conv1, conv2)
    a3, b3 = rhs(FieldState(0, u + 0.5 * dt * a2, v + 0.5 * dt * b2), params, conv1, conv2)
    a4, b4 = rhs(FieldState(0, u + dt * a3, v + dt * b3), params, conv1, conv2)
    un = u + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    vn = v + (dt / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    t = state.t + dt
    _check_box(un, vn, t)
    return FieldState(t, un, vn)


# -- driver -----------------------------------------------------------------


@dataclass
class SimulationConfig:
    params: ModelParams
    kernel_u: Tabulated
    kernel_v: Tabulated
    grid: Grid
    initial: object
    horizon: float = 200.0
    dt: float = 0.05
    snapshot_every: float = 10.0
    trace_every: float = 0.5
    nu: float = 0.1
    method: str = "direct"
    probes: tuple = ()
    check_boundary: bool = True


@dataclass
class SimulationResult:
    config: SimulationConfig
    times: np.ndarray
    u: np.ndarray
    v: np.ndarray
    trace: FrontTrace
    probe_times: Optional[np.ndarray] = None
    probe_u: Optional[np.ndarray] = None
    probe_v: Optional[np.ndarray] = None
    final: Optional[FieldState] = None

    @property
    def x(self):
        return self.config.grid.x

    def snapshot(self, k: int) -> FieldState:
        return FieldState(float(self.times[k]), self.u[k], self.v[k])


def _every(interval, dt):
    k = int(round(interval / dt))
    if k < 1 or abs(k * dt - interval) > 1e-9 * max(1.0, interval):
        raise DomainError(f"interval {interval} is not a positive multiple of dt={dt}")
    return k


def boundary_level(grid: Grid, u, v) -> float:
    m = max(1, int(math.ceil(CONTAMINATION_FRACTION * grid.n)))
    return float(max(u[:m].max(), u[-m:].max(), v[:m].max(), v[-m:].max()))


def simulate(cfg: SimulationConfig) -> SimulationResult:
    """Advance from the initial data to ``cfg.horizon``.

    Snapshots are stored every ``snapshot_every`` time units, the front
    trace every ``trace_every``; ``probes`` lists cell indices whose values
    are recorded after every step.
    """
    grid = cfg.grid
    conv1 = Convolver(cfg.kernel_u, grid, cfg.method)
    conv2 = Convolver(cfg.kernel_v, grid, cfg.method)
    u0, v0 = cfg.initial.evaluate(grid)
    state = FieldState(0.0, u0, v0)
    _check_box(state.u, state.v, 0.0)
    nsteps = int(round(cfg.horizon / cfg.dt))
    if abs(nsteps * cfg.dt - cfg.horizon) > 1e-9 * max(1.0, cfg.horizon):
        raise DomainError("horizon must be a multiple of dt")
    snap_k = _every(cfg.snapshot_every, cfg.dt)
    trace_k = _every(cfg.trace_every, cfg.dt)
    if cfg.dt > stability_bound(cfg.params) * (1 + 1e-12):
        raise DomainError(f"dt={cfg.dt} exceeds the stability bound {stability_bound(cfg.params):.4g}")

    times, us, vs = [0.0], [state.u.copy()], [state.v.copy()]
    trace = FrontTrace(cfg.nu)
    trace.record(state.t, grid, state.u, state.v)
    probes = list(cfg.probes)
    p_t, p_u, p_v = [], [], []
    if probes:
        p_t.append(0.0)
        p_u.append(state.u[probes].copy())
        p_v.append(state.v[probes].copy())

    for k in range(1, nsteps + 1):
        state = step(state, cfg.dt, cfg.params, conv1, conv2, check_stability=False)
        state.t = k * cfg.dt
        if probes:
            p_t.append(state.t)
            p_u.append(state.u[probes].copy())
            p_v.append(state.v[probes].copy())
        if k % trace_k == 0:
            trace.record(state.t, grid, state.u, state.v)
            if cfg.check_boundary:
                level = boundary_level(grid, state.u, state.v)
                if level > CONTAMINATION_LEVEL:
                    raise BoundaryContamination(
                        f"boundary cells reached {level:.3e} at t={state.t:.6g}"
                    )
        if k % snap_k == 0:
            times.append(state.t)
            us.append(state.u.copy())
            vs.append(state.v.copy())

    return SimulationResult(
        cfg,
        np.asarray(times),
        np.asarray(us),
        np.asarray(vs),
        trace,
        np.asarray(p_t) if probes else None,
        np.asarray(p_u) if probes else None,
        np.asarray(p_v) if probes else None,
        state,
    )
