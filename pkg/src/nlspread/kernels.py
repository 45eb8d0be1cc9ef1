"""Dispersal kernels and their moment-generating functions.

Four variants are supported: ``Normal``, ``Uniform``, ``Dirac`` and
``Tabulated``. Every kernel exposes ``mgf(lam, order)`` returning the
``order``-th derivative of ``lam -> int k(x) exp(lam x) dx``; for tabulated
kernels the integral is the midpoint sum on the cell-centre grid, i.e. the
same discrete operator the simulator uses.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._roots import bisect
from .errors import (
    BracketFailure,
    DomainError,
    GridMismatch,
    HypothesisViolation,
    MGFOverflow,
    TailMassTooLarge,
    ZeroNegativeMass,
)

#: Largest exponent handed to ``exp``; beyond this the MGF raises ``MGFOverflow``.
EXP_CAP = 700.0
#: Default tail tolerance when discretizing; larger truncated mass is an error.
MAX_TAIL_MASS = 1e-8

_SERIES_TERMS = 48


def _guard(exponent):
    if exponent > EXP_CAP:
        raise MGFOverflow(f"exponent {exponent:.6g} exceeds {EXP_CAP}")


class Kernel:
    """Common interface of all kernel variants."""

    degenerate = False

    def mgf(self, lam: float, order: int = 0) -> float:
        raise NotImplementedError

    @property
    def mean(self) -> float:
        return self.mgf(0.0, 1)

    def reflect(self) -> "Kernel":
        raise NotImplementedError

    @property
    def is_symmetric(self) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class Normal(Kernel):
    mean_: float
    var: float

    def __post_init__(self):
        if not self.var > 0:
            raise DomainError(f"normal kernel variance must be positive, got {self.var}")

    @property
    def mean(self) -> float:
        return self.mean_

    @property
    def std(self) -> float:
        return math.sqrt(self.var)

    def mgf(self, lam, order=0):
        a, s = self.mean_, self.var
        e = a * lam + 0.5 * s * lam * lam
        _guard(e)
        m = math.exp(e)
        if order == 0:
            return m
        slope = a + s * lam
        if order == 1:
            return slope * m
        if order == 2:
            return (slope * slope + s) * m
        raise ValueError("order must be 0, 1 or 2")

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-((x - self.mean_) ** 2) / (2 * self.var)) / math.sqrt(2 * math.pi * self.var)

    def reflect(self):
        return Normal(-self.mean_, self.var)

    @property
    def is_symmetric(self):
        return self.mean_ == 0.0

    def default_radius(self) -> float:
        return 10.0 * self.std + abs(self.mean_)

    def mass_outside(self, lo: float, hi: float) -> float:
        z = math.sqrt(2 * self.var)
        return 0.5 * math.erfc((self.mean_ - lo) / z) + 0.5 * math.erfc((hi - self.mean_) / z)


@dataclass(frozen=True)
class Uniform(Kernel):
    """Uniform density on ``[lower, upper]`` with ``lower < 0 < upper``."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (self.lower < 0 < self.upper):
            raise DomainError(
                f"uniform kernel needs lower < 0 < upper, got [{self.lower}, {self.upper}]"
            )

    @property
    def width(self):
        return self.upper - self.lower

    def _moment(self, n):
        a, b = self.upper, self.lower
        return (a ** (n + 1) - b ** (n + 1)) / ((n + 1) * (a - b))

    def mgf(self, lam, order=0):
        if order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        a, b = self.upper, self.lower
        _guard(max(a * lam, b * lam))
        radius = max(a, -b)
        if abs(lam) * radius < 1.0:
            # Taylor series in lam; the closed forms cancel badly near 0.
            total, fact = 0.0, 1.0
            for n in range(_SERIES_TERMS):
                if n:
                    fact *= n
                total += self._moment(n + order) * lam**n / fact
            return total
        ea, eb = math.exp(a * lam), math.exp(b * lam)
        za, zb = a * lam, b * lam
        w = a - b
        if order == 0:
            return (ea - eb) / (w * lam)
        if order == 1:
            return ((za - 1) * ea - (zb - 1) * eb) / (w * lam * lam)
        return ((za * za - 2 * za + 2) * ea - (zb * zb - 2 * zb + 2) * eb) / (w * lam**3)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lower) & (x <= self.upper), 1.0 / self.width, 0.0)

    def reflect(self):
        return Uniform(-self.upper, -self.lower)

    @property
    def is_symmetric(self):
        return self.upper == -self.lower


@dataclass(frozen=True)
class Dirac(Kernel):
    """Point mass at the origin; models a non-dispersing component."""

    degenerate = True

    def mgf(self, lam, order=0):
        return 1.0 if order == 0 else 0.0

    def reflect(self):
        return self

    @property
    def is_symmetric(self):
        return True


@dataclass(frozen=True, eq=False)
class Tabulated(Kernel):
    """Density values ``weights[i]`` at ``x0 + i*dx`` normalized so ``dx*sum = 1``."""

    dx: float
    x0: float
    weights: np.ndarray
    tail_mass: float = 0.0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if not self.dx > 0:
            raise DomainError("dx must be positive")
        if w.ndim != 1 or w.size == 0:
            raise DomainError("weights must be a non-empty vector")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise DomainError("weights must be finite and nonnegative")
        total = self.dx * w.sum()
        if total <= 0:
            raise DomainError("kernel has zero mass")
        w = w / total
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def x(self) -> np.ndarray:
        if "x" not in self._cache:
            xs = self.x0 + self.dx * np.arange(self.weights.size)
            xs.setflags(write=False)
            self._cache["x"] = xs
        return self._cache["x"]

    @property
    def offset_cells(self) -> int:
        """Index offset of ``weights[0]`` relative to the origin cell."""
        q = self.x0 / self.dx
        k = round(q)
        if abs(q - k) > 1e-9:
            raise GridMismatch("kernel nodes are not aligned with integer multiples of dx")
        return int(k)

    @property
    def degenerate(self):
        return self.weights.size == 1 and abs(self.x0) < 0.5 * self.dx

    def mgf(self, lam, order=0):
        xs = self.x
        e = lam * xs
        _guard(float(e.max()))
        terms = self.weights * np.exp(e)
        if order:
            terms = terms * xs**order
        return float(self.dx * terms.sum())

    def reflect(self):
        w = self.weights[::-1].copy()
        x0 = -(self.x0 + self.dx * (self.weights.size - 1))
        return Tabulated(self.dx, x0, w, self.tail_mass)

    @property
    def is_symmetric(self):
        r = self.reflect()
        return abs(r.x0 - self.x0) < 1e-12 * max(1.0, abs(self.x0)) and np.allclose(
            r.weights, self.weights, rtol=1e-13, atol=0.0
        )

    def check_two_sided(self):
        """Require positive density on both half-lines unless degenerate."""
        if self.degenerate:
            return
        xs, w = self.x, self.weights
        if not (np.any((xs > 0) & (w > 0)) and np.any((xs < 0) & (w > 0))):
            raise HypothesisViolation("tabulated kernel must carry mass on both sides of 0")


def mgf(k: Kernel, lam: float) -> float:
    return k.mgf(lam)


def reflect(k: Kernel) -> Kernel:
    return k.reflect()


def asymmetry_infimum(k: Kernel) -> float:
    """``inf over lam`` of the MGF; equals 1 exactly for zero-mean kernels."""
    if k.degenerate:
        return 1.0
    m = k.mgf(0.0, 1)
    if m == 0.0:
        return 1.0
    direction = -1.0 if m > 0 else 1.0
    step = 1.0
    lo = 0.0
    for _ in range(200):
        hi = direction * step
        try:
            d = k.mgf(hi, 1)
        except MGFOverflow as exc:
            raise BracketFailure("MGF derivative never changed sign") from exc
        if (d > 0) != (m > 0):
            break
        lo = hi
        step *= 2.0
    else:
        raise BracketFailure("MGF derivative never changed sign")
    lam = bisect(lambda t: k.mgf(t, 1), min(lo, hi), max(lo, hi), xtol=1e-14)
    return min(1.0, k.mgf(lam))


def _phi_ratio(r: float) -> float:
    """``M1/M2`` of a normal kernel with asymmetry level ``r = mean/sqrt(2 var)``."""
    if r == 0.0:
        return 1.0
    if r < 0:
        return 1.0 / _phi_ratio(-r)
    denom = math.exp(-r * r) / (r * math.sqrt(math.pi)) - math.erfc(r)
    return 2.0 / denom + 1.0


def asymmetry_ratio(k: Kernel) -> float:
    """Ratio of the positive to the negative first absolute half-moment."""
    if isinstance(k, Normal):
        return _phi_ratio(k.mean_ / math.sqrt(2 * k.var))
    if isinstance(k, Uniform):
        return (k.upper / k.lower) ** 2
    if isinstance(k, Tabulated):
        xs, w = k.x, k.weights
        m1 = float(k.dx * np.sum(np.where(xs > 0, w * xs, 0.0)))
        m2 = float(k.dx * np.sum(np.where(xs < 0, -w * xs, 0.0)))
        if m2 == 0.0:
            raise ZeroNegativeMass("kernel has no mass on the negative half-line")
        return m1 / m2
    raise ZeroNegativeMass("kernel has no mass on the negative half-line")


def discretize(k: Kernel, dx: float, truncation_radius: float | None = None) -> Tabulated:
    """Cell-centred tabulation of ``k`` on nodes ``j*dx``.

    Normal kernels are sampled at the nodes; uniform kernels use the exact
    overlap of each cell with the support so that partially covered edge
    cells carry partial weight. The result is renormalized to unit mass and
    records the mass lost to truncation.
    """
    if not dx > 0:
        raise DomainError("dx must be positive")
    if isinstance(k, Dirac):
        return Tabulated(dx, 0.0, np.array([1.0 / dx]))
    if isinstance(k, Tabulated):
        if abs(k.dx - dx) > 1e-12 * dx:
            raise GridMismatch(f"tabulated kernel has dx={k.dx}, requested {dx}")
        return k
    if isinstance(k, Normal):
        radius = k.default_radius() if truncation_radius is None else truncation_radius
        J = int(math.ceil(radius / dx - 1e-9))
        edge = (J + 0.5) * dx
        tail = k.mass_outside(-edge, edge)
        if tail > MAX_TAIL_MASS:
            raise TailMassTooLarge(f"truncated mass {tail:.3g} exceeds {MAX_TAIL_MASS}")
        nodes = dx * np.arange(-J, J + 1)
        return Tabulated(dx, nodes[0], k.density(nodes), tail)
    if isinstance(k, Uniform):
        j_lo = int(math.floor(k.lower / dx + 0.5)) - 1
        j_hi = int(math.ceil(k.upper / dx - 0.5)) + 1
        js = np.arange(j_lo, j_hi + 1)
        left = np.maximum((js - 0.5) * dx, k.lower)
        right = np.minimum((js + 0.5) * dx, k.upper)
        w = np.clip(right - left, 0.0, None) / (k.width * dx)
        # cells whose overlap is pure rounding noise are dropped
        w[w < 1e-12 * w.max()] = 0.0
        nz = np.nonzero(w)[0]
        w = w[nz[0] : nz[-1] + 1]
        x0 = js[nz[0]] * dx
        tail = 0.0
        if truncation_radius is not None and truncation_radius < max(k.upper, -k.lower):
            R = truncation_radius
            tail = (max(0.0, k.upper - R) + max(0.0, -R - k.lower)) / k.width
            if tail > MAX_TAIL_MASS:
                raise TailMassTooLarge(f"truncated mass {tail:.3g} exceeds {MAX_TAIL_MASS}")
        return Tabulated(dx, x0, w, tail)
    raise TypeError(f"cannot discretize {type(k).__name__}")


def load_table(path) -> Tabulated:
    """Read a ``x,density`` CSV on a uniform grid into a two-sided kernel."""
    xs, ds = [], []
    with open(Path(path), newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"x", "density"} <= set(reader.fieldnames):
            raise DomainError(f"{path}: expected columns x,density")
        for row in reader:
            try:
                xs.append(float(row["x"]))
                ds.append(float(row["density"]))
            except (TypeError, ValueError):
                raise DomainError(f"{path}:{reader.line_num}: non-numeric entry") from None
    xs = np.asarray(xs)
    if xs.size < 2:
        raise DomainError(f"{path}: need at least two rows")
    steps = np.diff(xs)
    dx = float(steps.mean())
    if dx <= 0 or np.max(np.abs(steps - dx)) > 1e-9 * max(1.0, abs(dx)):
        raise DomainError(f"{path}: x column must be uniformly increasing")
    table = Tabulated(dx, float(xs[0]), np.asarray(ds))
    table.check_two_sided()
    return table
