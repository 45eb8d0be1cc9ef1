"""Bracketing root finders and a golden-section maximizer.

Everything here is derivative-free and unconditionally convergent once a
valid bracket is supplied.
"""

import math

from .errors import BracketFailure

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect(f, lo, hi, xtol=1e-13, flo=None, fhi=None, maxiter=400):
    """Root of ``f`` on ``[lo, hi]`` given opposite signs at the ends.

    Iterates until the bracket is narrower than ``xtol * (1 + |mid|)`` or an
    exact zero is hit.
    """
    flo = f(lo) if flo is None else flo
    fhi = f(hi) if fhi is None else fhi
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketFailure(f"no sign change on [{lo}, {hi}]")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi or hi - lo <= xtol * (1.0 + abs(mid)):
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def golden_max(f, lo, hi, xtol=1e-12, maxiter=300):
    """Maximizer of a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if b - a <= xtol * (1.0 + abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    if fc >= fd:
        return c, fc
    return d, fd
