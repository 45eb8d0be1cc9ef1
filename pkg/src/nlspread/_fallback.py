"""Numpy implementations of the compiled inner loops."""

import numpy as np

NAME = "python"


def direct_convolve(w, f, shift, scale):
    """``out[i] = scale * sum_m w[m] * f[i - shift - m]`` with zero extension."""
    n = f.shape[0]
    full = np.convolve(f, w)
    out = np.zeros(n)
    lo, hi = max(0, shift), min(n, shift + full.shape[0])
    if lo < hi:
        out[lo:hi] = full[lo - shift : hi - shift]
    if scale != 1.0:
        out *= scale
    return out


def saturating(x, slope, bend):
    return slope * x / (1.0 + bend * x)


def outer_crossings(m, nu):
    above = np.nonzero(m >= nu)[0]
    if above.size == 0:
        return float("nan"), float("nan")
    left, right = int(above[0]), int(above[-1])
    xl, xr = float(left), float(right)
    if left > 0:
        xl = left - (m[left] - nu) / (m[left] - m[left - 1])
    if right < m.shape[0] - 1:
        xr = right + (m[right] - nu) / (m[right] - m[right + 1])
    return float(xl), float(xr)


def rk4_saturating(u, v, w1, shift1, ident1, w2, shift2, ident2, dx, dt,
                   alpha, beta, h_slope, h_bend, g_slope, g_bend):
    """One classical RK4 step with saturating couplings."""

    def f(U, V):
        cu = U.copy() if ident1 else direct_convolve(w1, U, shift1, dx)
        cv = V.copy() if ident2 else direct_convolve(w2, V, shift2, dx)
        ku = cu - U - alpha * U + saturating(V, h_slope, h_bend)
        kv = cv - V - beta * V + saturating(U, g_slope, g_bend)
        return ku, kv

    a1, b1 = f(u, v)
    a2, b2 = f(u + 0.5 * dt * a1, v + 0.5 * dt * b1)
    a3, b3 = f(u + 0.5 * dt * a2, v + 0.5 * dt * b2)
    a4, b4 = f(u + dt * a3, v + dt * b3)
    un = u + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    vn = v + (dt / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    return un, vn
