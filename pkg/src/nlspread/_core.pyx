# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: vectorized direct convolution, a fused RK4 step, front crossings."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

NAME = "cython"


cdef extern from "_conv.h" nogil:
    Py_ssize_t nls_pad_len(Py_ssize_t n, Py_ssize_t M, Py_ssize_t shift)
    Py_ssize_t nls_out_len(Py_ssize_t n)
    void nls_convolve(const double* w, Py_ssize_t M, const double* f, Py_ssize_t n,
                      Py_ssize_t shift, double scale, double* out, double* pad, double* ob)


cdef class _Scratch:
    """Padding buffers for one kernel on one grid size."""

    cdef double[::1] pad
    cdef double[::1] ob

    def __init__(self, Py_ssize_t n, Py_ssize_t M, Py_ssize_t shift):
        self.pad = np.empty(nls_pad_len(n, M, shift), dtype=np.float64)
        self.ob = np.empty(nls_out_len(n), dtype=np.float64)


def direct_convolve(const double[::1] w, const double[::1] f, Py_ssize_t shift, double scale):
    """``out[i] = scale * sum_m w[m] * f[i - shift - m]`` with zero extension."""
    cdef Py_ssize_t n = f.shape[0], M = w.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    if n == 0:
        return out_arr
    cdef double[::1] out = out_arr
    cdef _Scratch sc = _Scratch(n, M, shift)
    with nogil:
        nls_convolve(&w[0], M, &f[0], n, shift, scale, &out[0], &sc.pad[0], &sc.ob[0])
    return out_arr


cdef void _stage(const double* w1, Py_ssize_t M1, Py_ssize_t s1, bint id1, double* pad1, double* ob1,
                 const double* w2, Py_ssize_t M2, Py_ssize_t s2, bint id2, double* pad2, double* ob2,
                 Py_ssize_t n, double dx, const double* U, const double* V,
                 double a, double b, double hs, double hb, double gs, double gb,
                 double* cu, double* cv, double* ku, double* kv) noexcept nogil:
    cdef Py_ssize_t i
    if id1:
        for i in range(n):
            cu[i] = U[i]
    else:
        nls_convolve(w1, M1, U, n, s1, dx, cu, pad1, ob1)
    if id2:
        for i in range(n):
            cv[i] = V[i]
    else:
        nls_convolve(w2, M2, V, n, s2, dx, cv, pad2, ob2)
    for i in range(n):
        ku[i] = ((cu[i] - U[i]) - a * U[i]) + hs * V[i] / (1.0 + hb * V[i])
        kv[i] = ((cv[i] - V[i]) - b * V[i]) + gs * U[i] / (1.0 + gb * U[i])


def rk4_saturating(const double[::1] u, const double[::1] v,
                   const double[::1] w1, Py_ssize_t shift1, bint ident1,
                   const double[::1] w2, Py_ssize_t shift2, bint ident2,
                   double dx, double dt, double alpha, double beta,
                   double h_slope, double h_bend, double g_slope, double g_bend):
    """One classical RK4 step with saturating couplings, in a single pass.

    The stage arithmetic follows the numpy path operation by operation.
    """
    cdef Py_ssize_t n = u.shape[0], i, s
    cdef double half = 0.5 * dt, sixth = dt / 6.0, fac
    cdef Py_ssize_t M1 = w1.shape[0], M2 = w2.shape[0]
    cdef _Scratch sc1 = _Scratch(n, M1, shift1)
    cdef _Scratch sc2 = _Scratch(n, M2, shift2)
    work_arr = np.empty((8, n), dtype=np.float64)
    cdef double[:, ::1] work = work_arr
    un_arr = np.empty(n, dtype=np.float64)
    vn_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] un = un_arr
    cdef double[::1] vn = vn_arr
    cdef double* U = &work[0, 0]
    cdef double* V = &work[1, 0]
    cdef double* cu = &work[2, 0]
    cdef double* cv = &work[3, 0]
    cdef double* ku = &work[4, 0]
    cdef double* kv = &work[5, 0]
    cdef double* au = &work[6, 0]
    cdef double* av = &work[7, 0]
    with nogil:
        _stage(&w1[0], M1, shift1, ident1, &sc1.pad[0], &sc1.ob[0],
               &w2[0], M2, shift2, ident2, &sc2.pad[0], &sc2.ob[0],
               n, dx, &u[0], &v[0], alpha, beta, h_slope, h_bend, g_slope, g_bend, cu, cv, ku, kv)
        for i in range(n):
            au[i] = ku[i]
            av[i] = kv[i]
        for s in range(3):
            fac = dt if s == 2 else half
            for i in range(n):
                U[i] = u[i] + fac * ku[i]
                V[i] = v[i] + fac * kv[i]
            _stage(&w1[0], M1, shift1, ident1, &sc1.pad[0], &sc1.ob[0],
                   &w2[0], M2, shift2, ident2, &sc2.pad[0], &sc2.ob[0],
                   n, dx, U, V, alpha, beta, h_slope, h_bend, g_slope, g_bend, cu, cv, ku, kv)
            if s < 2:
                for i in range(n):
                    au[i] = au[i] + 2.0 * ku[i]
                    av[i] = av[i] + 2.0 * kv[i]
            else:
                for i in range(n):
                    au[i] = au[i] + ku[i]
                    av[i] = av[i] + kv[i]
        for i in range(n):
            un[i] = u[i] + sixth * au[i]
            vn[i] = v[i] + sixth * av[i]
    return un_arr, vn_arr


def saturating(const double[::1] x, double slope, double bend):
    cdef Py_ssize_t n = x.shape[0], i
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = slope * x[i] / (1.0 + bend * x[i])
    return out_arr


def outer_crossings(const double[::1] m, double nu):
    """Fractional indices of the outermost level-``nu`` crossings (NaN if none)."""
    cdef Py_ssize_t n = m.shape[0], i, left = -1, right = -1
    for i in range(n):
        if m[i] >= nu:
            left = i
            break
    if left < 0:
        return float("nan"), float("nan")
    for i in range(n - 1, -1, -1):
        if m[i] >= nu:
            right = i
            break
    cdef double xl = left, xr = right
    if left > 0:
        xl = left - (m[left] - nu) / (m[left] - m[left - 1])
    if right < n - 1:
        xr = right + (m[right] - nu) / (m[right] - m[right + 1])
    return xl, xr
