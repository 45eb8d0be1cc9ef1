/* Direct convolution vectorized across outputs.
 *
 * Each output is a left-to-right sum over kernel taps, so the result does not
 * depend on vector width. Blocks of 32 consecutive outputs are accumulated in
 * four 8-lane registers; GCC/Clang vector extensions map them to whatever SIMD
 * the target has.
 */
#ifndef NLSPREAD_CONV_H
#define NLSPREAD_CONV_H

#include <string.h>

typedef double nls_v8 __attribute__((vector_size(64)));

#define NLS_LANES 8
#define NLS_NB 4
#define NLS_BLOCK (NLS_LANES * NLS_NB)

/* Scratch sizes needed by nls_convolve for n outputs and M taps. */
static inline Py_ssize_t nls_pad_len(Py_ssize_t n, Py_ssize_t M, Py_ssize_t shift) {
    Py_ssize_t nb = (n + NLS_BLOCK - 1) / NLS_BLOCK * NLS_BLOCK;
    Py_ssize_t off = shift + M - 1 > 0 ? shift + M - 1 : 0;
    Py_ssize_t kmax = nb - 1 - shift;
    Py_ssize_t top = kmax + 1 > n ? kmax + 1 : n;
    return off + top + NLS_LANES;
}

static inline Py_ssize_t nls_out_len(Py_ssize_t n) {
    return (n + NLS_BLOCK - 1) / NLS_BLOCK * NLS_BLOCK;
}

/* out[i] = scale * sum_m w[m] * f[i - shift - m], zero outside [0, n).
 * pad and ob are caller-provided scratch of nls_pad_len and nls_out_len. */
static void nls_convolve(const double *w, Py_ssize_t M, const double *f, Py_ssize_t n,
                         Py_ssize_t shift, double scale, double *out,
                         double *pad, double *ob) {
    Py_ssize_t nb = nls_out_len(n);
    Py_ssize_t off = shift + M - 1 > 0 ? shift + M - 1 : 0;
    Py_ssize_t len = nls_pad_len(n, M, shift);
    Py_ssize_t first = 0, last = n - 1;
    while (first < n && f[first] == 0.0) first++;
    while (last >= first && f[last] == 0.0) last--;
    memset(pad, 0, (size_t)len * sizeof(double));
    memcpy(pad + off, f, (size_t)n * sizeof(double));
    for (Py_ssize_t i = 0; i < nb; i += NLS_BLOCK) {
        /* block reads f[i - shift - (M-1) .. i + BLOCK - 1 - shift] */
        if (i + NLS_BLOCK - 1 - shift < first || i - shift - (M - 1) > last) {
            memset(ob + i, 0, NLS_BLOCK * sizeof(double));
            continue;
        }
        nls_v8 acc[NLS_NB];
        for (int q = 0; q < NLS_NB; q++) acc[q] = (nls_v8){0};
        const double *p = pad + off + i - shift;
        for (Py_ssize_t m = 0; m < M; m++) {
            double wm = w[m];
            const double *pm = p - m;
            for (int q = 0; q < NLS_NB; q++) {
                nls_v8 x;
                memcpy(&x, pm + NLS_LANES * q, sizeof(x));
                acc[q] += wm * x;
            }
        }
        for (int q = 0; q < NLS_NB; q++) {
            acc[q] *= scale;
            memcpy(ob + i + NLS_LANES * q, &acc[q], sizeof(nls_v8));
        }
    }
    memcpy(out, ob, (size_t)n * sizeof(double));
}

#endif
