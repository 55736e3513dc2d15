# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Wigner-grid kernel.

Same recurrence as ``magnonadd._kernels_py.wigner_points``; keep the two in
step. Points are processed in blocks so the innermost loop runs over
independent points (no loop-carried dependency) and vectorizes.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, M_PI

cnp.import_array()

cdef enum:
    BLOCK = 64


def wigner_points(const double complex[:, ::1] rho, const double complex[::1] alphas):
    """Wigner function of ``rho`` at each complex point in ``alphas``.

    Normalization: vacuum peaks at 2/pi, integral over d(Re a) d(Im a) is 1.
    """
    cdef Py_ssize_t dim = rho.shape[0]
    cdef Py_ssize_t npts = alphas.shape[0]
    cdef Py_ssize_t start, nb, b, m, n
    cdef double sm, ism, isn, r_re, r_im, x, y
    cdef double[::1] sq = np.sqrt(np.arange(dim, dtype=np.float64))
    cdef double[::1] isq = np.zeros(dim, dtype=np.float64)
    cdef double[:, ::1] rr = np.ascontiguousarray(np.real(rho))
    cdef double[:, ::1] ri = np.ascontiguousarray(np.imag(rho))
    # rows of the recurrence, one column per point in the block
    cdef double[:, ::1] wlr = np.empty((dim, BLOCK), dtype=np.float64)
    cdef double[:, ::1] wli = np.empty((dim, BLOCK), dtype=np.float64)
    cdef double ar[BLOCK]
    cdef double ai[BLOCK]
    cdef double tr[BLOCK]
    cdef double ti[BLOCK]
    cdef double acc[BLOCK]
    cdef double t2r, t2i
    out = np.empty(npts, dtype=np.float64)
    cdef double[::1] res = out

    for n in range(1, dim):
        isq[n] = 1.0 / sq[n]

    with nogil:
        start = 0
        while start < npts:
            nb = npts - start
            if nb > BLOCK:
                nb = BLOCK
            for b in range(nb):
                ar[b] = 2.0 * alphas[start + b].real
                ai[b] = 2.0 * alphas[start + b].imag
                wlr[0, b] = exp(-0.5 * (ar[b] * ar[b] + ai[b] * ai[b])) / M_PI
                wli[0, b] = 0.0
                acc[b] = rr[0, 0] * wlr[0, b]
            for n in range(1, dim):
                isn = isq[n]
                r_re = 2.0 * rr[0, n]
                r_im = 2.0 * ri[0, n]
                for b in range(nb):
                    x = (ar[b] * wlr[n - 1, b] - ai[b] * wli[n - 1, b]) * isn
                    y = (ar[b] * wli[n - 1, b] + ai[b] * wlr[n - 1, b]) * isn
                    wlr[n, b] = x
                    wli[n, b] = y
                    acc[b] += r_re * x - r_im * y
            for m in range(1, dim):
                sm = sq[m]
                ism = isq[m]
                r_re = rr[m, m]
                r_im = ri[m, m]
                for b in range(nb):
                    tr[b] = wlr[m, b]
                    ti[b] = wli[m, b]
                    # (conj(2 alpha) * temp - sqrt(m) * wl[m-1]) / sqrt(m)
                    x = (ar[b] * tr[b] + ai[b] * ti[b] - sm * wlr[m - 1, b]) * ism
                    y = (ar[b] * ti[b] - ai[b] * tr[b] - sm * wli[m - 1, b]) * ism
                    wlr[m, b] = x
                    wli[m, b] = y
                    acc[b] += r_re * x - r_im * y
                for n in range(m + 1, dim):
                    isn = isq[n]
                    r_re = 2.0 * rr[m, n]
                    r_im = 2.0 * ri[m, n]
                    for b in range(nb):
                        t2r = (ar[b] * wlr[n - 1, b] - ai[b] * wli[n - 1, b] - sm * tr[b]) * isn
                        t2i = (ar[b] * wli[n - 1, b] + ai[b] * wlr[n - 1, b] - sm * ti[b]) * isn
                        tr[b] = wlr[n, b]
                        ti[b] = wli[n, b]
                        wlr[n, b] = t2r
                        wli[n, b] = t2i
                        acc[b] += r_re * t2r - r_im * t2i
            for b in range(nb):
                res[start + b] = 2.0 * acc[b]
            start += nb
    return out
