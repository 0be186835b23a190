# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``; same signatures."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, sin, fabs, M_PI

cnp.import_array()

cdef double TWO_PI = 2.0 * M_PI


cdef inline double _index(const double[::1] c, double f, double lam) nogil:
    cdef double l2 = lam * lam
    cdef double p1 = c[2] + c[8] * f
    cdef double p2 = c[4] + c[10] * f
    return sqrt(c[0] + c[6] * f
                + (c[1] + c[7] * f) / (l2 - p1 * p1)
                + (c[3] + c[9] * f) / (l2 - p2 * p2)
                - c[5] * l2)


cdef inline double _cond(const double[::1] ce, const double[::1] co,
                         double f, double x) nogil:
    return (_index(ce, f, x) - _index(co, f, x)) / x


def sellmeier_index(coeffs, double f, lam):
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    arr = np.asarray(lam, dtype=np.float64)
    flat = np.ascontiguousarray(arr.reshape(-1))
    cdef const double[::1] x = flat
    out = np.empty(flat.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(x.shape[0]):
            o[k] = _index(c, f, x[k])
    return out.reshape(arr.shape)


def condition_values(ce, co, double f, x):
    cdef const double[::1] e = np.ascontiguousarray(ce, dtype=np.float64)
    cdef const double[::1] o_ = np.ascontiguousarray(co, dtype=np.float64)
    arr = np.asarray(x, dtype=np.float64)
    flat = np.ascontiguousarray(arr.reshape(-1))
    cdef const double[::1] xs = flat
    out = np.empty(flat.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(xs.shape[0]):
            o[k] = _cond(e, o_, f, xs[k])
    return out.reshape(arr.shape)


def bisect_level(ce, co, double f, double level, double a, double b,
                 double xtol=1e-13, int maxiter=200):
    """Root of F(x) = level on [a, b]; requires a sign change over the bracket."""
    cdef const double[::1] e = np.ascontiguousarray(ce, dtype=np.float64)
    cdef const double[::1] o = np.ascontiguousarray(co, dtype=np.float64)
    cdef double ga = _cond(e, o, f, a) - level
    cdef double gb = _cond(e, o, f, b) - level
    cdef double m, gm
    cdef int it
    if ga == 0.0:
        return a
    if gb == 0.0:
        return b
    if ga * gb > 0.0:
        raise ValueError("bracket does not straddle the level")
    with nogil:
        for it in range(maxiter):
            m = 0.5 * (a + b)
            gm = _cond(e, o, f, m) - level
            if gm == 0.0:
                a = m
                b = m
                break
            if (gm < 0.0) == (ga < 0.0):
                a = m
                ga = gm
            else:
                b = m
            if b - a <= xtol:
                break
    return 0.5 * (a + b)


def pump_averaged_intensity(cp, cs, ci, double f, lam_s, lam_p, weights,
                            double k_qpm, double half_length,
                            double lam_lo, double lam_hi):
    """Weighted sum over pump nodes of sinc^2((dk - k_qpm) * half_length)."""
    cdef const double[::1] Cp = np.ascontiguousarray(cp, dtype=np.float64)
    cdef const double[::1] Cs = np.ascontiguousarray(cs, dtype=np.float64)
    cdef const double[::1] Ci = np.ascontiguousarray(ci, dtype=np.float64)
    cdef const double[::1] ls = np.ascontiguousarray(lam_s, dtype=np.float64)
    cdef const double[::1] lp = np.ascontiguousarray(lam_p, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    out = np.zeros(ls.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t j, k, nk = lp.shape[0]
    cdef double ks, inv_i, li, dk, x, s, acc
    # pump term depends only on the node
    kp_arr = np.empty(nk, dtype=np.float64)
    cdef double[::1] kp = kp_arr
    with nogil:
        for k in range(nk):
            kp[k] = _index(Cp, f, lp[k]) / lp[k]
        for j in range(ls.shape[0]):
            ks = _index(Cs, f, ls[j]) / ls[j]
            acc = 0.0
            for k in range(nk):
                inv_i = 1.0 / lp[k] - 1.0 / ls[j]
                if inv_i <= 0.0:
                    continue
                li = 1.0 / inv_i
                if li < lam_lo or li > lam_hi:
                    continue
                dk = TWO_PI * (kp[k] - ks - _index(Ci, f, li) / li)
                x = (dk - k_qpm) * half_length
                if fabs(x) < 1e-8:
                    s = 1.0
                else:
                    s = sin(x) / x
                acc += w[k] * s * s
            o[j] = acc
    return out
