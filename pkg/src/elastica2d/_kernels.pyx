# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-triangle loop for the E_lambda energy and its gradient.

Complex products are spelled out in real arithmetic: C99 complex
multiplication goes through the slow inf/nan-safe library path.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def lambda_energy_grad(alpha_c, beta_c, const double[::1] area, const long long[:, ::1] tris,
                       pos_c, double lam, double eps, bint need_grad):
    cdef const double[:, ::1] al = alpha_c.view(np.float64)
    cdef const double[:, ::1] be = beta_c.view(np.float64)
    cdef const double[::1] p = pos_c.view(np.float64)
    cdef Py_ssize_t m = tris.shape[0]
    cdef Py_ssize_t t, k, v
    cdef double ar, ai, br, bi, wr, wi, s, vp, A, gar, gai
    cdef double eps2 = eps * eps
    dens = np.empty(m, dtype=np.float64)
    cdef double[::1] d = dens
    grad = np.zeros(2 * pos_c.shape[0] if need_grad else 0, dtype=np.float64)
    cdef double[::1] g = grad
    for t in range(m):
        ar = 0.0
        ai = 0.0
        br = 0.0
        bi = 0.0
        for k in range(3):
            v = tris[t, k]
            wr = p[2 * v]
            wi = p[2 * v + 1]
            ar = ar + al[t, 2 * k] * wr - al[t, 2 * k + 1] * wi
            ai = ai + al[t, 2 * k] * wi + al[t, 2 * k + 1] * wr
            br = br + be[t, 2 * k] * wr - be[t, 2 * k + 1] * wi
            bi = bi + be[t, 2 * k] * wi + be[t, 2 * k + 1] * wr
        s = sqrt(ar * ar + ai * ai + eps2)
        A = area[t]
        d[t] = A * 0.5 * (lam * (s - 1.0) * (s - 1.0) + br * br + bi * bi)
        if need_grad:
            vp = lam * (1.0 - 1.0 / s)
            gar = vp * ar
            gai = vp * ai
            for k in range(3):
                v = tris[t, k]
                # conj(alpha) * ga + conj(beta) * b
                g[2 * v] += A * (al[t, 2 * k] * gar + al[t, 2 * k + 1] * gai
                                 + be[t, 2 * k] * br + be[t, 2 * k + 1] * bi)
                g[2 * v + 1] += A * (al[t, 2 * k] * gai - al[t, 2 * k + 1] * gar
                                     + be[t, 2 * k] * bi - be[t, 2 * k + 1] * br)
    return dens, (grad.view(np.complex128) if need_grad else None)
