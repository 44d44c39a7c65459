# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot kernels (see ``_pykernels`` for the reference)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, fabs, copysign, M_PI

cnp.import_array()

cdef double RESCALE = 1e150
cdef double LOG_RESCALE = log(1e150)
cdef double EXP_FLOOR = -700.0


def hermite_table(Py_ssize_t n_levels, q):
    cdef const double[::1] qv = np.ascontiguousarray(q, dtype=np.float64).ravel()
    cdef Py_ssize_t nq = qv.shape[0]
    out = np.empty((n_levels, nq), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double[::1] sq = np.sqrt(2.0 / np.arange(1, n_levels + 1, dtype=np.float64))
    cdef double[::1] sr = np.sqrt(np.arange(n_levels, dtype=np.float64) / np.arange(1, n_levels + 1))
    cdef Py_ssize_t j, n
    cdef double x, p, p_prev, p_next, logscale, scale
    cdef double start = M_PI ** -0.25
    with nogil:
        for j in range(nq):
            x = qv[j]
            p_prev = 0.0
            p = start
            logscale = -0.5 * x * x
            scale = exp(logscale) if logscale > EXP_FLOOR else 0.0
            for n in range(n_levels):
                if logscale > EXP_FLOOR:
                    o[n, j] = p * scale
                elif p != 0.0:
                    o[n, j] = copysign(exp(log(fabs(p)) + logscale), p)
                else:
                    o[n, j] = 0.0
                p_next = sq[n] * x * p - sr[n] * p_prev
                p_prev = p
                p = p_next
                if fabs(p) > RESCALE:
                    p /= RESCALE
                    p_prev /= RESCALE
                    logscale += LOG_RESCALE
                    scale = exp(logscale) if logscale > EXP_FLOOR else 0.0
    return out


def pair_sum(wa, wb, a, b):
    cdef const double[::1] va = np.ascontiguousarray(wa, dtype=np.float64)
    cdef const double[::1] vb = np.ascontiguousarray(wb, dtype=np.float64)
    cdef const double complex[:, ::1] ma = np.ascontiguousarray(a, dtype=np.complex128)
    cdef const double complex[:, ::1] mb = np.ascontiguousarray(b, dtype=np.complex128)
    cdef Py_ssize_t i, j, ni = ma.shape[0], nj = ma.shape[1]
    if mb.shape[0] != ni or mb.shape[1] != nj or va.shape[0] != ni or vb.shape[0] != nj:
        raise ValueError("pair_sum: incompatible shapes")
    cdef double complex total = 0.0, row
    with nogil:
        for i in range(ni):
            if va[i] == 0.0:
                continue
            row = 0.0
            for j in range(nj):
                row = row + vb[j] * ma[i, j] * mb[i, j]
            total = total + va[i] * row
    return complex(total)


cdef inline double _dot3(double* a, double* b) noexcept nogil:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


cdef inline void _apply(const double[:, ::1] k, bint transpose, double* v, double* out) noexcept nogil:
    cdef int i
    for i in range(3):
        if transpose:
            out[i] = k[0, i] * v[0] + k[1, i] * v[1] + k[2, i] * v[2]
        else:
            out[i] = k[i, 0] * v[0] + k[i, 1] * v[1] + k[i, 2] * v[2]


cdef inline void _set_unit(double* src, double* dst) noexcept nogil:
    cdef double nrm = sqrt(_dot3(src, src))
    if nrm > 0.0:
        dst[0] = src[0] / nrm
        dst[1] = src[1] / nrm
        dst[2] = src[2] / nrm


cdef inline double _value(const double[:, ::1] k, double* n, double* n2, double* m, double* m2) noexcept nogil:
    cdef double s[3]
    cdef double d[3]
    cdef double ks[3]
    cdef double kd[3]
    cdef int i
    for i in range(3):
        s[i] = m[i] + m2[i]
        d[i] = m[i] - m2[i]
    _apply(k, False, s, ks)
    _apply(k, False, d, kd)
    return _dot3(n, ks) + _dot3(n2, kd)


def chsh_ascent(k, starts, double tol=1e-15, Py_ssize_t max_iter=10000):
    cdef const double[:, ::1] kv = np.ascontiguousarray(k, dtype=np.float64)
    st = np.array(starts, dtype=np.float64, order="C", copy=True)
    cdef double[:, :, ::1] sv = st
    cdef Py_ssize_t nr = sv.shape[0], r, it
    values = np.empty(nr, dtype=np.float64)
    cdef double[::1] vals = values
    cdef double tmp[3]
    cdef double fld[3]
    cdef double old, val
    cdef int i
    with nogil:
        for r in range(nr):
            old = _value(kv, &sv[r, 0, 0], &sv[r, 1, 0], &sv[r, 2, 0], &sv[r, 3, 0])
            for it in range(max_iter):
                for i in range(3):
                    tmp[i] = sv[r, 2, i] + sv[r, 3, i]
                _apply(kv, False, tmp, fld)
                _set_unit(fld, &sv[r, 0, 0])
                for i in range(3):
                    tmp[i] = sv[r, 2, i] - sv[r, 3, i]
                _apply(kv, False, tmp, fld)
                _set_unit(fld, &sv[r, 1, 0])
                for i in range(3):
                    tmp[i] = sv[r, 0, i] + sv[r, 1, i]
                _apply(kv, True, tmp, fld)
                _set_unit(fld, &sv[r, 2, 0])
                for i in range(3):
                    tmp[i] = sv[r, 0, i] - sv[r, 1, i]
                _apply(kv, True, tmp, fld)
                _set_unit(fld, &sv[r, 3, 0])
                val = _value(kv, &sv[r, 0, 0], &sv[r, 1, 0], &sv[r, 2, 0], &sv[r, 3, 0])
                if val - old <= tol:
                    if val > old:
                        old = val
                    break
                old = val
            vals[r] = old
    return values, st
