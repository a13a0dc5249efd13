# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see horolab.kernels for the contract.

Operation order matches horolab.kernels._pure exactly on the
pure-arithmetic paths so the two backends agree bit-for-bit there.
"""

from libc.math cimport cos, sin, exp, log, floor, rint, M_PI

import numpy as np

BLOCK = 16384

cdef enum:
    BLOCK_C = 16384

cdef double SPLITTER = 134217729.0  # 2**27 + 1


def backend_name():
    return "ext"


cdef double _tree(double *buf) nogil:
    # balanced pairwise reduction; pair order matches the a[0::2] + a[1::2]
    # halving used by the NumPy backend
    cdef Py_ssize_t w = BLOCK_C
    cdef Py_ssize_t i
    while w > 1:
        w >>= 1
        for i in range(w):
            buf[i] = buf[2 * i] + buf[2 * i + 1]
    return buf[0]


def reduce_points(x, y, int max_iter=512):
    xa = np.array(x, dtype=np.float64, copy=True).ravel()
    ya = np.array(y, dtype=np.float64, copy=True).ravel()
    cdef double[::1] xs = xa
    cdef double[::1] ys = ya
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef int it, worst = 0
    cdef double xi, yi, r2
    with nogil:
        for i in range(n):
            xi = xs[i]
            yi = ys[i]
            it = 0
            while it < max_iter:
                xi -= rint(xi)
                r2 = xi * xi + yi * yi
                if r2 >= 1.0 - 1e-12:
                    break
                xi = -xi / r2
                yi = yi / r2
                it += 1
            xi -= rint(xi)
            xs[i] = xi
            ys[i] = yi
            if it > worst:
                worst = it
    return xa, ya, worst


def phases_power(double mult, double expo, Py_ssize_t n0, Py_ssize_t n1):
    out = np.empty(n1 - n0, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, m = n1 - n0
    cdef double p, dn
    with nogil:
        for i in range(m):
            dn = <double> (n0 + i)
            p = mult * exp(expo * log(dn))
            o[i] = p - floor(p)
    return out


def phases_quad(double bhi, double blo, Py_ssize_t n0, Py_ssize_t n1):
    out = np.empty(n1 - n0, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, m = n1 - n0
    cdef double dn, sq, p, c, ahi, alo, mhi, mlo, err, f, phi
    with nogil:
        for i in range(m):
            dn = <double> (n0 + i)
            sq = dn * dn
            p = bhi * sq
            c = SPLITTER * bhi
            ahi = c - (c - bhi)
            alo = bhi - ahi
            c = SPLITTER * sq
            mhi = c - (c - sq)
            mlo = sq - mhi
            err = ((ahi * mhi - p) + ahi * mlo + alo * mhi) + alo * mlo
            f = p - floor(p)
            phi = f + (err + blo * sq)
            o[i] = phi - floor(phi)
    return out


def times_quad(double alpha, Py_ssize_t n0, Py_ssize_t n1):
    out = np.empty(n1 - n0, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, m = n1 - n0
    cdef double dn
    with nogil:
        for i in range(m):
            dn = <double> (n0 + i)
            o[i] = alpha * (dn * dn)
    return out


def horo_images(double x, double h, t):
    ta = np.ascontiguousarray(t, dtype=np.float64)
    zx = np.empty_like(ta)
    zy = np.empty_like(ta)
    cdef double[::1] tv = ta
    cdef double[::1] xv = zx
    cdef double[::1] yv = zy
    cdef Py_ssize_t i, n = tv.shape[0]
    cdef double dr, di, d2, ti
    with nogil:
        for i in range(n):
            ti = tv[i]
            dr = x * ti + 1.0
            di = x * h
            d2 = dr * dr + di * di
            xv[i] = (ti * dr + h * di) / d2
            yv[i] = (h * dr - ti * di) / d2
    return zx, zy


def sum_block_cis(phi):
    pa = np.ascontiguousarray(phi, dtype=np.float64)
    cdef double[::1] p = pa
    cdef Py_ssize_t i, n = p.shape[0]
    cdef double ang, re, im
    cdef double bufr[BLOCK_C]
    cdef double bufi[BLOCK_C]
    if n > BLOCK_C:
        raise ValueError("block larger than the summation block size")
    with nogil:
        for i in range(n):
            ang = (2.0 * M_PI) * p[i]
            bufr[i] = cos(ang)
            bufi[i] = sin(ang)
        for i in range(n, BLOCK_C):
            bufr[i] = 0.0
            bufi[i] = 0.0
        re = _tree(bufr)
        im = _tree(bufi)
    return re, im


def sum_block_real(v):
    va = np.ascontiguousarray(v, dtype=np.float64)
    cdef double[::1] vv = va
    cdef Py_ssize_t i, n = vv.shape[0]
    cdef double r
    cdef double buf[BLOCK_C]
    if n > BLOCK_C:
        raise ValueError("block larger than the summation block size")
    with nogil:
        for i in range(n):
            buf[i] = vv[i]
        for i in range(n, BLOCK_C):
            buf[i] = 0.0
        r = _tree(buf)
    return r
